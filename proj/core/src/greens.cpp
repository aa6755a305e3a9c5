#include <iesc/errors.hpp>
#include <iesc/greens.hpp>

#include <cmath>
#include <stdexcept>

namespace iesc {

Medium::Medium(cplx eps, double mu) : eps_rel(eps), mu_rel(mu) {
  if (!(eps.real() > 0.0)) throw std::invalid_argument("eps_rel must have a positive real part");
  if (!(mu > 0.0)) throw std::invalid_argument("mu_rel must be positive");
}

cplx Medium::wavenumber() const { return k0 * std::sqrt(mu_rel * eps_rel); }

cplx Medium::impedance() const { return eta0 * std::sqrt(mu_rel / eps_rel); }

namespace {

constexpr cplx j{0.0, 1.0};

void check_separation(double R) {
  if (!(R > 0.0)) throw singularity_error("Green's function evaluated at zero separation");
}

}  // namespace

cplx scalar_green(cplx k, double R) {
  check_separation(R);
  return std::exp(-j * k * R) / (4.0 * pi * R);
}

cvec3 grad_green(cplx k, const vec3& obs, const vec3& src) {
  const vec3 d = obs - src;
  const double R = d.norm();
  const cplx g = scalar_green(k, R);
  return (-(1.0 + j * k * R) / R * g) * (d / R).cast<cplx>();
}

cmat3 dyadic_core(cplx k, const vec3& obs, const vec3& src) {
  const vec3 d = obs - src;
  const double R = d.norm();
  const cplx g = scalar_green(k, R);
  const cplx kR = k * R;
  const cplx a = 1.0 - (1.0 + j * kR) / (kR * kR);
  const cplx b = (3.0 + 3.0 * j * kR - kR * kR) / (kR * kR);
  const vec3 u = d / R;
  return g * (a * cmat3::Identity() + b * (u * u.transpose()).cast<cplx>());
}

namespace {

cmat3 cross_matrix(const cvec3& v) {
  cmat3 c;
  c << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return c;
}

}  // namespace

DyadSample dyads(const Medium& medium, const vec3& obs, const vec3& src) {
  const cplx k = medium.wavenumber();
  const cplx eta = medium.impedance();
  const cmat3 core = dyadic_core(k, obs, src);
  const cmat3 gx = cross_matrix(grad_green(k, obs, src));
  // omega mu = k eta and omega eps = k / eta in any medium.
  return DyadSample{-j * k * eta * core, -gx, gx, -j * (k / eta) * core};
}

}  // namespace iesc
