#include <iesc/errors.hpp>
#include <iesc/mie_oracle.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace iesc;

namespace {

std::vector<double> degrees(int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = pi * i / (n - 1);
  return t;
}

}  // namespace

TEST_CASE("Rayleigh limit") {
  const double x = 0.01;
  const cplx m = std::sqrt(cplx(2.0, 0.0));
  const auto s = mie_coefficients(x, m);
  const cplx expected = cplx(0.0, -2.0 * x * x * x / 3.0) * (m * m - 1.0) / (m * m + 2.0);
  CHECK(std::abs(s.a[0] - expected) / std::abs(expected) < 0.01);
  CHECK(std::abs(s.a[0].imag() + 1.667e-7) < 1e-10);
  CHECK(std::abs(s.b[0]) < 1e-3 * std::abs(s.a[0]));
}

TEST_CASE("published reference sphere") {
  // radius 0.525 at wavelength 0.6328, index 1.55
  const double x = 2.0 * pi * 0.525 / 0.6328;
  const auto s = mie_coefficients(x, cplx(1.55, 0.0));
  CHECK(std::abs(s.q_ext() - 3.10543) < 2e-5);
  CHECK(std::abs(s.q_sca() - 3.10543) < 2e-5);
}

TEST_CASE("truncation stability") {
  const double x = k0 * 3.0;
  const cplx m = std::sqrt(cplx(2.0, 0.0));
  const auto base = mie_coefficients(x, m);
  const auto more = mie_coefficients(x, m, 8);
  CHECK(base.n_max >= x + 4.0 * std::cbrt(x) + 2.0);
  CHECK(base.n_max == mie_truncation(x));
  CHECK(more.n_max == base.n_max + 8);
  CHECK(std::abs(base.q_sca() - more.q_sca()) / more.q_sca() < 1e-10);
  for (int n = 0; n < base.n_max; ++n) {
    CHECK(std::abs(base.a[n] - more.a[n]) <= 1e-12 * std::max(1e-300, std::abs(more.a[n])));
    CHECK(std::abs(base.b[n] - more.b[n]) <= 1e-12 * std::max(1e-300, std::abs(more.b[n])));
  }
}

TEST_CASE("optical theorem and energy balance") {
  for (double r : {0.2, 1.0, 3.0, 5.0, 20.0}) {
    const auto s = mie_coefficients(k0 * r, std::sqrt(cplx(2.0, 0.0)));
    CHECK(std::abs(q_ext_forward(s) - s.q_ext()) / s.q_ext() < 1e-8);
    CHECK(std::abs(s.q_ext() - s.q_sca()) / s.q_ext() < 1e-8);
  }
  for (cplx m : {cplx(1.5, 0.1), cplx(1.33, 1e-3), cplx(2.0, 1.0)}) {
    const auto s = mie_coefficients(4.0, m);
    CHECK(s.q_sca() >= 0.0);
    CHECK(s.q_sca() <= s.q_ext());
    CHECK(std::abs(q_ext_forward(s) - s.q_ext()) / s.q_ext() < 1e-8);
  }
}

TEST_CASE("forward amplitudes coincide") {
  const auto s = mie_coefficients(k0 * 2.0, cplx(1.4, 0.0));
  const auto f = mie_far_field(s, degrees(181));
  CHECK(f.S1[0] == f.S2[0]);
  // backscatter channels differ only in sign
  CHECK(std::abs(f.S1.back() + f.S2.back()) < 1e-10 * std::abs(f.S1.back()));
}

TEST_CASE("pattern difference") {
  const std::vector<double> a{1.0, 2.0, 0.5}, b{1.0, 1.0, 5.0};
  const auto self = pattern_difference_db(a, a);
  for (double d : self) CHECK(d == 0.0);
  const auto d = pattern_difference_db(a, b);
  CHECK(std::abs(d[1] - 3.0103) < 1e-4);
  CHECK(std::abs(d[2] + 10.0) < 1e-12);
  CHECK_THROWS_AS(pattern_difference_db(a, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(mie_coefficients(0.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(mie_coefficients(1.0, cplx(-1.5, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(mie_coefficients(2e4, 1.5), capacity_error);
}

TEST_CASE("far-field comparison of equivalent currents of a small sphere") {
  // Surface currents that radiate the field of the Rayleigh dipole induced in a small sphere.
  const double a = 0.02, eps = 2.0;
  const cplx il = cplx(0.0, k0 / eta0) * 4.0 * pi * a * a * a * (eps - 1.0) / (eps + 2.0);
  auto mesh = std::make_shared<const SurfaceMesh>(make_sphere_mesh(0.3, 30.0));
  SolveResult res;
  res.currents = SurfaceCurrents(mesh);
  for (std::size_t q = 0; q < mesh->size(); ++q) {
    const auto f = oracle::hertzian_dipole(il, vec3::UnitX(), mesh->nodes[q], k0, eta0);
    const vec3& n = mesh->normals[q];
    res.currents.J[q] = cross(n.cast<cplx>(), f.H[0]);
    res.currents.M[q] = cross(f.E[0], n.cast<cplx>());
  }
  res.history.status = SolveStatus::converged;
  const auto sol = mie_coefficients(k0 * a, std::sqrt(cplx(eps, 0.0)));
  const auto angles = degrees(37);
  const auto c = compare_far_fields(res, Medium::vacuum(), sol, angles);
  CHECK(std::abs(c.first_null - pi / 2.0) < 0.1);
  CHECK(c.forward_lobe_max_abs_db() < 0.1);
  for (std::size_t i = 0; i < angles.size(); ++i) CHECK(std::abs(c.diff_h_db[i]) < 0.1);

  res.history.status = SolveStatus::max_iters;
  CHECK_THROWS_AS(compare_far_fields(res, Medium::vacuum(), sol, angles), invalid_state_error);
}
