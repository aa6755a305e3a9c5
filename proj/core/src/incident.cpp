#include <iesc/incident.hpp>

#include <cmath>
#include <stdexcept>

namespace iesc {

namespace {

constexpr double unit_tol = 1e-12;

void check_unit(const vec3& v, const char* what) {
  if (std::abs(v.norm() - 1.0) > unit_tol) throw std::invalid_argument(std::string(what) + " must be a unit vector");
}

}  // namespace

void PlaneWave::validate() const {
  check_unit(propagation, "plane wave propagation");
  check_unit(polarization, "plane wave polarization");
  if (std::abs(polarization.dot(propagation)) > unit_tol)
    throw std::invalid_argument("plane wave polarization must be transverse");
  if (!(wavenumber > 0.0)) throw std::invalid_argument("plane wave wavenumber must be positive");
}

void GaussianBeam::validate() const {
  if (!(wavenumber > 0.0)) throw std::invalid_argument("beam wavenumber must be positive");
  if (!(waist >= 0.5 * wavelength())) throw std::invalid_argument("beam waist below the paraxial limit of half a wavelength");
  check_unit(axis, "beam axis");
  check_unit(polarization, "beam polarization");
  if (std::abs(polarization.dot(axis)) > unit_tol) throw std::invalid_argument("beam polarization must be transverse");
}

FieldPair plane_wave_field(const PlaneWave& pw, std::span<const vec3> points) {
  pw.validate();
  FieldPair f(points.size());
  const cvec3 pol = pw.polarization.cast<cplx>();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double phase = pw.wavenumber * pw.propagation.dot(points[i]);
    const cplx a = pw.amplitude * std::polar(1.0, -phase);
    f.E[i] = a * pol;
    f.H[i] = cross(pw.propagation.cast<cplx>(), f.E[i]) / eta0;
  }
  return f;
}

FieldPair gaussian_beam_field(const GaussianBeam& gb, std::span<const vec3> points) {
  gb.validate();
  FieldPair f(points.size());
  const double k = gb.wavenumber;
  const double w0 = gb.waist;
  const double zr = gb.rayleigh_range();
  const cvec3 pol = gb.polarization.cast<cplx>();
  const cvec3 ax = gb.axis.cast<cplx>();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const vec3 d = points[i] - gb.focus;
    const double z = gb.axis.dot(d);
    const double rho2 = std::max(0.0, d.squaredNorm() - z * z);
    const double wz = w0 * std::sqrt(1.0 + (z / zr) * (z / zr));
    const double inv_rc = z / (z * z + zr * zr);
    const double gouy = std::atan(z / zr);
    const double phase = k * z + 0.5 * k * rho2 * inv_rc - gouy;
    const cplx a = gb.amplitude * (w0 / wz) * std::exp(-rho2 / (wz * wz)) * std::polar(1.0, -phase);
    f.E[i] = a * pol;
    f.H[i] = cross(ax, f.E[i]) / eta0;
  }
  return f;
}

FieldPair incident_field(const Source& src, std::span<const vec3> points) {
  return std::visit(
      [&](const auto& s) -> FieldPair {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, PlaneWave>)
          return plane_wave_field(s, points);
        else
          return gaussian_beam_field(s, points);
      },
      src);
}

}  // namespace iesc
