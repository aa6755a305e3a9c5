#pragma once

#include <iesc/types.hpp>

#include <span>
#include <variant>

namespace iesc {

/// E = pol * A * exp(-j k khat.r), H = khat x E / eta0.
struct PlaneWave {
  cplx amplitude{1.0, 0.0};
  vec3 propagation{0.0, 0.0, -1.0};
  vec3 polarization{1.0, 0.0, 0.0};
  double wavenumber = k0;

  void validate() const;
};

/// Paraxial fundamental-mode beam. The waist must be at least half a wavelength.
struct GaussianBeam {
  double waist = 2.0;
  vec3 focus{0.0, 0.0, 0.0};
  vec3 axis{0.0, 0.0, -1.0};
  vec3 polarization{1.0, 0.0, 0.0};
  cplx amplitude{1.0, 0.0};
  double wavenumber = k0;

  void validate() const;
  double wavelength() const { return 2.0 * pi / wavenumber; }
  double rayleigh_range() const { return pi * waist * waist / wavelength(); }
};

using Source = std::variant<PlaneWave, GaussianBeam>;

FieldPair plane_wave_field(const PlaneWave& pw, std::span<const vec3> points);
FieldPair gaussian_beam_field(const GaussianBeam& gb, std::span<const vec3> points);
FieldPair incident_field(const Source& src, std::span<const vec3> points);

}  // namespace iesc
