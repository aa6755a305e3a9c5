#pragma once

#include <iesc/greens.hpp>
#include <iesc/iesc.hpp>
#include <iesc/types.hpp>

#include <span>
#include <vector>

namespace iesc {

inline constexpr int mie_order_cap = 10000;

struct MieSolution {
  double size_parameter = 0.0;
  cplx refractive_index{1.0, 0.0};
  int n_max = 0;
  std::vector<cplx> a;  ///< a[n-1] = a_n
  std::vector<cplx> b;

  double q_sca() const;
  double q_ext() const;
};

/// Wiscombe truncation x + 4 x^(1/3) + 2, rounded up.
int mie_truncation(double x);

/// Lorenz-Mie coefficients. extra_terms inflates the truncation order.
MieSolution mie_coefficients(double x, cplx m, int extra_terms = 0);

struct ScatteringAmplitudes {
  std::vector<double> theta;
  std::vector<cplx> S1;  ///< perpendicular (H-plane) channel
  std::vector<cplx> S2;  ///< parallel (E-plane) channel
};

/// theta is the scattering angle from the forward direction, radians.
ScatteringAmplitudes mie_far_field(const MieSolution& sol, std::span<const double> angles);

/// Q_ext from the forward amplitude, 4 Re S(0) / x^2.
double q_ext_forward(const MieSolution& sol);

/// Per-angle 10 log10(a / b).
std::vector<double> pattern_difference_db(std::span<const double> a, std::span<const double> b);

struct FarFieldComparison {
  std::vector<double> theta;
  std::vector<double> iesc_e, mie_e;  ///< E-plane intensities, normalized as |S2|^2
  std::vector<double> iesc_h, mie_h;  ///< H-plane intensities, normalized as |S1|^2
  std::vector<double> diff_e_db, diff_h_db;
  /// First E-plane minimum of the Mie pattern, radians.
  double first_null = 0.0;

  /// Largest |diff| over both planes for theta below the first null.
  double forward_lobe_max_abs_db() const;
};

/// Far-zone scattered field of converged exterior currents versus Mie.
/// The incidence is along -z with x polarization. Throws invalid_state_error
/// unless the solve converged.
FarFieldComparison compare_far_fields(const SolveResult& result, const Medium& plus, const MieSolution& sol,
                                      std::span<const double> angles, const RadiateOptions& opts = {});

/// Scattered E at distance r along direction (theta from -z, phi), radiated by exterior currents.
std::vector<cvec3> far_field_samples(const SurfaceCurrents& currents, const Medium& plus,
                                     std::span<const double> theta, double phi, double r,
                                     const RadiateOptions& opts = {});

}  // namespace iesc
