#pragma once

#include <iesc/types.hpp>

#include <Eigen/Core>

namespace iesc {

/// Homogeneous isotropic medium. k = k0 sqrt(mu eps), eta = eta0 sqrt(mu / eps).
struct Medium {
  cplx eps_rel{1.0, 0.0};
  double mu_rel = 1.0;

  Medium() = default;
  Medium(cplx eps, double mu = 1.0);

  cplx wavenumber() const;
  cplx impedance() const;
  bool lossless() const { return eps_rel.imag() == 0.0; }

  static Medium vacuum() { return Medium{}; }
};

/// exp(-j k R) / (4 pi R). Throws singularity_error for R <= 0.
cplx scalar_green(cplx k, double R);

/// Gradient of g with respect to the observation point.
cvec3 grad_green(cplx k, const vec3& obs, const vec3& src);

using cmat3 = Eigen::Matrix3cd;

struct DyadSample {
  cmat3 EJ;  ///< E from J: -j w mu (I + grad grad / k^2) g
  cmat3 EM;  ///< E from M: -grad g x
  cmat3 HJ;  ///< H from J: grad g x
  cmat3 HM;  ///< H from M: -j w eps (I + grad grad / k^2) g
};

/// All four free-space dyads for one (obs, src) pair, closed form.
DyadSample dyads(const Medium& medium, const vec3& obs, const vec3& src);

/// (I + grad grad / k^2) g.
cmat3 dyadic_core(cplx k, const vec3& obs, const vec3& src);

}  // namespace iesc
