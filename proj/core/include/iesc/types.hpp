#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <vector>

namespace iesc {

using cplx = std::complex<double>;
using vec3 = Eigen::Vector3d;
using cvec3 = Eigen::Vector3cd;

inline constexpr double pi = std::numbers::pi;
/// Free-space wave impedance in ohms.
inline constexpr double eta0 = 376.730313668;
/// Free-space wavenumber; every length in the library is in units of λ.
inline constexpr double k0 = 2.0 * pi;

/// a x b. Eigen's cross() conjugates complex results, so complex vectors go through this.
inline cvec3 cross(const cvec3& a, const cvec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Electric and magnetic samples at a set of points.
struct FieldPair {
  std::vector<cvec3> E;
  std::vector<cvec3> H;

  FieldPair() = default;
  explicit FieldPair(std::size_t n) : E(n, cvec3::Zero()), H(n, cvec3::Zero()) {}
  std::size_t size() const { return E.size(); }
};

}  // namespace iesc
