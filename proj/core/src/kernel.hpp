#pragma once

#include <iesc/types.hpp>

#include <array>
#include <cstddef>
#include <vector>

namespace iesc::detail {

/// Sources in structure-of-arrays form for the vectorized pair kernel.
struct SourceArrays {
  std::vector<double> x, y, z, w;
  std::array<std::vector<double>, 3> jr, ji, mr, mi;

  std::size_t size() const { return x.size(); }
  void resize(std::size_t n);
  void set(std::size_t i, const vec3& pos, double weight, const cvec3& J, const cvec3& M);
};

/// Accumulator layout: E_c at [2c, 2c+1], H_c at [6+2c, 7+2c] (re, im).
using Accum = std::array<double, 12>;

inline constexpr std::size_t kernel_batch = 256;

/// Adds sources [begin, end) whose squared distance to obs exceeds skip_r2,
/// in index order. scratch must hold 12 * kernel_batch doubles.
void accumulate_ordered(const SourceArrays& s, std::size_t begin, std::size_t end, const vec3& obs, double k,
                        double eta, double skip_r2, Accum& acc, double* scratch);

/// Same sum with a vectorized reduction; the order of additions is unspecified.
void accumulate_fast(const SourceArrays& s, std::size_t begin, std::size_t end, const vec3& obs, double k,
                     double eta, double skip_r2, Accum& acc);

}  // namespace iesc::detail
