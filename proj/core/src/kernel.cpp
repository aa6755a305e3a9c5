#include "kernel.hpp"

#include <cmath>

namespace iesc::detail {

void SourceArrays::resize(std::size_t n) {
  for (auto* v : {&x, &y, &z, &w}) v->assign(n, 0.0);
  for (int c = 0; c < 3; ++c)
    for (auto* v : {&jr[c], &ji[c], &mr[c], &mi[c]}) v->assign(n, 0.0);
}

void SourceArrays::set(std::size_t i, const vec3& pos, double weight, const cvec3& J, const cvec3& M) {
  x[i] = pos.x();
  y[i] = pos.y();
  z[i] = pos.z();
  w[i] = weight;
  for (int c = 0; c < 3; ++c) {
    jr[c][i] = J[c].real();
    ji[c][i] = J[c].imag();
    mr[c][i] = M[c].real();
    mi[c][i] = M[c].imag();
  }
}

namespace {

// Cody-Waite reduction by pi/2 followed by the fdlibm kernels on [-pi/4, pi/4].
// Branch-free so the pair loop vectorizes without a SIMD math library.
[[gnu::always_inline]] inline void sincos_kernel(double x, double& s, double& c) {
  constexpr double round_magic = 6755399441055744.0;
  const double q = (x * 0.63661977236758134308 + round_magic) - round_magic;
  double r = x - q * 1.57079632673412561417e+00;
  r -= q * 6.07710050630396597660e-11;
  r -= q * 2.02226624871116645580e-21;
  const double z = r * r;
  const double ps = r + r * z * (-1.66666666666666324348e-01 + z * (8.33333333332248946124e-03 +
                    z * (-1.98412698298579493134e-04 + z * (2.75573137070700676789e-06 +
                    z * (-2.50507602534068634195e-08 + z * 1.58969099521155010221e-10)))));
  const double pc = 1.0 - 0.5 * z + z * z * (4.16666666666666019037e-02 + z * (-1.38888888888741095749e-03 +
                    z * (2.48015872894767294178e-05 + z * (-2.75573143513906633035e-07 +
                    z * (2.08757232129817482790e-09 - z * 1.13596475577881948265e-11)))));
  // Quadrant selection by exact 0/1 and +-1 products; one addend is always zero.
  const int m = static_cast<int>(q);
  const double odd = static_cast<double>(m & 1);
  const double s0 = odd * pc + (1.0 - odd) * ps;
  const double c0 = odd * ps + (1.0 - odd) * pc;
  s = static_cast<double>(1 - (m & 2)) * s0;
  c = static_cast<double>(1 - ((m + 1) & 2)) * c0;
}

struct View {
  const double* __restrict x;
  const double* __restrict y;
  const double* __restrict z;
  const double* __restrict w;
  const double* __restrict jr[3];
  const double* __restrict ji[3];
  const double* __restrict mr[3];
  const double* __restrict mi[3];
};

View view_of(const SourceArrays& s) {
  View v{s.x.data(), s.y.data(), s.z.data(), s.w.data(), {}, {}, {}, {}};
  for (int c = 0; c < 3; ++c) {
    v.jr[c] = s.jr[c].data();
    v.ji[c] = s.ji[c].data();
    v.mr[c] = s.mr[c].data();
    v.mi[c] = s.mi[c].data();
  }
  return v;
}

struct Terms {
  double exr, exi, eyr, eyi, ezr, ezi;
  double hxr, hxi, hyr, hyi, hzr, hzi;
};

// Contribution of one source. Every term carries the masked scalar Green factor.
[[gnu::always_inline]] inline Terms pair_terms(const View& s, std::size_t t, double ox, double oy, double oz, double k,
                                               double ke, double kh, double skip_r2) {
  constexpr double inv4pi = 0.25 / pi;
  const double rx = ox - s.x[t], ry = oy - s.y[t], rz = oz - s.z[t];
  const double d2raw = rx * rx + ry * ry + rz * rz;
  const double keep = static_cast<double>(d2raw > skip_r2);
  const double R = std::sqrt(d2raw + (1.0 - keep));
  const double iR = 1.0 / R;
  const double ux = rx * iR, uy = ry * iR, uz = rz * iR;
  const double kR = k * R;
  double sn, cs;
  sincos_kernel(kR, sn, cs);
  const double wt = s.w[t];
  const double gs = keep * wt * iR * inv4pi;
  const double gr = cs * gs, gi = -sn * gs;
  const double inv = 1.0 / (kR * kR);
  // g (1 - (1 + j kR)/(kR)^2)
  const double ar = 1.0 - inv, ai = -kR * inv;
  const double Ar = gr * ar - gi * ai, Ai = gr * ai + gi * ar;
  // g (3 + 3 j kR - (kR)^2)/(kR)^2
  const double br = (3.0 - kR * kR) * inv, bi = 3.0 * kR * inv;
  const double Br = gr * br - gi * bi, Bi = gr * bi + gi * br;
  // g (1 + j kR)/R
  const double Cr = (gr - gi * kR) * iR, Ci = (gi + gr * kR) * iR;

  const double jxr = s.jr[0][t], jyr = s.jr[1][t], jzr = s.jr[2][t];
  const double jxi = s.ji[0][t], jyi = s.ji[1][t], jzi = s.ji[2][t];
  const double mxr = s.mr[0][t], myr = s.mr[1][t], mzr = s.mr[2][t];
  const double mxi = s.mi[0][t], myi = s.mi[1][t], mzi = s.mi[2][t];

  const double ujr = ux * jxr + uy * jyr + uz * jzr, uji = ux * jxi + uy * jyi + uz * jzi;
  const double umr = ux * mxr + uy * myr + uz * mzr, umi = ux * mxi + uy * myi + uz * mzi;
  const double bjr = Br * ujr - Bi * uji, bji = Br * uji + Bi * ujr;
  const double bmr = Br * umr - Bi * umi, bmi = Br * umi + Bi * umr;

  // u x M and u x J
  const double cmxr = uy * mzr - uz * myr, cmxi = uy * mzi - uz * myi;
  const double cmyr = uz * mxr - ux * mzr, cmyi = uz * mxi - ux * mzi;
  const double cmzr = ux * myr - uy * mxr, cmzi = ux * myi - uy * mxi;
  const double cjxr = uy * jzr - uz * jyr, cjxi = uy * jzi - uz * jyi;
  const double cjyr = uz * jxr - ux * jzr, cjyi = uz * jxi - ux * jzi;
  const double cjzr = ux * jyr - uy * jxr, cjzi = ux * jyi - uy * jxi;

  // E = -j k eta [A J + B u (u.J)] + C (u x M)
  // H = -j (k/eta) [A M + B u (u.M)] - C (u x J)
  Terms p;
#define IESC_E(jr, ji, u, cr, ci, outr, outi)       \
  {                                                 \
    const double tr = Ar * jr - Ai * ji + u * bjr;  \
    const double ti = Ar * ji + Ai * jr + u * bji;  \
    p.outr = ke * ti + Cr * cr - Ci * ci;           \
    p.outi = -ke * tr + Cr * ci + Ci * cr;          \
  }
#define IESC_H(mr, mi, u, cr, ci, outr, outi)       \
  {                                                 \
    const double tr = Ar * mr - Ai * mi + u * bmr;  \
    const double ti = Ar * mi + Ai * mr + u * bmi;  \
    p.outr = kh * ti - (Cr * cr - Ci * ci);         \
    p.outi = -kh * tr - (Cr * ci + Ci * cr);        \
  }
  IESC_E(jxr, jxi, ux, cmxr, cmxi, exr, exi)
  IESC_E(jyr, jyi, uy, cmyr, cmyi, eyr, eyi)
  IESC_E(jzr, jzi, uz, cmzr, cmzi, ezr, ezi)
  IESC_H(mxr, mxi, ux, cjxr, cjxi, hxr, hxi)
  IESC_H(myr, myi, uy, cjyr, cjyi, hyr, hyi)
  IESC_H(mzr, mzi, uz, cjzr, cjzi, hzr, hzi)
#undef IESC_E
#undef IESC_H
  return p;
}

}  // namespace

void accumulate_ordered(const SourceArrays& s, std::size_t begin, std::size_t end, const vec3& obs, double k,
                        double eta, double skip_r2, Accum& acc, double* scratch) {
  const double ox = obs.x(), oy = obs.y(), oz = obs.z();
  const double ke = k * eta, kh = k / eta;
  const View v = view_of(s);
  Accum a = acc;
  for (std::size_t b0 = begin; b0 < end; b0 += kernel_batch) {
    const std::size_t n = std::min(kernel_batch, end - b0);
    double* __restrict out = scratch;
#pragma omp simd
    for (std::size_t t = 0; t < n; ++t) {
      const Terms p = pair_terms(v, b0 + t, ox, oy, oz, k, ke, kh, skip_r2);
      out[t] = p.exr; out[n + t] = p.exi; out[2 * n + t] = p.eyr; out[3 * n + t] = p.eyi;
      out[4 * n + t] = p.ezr; out[5 * n + t] = p.ezi; out[6 * n + t] = p.hxr; out[7 * n + t] = p.hxi;
      out[8 * n + t] = p.hyr; out[9 * n + t] = p.hyi; out[10 * n + t] = p.hzr; out[11 * n + t] = p.hzi;
    }
    for (std::size_t t = 0; t < n; ++t)
      for (int c = 0; c < 12; ++c) a[c] += out[c * n + t];
  }
  acc = a;
}

void accumulate_fast(const SourceArrays& s, std::size_t begin, std::size_t end, const vec3& obs, double k,
                     double eta, double skip_r2, Accum& acc) {
  const double ox = obs.x(), oy = obs.y(), oz = obs.z();
  const double ke = k * eta, kh = k / eta;
  const View v = view_of(s);
  double e0 = 0, e1 = 0, e2 = 0, e3 = 0, e4 = 0, e5 = 0;
  double h0 = 0, h1 = 0, h2 = 0, h3 = 0, h4 = 0, h5 = 0;
#pragma omp simd reduction(+ : e0, e1, e2, e3, e4, e5, h0, h1, h2, h3, h4, h5)
  for (std::size_t t = begin; t < end; ++t) {
    const Terms p = pair_terms(v, t, ox, oy, oz, k, ke, kh, skip_r2);
    e0 += p.exr; e1 += p.exi; e2 += p.eyr; e3 += p.eyi; e4 += p.ezr; e5 += p.ezi;
    h0 += p.hxr; h1 += p.hxi; h2 += p.hyr; h3 += p.hyi; h4 += p.hzr; h5 += p.hzi;
  }
  acc[0] += e0; acc[1] += e1; acc[2] += e2; acc[3] += e3; acc[4] += e4; acc[5] += e5;
  acc[6] += h0; acc[7] += h1; acc[8] += h2; acc[9] += h3; acc[10] += h4; acc[11] += h5;
}

}  // namespace iesc::detail
