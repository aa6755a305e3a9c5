#include <iesc/errors.hpp>
#include <iesc/mie_oracle.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace iesc {

int mie_truncation(double x) { return static_cast<int>(std::ceil(x + 4.0 * std::cbrt(x) + 2.0)); }

double MieSolution::q_sca() const {
  double s = 0.0;
  for (int n = 1; n <= n_max; ++n) s += (2.0 * n + 1.0) * (std::norm(a[n - 1]) + std::norm(b[n - 1]));
  return 2.0 * s / (size_parameter * size_parameter);
}

double MieSolution::q_ext() const {
  double s = 0.0;
  for (int n = 1; n <= n_max; ++n) s += (2.0 * n + 1.0) * (a[n - 1] + b[n - 1]).real();
  return 2.0 * s / (size_parameter * size_parameter);
}

MieSolution mie_coefficients(double x, cplx m, int extra_terms) {
  if (!(x > 0.0)) throw std::invalid_argument("mie_coefficients: size parameter must be positive");
  if (!(m.real() > 0.0)) throw std::invalid_argument("mie_coefficients: refractive index needs a positive real part");
  if (extra_terms < 0) throw std::invalid_argument("mie_coefficients: extra_terms must be non-negative");
  const double base = x + 4.0 * std::cbrt(x) + 2.0;
  if (!(base + extra_terms <= mie_order_cap)) throw capacity_error("mie_coefficients: truncation order exceeds 10^4");
  const int nmax = static_cast<int>(std::ceil(base)) + extra_terms;

  MieSolution sol;
  sol.size_parameter = x;
  sol.refractive_index = m;
  sol.n_max = nmax;
  sol.a.resize(nmax);
  sol.b.resize(nmax);

  // Logarithmic derivatives by downward recursion, for mx and for x.
  const cplx mx = m * x;
  const int nstart = static_cast<int>(std::max<double>(nmax, std::abs(mx))) + 16;
  std::vector<cplx> D(nstart + 1, cplx{0.0, 0.0});
  for (int n = nstart; n > 0; --n) D[n - 1] = double(n) / mx - 1.0 / (D[n] + double(n) / mx);
  std::vector<double> Dx(nstart + 1, 0.0);
  for (int n = nstart; n > 0; --n) Dx[n - 1] = n / x - 1.0 / (Dx[n] + n / x);

  double psi_prev = std::sin(x);  // psi_0
  double chi_prev2 = -std::sin(x), chi_prev = std::cos(x);  // chi_{-1}, chi_0
  cplx xi_prev{psi_prev, -chi_prev};
  for (int n = 1; n <= nmax; ++n) {
    const double psi = psi_prev / (Dx[n] + n / x);
    const double chi = (2.0 * n - 1.0) / x * chi_prev - chi_prev2;
    const cplx xi{psi, -chi};
    const cplx da = D[n] / m + double(n) / x;
    const cplx db = m * D[n] + double(n) / x;
    sol.a[n - 1] = (da * psi - psi_prev) / (da * xi - xi_prev);
    sol.b[n - 1] = (db * psi - psi_prev) / (db * xi - xi_prev);
    psi_prev = psi;
    chi_prev2 = chi_prev;
    chi_prev = chi;
    xi_prev = xi;
  }
  return sol;
}

ScatteringAmplitudes mie_far_field(const MieSolution& sol, std::span<const double> angles) {
  ScatteringAmplitudes out;
  out.theta.assign(angles.begin(), angles.end());
  out.S1.resize(angles.size());
  out.S2.resize(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const double mu = std::cos(angles[i]);
    double pi_prev = 0.0, pi_n = 1.0;
    cplx s1{0.0, 0.0}, s2{0.0, 0.0};
    for (int n = 1; n <= sol.n_max; ++n) {
      const double tau = n * mu * pi_n - (n + 1.0) * pi_prev;
      const double f = (2.0 * n + 1.0) / (n * (n + 1.0));
      s1 += f * (sol.a[n - 1] * pi_n + sol.b[n - 1] * tau);
      s2 += f * (sol.a[n - 1] * tau + sol.b[n - 1] * pi_n);
      const double pi_next = ((2.0 * n + 1.0) * mu * pi_n - (n + 1.0) * pi_prev) / n;
      pi_prev = pi_n;
      pi_n = pi_next;
    }
    out.S1[i] = s1;
    out.S2[i] = s2;
  }
  return out;
}

double q_ext_forward(const MieSolution& sol) {
  const double zero = 0.0;
  const auto s = mie_far_field(sol, std::span<const double>(&zero, 1));
  return 4.0 * s.S1[0].real() / (sol.size_parameter * sol.size_parameter);
}

std::vector<double> pattern_difference_db(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("pattern_difference_db: length mismatch");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = 10.0 * std::log10(a[i] / b[i]);
  return d;
}

double FarFieldComparison::forward_lobe_max_abs_db() const {
  double m = 0.0;
  for (std::size_t i = 0; i < theta.size() && theta[i] < first_null; ++i)
    m = std::max({m, std::abs(diff_e_db[i]), std::abs(diff_h_db[i])});
  return m;
}

std::vector<cvec3> far_field_samples(const SurfaceCurrents& currents, const Medium& plus,
                                     std::span<const double> theta, double phi, double r,
                                     const RadiateOptions& opts) {
  std::vector<vec3> pts(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double s = std::sin(theta[i]);
    pts[i] = r * vec3(s * std::cos(phi), s * std::sin(phi), -std::cos(theta[i]));
  }
  SelfTermPolicy far;
  const FieldPair f = radiate(currents, plus, pts, far, opts);
  return f.E;
}

FarFieldComparison compare_far_fields(const SolveResult& result, const Medium& plus, const MieSolution& sol,
                                      std::span<const double> angles, const RadiateOptions& opts) {
  if (result.history.status != SolveStatus::converged)
    throw invalid_state_error("compare_far_fields: currents come from a run that did not converge");
  constexpr double r = 1e5;
  const double k = plus.wavenumber().real();

  FarFieldComparison c;
  c.theta.assign(angles.begin(), angles.end());
  const auto mie = mie_far_field(sol, angles);
  const auto fe = far_field_samples(result.currents, plus, angles, 0.0, r, opts);
  const auto fh = far_field_samples(result.currents, plus, angles, 0.5 * pi, r, opts);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    c.mie_e.push_back(std::norm(mie.S2[i]));
    c.mie_h.push_back(std::norm(mie.S1[i]));
    c.iesc_e.push_back(k * k * r * r * fe[i].squaredNorm());
    c.iesc_h.push_back(k * k * r * r * fh[i].squaredNorm());
  }
  c.diff_e_db = pattern_difference_db(c.iesc_e, c.mie_e);
  c.diff_h_db = pattern_difference_db(c.iesc_h, c.mie_h);

  c.first_null = angles.empty() ? 0.0 : angles.back();
  for (std::size_t i = 1; i + 1 < angles.size(); ++i)
    if (c.mie_e[i] < c.mie_e[i - 1] && c.mie_e[i] <= c.mie_e[i + 1]) {
      c.first_null = angles[i];
      break;
    }
  return c;
}

}  // namespace iesc
