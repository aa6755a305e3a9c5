#include "kernel.hpp"

#include <iesc/errors.hpp>
#include <iesc/radiate.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace iesc {

using detail::Accum;
using detail::SourceArrays;

SurfaceCurrents::SurfaceCurrents(std::shared_ptr<const SurfaceMesh> m)
    : mesh(std::move(m)), J(mesh ? mesh->size() : 0, cvec3::Zero()), M(mesh ? mesh->size() : 0, cvec3::Zero()) {}

void SelfTermPolicy::validate() const {
  if (mode == SelfTermMode::offset_surfaces && !(offset > 0.0))
    throw std::invalid_argument("self-term offset must be positive");
  if (!(near_radius >= 0.0)) throw std::invalid_argument("near radius must be non-negative");
  if (subdivision < 1) throw std::invalid_argument("subdivision must be at least 1");
}

namespace {

constexpr double coincident_r2 = 1e-18;

// Scalar path for lossy media, where k and eta are complex.
void accumulate_generic(const SourceArrays& s, std::size_t begin, std::size_t end, const vec3& obs, cplx k, cplx eta,
                        double skip_r2, Accum& acc) {
  constexpr cplx j{0.0, 1.0};
  cvec3 E = cvec3::Zero(), H = cvec3::Zero();
  for (std::size_t t = begin; t < end; ++t) {
    const vec3 d = obs - vec3(s.x[t], s.y[t], s.z[t]);
    const double R2 = d.squaredNorm();
    if (!(R2 > skip_r2)) continue;
    const double R = std::sqrt(R2);
    const vec3 u = d / R;
    const cplx kR = k * R;
    const cplx g = s.w[t] * std::exp(-j * kR) / (4.0 * pi * R);
    const cplx A = g * (1.0 - (1.0 + j * kR) / (kR * kR));
    const cplx B = g * (3.0 + 3.0 * j * kR - kR * kR) / (kR * kR);
    const cplx C = g * (1.0 + j * kR) / R;
    cvec3 J, M;
    for (int c = 0; c < 3; ++c) {
      J[c] = {s.jr[c][t], s.ji[c][t]};
      M[c] = {s.mr[c][t], s.mi[c][t]};
    }
    const cvec3 uc = u.cast<cplx>();
    E += -j * k * eta * (A * J + B * uc * uc.dot(J)) + C * cross(uc, M);
    H += -j * (k / eta) * (A * M + B * uc * uc.dot(M)) - C * cross(uc, J);
  }
  for (int c = 0; c < 3; ++c) {
    acc[2 * c] += E[c].real();
    acc[2 * c + 1] += E[c].imag();
    acc[6 + 2 * c] += H[c].real();
    acc[7 + 2 * c] += H[c].imag();
  }
}

cvec3 bilinear(const SurfaceMesh& m, const std::vector<cvec3>& f, double theta, double phi) {
  double u = theta / m.d_theta() - 0.5;
  int i0 = static_cast<int>(std::floor(u));
  double fu = u - i0;
  if (i0 < 0) {
    i0 = 0;
    fu = 0.0;
  }
  if (i0 >= m.n_theta - 1) {
    i0 = std::max(0, m.n_theta - 2);
    fu = m.n_theta > 1 ? 1.0 : 0.0;
  }
  const int i1 = std::min(i0 + 1, m.n_theta - 1);
  double v = std::fmod(phi, 2.0 * pi);
  if (v < 0.0) v += 2.0 * pi;
  v /= m.d_phi();
  int j0 = static_cast<int>(std::floor(v));
  const double fv = v - j0;
  j0 %= m.n_phi;
  const int j1 = (j0 + 1) % m.n_phi;
  return (1.0 - fu) * ((1.0 - fv) * f[m.index(i0, j0)] + fv * f[m.index(i0, j1)]) +
         fu * ((1.0 - fv) * f[m.index(i1, j0)] + fv * f[m.index(i1, j1)]);
}

// Replaces node q by s x s sub-cells with interpolated, re-projected currents.
void fill_subcells(const SurfaceCurrents& cur, std::size_t q, int s, SourceArrays& out, std::size_t at) {
  const SurfaceMesh& m = *cur.mesh;
  const int i = static_cast<int>(q / m.n_phi);
  const int jj = static_cast<int>(q % m.n_phi);
  const double dt = m.d_theta() / s, dp = m.d_phi() / s;
  const double t0 = i * m.d_theta(), p0 = (jj - 0.5) * m.d_phi();
  for (int a = 0; a < s; ++a) {
    const double t = t0 + (a + 0.5) * dt;
    const double w = m.radius * m.radius * std::sin(t) * dt * dp;
    for (int b = 0; b < s; ++b) {
      const double p = p0 + (b + 0.5) * dp;
      const vec3 n = sphere_direction(t, p);
      const cvec3 nc = n.cast<cplx>();
      cvec3 J = bilinear(m, cur.J, t, p);
      cvec3 M = bilinear(m, cur.M, t, p);
      J -= nc * nc.dot(J);
      M -= nc * nc.dot(M);
      out.set(at++, m.radius * n, w, J, M);
    }
  }
}

unsigned worker_count(unsigned requested, std::size_t work) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, work / 64)));
}

}  // namespace

FieldPair radiate(const SurfaceCurrents& currents, const Medium& medium, std::span<const vec3> obs,
                  const SelfTermPolicy& policy, const RadiateOptions& opts) {
  policy.validate();
  if (currents.J.size() != currents.M.size()) throw std::invalid_argument("radiate: J and M lengths differ");
  if (!currents.mesh || currents.mesh->size() != currents.J.size())
    throw std::invalid_argument("radiate: currents do not match their mesh");

  const SurfaceMesh& mesh = *currents.mesh;
  const std::size_t n_src = mesh.size();
  SourceArrays src;
  src.resize(n_src);
  for (std::size_t q = 0; q < n_src; ++q) src.set(q, mesh.nodes[q], mesh.weights[q], currents.J[q], currents.M[q]);

  const bool exclude = policy.mode == SelfTermMode::exclude_self;
  const bool refine = policy.refines() && mesh.n_theta * mesh.n_phi == static_cast<int>(n_src) && mesh.radius > 0.0;
  const int sub = policy.subdivision;
  const double near_r2 = policy.near_radius * policy.near_radius;
  // Offset surfaces without refinement skip nothing, so a coincident point surfaces as a non-finite sum.
  const double far_skip = refine ? near_r2 : (exclude ? coincident_r2 : -1.0);

  const cplx kc = medium.wavenumber();
  const cplx etac = medium.impedance();
  const bool fast_kernel = medium.lossless();
  const double k = kc.real(), eta = etac.real();

  FieldPair out(obs.size());
  std::atomic<std::size_t> next{0};
  constexpr std::size_t chunk = 8;

  auto worker = [&] {
    std::vector<double> scratch(12 * detail::kernel_batch);
    SourceArrays near;
    std::vector<std::size_t> near_ids;
    auto sum = [&](const SourceArrays& s, std::size_t b, std::size_t e, const vec3& p, double skip, Accum& acc) {
      if (!fast_kernel)
        accumulate_generic(s, b, e, p, kc, etac, skip, acc);
      else if (opts.deterministic)
        detail::accumulate_ordered(s, b, e, p, k, eta, skip, acc, scratch.data());
      else
        detail::accumulate_fast(s, b, e, p, k, eta, skip, acc);
    };
    for (;;) {
      const std::size_t begin = next.fetch_add(chunk);
      if (begin >= obs.size()) break;
      const std::size_t end = std::min(obs.size(), begin + chunk);
      for (std::size_t o = begin; o < end; ++o) {
        const vec3& p = obs[o];
        Accum acc{};
        sum(src, 0, n_src, p, far_skip, acc);
        if (refine) {
          near_ids.clear();
          for (std::size_t q = 0; q < n_src; ++q) {
            const double d2 = (p - mesh.nodes[q]).squaredNorm();
            if (d2 <= near_r2 && !(exclude && d2 <= coincident_r2)) near_ids.push_back(q);
          }
          const std::size_t per = static_cast<std::size_t>(sub) * sub;
          near.resize(near_ids.size() * per);
          for (std::size_t a = 0; a < near_ids.size(); ++a) fill_subcells(currents, near_ids[a], sub, near, a * per);
          sum(near, 0, near.size(), p, exclude ? coincident_r2 : -1.0, acc);
        }
        for (int c = 0; c < 3; ++c) {
          out.E[o][c] = {acc[2 * c], acc[2 * c + 1]};
          out.H[o][c] = {acc[6 + 2 * c], acc[7 + 2 * c]};
        }
      }
    }
  };

  const unsigned nthreads = worker_count(opts.threads, obs.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t o = 0; o < obs.size(); ++o)
    if (!out.E[o].allFinite() || !out.H[o].allFinite())
      throw singularity_error("radiate: observation point coincides with a source node");
  return out;
}

FieldPair surface_field(const SurfaceCurrents& currents, const Medium& medium, Side side,
                        const SelfTermPolicy& policy, const RadiateOptions& opts) {
  policy.validate();
  if (!currents.mesh) throw std::invalid_argument("surface_field: currents carry no mesh");
  if (policy.mode == SelfTermMode::exclude_self) return radiate(currents, medium, currents.mesh->nodes, policy, opts);
  const auto pts = offset_points(*currents.mesh, side, policy.offset);
  return radiate(currents, medium, pts, policy, opts);
}

FieldPair deviation(const FieldPair& incident, const FieldPair& plus, const FieldPair& minus) {
  const std::size_t n = incident.size();
  if (incident.H.size() != n || plus.E.size() != n || plus.H.size() != n || minus.E.size() != n ||
      minus.H.size() != n)
    throw std::invalid_argument("deviation: field samples have mismatched lengths");
  FieldPair d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.E[i] = incident.E[i] + plus.E[i] - minus.E[i];
    d.H[i] = incident.H[i] + plus.H[i] - minus.H[i];
  }
  return d;
}

}  // namespace iesc
