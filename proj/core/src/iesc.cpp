#include <iesc/iesc.hpp>

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace iesc {

void SolverConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (!(relaxation > 0.0 && relaxation <= 1.0)) throw std::invalid_argument("relaxation must lie in (0, 1]");
  if (update_sign != 1 && update_sign != -1) throw std::invalid_argument("update_sign must be +1 or -1");
  self_policy.validate();
}

SurfaceCurrents initial_currents(std::shared_ptr<const SurfaceMesh> mesh, const FieldPair& inc) {
  if (!mesh) throw std::invalid_argument("initial_currents: no mesh");
  if (inc.E.size() != mesh->size() || inc.H.size() != mesh->size())
    throw std::invalid_argument("initial_currents: incident samples do not match the mesh");
  SurfaceCurrents cur(mesh);
  for (std::size_t q = 0; q < mesh->size(); ++q) {
    const cvec3 n = mesh->normals[q].cast<cplx>();
    cur.J[q] = cross(n, inc.H[q]);
    cur.M[q] = cross(inc.E[q], n);
  }
  return cur;
}

cvec3 tangential_project(const cvec3& v, const vec3& n) {
  const cvec3 nc = n.cast<cplx>();
  return v - nc * nc.dot(v);
}

CurrentCorrection correction(const std::vector<cvec3>& dE, const std::vector<cvec3>& dH,
                             const std::vector<vec3>& normals, cplx eta_plus, cplx eta_minus) {
  if (!(eta_plus.real() > 0.0) || !(eta_minus.real() > 0.0))
    throw std::invalid_argument("correction: impedances must be positive");
  if (dE.size() != normals.size() || dH.size() != normals.size())
    throw std::invalid_argument("correction: inputs have mismatched lengths");
  const cplx fj = 2.0 / (eta_plus + eta_minus);
  const cplx fm = 2.0 / (1.0 / eta_plus + 1.0 / eta_minus);
  CurrentCorrection c{std::vector<cvec3>(dE.size()), std::vector<cvec3>(dH.size())};
  for (std::size_t q = 0; q < normals.size(); ++q) {
    c.dJ[q] = fj * tangential_project(dE[q], normals[q]);
    c.dM[q] = fm * tangential_project(dH[q], normals[q]);
  }
  return c;
}

namespace {

IterationRecord measure(const CurrentCorrection& c, const SurfaceMesh& mesh) {
  IterationRecord r;
  double sj = 0.0, sm = 0.0;
  for (std::size_t q = 0; q < mesh.size(); ++q) {
    for (int k = 0; k < 3; ++k) {
      r.max_abs_dJ[k] = std::max(r.max_abs_dJ[k], std::abs(c.dJ[q][k]));
      r.max_abs_dM[k] = std::max(r.max_abs_dM[k], std::abs(c.dM[q][k]));
    }
    sj += mesh.weights[q] * c.dJ[q].squaredNorm();
    sm += mesh.weights[q] * c.dM[q].squaredNorm();
  }
  const double area = mesh.area();
  r.l2_dJ = std::sqrt(sj / area);
  r.l2_dM = std::sqrt(sm / area);
  return r;
}

}  // namespace

void update_currents(SurfaceCurrents& cur, const CurrentCorrection& c, double step) {
  if (c.dJ.size() != cur.size() || c.dM.size() != cur.size())
    throw std::invalid_argument("update_currents: correction does not match the currents");
  for (std::size_t q = 0; q < cur.size(); ++q) {
    if (!c.dJ[q].isZero(0.0)) cur.J[q] += step * c.dJ[q];
    if (!c.dM[q].isZero(0.0)) cur.M[q] += step * c.dM[q];
  }
}

SolveResult iterate(std::shared_ptr<const SurfaceMesh> mesh, const Source& source, const Medium& plus,
                    const Medium& minus, const SolverConfig& cfg, const IterationCallback& on_iteration) {
  cfg.validate();
  if (!mesh) throw std::invalid_argument("iterate: no mesh");

  const FieldPair inc = incident_field(source, mesh->nodes);
  SolveResult res;
  res.currents = initial_currents(mesh, inc);
  res.best = res.currents;
  const RadiateOptions ropts{cfg.deterministic, cfg.threads};
  const double step = cfg.update_sign * cfg.relaxation;

  double best_metric = INFINITY;
  int increases = 0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    const FieldPair ep = surface_field(res.currents, plus, Side::plus, cfg.self_policy, ropts);
    FieldPair em = surface_field(res.currents, minus, Side::minus, cfg.self_policy, ropts);
    // The interior field is radiated by the negated currents.
    for (std::size_t q = 0; q < em.size(); ++q) {
      em.E[q] = -em.E[q];
      em.H[q] = -em.H[q];
    }
    const FieldPair dev = deviation(inc, ep, em);
    const CurrentCorrection corr = correction(dev.E, dev.H, mesh->normals, plus.impedance(), minus.impedance());

    IterationRecord rec = measure(corr, *mesh);
    rec.iteration = it;
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.history.records.push_back(rec);
    if (cfg.record_maps) res.maps.push_back(DeviationMap{it, corr.dJ, corr.dM});
    if (on_iteration) on_iteration(rec, res.currents);

    const double m = rec.max_abs_dJ[0];
    if (m < best_metric) {
      best_metric = m;
      res.best = res.currents;
    }
    if (m == 0.0) {
      res.history.status = SolveStatus::converged;
      return res;
    }
    if (it > 1) {
      const double first = res.history.metric(0);
      const double prev = res.history.metric(res.history.size() - 2);
      const double reduction = (prev - m) / prev;
      increases = m > prev ? increases + 1 : 0;
      if (increases >= 3) {
        res.history.status = SolveStatus::diverged;
        throw divergence_error("iterate: deviation metric increased for 3 consecutive iterations", std::move(res));
      }
      if (m <= cfg.tol * first || (reduction >= 0.0 && reduction < cfg.tol)) {
        res.history.status = SolveStatus::converged;
        return res;
      }
    }
    if (it < cfg.max_iters) update_currents(res.currents, corr, step);
  }
  res.history.status = SolveStatus::max_iters;
  return res;
}

}  // namespace iesc
