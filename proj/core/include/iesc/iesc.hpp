#pragma once

#include <iesc/geometry.hpp>
#include <iesc/greens.hpp>
#include <iesc/incident.hpp>
#include <iesc/radiate.hpp>

#include <array>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace iesc {

struct SolverConfig {
  int max_iters = 10;
  double tol = 1e-4;
  double relaxation = 1.0;
  /// +1 adds the correction, -1 subtracts it.
  int update_sign = 1;
  SelfTermPolicy self_policy{};
  bool record_maps = false;
  bool deterministic = true;
  unsigned threads = 0;

  void validate() const;
};

/// Deviation metrics of one pass, computed from the currents entering it.
struct IterationRecord {
  int iteration = 0;
  std::array<double, 3> max_abs_dJ{};
  std::array<double, 3> max_abs_dM{};
  /// Area-weighted RMS over the surface.
  double l2_dJ = 0.0;
  double l2_dM = 0.0;
  double wall_seconds = 0.0;
};

enum class SolveStatus { converged, max_iters, diverged };

struct ConvergenceHistory {
  std::vector<IterationRecord> records;
  SolveStatus status = SolveStatus::max_iters;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  /// max|dJ_x|, the stopping metric.
  double metric(std::size_t i) const { return records.at(i).max_abs_dJ[0]; }
};

struct DeviationMap {
  int iteration = 0;
  std::vector<cvec3> dJ;
  std::vector<cvec3> dM;
};

struct SolveResult {
  SurfaceCurrents currents;
  ConvergenceHistory history;
  std::vector<DeviationMap> maps;
  /// Currents of the pass with the smallest metric.
  SurfaceCurrents best;
};

/// Raised after three consecutive metric increases. Carries everything computed so far.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(const std::string& what, SolveResult partial)
      : std::runtime_error(what), partial_(std::make_shared<SolveResult>(std::move(partial))) {}
  const SolveResult& partial() const noexcept { return *partial_; }
  const ConvergenceHistory& history() const noexcept { return partial_->history; }

 private:
  std::shared_ptr<SolveResult> partial_;
};

/// J = n x H^i, M = E^i x n.
SurfaceCurrents initial_currents(std::shared_ptr<const SurfaceMesh> mesh, const FieldPair& inc);

/// v - n (n . v).
cvec3 tangential_project(const cvec3& v, const vec3& n);

struct CurrentCorrection {
  std::vector<cvec3> dJ;
  std::vector<cvec3> dM;
};

/// dJ = P dE / ((eta+ + eta-) / 2), dM = P dH / ((1/eta+ + 1/eta-) / 2), P = I - n n.
CurrentCorrection correction(const std::vector<cvec3>& dE, const std::vector<cvec3>& dH,
                             const std::vector<vec3>& normals, cplx eta_plus, cplx eta_minus);

/// cur += step * c. Nodes whose correction is exactly zero are left untouched, bit for bit.
void update_currents(SurfaceCurrents& cur, const CurrentCorrection& c, double step);

/// Called once per pass with its record and the currents that pass measured.
using IterationCallback = std::function<void(const IterationRecord&, const SurfaceCurrents&)>;

/// Runs the correction loop from the physical-optics starting currents.
SolveResult iterate(std::shared_ptr<const SurfaceMesh> mesh, const Source& source, const Medium& plus,
                    const Medium& minus, const SolverConfig& cfg, const IterationCallback& on_iteration = {});

}  // namespace iesc
