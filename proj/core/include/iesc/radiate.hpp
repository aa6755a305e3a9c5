#pragma once

#include <iesc/geometry.hpp>
#include <iesc/greens.hpp>
#include <iesc/types.hpp>

#include <memory>
#include <span>
#include <vector>

namespace iesc {

/// Electric and magnetic surface current densities sampled at mesh nodes.
struct SurfaceCurrents {
  std::shared_ptr<const SurfaceMesh> mesh;
  std::vector<cvec3> J;
  std::vector<cvec3> M;

  SurfaceCurrents() = default;
  explicit SurfaceCurrents(std::shared_ptr<const SurfaceMesh> m);
  std::size_t size() const { return J.size(); }
};

enum class SelfTermMode { offset_surfaces, exclude_self };

/// How observation points near or on the surface are handled.
///
/// offset_surfaces observes at nodes +/- offset * n. exclude_self observes on
/// the surface and drops the coincident node. Source cells closer than
/// near_radius to an observation point are split into subdivision^2
/// sub-cells with bilinearly interpolated currents; subdivision = 1 disables it.
struct SelfTermPolicy {
  SelfTermMode mode = SelfTermMode::offset_surfaces;
  double offset = 0.05;
  double near_radius = 0.0;
  int subdivision = 1;

  void validate() const;
  bool refines() const { return subdivision > 1 && near_radius > 0.0; }
};

struct RadiateOptions {
  /// Sum sources in node index order. Off selects a vectorized reduction.
  bool deterministic = true;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;
};

/// Sum over source nodes of w' [G_E^J J + G_E^M M] and likewise for H.
FieldPair radiate(const SurfaceCurrents& currents, const Medium& medium, std::span<const vec3> obs,
                  const SelfTermPolicy& policy, const RadiateOptions& opts = {});

/// Field radiated by the currents on one side of the surface, sampled at
/// the points the policy associates with each node.
FieldPair surface_field(const SurfaceCurrents& currents, const Medium& medium, Side side,
                        const SelfTermPolicy& policy, const RadiateOptions& opts = {});

/// dE = E^i + E^+ - E^-, same for H.
FieldPair deviation(const FieldPair& incident, const FieldPair& plus, const FieldPair& minus);

}  // namespace iesc
