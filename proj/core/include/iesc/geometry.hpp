#pragma once

#include <iesc/types.hpp>

#include <cstddef>
#include <vector>

namespace iesc {

/// Quadrature nodes on a closed surface, laid out on a (theta, phi) grid.
/// Node (i, j) lives at index i * n_phi + j.
struct SurfaceMesh {
  std::vector<vec3> nodes;
  std::vector<vec3> normals;
  std::vector<double> weights;
  int n_theta = 0;
  int n_phi = 0;
  double radius = 0.0;

  std::size_t size() const { return nodes.size(); }
  double d_theta() const { return pi / n_theta; }
  double d_phi() const { return 2.0 * pi / n_phi; }
  double theta(int i) const { return (i + 0.5) * d_theta(); }
  double phi(int j) const { return j * d_phi(); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_phi + j; }
  double area() const;
};

/// Cell-centred (theta, phi) tensor grid on a sphere centred at the origin.
/// n_theta = ceil(pi R density), n_phi = ceil(2 pi R density).
SurfaceMesh make_sphere_mesh(double radius, double density);

/// Unit outward normal on the sphere at (theta, phi).
vec3 sphere_direction(double theta, double phi);

enum class Side { plus, minus };

/// nodes +/- offset * normal. Throws degenerate_offset_error when an inward
/// offset reaches the radius of curvature.
std::vector<vec3> offset_points(const SurfaceMesh& mesh, Side side, double offset);

}  // namespace iesc
