#include <iesc/errors.hpp>
#include <iesc/geometry.hpp>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace iesc {

double SurfaceMesh::area() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

vec3 sphere_direction(double theta, double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

SurfaceMesh make_sphere_mesh(double radius, double density) {
  if (!(radius > 0.0)) throw std::invalid_argument("make_sphere_mesh: radius must be positive");
  if (!(density >= 4.0)) throw std::invalid_argument("make_sphere_mesh: density must be at least 4");

  SurfaceMesh m;
  m.radius = radius;
  m.n_theta = static_cast<int>(std::ceil(pi * radius * density));
  m.n_phi = static_cast<int>(std::ceil(2.0 * pi * radius * density));
  const std::size_t n = static_cast<std::size_t>(m.n_theta) * m.n_phi;
  m.nodes.reserve(n);
  m.normals.reserve(n);
  m.weights.reserve(n);

  const double cell = radius * radius * m.d_theta() * m.d_phi();
  for (int i = 0; i < m.n_theta; ++i) {
    const double t = m.theta(i);
    const double w = cell * std::sin(t);
    for (int j = 0; j < m.n_phi; ++j) {
      vec3 nrm = sphere_direction(t, m.phi(j));
      m.normals.push_back(nrm);
      m.nodes.push_back(radius * nrm);
      m.weights.push_back(w);
    }
  }
  return m;
}

std::vector<vec3> offset_points(const SurfaceMesh& mesh, Side side, double offset) {
  if (!(offset > 0.0)) throw std::invalid_argument("offset_points: offset must be positive");
  if (side == Side::minus && offset >= mesh.radius)
    throw degenerate_offset_error("offset_points: inward offset reaches the radius of curvature");

  const double s = side == Side::plus ? offset : -offset;
  std::vector<vec3> out(mesh.size());
  for (std::size_t q = 0; q < mesh.size(); ++q) out[q] = mesh.nodes[q] + s * mesh.normals[q];
  return out;
}

}  // namespace iesc
