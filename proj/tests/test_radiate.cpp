#include <iesc/errors.hpp>
#include <iesc/iesc.hpp>
#include <iesc/radiate.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace iesc;

namespace {

std::shared_ptr<const SurfaceMesh> point_mesh(const vec3& at, double weight) {
  auto m = std::make_shared<SurfaceMesh>();
  m->nodes = {at};
  m->normals = {vec3::UnitZ()};
  m->weights = {weight};
  m->n_theta = m->n_phi = 1;
  m->radius = 1.0;
  return m;
}

SurfaceCurrents random_currents(std::shared_ptr<const SurfaceMesh> mesh, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  SurfaceCurrents c(mesh);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const vec3 nn = mesh->normals[i];
    c.J[i] = tangential_project(cvec3({n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}), nn);
    c.M[i] = tangential_project(cvec3({n(rng), n(rng)}, {n(rng), n(rng)}, {n(rng), n(rng)}), nn) * eta0;
  }
  return c;
}

bool bitwise_equal(const FieldPair& a, const FieldPair& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.E[i] != b.E[i] || a.H[i] != b.H[i]) return false;
  return true;
}

}  // namespace

TEST_CASE("zero currents radiate nothing") {
  auto mesh = std::make_shared<const SurfaceMesh>(make_sphere_mesh(0.5, 10.0));
  const SurfaceCurrents c(mesh);
  const auto f = surface_field(c, Medium{}, Side::plus, SelfTermPolicy{});
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f.E[i] == cvec3::Zero());
    CHECK(f.H[i] == cvec3::Zero());
  }
}

TEST_CASE("single node against the Hertzian dipole") {
  const double w = 0.013;
  const cvec3 J(1.0, 0.0, 0.0);
  auto mesh = point_mesh({0.2, -0.1, 0.4}, w);
  SurfaceCurrents c(mesh);
  c.J[0] = J;
  const double R = 50.0 / k0;
  for (const vec3& dir : {vec3(0, 1, 0), vec3(0, 0, 1), vec3(1, 1, 1).normalized(), vec3(0.2, 0.9, -0.3).normalized()}) {
    const vec3 obs = mesh->nodes[0] + R * dir;
    for (bool det : {true, false}) {
      const auto f = radiate(c, Medium{}, std::vector<vec3>{obs}, SelfTermPolicy{}, RadiateOptions{det, 1});
      const auto ref = oracle::hertzian_dipole(w * J[0], vec3::UnitX(), obs - mesh->nodes[0], k0, eta0);
      CHECK((f.E[0] - ref.E[0]).norm() / ref.E[0].norm() < 1e-3);
      CHECK((f.H[0] - ref.H[0]).norm() / ref.H[0].norm() < 1e-3);
      CHECK((f.E[0] - ref.E[0]).norm() / ref.E[0].norm() < 1e-12);
    }
  }
}

TEST_CASE("magnetic node is the dual of an electric node") {
  auto mesh = point_mesh({0, 0, 0}, 1.0);
  SurfaceCurrents e(mesh), m(mesh);
  e.J[0] = {0.3, cplx(0, 1), 0.0};
  m.M[0] = e.J[0] * eta0;
  const std::vector<vec3> obs{{1.1, 0.3, -2.0}, {0.0, 3.0, 0.5}};
  const auto fe = radiate(e, Medium{}, obs, SelfTermPolicy{});
  const auto fm = radiate(m, Medium{}, obs, SelfTermPolicy{});
  // J -> M / eta maps (E, H) -> (-eta H, E / eta)
  for (std::size_t i = 0; i < obs.size(); ++i) {
    CHECK((fm.E[i] + eta0 * fe.H[i]).norm() / fm.E[i].norm() < 1e-12);
    CHECK((fm.H[i] - fe.E[i] / eta0).norm() / fm.H[i].norm() < 1e-12);
  }
}

TEST_CASE("linearity and superposition") {
  auto mesh = std::make_shared<const SurfaceMesh>(make_sphere_mesh(0.6, 10.0));
  const auto a = random_currents(mesh, 1), b = random_currents(mesh, 2);
  SurfaceCurrents sum(mesh), scaled(mesh);
  const cplx alpha{-1.7, 0.4};
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum.J[i] = a.J[i] + b.J[i];
    sum.M[i] = a.M[i] + b.M[i];
    scaled.J[i] = alpha * a.J[i];
    scaled.M[i] = alpha * a.M[i];
  }
  const Medium med(cplx(2.0, 0.0));
  const auto fa = surface_field(a, med, Side::minus, SelfTermPolicy{});
  const auto fb = surface_field(b, med, Side::minus, SelfTermPolicy{});
  const auto fs = surface_field(sum, med, Side::minus, SelfTermPolicy{});
  const auto fx = surface_field(scaled, med, Side::minus, SelfTermPolicy{});
  std::vector<cvec3> sab(fa.size()), afa(fa.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    sab[i] = fa.E[i] + fb.E[i];
    afa[i] = alpha * fa.E[i];
  }
  CHECK(oracle::rel_diff(fs.E, sab) < 1e-12);
  CHECK(oracle::rel_diff(fx.E, afa) < 1e-12);
}

TEST_CASE("point-to-point reciprocity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int checked = 0;
  while (checked < 20) {
    const vec3 p(u(rng), u(rng), u(rng)), q(u(rng), u(rng), u(rng));
    if ((p - q).norm() < 1.0) continue;
    ++checked;
    for (int a = 0; a < 3; ++a) {
      SurfaceCurrents sq(point_mesh(q, 1.0));
      sq.J[0][a] = 1.0;
      const cvec3 e_at_p = radiate(sq, Medium{}, std::vector<vec3>{p}, SelfTermPolicy{}).E[0];
      for (int b = 0; b < 3; ++b) {
        SurfaceCurrents sp(point_mesh(p, 1.0));
        sp.J[0][b] = 1.0;
        const cplx back = radiate(sp, Medium{}, std::vector<vec3>{q}, SelfTermPolicy{}).E[0][a];
        const double scale = e_at_p.norm();
        CHECK(std::abs(e_at_p[b] - back) < 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("deterministic summation is bitwise stable across runs and thread counts") {
  auto mesh = std::make_shared<const SurfaceMesh>(make_sphere_mesh(0.8, 10.0));
  const auto c = random_currents(mesh, 5);
  const auto obs = offset_points(*mesh, Side::plus, 0.05);
  const auto a = radiate(c, Medium{}, obs, SelfTermPolicy{}, {true, 1});
  const auto b = radiate(c, Medium{}, obs, SelfTermPolicy{}, {true, 1});
  const auto t = radiate(c, Medium{}, obs, SelfTermPolicy{}, {true, 3});
  CHECK(bitwise_equal(a, b));
  CHECK(bitwise_equal(a, t));
  const auto fast = radiate(c, Medium{}, obs, SelfTermPolicy{}, {false, 2});
  CHECK(oracle::rel_diff(fast.E, a.E) < 1e-12);
  CHECK(oracle::rel_diff(fast.H, a.H) < 1e-12);
}

TEST_CASE("lossy medium path agrees with the lossless kernel in the lossless limit") {
  auto mesh = std::make_shared<const SurfaceMesh>(make_sphere_mesh(0.5, 10.0));
  const auto c = random_currents(mesh, 9);
  const auto obs = offset_points(*mesh, Side::minus, 0.05);
  const auto a = radiate(c, Medium(cplx(2.0, 0.0)), obs, SelfTermPolicy{});
  const auto b = radiate(c, Medium(cplx(2.0, -1e-13)), obs, SelfTermPolicy{});
  CHECK(oracle::rel_diff(b.E, a.E) < 1e-9);
  CHECK(oracle::rel_diff(b.H, a.H) < 1e-9);
}

TEST_CASE("self-term handling") {
  auto mesh = std::make_shared<const SurfaceMesh>(make_sphere_mesh(0.5, 10.0));
  const auto c = random_currents(mesh, 4);
  CHECK_THROWS_AS(radiate(c, Medium{}, mesh->nodes, SelfTermPolicy{}), singularity_error);
  SelfTermPolicy ex;
  ex.mode = SelfTermMode::exclude_self;
  const auto f = surface_field(c, Medium{}, Side::plus, ex);
  CHECK(f.size() == mesh->size());
  for (const auto& e : f.E) CHECK(e.allFinite());
  SelfTermPolicy bad;
  bad.offset = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SelfTermPolicy{};
  bad.subdivision = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("near-cell refinement converges to the fine-mesh field") {
  auto mesh = std::make_shared<const SurfaceMesh>(make_sphere_mesh(0.5, 10.0));
  SurfaceCurrents c(mesh);
  for (std::size_t i = 0; i < c.size(); ++i) c.J[i] = tangential_project(cvec3(1, 0, 0), mesh->normals[i]);
  const auto obs = offset_points(*mesh, Side::plus, 0.05);
  SelfTermPolicy pol;
  pol.near_radius = 0.25;
  pol.subdivision = 8;
  const auto refined = radiate(c, Medium{}, obs, pol);
  const auto plain = radiate(c, Medium{}, obs, SelfTermPolicy{});
  // a smooth current on a much finer grid, sampled back at the coarse nodes
  auto fine_mesh = std::make_shared<const SurfaceMesh>(make_sphere_mesh(0.5, 80.0));
  SurfaceCurrents fine(fine_mesh);
  for (std::size_t i = 0; i < fine.size(); ++i) fine.J[i] = tangential_project(cvec3(1, 0, 0), fine_mesh->normals[i]);
  const auto ref = radiate(fine, Medium{}, obs, SelfTermPolicy{});
  CHECK(oracle::rel_diff(refined.E, ref.E) < oracle::rel_diff(plain.E, ref.E));
}

TEST_CASE("deviation") {
  FieldPair i(2), p(2), m(2);
  i.E[0] = {1, 0, 0};
  p.E[0] = m.E[0] = {0, 1, 0};
  p.E[1] = m.E[1] = {0.3, cplx(0, 2), -1.0};
  p.H[1] = {1, 2, 3};
  const auto d = deviation(i, p, m);
  CHECK(d.E[0] == cvec3(1, 0, 0));
  CHECK(d.E[1] == cvec3::Zero());
  CHECK(d.H[1] == cvec3(1, 2, 3));
  CHECK_THROWS_AS(deviation(i, p, FieldPair(3)), std::invalid_argument);
}
