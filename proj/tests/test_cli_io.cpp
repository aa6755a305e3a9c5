#include <iesc/cli_io.hpp>
#include <iesc/errors.hpp>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace iesc;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string key_of_failure(const std::string& text) {
  try {
    parse(text);
  } catch (const config_error& e) {
    return e.key();
  }
  return "";
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("iesc_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

// Every data cell parses completely as a finite number.
bool all_finite_numbers(const std::vector<std::string>& lines) {
  for (std::size_t i = 1; i < lines.size(); ++i)
    for (const auto& f : split(lines[i])) {
      if (f.empty()) continue;
      std::size_t used = 0;
      const double v = std::stod(f, &used);
      if (used != f.size() || !std::isfinite(v)) return false;
    }
  return true;
}

}  // namespace

TEST_CASE("minimal config takes documented defaults") {
  const auto c = parse("surface.radius = 3\nmedia.eps_rel_interior = 2\n");
  CHECK(c.radius == 3.0);
  CHECK(c.density == 10.0);
  CHECK(c.waist == 2.0);
  CHECK(c.solver.max_iters == 10);
  CHECK(c.solver.tol == 1e-4);
  CHECK(c.solver.self_policy.offset == 0.05);
  CHECK(c.source_kind == SourceKind::gaussian);
  CHECK(c.eps_rel_interior == cplx(2.0, 0.0));
  CHECK(std::find(c.defaulted.begin(), c.defaulted.end(), "surface.density") != c.defaulted.end());
  CHECK(std::find(c.defaulted.begin(), c.defaulted.end(), "surface.radius") == c.defaulted.end());
  const auto gb = std::get<GaussianBeam>(c.source());
  CHECK(gb.focus == vec3(0, 0, 3));
  CHECK(gb.axis == vec3(0, 0, -1));
}

TEST_CASE("section headers and inline values") {
  const auto c = parse(
      "[surface]\nradius = 1.5\n[source]\nkind = planewave\ndirection = 0, 0.6, -0.8\npolarization = x\n"
      "amplitude = (0,1)\n[media]\neps_rel_interior = (2.5,-0.1)\n[sweep]\nradii = [2, 3, 4, 5]\n");
  CHECK(c.radius == 1.5);
  CHECK(c.source_kind == SourceKind::planewave);
  CHECK((c.direction - vec3(0, 0.6, -0.8)).norm() < 1e-15);
  CHECK(c.amplitude == cplx(0, 1));
  CHECK(c.eps_rel_interior == cplx(2.5, -0.1));
  CHECK(c.sweep_radii == std::vector<double>{2, 3, 4, 5});
}

TEST_CASE("load errors name the key") {
  CHECK(key_of_failure("media.eps_rel_interior = -1\n") == "media.eps_rel_interior");
  CHECK(key_of_failure("surface.radius = abc\n") == "surface.radius");
  CHECK(key_of_failure("surface.radiuz = 3\n") == "surface.radiuz");
  CHECK(key_of_failure("surface.density = 2\n") == "surface.density");
  CHECK(key_of_failure("source.kind = laser\n") == "source.kind");
  CHECK(key_of_failure("source.polarization = z\n") == "source.polarization");
  CHECK(key_of_failure("source.waist = 0.2\n") == "source.waist");
  CHECK(key_of_failure("solver.relaxation = 0\n") == "solver.relaxation");
  CHECK(key_of_failure("solver.self_term = subtract\n") == "solver.self_term");
  CHECK(key_of_failure("sweep.radii = 2, x\n") == "sweep.radii");
  CHECK(key_of_failure("surface.radius = 3\nsurface.radius = 4\n") == "surface.radius");
  CHECK_THROWS_AS(load_config("/nonexistent/iesc.cfg"), config_error);
}

TEST_CASE("sweep expansion") {
  const auto c = parse("sweep.radii = 2, 3, 4, 5\noutputs.directory = out/sweep\n");
  const auto runs = expand_sweep(c);
  REQUIRE(runs.size() == 4);
  CHECK(runs[0].radius == 2.0);
  CHECK(runs[3].radius == 5.0);
  CHECK(runs[1].out_dir == fs::path("out/sweep/R3"));
  CHECK(runs[2].sweep_radii.empty());
  CHECK(expand_sweep(parse("surface.radius = 2\n")).size() == 1);
}

TEST_CASE("describe round-trips") {
  const auto c = parse("surface.radius = 2.5\nsource.kind = planewave\nsource.focus = 1, 2, 3\nsolver.self_term = exclude\n"
                       "solver.tol = 1e-6\nmedia.eps_rel_interior = (2,-0.5)\nbench.radii = 1, 2\n");
  const auto d = parse(describe(c));
  CHECK(describe(d) == describe(c));
  CHECK(d.solver.self_policy.mode == SelfTermMode::exclude_self);
  CHECK(d.focus_set);
}

TEST_CASE("run writes self-describing artifacts and reruns bitwise") {
  const fs::path dir = scratch_dir("run");
  auto c = parse("surface.radius = 0.5\nsolver.max_iters = 2\nsolver.record_maps = true\n");
  c.reproducible = true;
  c.out_dir = dir / "a";
  const int status = run_experiment(c);
  CHECK((status == 0 || status == 2));

  const auto conv = lines_of(dir / "a" / "convergence.csv");
  REQUIRE(conv.size() >= 2);
  CHECK(conv[0] ==
        "iteration,max_abs_dJx,max_abs_dJy,max_abs_dJz,max_abs_dMx,max_abs_dMy,max_abs_dMz,l2_dJ,l2_dM,wall_seconds");
  CHECK(all_finite_numbers(conv));
  CHECK(fs::exists(dir / "a" / "timing.csv"));
  CHECK(slurp(dir / "a" / "run.log").find("offset surfaces at 0.05") != std::string::npos);
  CHECK(slurp(dir / "a" / "run.log").find("default used: surface.density") != std::string::npos);

  const auto mesh = make_sphere_mesh(0.5, 10.0);
  const int iters = static_cast<int>(conv.size()) - 1;
  for (int k = 1; k <= iters; ++k)
    for (const char* comp : {"dJx", "dJy", "dJz", "dMx", "dMy", "dMz"}) {
      const auto rows = lines_of(dir / "a" / ("dev_iter" + std::to_string(k) + "_" + comp + ".csv"));
      CHECK(rows.size() == mesh.size() + 1);
      CHECK(rows[0] == "i_theta,i_phi,theta,phi,abs,re,im");
    }
  CHECK(all_finite_numbers(lines_of(dir / "a" / "dev_iter1_dMy.csv")));

  c.out_dir = dir / "b";
  run_experiment(c);
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    const auto name = e.path().filename();
    if (name == "timing.csv") continue;
    INFO(name.string());
    if (name == "run.log") {
      auto la = lines_of(e.path()), lb = lines_of(dir / "b" / name);
      std::erase_if(la, [](const std::string& l) { return l.find("outputs.directory") != std::string::npos; });
      std::erase_if(lb, [](const std::string& l) { return l.find("outputs.directory") != std::string::npos; });
      CHECK(la == lb);
      continue;
    }
    CHECK(slurp(e.path()) == slurp(dir / "b" / name));
  }
}

TEST_CASE("plane-wave run writes the far field") {
  const fs::path dir = scratch_dir("planewave");
  auto c = parse("surface.radius = 0.5\nsource.kind = planewave\nsolver.max_iters = 2\noutputs.farfield_angles = 91\n");
  c.out_dir = dir;
  run_experiment(c);
  const auto rows = lines_of(dir / "farfield.csv");
  REQUIRE(rows.size() == 92);
  CHECK(rows[0] == "theta_deg,iesc_e_plane,iesc_h_plane,mie_e_plane,mie_h_plane");
  CHECK(all_finite_numbers(rows));
}

TEST_CASE("bench rows") {
  auto c = parse("surface.radius = 0.5\n");
  const auto one = bench(c);
  CHECK(one.rows.size() == 1);
  CHECK(one.scaling_ratios.empty());
  CHECK(one.scaling_ok());
  c.bench_radii = {0.5, 0.75};
  const auto two = bench(c);
  REQUIRE(two.rows.size() == 2);
  REQUIRE(two.scaling_ratios.size() == 1);
  CHECK(two.rows[1].nodes > two.rows[0].nodes);
  CHECK(two.rows[0].max_metric_difference < 1e-10);
  const fs::path f = scratch_dir("bench") / "bench.csv";
  write_bench_csv(two, f);
  CHECK(lines_of(f).size() == 3);
}
