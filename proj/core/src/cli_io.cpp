#include <iesc/cli_io.hpp>
#include <iesc/errors.hpp>
#include <iesc/mie_oracle.hpp>

#include <boost/program_options.hpp>
#include <fmt/format.h>
#include <fmt/os.h>
#include <spdlog/sinks/basic_file_sink.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#ifndef IESC_VERSION
#define IESC_VERSION "unknown"
#endif

namespace iesc {

namespace po = boost::program_options;
namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t[]");
  const auto e = s.find_last_not_of(" \t[]");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(trim(text));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw config_error(key, "expected a comma-separated list of numbers, got '" + text + "'");
    out.push_back(v);
  }
  return out;
}

vec3 parse_vector(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "x" || t == "+x") return {1, 0, 0};
  if (t == "y" || t == "+y") return {0, 1, 0};
  if (t == "z" || t == "+z") return {0, 0, 1};
  if (t == "-x") return {-1, 0, 0};
  if (t == "-y") return {0, -1, 0};
  if (t == "-z") return {0, 0, -1};
  const auto v = parse_list(key, t);
  if (v.size() != 3) throw config_error(key, "expected three components or an axis name, got '" + text + "'");
  return {v[0], v[1], v[2]};
}

cplx parse_complex(const std::string& key, const std::string& text) {
  std::istringstream ss(trim(text));
  cplx z;
  if (!(ss >> z) || !(ss >> std::ws).eof()) throw config_error(key, "expected a number or (re,im), got '" + text + "'");
  return z;
}

std::string fmt_vec(const vec3& v) { return fmt::format("{}, {}, {}", v.x(), v.y(), v.z()); }

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt::format("{}", v[i]);
  return s;
}

std::string fmt_complex(cplx z) {
  return z.imag() == 0.0 ? fmt::format("{}", z.real()) : fmt::format("({},{})", z.real(), z.imag());
}

po::options_description config_schema() {
  po::options_description d;
  d.add_options()
      ("surface.radius", po::value<double>())
      ("surface.density", po::value<double>())
      ("source.kind", po::value<std::string>())
      ("source.waist", po::value<double>())
      ("source.polarization", po::value<std::string>())
      ("source.direction", po::value<std::string>())
      ("source.amplitude", po::value<std::string>())
      ("source.focus", po::value<std::string>())
      ("media.eps_rel_interior", po::value<std::string>())
      ("solver.max_iters", po::value<int>())
      ("solver.tol", po::value<double>())
      ("solver.relaxation", po::value<double>())
      ("solver.update_sign", po::value<int>())
      ("solver.self_term", po::value<std::string>())
      ("solver.offset", po::value<double>())
      ("solver.near_radius", po::value<double>())
      ("solver.subdivision", po::value<int>())
      ("solver.record_maps", po::value<bool>())
      ("solver.deterministic", po::value<bool>())
      ("solver.threads", po::value<unsigned>())
      ("outputs.directory", po::value<std::string>())
      ("outputs.farfield", po::value<bool>())
      ("outputs.farfield_angles", po::value<int>())
      ("sweep.radii", po::value<std::string>())
      ("bench.radii", po::value<std::string>());
  return d;
}

}  // namespace

Source ExperimentConfig::source() const {
  if (source_kind == SourceKind::planewave) {
    PlaneWave pw;
    pw.amplitude = amplitude;
    pw.propagation = direction;
    pw.polarization = polarization;
    return pw;
  }
  GaussianBeam gb;
  gb.waist = waist;
  gb.axis = direction;
  gb.polarization = polarization;
  gb.amplitude = amplitude;
  gb.focus = focus_set ? focus : vec3(-radius * direction);
  return gb;
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const char* key, const char* what) {
    if (!ok) throw config_error(key, what);
  };
  check(radius > 0.0, "surface.radius", "must be positive");
  check(density >= 4.0, "surface.density", "must be at least 4 samples per wavelength");
  check(eps_rel_interior.real() > 0.0, "media.eps_rel_interior", "real part must be positive");
  check(std::abs(direction.norm() - 1.0) <= 1e-12, "source.direction", "must be a unit vector");
  check(std::abs(polarization.norm() - 1.0) <= 1e-12, "source.polarization", "must be a unit vector");
  check(std::abs(polarization.dot(direction)) <= 1e-12, "source.polarization", "must be transverse to source.direction");
  check(source_kind == SourceKind::planewave || waist >= 0.5, "source.waist",
        "must be at least half a wavelength (paraxial limit)");
  check(solver.max_iters >= 1, "solver.max_iters", "must be at least 1");
  check(solver.tol > 0.0, "solver.tol", "must be positive");
  check(solver.relaxation > 0.0 && solver.relaxation <= 1.0, "solver.relaxation", "must lie in (0, 1]");
  check(solver.update_sign == 1 || solver.update_sign == -1, "solver.update_sign", "must be 1 or -1");
  check(solver.self_policy.mode != SelfTermMode::offset_surfaces || solver.self_policy.offset > 0.0, "solver.offset",
        "must be positive");
  check(solver.self_policy.mode != SelfTermMode::offset_surfaces || solver.self_policy.offset < radius,
        "solver.offset", "must be smaller than surface.radius");
  check(solver.self_policy.near_radius >= 0.0, "solver.near_radius", "must be non-negative");
  check(solver.self_policy.subdivision >= 1, "solver.subdivision", "must be at least 1");
  check(farfield_angles >= 2, "outputs.farfield_angles", "must be at least 2");
  for (double r : sweep_radii) check(r > 0.0, "sweep.radii", "radii must be positive");
  for (double r : bench_radii) check(r > 0.0, "bench.radii", "radii must be positive");
}

ExperimentConfig parse_config(std::istream& in) {
  po::variables_map vm;
  try {
    po::store(po::parse_config_file(in, config_schema(), false), vm);
    po::notify(vm);
  } catch (const po::error_with_option_name& e) {
    throw config_error(e.get_option_name(), e.what());
  } catch (const po::error& e) {
    throw config_error("<config>", e.what());
  }

  ExperimentConfig c;
  auto has = [&](const std::string& key) {
    if (vm.count(key)) return true;
    c.defaulted.push_back(key);
    return false;
  };
  auto str = [&](const std::string& key) { return vm[key].as<std::string>(); };

  if (has("surface.radius")) c.radius = vm["surface.radius"].as<double>();
  if (has("surface.density")) c.density = vm["surface.density"].as<double>();
  if (has("source.kind")) {
    const auto k = trim(str("source.kind"));
    if (k == "gaussian")
      c.source_kind = SourceKind::gaussian;
    else if (k == "planewave")
      c.source_kind = SourceKind::planewave;
    else
      throw config_error("source.kind", "expected gaussian or planewave, got '" + k + "'");
  }
  if (has("source.waist")) c.waist = vm["source.waist"].as<double>();
  if (has("source.polarization")) c.polarization = parse_vector("source.polarization", str("source.polarization"));
  if (has("source.direction")) c.direction = parse_vector("source.direction", str("source.direction"));
  if (has("source.amplitude")) c.amplitude = parse_complex("source.amplitude", str("source.amplitude"));
  if (has("source.focus")) {
    c.focus = parse_vector("source.focus", str("source.focus"));
    c.focus_set = true;
  }
  if (has("media.eps_rel_interior"))
    c.eps_rel_interior = parse_complex("media.eps_rel_interior", str("media.eps_rel_interior"));
  if (has("solver.max_iters")) c.solver.max_iters = vm["solver.max_iters"].as<int>();
  if (has("solver.tol")) c.solver.tol = vm["solver.tol"].as<double>();
  if (has("solver.relaxation")) c.solver.relaxation = vm["solver.relaxation"].as<double>();
  if (has("solver.update_sign")) c.solver.update_sign = vm["solver.update_sign"].as<int>();
  if (has("solver.self_term")) {
    const auto m = trim(str("solver.self_term"));
    if (m == "offset")
      c.solver.self_policy.mode = SelfTermMode::offset_surfaces;
    else if (m == "exclude")
      c.solver.self_policy.mode = SelfTermMode::exclude_self;
    else
      throw config_error("solver.self_term", "expected offset or exclude, got '" + m + "'");
  }
  if (has("solver.offset")) c.solver.self_policy.offset = vm["solver.offset"].as<double>();
  if (has("solver.near_radius")) c.solver.self_policy.near_radius = vm["solver.near_radius"].as<double>();
  if (has("solver.subdivision")) c.solver.self_policy.subdivision = vm["solver.subdivision"].as<int>();
  if (has("solver.record_maps")) c.solver.record_maps = vm["solver.record_maps"].as<bool>();
  if (has("solver.deterministic")) c.solver.deterministic = vm["solver.deterministic"].as<bool>();
  if (has("solver.threads")) c.solver.threads = vm["solver.threads"].as<unsigned>();
  if (has("outputs.directory")) c.out_dir = str("outputs.directory");
  if (has("outputs.farfield")) c.write_farfield = vm["outputs.farfield"].as<bool>();
  if (has("outputs.farfield_angles")) c.farfield_angles = vm["outputs.farfield_angles"].as<int>();
  if (has("sweep.radii")) c.sweep_radii = parse_list("sweep.radii", str("sweep.radii"));
  if (has("bench.radii")) c.bench_radii = parse_list("bench.radii", str("bench.radii"));

  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("<file>", "cannot open config file " + path.string());
  return parse_config(in);
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& cfg) {
  if (cfg.sweep_radii.empty()) return {cfg};
  std::vector<ExperimentConfig> out;
  for (double r : cfg.sweep_radii) {
    ExperimentConfig c = cfg;
    c.radius = r;
    c.sweep_radii.clear();
    c.out_dir = cfg.out_dir / fmt::format("R{}", r);
    out.push_back(std::move(c));
  }
  return out;
}

std::string describe(const ExperimentConfig& c) {
  const auto& p = c.solver.self_policy;
  std::string s;
  s += fmt::format("surface.radius = {}\nsurface.density = {}\n", c.radius, c.density);
  s += fmt::format("source.kind = {}\n", c.source_kind == SourceKind::gaussian ? "gaussian" : "planewave");
  s += fmt::format("source.waist = {}\nsource.polarization = {}\nsource.direction = {}\nsource.amplitude = {}\n",
                   c.waist, fmt_vec(c.polarization), fmt_vec(c.direction), fmt_complex(c.amplitude));
  if (c.focus_set) s += fmt::format("source.focus = {}\n", fmt_vec(c.focus));
  s += fmt::format("media.eps_rel_interior = {}\n", fmt_complex(c.eps_rel_interior));
  s += fmt::format("solver.max_iters = {}\nsolver.tol = {}\nsolver.relaxation = {}\nsolver.update_sign = {}\n",
                   c.solver.max_iters, c.solver.tol, c.solver.relaxation, c.solver.update_sign);
  s += fmt::format("solver.self_term = {}\nsolver.offset = {}\nsolver.near_radius = {}\nsolver.subdivision = {}\n",
                   p.mode == SelfTermMode::offset_surfaces ? "offset" : "exclude", p.offset, p.near_radius,
                   p.subdivision);
  s += fmt::format("solver.record_maps = {}\nsolver.deterministic = {}\nsolver.threads = {}\n", c.solver.record_maps,
                   c.solver.deterministic, c.solver.threads);
  s += fmt::format("outputs.directory = {}\noutputs.farfield = {}\noutputs.farfield_angles = {}\n", c.out_dir.string(),
                   c.write_farfield, c.farfield_angles);
  if (!c.sweep_radii.empty()) s += fmt::format("sweep.radii = {}\n", fmt_list(c.sweep_radii));
  if (!c.bench_radii.empty()) s += fmt::format("bench.radii = {}\n", fmt_list(c.bench_radii));
  return s;
}

namespace {

constexpr const char* convergence_header =
    "iteration,max_abs_dJx,max_abs_dJy,max_abs_dJz,max_abs_dMx,max_abs_dMy,max_abs_dMz,l2_dJ,l2_dM,wall_seconds\n";

std::string convergence_row(const IterationRecord& r, bool timings) {
  return fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.6f}\n", r.iteration,
                     r.max_abs_dJ[0], r.max_abs_dJ[1], r.max_abs_dJ[2], r.max_abs_dM[0], r.max_abs_dM[1],
                     r.max_abs_dM[2], r.l2_dJ, r.l2_dM, timings ? r.wall_seconds : 0.0);
}

void write_maps(const fs::path& dir, const SurfaceMesh& mesh, const DeviationMap& map) {
  static const char* names[6] = {"dJx", "dJy", "dJz", "dMx", "dMy", "dMz"};
  for (int comp = 0; comp < 6; ++comp) {
    const auto& field = comp < 3 ? map.dJ : map.dM;
    auto out = fmt::output_file((dir / fmt::format("dev_iter{}_{}.csv", map.iteration, names[comp])).string());
    out.print("i_theta,i_phi,theta,phi,abs,re,im\n");
    for (int i = 0; i < mesh.n_theta; ++i)
      for (int j = 0; j < mesh.n_phi; ++j) {
        const cplx v = field[mesh.index(i, j)][comp % 3];
        out.print("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", i, j, mesh.theta(i), mesh.phi(j), std::abs(v),
                  v.real(), v.imag());
      }
  }
}

std::vector<double> angle_grid(int n) {
  std::vector<double> a(n);
  for (int i = 0; i < n; ++i) a[i] = pi * i / (n - 1);
  return a;
}

void write_farfield(const fs::path& dir, const SolveResult& res, const ExperimentConfig& cfg, const Medium& plus,
                    bool converged, spdlog::logger& log) {
  const auto angles = angle_grid(cfg.farfield_angles);
  const MieSolution sol = mie_coefficients(plus.wavenumber().real() * cfg.radius, std::sqrt(cfg.eps_rel_interior));
  const RadiateOptions ropts{cfg.solver.deterministic, cfg.solver.threads};
  const auto mie = mie_far_field(sol, angles);
  const double r = 1e5, k = plus.wavenumber().real();
  // A run that did not converge is sampled at its best pass.
  const SurfaceCurrents& cur = converged ? res.currents : res.best;
  const auto fe = far_field_samples(cur, plus, angles, 0.0, r, ropts);
  const auto fh = far_field_samples(cur, plus, angles, 0.5 * pi, r, ropts);
  {
    auto out = fmt::output_file((dir / "farfield.csv").string());
    out.print("theta_deg,iesc_e_plane,iesc_h_plane,mie_e_plane,mie_h_plane\n");
    for (std::size_t i = 0; i < angles.size(); ++i)
      out.print("{:.6f},{:.17g},{:.17g},{:.17g},{:.17g}\n", angles[i] * 180.0 / pi, k * k * r * r * fe[i].squaredNorm(),
                k * k * r * r * fh[i].squaredNorm(), std::norm(mie.S2[i]), std::norm(mie.S1[i]));
  }
  if (!converged) {
    log.warn("run did not converge; farfield.csv holds the best pass and mie_compare.csv is not written");
    return;
  }
  const FarFieldComparison cmp = compare_far_fields(res, plus, sol, angles, ropts);
  auto out = fmt::output_file((dir / "mie_compare.csv").string());
  out.print("theta_deg,diff_e_plane_db,diff_h_plane_db,forward_lobe\n");
  for (std::size_t i = 0; i < angles.size(); ++i)
    out.print("{:.6f},{:.17g},{:.17g},{}\n", angles[i] * 180.0 / pi, cmp.diff_e_db[i], cmp.diff_h_db[i],
              angles[i] < cmp.first_null ? 1 : 0);
  log.info("forward lobe (theta < {:.2f} deg): max |difference| = {:.3f} dB", cmp.first_null * 180.0 / pi,
           cmp.forward_lobe_max_abs_db());
}

}  // namespace

RunReport run_case(const ExperimentConfig& cfg) {
  const bool timings = !cfg.reproducible;
  fs::create_directories(cfg.out_dir);
  auto file_sink = std::make_shared<spdlog::sinks::basic_file_sink_mt>((cfg.out_dir / "run.log").string(), true);
  auto err_sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
  spdlog::logger log("iesc", {file_sink, err_sink});
  log.set_pattern(timings ? "[%Y-%m-%d %H:%M:%S.%e] [%l] %v" : "[%l] %v");
  log.flush_on(spdlog::level::info);

  log.info("iesc {}", IESC_VERSION);
  std::istringstream lines(describe(cfg));
  for (std::string line; std::getline(lines, line);) log.info("config: {}", line);
  for (const auto& key : cfg.defaulted) log.info("default used: {}", key);
  const auto& pol = cfg.solver.self_policy;
  if (pol.mode == SelfTermMode::offset_surfaces)
    log.info("self-term: offset surfaces at {} wavelengths", pol.offset);
  else
    log.info("self-term: exclude self node, on-surface observation");
  if (pol.refines()) log.info("near cells within {} wavelengths split {}x{}", pol.near_radius, pol.subdivision, pol.subdivision);

  const auto mesh = std::make_shared<const SurfaceMesh>(make_sphere_mesh(cfg.radius, cfg.density));
  log.info("mesh: {} x {} = {} nodes", mesh->n_theta, mesh->n_phi, mesh->size());
  const Medium plus = Medium::vacuum();
  const Medium minus(cfg.eps_rel_interior);

  auto conv = fmt::output_file((cfg.out_dir / "convergence.csv").string());
  conv.print("{}", convergence_header);
  conv.flush();
  std::string timing_rows;
  auto on_iter = [&](const IterationRecord& r, const SurfaceCurrents&) {
    conv.print("{}", convergence_row(r, timings));
    conv.flush();
    timing_rows += fmt::format("{},{:.6f}\n", r.iteration, r.wall_seconds);
    if (timings)
      log.info("iteration {}: max|dJx| = {:.6e}, max|dMy| = {:.6e}, {:.2f} s", r.iteration, r.max_abs_dJ[0],
               r.max_abs_dM[1], r.wall_seconds);
    else
      log.info("iteration {}: max|dJx| = {:.6e}, max|dMy| = {:.6e}", r.iteration, r.max_abs_dJ[0], r.max_abs_dM[1]);
  };

  SolveResult res;
  int status = 0;
  try {
    res = iterate(mesh, cfg.source(), plus, minus, cfg.solver, on_iter);
  } catch (const divergence_error& e) {
    log.error("{}", e.what());
    res = e.partial();
    status = 2;
  }
  conv.close();
  if (!timings) {
    auto t = fmt::output_file((cfg.out_dir / "timing.csv").string());
    t.print("iteration,wall_seconds\n{}", timing_rows);
  }

  const auto& h = res.history;
  if (h.size() >= 1) {
    const double ratio = h.metric(0) > 0.0 ? h.metric(0) / std::max(h.metric(h.size() - 1), 1e-300) : 1.0;
    log.info("status: {}, {} iterations, max|dJx| reduction {:.4g}x",
             h.status == SolveStatus::converged ? "converged"
             : h.status == SolveStatus::diverged ? "diverged"
                                                 : "max_iters",
             h.size(), ratio);
  }
  for (const auto& m : res.maps) write_maps(cfg.out_dir, *mesh, m);
  if (cfg.source_kind == SourceKind::planewave && cfg.write_farfield)
    write_farfield(cfg.out_dir, res, cfg, plus, h.status == SolveStatus::converged, log);
  return {status, std::move(res)};
}

int run_experiment(const ExperimentConfig& cfg) {
  int status = 0;
  for (const auto& c : expand_sweep(cfg)) status = std::max(status, run_case(c).status);
  return status;
}

bool BenchReport::scaling_ok() const {
  return std::all_of(scaling_ratios.begin(), scaling_ratios.end(), [](double r) { return r >= 0.5 && r <= 2.0; });
}

BenchReport bench(const ExperimentConfig& cfg) {
  std::vector<double> radii = cfg.bench_radii;
  if (radii.empty()) radii = cfg.sweep_radii;
  if (radii.empty()) radii = {cfg.radius};

  BenchReport rep;
  for (double radius : radii) {
    ExperimentConfig c = cfg;
    c.radius = radius;
    const auto mesh = std::make_shared<const SurfaceMesh>(make_sphere_mesh(radius, c.density));
    const Medium plus = Medium::vacuum();
    const Medium minus(c.eps_rel_interior);
    const SurfaceCurrents cur = initial_currents(mesh, incident_field(c.source(), mesh->nodes));

    BenchRow row;
    row.radius = radius;
    row.nodes = mesh->size();
    auto time_radiate = [&](bool deterministic) {
      const auto t0 = std::chrono::steady_clock::now();
      surface_field(cur, plus, Side::plus, c.solver.self_policy, RadiateOptions{deterministic, c.solver.threads});
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    row.radiate_seconds = time_radiate(true);
    row.radiate_fast_seconds = time_radiate(false);

    SolverConfig one = c.solver;
    one.max_iters = 1;
    one.record_maps = false;
    one.deterministic = true;
    const auto a = iterate(mesh, c.source(), plus, minus, one);
    one.deterministic = false;
    const auto b = iterate(mesh, c.source(), plus, minus, one);
    row.iteration_seconds = a.history.records[0].wall_seconds;
    for (int k = 0; k < 3; ++k) {
      const double x = a.history.records[0].max_abs_dJ[k], y = b.history.records[0].max_abs_dJ[k];
      const double u = a.history.records[0].max_abs_dM[k], v = b.history.records[0].max_abs_dM[k];
      if (x > 0.0) row.max_metric_difference = std::max(row.max_metric_difference, std::abs(x - y) / x);
      if (u > 0.0) row.max_metric_difference = std::max(row.max_metric_difference, std::abs(u - v) / u);
    }
    rep.rows.push_back(row);
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const auto& p = rep.rows[i - 1];
    const auto& q = rep.rows[i];
    const double n = static_cast<double>(q.nodes) / static_cast<double>(p.nodes);
    rep.scaling_ratios.push_back((q.radiate_seconds / p.radiate_seconds) / (n * n));
  }
  return rep;
}

void write_bench_csv(const BenchReport& rep, const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  auto out = fmt::output_file(file.string());
  out.print("radius,nodes,radiate_seconds,radiate_fast_seconds,iteration_seconds,max_metric_difference,scaling_ratio\n");
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    out.print("{},{},{:.6f},{:.6f},{:.6f},{:.3e},{}\n", r.radius, r.nodes, r.radiate_seconds, r.radiate_fast_seconds,
              r.iteration_seconds, r.max_metric_difference, i ? fmt::format("{:.4f}", rep.scaling_ratios[i - 1]) : "");
  }
}

}  // namespace iesc
