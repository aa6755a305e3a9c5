#include <iesc/cli_io.hpp>
#include <iesc/errors.hpp>
#include <iesc/mie_oracle.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"iterative equivalent surface current solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool deterministic = false;
  auto* run = app.add_subcommand("run", "run an experiment described by a config file");
  run->add_option("--config", config_path, "experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "output directory (overrides outputs.directory)");
  run->add_flag("--deterministic", deterministic, "ordered summation and bitwise reproducible artifacts");

  std::string bench_config;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "time radiate and solver passes across radii");
  bench->add_option("--config", bench_config, "experiment config")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "write the table as CSV here");

  double radius = 1.0;
  std::string eps_text = "2";
  int n_angles = 181;
  auto* mie = app.add_subcommand("mie", "Mie bistatic pattern of a dielectric sphere, CSV on stdout");
  mie->add_option("--radius", radius, "sphere radius in wavelengths")->required()->check(CLI::PositiveNumber);
  mie->add_option("--eps", eps_text, "relative permittivity, real or (re,im)")->required();
  mie->add_option("--angles", n_angles, "number of angles over [0, 180] degrees")->required()->check(CLI::Range(2, 1000000));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      iesc::ExperimentConfig cfg = iesc::load_config(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      if (deterministic) {
        cfg.solver.deterministic = true;
        cfg.reproducible = true;
      }
      return iesc::run_experiment(cfg);
    }
    if (*bench) {
      const iesc::ExperimentConfig cfg = iesc::load_config(bench_config);
      const auto rep = iesc::bench(cfg);
      fmt::print("{:>8} {:>8} {:>12} {:>12} {:>12} {:>10} {:>8}\n", "radius", "nodes", "radiate_s", "fast_s", "iter_s",
                 "rel_diff", "scaling");
      for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& r = rep.rows[i];
        fmt::print("{:>8} {:>8} {:>12.3f} {:>12.3f} {:>12.3f} {:>10.2e} {:>8}\n", r.radius, r.nodes,
                   r.radiate_seconds, r.radiate_fast_seconds, r.iteration_seconds, r.max_metric_difference,
                   i ? fmt::format("{:.3f}", rep.scaling_ratios[i - 1]) : "-");
      }
      if (!bench_out.empty()) iesc::write_bench_csv(rep, bench_out);
      fmt::print("quadratic scaling within 2x: {}\n", rep.scaling_ok() ? "yes" : "no");
      return rep.scaling_ok() ? 0 : 3;
    }
    if (*mie) {
      std::istringstream ss(eps_text);
      iesc::cplx eps;
      if (!(ss >> eps)) throw std::invalid_argument("--eps: cannot parse '" + eps_text + "'");
      const auto sol = iesc::mie_coefficients(iesc::k0 * radius, std::sqrt(eps));
      std::vector<double> angles(n_angles);
      for (int i = 0; i < n_angles; ++i) angles[i] = iesc::pi * i / (n_angles - 1);
      const auto s = iesc::mie_far_field(sol, angles);
      fmt::print(stderr, "x = {:.6f}, n_max = {}, Q_sca = {:.12g}, Q_ext = {:.12g}\n", sol.size_parameter, sol.n_max,
                 sol.q_sca(), sol.q_ext());
      fmt::print("theta_deg,S1_re,S1_im,S2_re,S2_im,h_plane,e_plane\n");
      for (int i = 0; i < n_angles; ++i)
        fmt::print("{:.6f},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", angles[i] * 180.0 / iesc::pi,
                   s.S1[i].real(), s.S1[i].imag(), s.S2[i].real(), s.S2[i].imag(), std::norm(s.S1[i]),
                   std::norm(s.S2[i]));
      return 0;
    }
  } catch (const iesc::config_error& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
