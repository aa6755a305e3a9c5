#pragma once

#include <iesc/iesc.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace iesc {

enum class SourceKind { gaussian, planewave };

struct ExperimentConfig {
  double radius = 3.0;
  double density = 10.0;

  SourceKind source_kind = SourceKind::gaussian;
  double waist = 2.0;
  vec3 polarization{1.0, 0.0, 0.0};
  vec3 direction{0.0, 0.0, -1.0};
  cplx amplitude{1.0, 0.0};
  /// Beam focus; unset means the surface point facing the incoming beam.
  bool focus_set = false;
  vec3 focus{0.0, 0.0, 0.0};

  cplx eps_rel_interior{2.0, 0.0};

  SolverConfig solver{};

  std::filesystem::path out_dir = "out";
  bool write_farfield = true;
  int farfield_angles = 361;

  /// Write artifacts that are bitwise identical across reruns; timings go to timing.csv.
  bool reproducible = false;

  std::vector<double> sweep_radii;
  std::vector<double> bench_radii;

  /// Keys that were not present in the file and took their default.
  std::vector<std::string> defaulted;

  Source source() const;
  void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One config per sweep radius, each writing to out_dir/R<radius>. Without a sweep, the config itself.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& cfg);

/// The config after defaults, as key = value lines.
std::string describe(const ExperimentConfig& cfg);

struct RunReport {
  /// 0 on success, 2 if the solver diverged.
  int status = 0;
  SolveResult result;
};

/// Runs one config, ignoring its sweep, and writes its artifacts to out_dir.
RunReport run_case(const ExperimentConfig& cfg);

/// Runs every sweep entry. Returns 0 on success, 2 if any entry diverged.
int run_experiment(const ExperimentConfig& cfg);

struct BenchRow {
  double radius = 0.0;
  std::size_t nodes = 0;
  double radiate_seconds = 0.0;       ///< one exterior radiate call, deterministic
  double radiate_fast_seconds = 0.0;  ///< same call with the vectorized reduction
  double iteration_seconds = 0.0;     ///< one full solver pass
  double max_metric_difference = 0.0;  ///< deterministic vs fast, relative
};

struct BenchReport {
  std::vector<BenchRow> rows;
  /// time ratio / node-count-squared ratio for each consecutive radius pair.
  std::vector<double> scaling_ratios;
  bool scaling_ok() const;
};

BenchReport bench(const ExperimentConfig& cfg);
void write_bench_csv(const BenchReport& rep, const std::filesystem::path& file);

}  // namespace iesc
