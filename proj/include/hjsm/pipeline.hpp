#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace hjsm {

/// Everything a pipeline run needs; filled from a JSON config file and/or
/// command-line flags. Defaults follow the worked 2-d example.
struct RunConfig {
  std::string problem = "exp2d";
  int k = 3;                    // iteration count for the local manifold
  int xi_count = 200;
  double xi_radius = 0.12;      // 0 = use the certified radius
  double ball = 0.0;            // certificate ball size L; 0 = registry default
  double t_horizon = 0.0;       // 0 = max(10, 14/b)
  double dt_grid = 0.01;
  double h = -1e-3;             // backward extension step (negative)
  double delta = 1e-4;          // Hamiltonian tolerance
  double t_min_target = -3.5;
  int fit_degree = 5;
  int per_curve = 10;
  std::uint64_t seed = 2024;
  std::string outdir = "out";
  int threads = 0;              // 0 = hardware concurrency
  // Comparison settings (the compare subcommand).
  double compare_h = -0.005;
  double compare_t_min = -3.8;
  int baseline_k = 50;          // negative-time iteration baseline
  double baseline_t_horizon = 10.0;
  double rk45_rtol = 1e-3;      // comparator error control, library defaults
  double rk45_atol = 1e-6;
  // Simulation settings.
  double sim_t_final = 20.0;

  void validate() const;  // throws std::invalid_argument
};

RunConfig config_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

/// Subcommand bodies; each writes its artifacts under config.outdir and
/// returns 0. Module errors surface as exceptions (mapped to exit codes by
/// the CLI front end).
int cmd_analyze(const RunConfig& config);
/// xi_explicit, when nonempty, replaces sphere sampling with that one point
/// (short vectors repeat their last entry up to the state dimension).
int cmd_local(const RunConfig& config, const std::vector<double>& xi_explicit = {});
int cmd_extend(const RunConfig& config);
int cmd_compare(const RunConfig& config);
int cmd_fit(const RunConfig& config);
int cmd_simulate(const RunConfig& config, const std::vector<std::vector<double>>& initial_points);
int cmd_repro(const RunConfig& config);

}  // namespace hjsm
