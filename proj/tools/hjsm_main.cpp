#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hjsm/errors.hpp"
#include "hjsm/pipeline.hpp"

namespace {

// Exit codes: 0 ok, 2 usage, 3 numerical failure, 4 certificate violation.
constexpr int kUsage = 2;
constexpr int kNumerical = 3;
constexpr int kCertificate = 4;

void attach_common(CLI::App* cmd, hjsm::RunConfig& config, std::string& config_file) {
  cmd->add_option("--config", config_file, "JSON config file (flags override it)");
  cmd->add_option("--problem", config.problem, "registry problem name");
  cmd->add_option("--k", config.k, "iteration count for the local manifold");
  cmd->add_option("--xi-count", config.xi_count, "number of sphere samples");
  cmd->add_option("--xi-radius", config.xi_radius, "sphere radius (0 = certified radius)");
  cmd->add_option("--ball", config.ball, "certificate ball size L (0 = registry default)");
  cmd->add_option("--t-horizon", config.t_horizon, "local horizon T (0 = auto)");
  cmd->add_option("--dt-grid", config.dt_grid, "output grid step");
  cmd->add_option("--h-step", config.h, "backward extension step (negative)");
  cmd->add_option("--delta", config.delta, "Hamiltonian tolerance");
  cmd->add_option("--t-min", config.t_min_target, "extension target time (negative)");
  cmd->add_option("--fit-degree", config.fit_degree, "polynomial degree per variable");
  cmd->add_option("--per-curve", config.per_curve, "samples per curve for the fit");
  cmd->add_option("--seed", config.seed, "random seed");
  cmd->add_option("--out", config.outdir, "output directory");
  cmd->add_option("--threads", config.threads, "worker cap (0 = hardware)");
  cmd->add_option("--compare-h", config.compare_h, "step for the comparison run");
  cmd->add_option("--compare-t-min", config.compare_t_min, "target time for the comparison run");
  cmd->add_option("--baseline-k", config.baseline_k, "iterations for the negative-time baseline");
  cmd->add_option("--rk45-rtol", config.rk45_rtol, "comparator relative tolerance");
  cmd->add_option("--rk45-atol", config.rk45_atol, "comparator absolute tolerance");
  cmd->add_option("--sim-t-final", config.sim_t_final, "closed-loop horizon");
}

void merge_config_file(hjsm::RunConfig& config, const std::string& config_file,
                       const CLI::App* cmd) {
  if (config_file.empty()) return;
  // File first, then re-apply any explicitly passed flags on top.
  hjsm::RunConfig from_file = hjsm::load_config(config_file);
  const hjsm::RunConfig defaults;
  const hjsm::RunConfig from_flags = config;
  config = from_file;
  auto keep = [&](const std::string& flag, auto member) {
    if (cmd->count(flag) > 0) config.*member = from_flags.*member;
  };
  keep("--problem", &hjsm::RunConfig::problem);
  keep("--k", &hjsm::RunConfig::k);
  keep("--xi-count", &hjsm::RunConfig::xi_count);
  keep("--xi-radius", &hjsm::RunConfig::xi_radius);
  keep("--ball", &hjsm::RunConfig::ball);
  keep("--t-horizon", &hjsm::RunConfig::t_horizon);
  keep("--dt-grid", &hjsm::RunConfig::dt_grid);
  keep("--h-step", &hjsm::RunConfig::h);
  keep("--delta", &hjsm::RunConfig::delta);
  keep("--t-min", &hjsm::RunConfig::t_min_target);
  keep("--fit-degree", &hjsm::RunConfig::fit_degree);
  keep("--per-curve", &hjsm::RunConfig::per_curve);
  keep("--seed", &hjsm::RunConfig::seed);
  keep("--out", &hjsm::RunConfig::outdir);
  keep("--threads", &hjsm::RunConfig::threads);
  keep("--compare-h", &hjsm::RunConfig::compare_h);
  keep("--compare-t-min", &hjsm::RunConfig::compare_t_min);
  keep("--baseline-k", &hjsm::RunConfig::baseline_k);
  keep("--rk45-rtol", &hjsm::RunConfig::rk45_rtol);
  keep("--rk45-atol", &hjsm::RunConfig::rk45_atol);
  keep("--sim-t-final", &hjsm::RunConfig::sim_t_final);
}

int error_json(const char* type, const std::exception& e, int code) {
  nlohmann::ordered_json j;
  j["error"]["type"] = type;
  j["error"]["message"] = e.what();
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stable manifolds and polynomial feedback for stationary Hamilton-Jacobi problems"};
  app.require_subcommand(1);

  hjsm::RunConfig config;
  std::string config_file;
  std::vector<std::vector<double>> x0s;

  std::vector<double> xi_explicit;
  CLI::App* analyze = app.add_subcommand("analyze", "transform + convergence certificate");
  CLI::App* local = app.add_subcommand("local", "local approximate stable manifold");
  local->add_option("--xi", xi_explicit,
                    "explicit initial point instead of sphere sampling (short values repeat)")
      ->expected(-1);
  CLI::App* extend = app.add_subcommand("extend", "backward symplectic extension + domain");
  CLI::App* compare = app.add_subcommand("compare", "symplectic vs rk45 vs negative-time iteration");
  CLI::App* fit = app.add_subcommand("fit", "polynomial controller from manifold samples");
  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop trajectories");
  CLI::App* repro = app.add_subcommand("repro", "full pipeline with the worked-example settings");
  for (CLI::App* cmd : {analyze, local, extend, compare, fit, simulate, repro})
    attach_common(cmd, config, config_file);
  simulate->add_option("--x0", x0s, "initial state (repeatable)")->expected(-1);

  // Default output dir from the environment, overridable by --out.
  if (const char* env = std::getenv("HJSM_OUT")) config.outdir = env;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    nlohmann::ordered_json j;
    j["error"]["type"] = "usage";
    j["error"]["message"] = e.what();
    std::cerr << j.dump() << '\n';
    return kUsage;
  }
  CLI::App* cmd = app.get_subcommands().front();

  try {
    merge_config_file(config, config_file, cmd);
    if (cmd == analyze) return hjsm::cmd_analyze(config);
    if (cmd == local) return hjsm::cmd_local(config, xi_explicit);
    if (cmd == extend) return hjsm::cmd_extend(config);
    if (cmd == compare) return hjsm::cmd_compare(config);
    if (cmd == fit) return hjsm::cmd_fit(config);
    if (cmd == simulate) {
      if (x0s.empty()) x0s = {{4.0, 3.6}, {-5.0, 4.0}};
      return hjsm::cmd_simulate(config, x0s);
    }
    if (cmd == repro) return hjsm::cmd_repro(config);
  } catch (const hjsm::CertificateError& e) {
    return error_json("certificate_violation", e, kCertificate);
  } catch (const hjsm::NumericalError& e) {
    return error_json("numerical_failure", e, kNumerical);
  } catch (const std::invalid_argument& e) {
    return error_json("usage", e, kUsage);
  } catch (const std::exception& e) {
    return error_json("numerical_failure", e, kNumerical);
  }
  return 0;
}
