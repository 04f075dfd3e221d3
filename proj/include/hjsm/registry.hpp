#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hjsm/hj_problem.hpp"

namespace hjsm {

/// A built-in problem plus the metadata the pipeline needs around it.
struct RegistryEntry {
  std::shared_ptr<const HjProblem> problem;
  /// Control-affine form, when the problem has one.
  std::optional<ControlProblem> control;
  /// Lipschitz coefficient M(L) of the separated nonlinearity (Assumption 2);
  /// empty for problems used only in integrator tests.
  std::function<double(double)> lipschitz_coeff;
  /// Default ball size L for the convergence certificate.
  double default_ball = 0.0;
  /// Exact decay constants (a, b) with ||e^{Bt}|| <= a e^{-bt}, when known.
  std::optional<std::pair<double, double>> decay;
  /// False for problems whose equilibrium is not hyperbolic (no transform).
  bool has_transform = true;
};

/// Stable CLI identifiers: "exp2d", "lqr2d", "harmonic".
std::vector<std::string> registry_names();

/// Looks up a built-in problem; throws std::invalid_argument for unknown names.
RegistryEntry get_registry_entry(const std::string& name);

std::shared_ptr<const HjProblem> make_problem(const std::string& name);

}  // namespace hjsm
