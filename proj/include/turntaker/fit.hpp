#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "turntaker/types.hpp"

namespace turntaker {

/// FULL fits per-member (pi, d); REDUCED fixes every d to 0; TIED shares one
/// baseline and one memory scale across members (so, under the sum(pi) = 1
/// constraint, only the shared d is free).
enum class ModelVariant { kFull, kReduced, kTied };

std::string_view variant_name(ModelVariant variant);
std::optional<ModelVariant> variant_from_name(std::string_view name);

/// Free-parameter count under the canonical constraints: 2n-1 for FULL,
/// n-1 for REDUCED, 1 for TIED.
int free_parameter_count(ModelVariant variant, std::size_t n_members);

struct FitOptions {
  int restarts = 8;            // multi-start count, deterministic restart seeds
  int max_iterations = 2000;   // per restart
  double tolerance = 1e-8;     // log-likelihood improvement threshold
  std::uint64_t seed = 0;      // base seed for randomized restart points
};

struct FitResult {
  TeamParams team;
  ModelVariant variant = ModelVariant::kFull;
  double log_likelihood = 0.0;
  bool converged = false;
  int n_restarts_used = 0;
  int free_parameter_count = 0;
  std::vector<std::string> warnings;

  bool operator==(const FitResult&) const = default;
};

struct SplitEvaluation {
  double train_ll = 0.0;
  double test_ll = 0.0;
  ModelVariant variant = ModelVariant::kFull;
  double split_fraction = 0.8;

  bool operator==(const SplitEvaluation&) const = default;
};

/// Maximum-likelihood fit of the chosen variant. Optimizes an unconstrained
/// reparameterization (softmax over n-1 free reals for pi, exponential map
/// for d) with multi-start Nelder-Mead; restarts may run in parallel and the
/// winner is the deterministic argmax (ties to the lowest restart index).
/// The REDUCED optimum is always part of a FULL fit's candidate set, so
/// LL(FULL) >= LL(REDUCED) on the same data.
///
/// Refuses datasets with fewer than k+1 turns; warns (in the result) below
/// 10k turns, for members never observed speaking, and for n = 2 rosters
/// whose forced alternation leaves the parameters weakly identified.
FitResult fit(const std::vector<TurnSequence>& data, const Roster& roster,
              ModelVariant variant, const FitOptions& options = {});

/// Fits on the first floor(fraction * total) turns of the concatenated
/// timeline (a meeting straddling the boundary is truncated inside that
/// meeting), then scores the remaining turns with the training history
/// retained for memory and exclusion state.
SplitEvaluation evaluate_split(const std::vector<TurnSequence>& data,
                               const Roster& roster, ModelVariant variant,
                               double fraction = 0.8,
                               const FitOptions& options = {});

}  // namespace turntaker
