#pragma once

#include <cstdint>
#include <vector>

#include "turntaker/rng.hpp"
#include "turntaker/types.hpp"

namespace turntaker {

/// Ensemble configuration. `turns` is the length of every simulated
/// conversation; `replications` the ensemble size.
struct SimConfig {
  std::int64_t turns = 1;
  std::uint64_t seed = 0;
  std::int64_t replications = 10000;
};

/// Draws the next speaker by inverse-CDF sampling over turn_probabilities in
/// roster order, so a fixed stream gives bit-reproducible picks.
std::size_t sample_next_speaker(const TeamParams& team,
                                const ConversationState& state, RngStream& rng);

/// Simulates `turns` turns drawing from the given stream.
TurnSequence simulate_conversation(const TeamParams& team, std::int64_t turns,
                                   RngStream& rng);

/// Simulates one conversation on substream 0 of config.seed. Identical
/// (team, config) gives identical output.
TurnSequence simulate_conversation(const TeamParams& team,
                                   const SimConfig& config);

/// R independent conversations; replication r runs on substream (seed, r),
/// so its output does not depend on whether or where the other replications
/// were computed. May run replications in parallel; the result is indexed by
/// replication number and identical to the serial variant.
std::vector<TurnSequence> replicate_ensemble(const TeamParams& team,
                                             const SimConfig& config);

/// Single-threaded reference for replicate_ensemble. Kept for tests and
/// benchmarks; output must match the parallel variant exactly.
std::vector<TurnSequence> replicate_ensemble_serial(const TeamParams& team,
                                                    const SimConfig& config);

}  // namespace turntaker
