#include "turntaker/simulate.hpp"

#include <stdexcept>

#include "turntaker/model.hpp"
#include "turntaker/threads.hpp"

namespace turntaker {

namespace {

void validate_config(const SimConfig& config) {
  if (config.turns < 1) {
    throw std::invalid_argument("turns must be >= 1");
  }
  if (config.replications < 1) {
    throw std::invalid_argument("replications must be >= 1");
  }
}

}  // namespace

std::size_t sample_next_speaker(const TeamParams& team,
                                const ConversationState& state,
                                RngStream& rng) {
  const std::vector<double> probs = turn_probabilities(team, state);
  const double u = rng.next_unit();
  double cum = 0.0;
  std::size_t last_positive = 0;
  bool seen_positive = false;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    seen_positive = true;
    cum += probs[i];
    if (u < cum) return i;
  }
  // Rounding can leave cum a hair under 1; the draw belongs to the last
  // eligible member.
  if (!seen_positive) {
    throw DegenerateDistributionError("no eligible speaker to sample");
  }
  return last_positive;
}

TurnSequence simulate_conversation(const TeamParams& team, std::int64_t turns,
                                   RngStream& rng) {
  if (turns < 1) throw std::invalid_argument("turns must be >= 1");
  std::vector<std::size_t> speakers;
  speakers.reserve(static_cast<std::size_t>(turns));
  ConversationState state(team.size());
  for (std::int64_t t = 0; t < turns; ++t) {
    const std::size_t speaker = sample_next_speaker(team, state, rng);
    speakers.push_back(speaker);
    state = advance(state, speaker);
  }
  return TurnSequence(std::move(speakers), team.size());
}

TurnSequence simulate_conversation(const TeamParams& team,
                                   const SimConfig& config) {
  if (config.turns < 1) throw std::invalid_argument("turns must be >= 1");
  RngStream rng(config.seed, 0);
  return simulate_conversation(team, config.turns, rng);
}

std::vector<TurnSequence> replicate_ensemble(const TeamParams& team,
                                             const SimConfig& config) {
  validate_config(config);
  const std::int64_t n = config.replications;
  std::vector<TurnSequence> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 16) \
    num_threads(worker_thread_count())
  for (std::int64_t r = 0; r < n; ++r) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(r));
    out[static_cast<std::size_t>(r)] =
        simulate_conversation(team, config.turns, rng);
  }
  return out;
}

std::vector<TurnSequence> replicate_ensemble_serial(const TeamParams& team,
                                                    const SimConfig& config) {
  validate_config(config);
  std::vector<TurnSequence> out;
  out.reserve(static_cast<std::size_t>(config.replications));
  for (std::int64_t r = 0; r < config.replications; ++r) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(r));
    out.push_back(simulate_conversation(team, config.turns, rng));
  }
  return out;
}

}  // namespace turntaker
