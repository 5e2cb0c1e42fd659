#include "turntaker/model.hpp"

#include <cmath>
#include <stdexcept>

namespace turntaker {

double memory_value(double d, std::optional<std::int64_t> gap) {
  if (!std::isfinite(d) || d < 0.0) {
    throw std::invalid_argument("memory scale d must be finite and >= 0");
  }
  if (gap && *gap < 1) {
    throw std::invalid_argument(
        "gap must be >= 1; a member with gap 0 would be the current speaker");
  }
  if (!gap || d == 0.0) return 0.0;
  return d * std::exp(-kMemoryDecayRate * static_cast<double>(*gap));
}

std::vector<double> speaking_likelihoods(const TeamParams& team,
                                         const ConversationState& state) {
  const std::size_t n = team.size();
  if (state.size() != n) {
    throw std::invalid_argument("state size does not match team size");
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t last = state.last_spoke[i];
    if (last != ConversationState::kNever && last == state.current_turn - 1) {
      out[i] = 0.0;  // no member speaks on two consecutive turns
      continue;
    }
    std::optional<std::int64_t> gap;
    if (last != ConversationState::kNever) gap = state.current_turn - last;
    out[i] = team.member(i).pi + memory_value(team.member(i).d, gap);
  }
  return out;
}

std::vector<double> turn_probabilities(const TeamParams& team,
                                       const ConversationState& state) {
  std::vector<double> probs = speaking_likelihoods(team, state);
  double sum = 0.0;
  for (double v : probs) sum += v;
  if (sum <= 0.0) {
    throw DegenerateDistributionError("all speaking likelihoods are zero");
  }
  for (double& v : probs) v /= sum;
  return probs;
}

ConversationState advance(const ConversationState& state, std::size_t speaker) {
  if (speaker >= state.size()) {
    throw std::invalid_argument("speaker index out of range");
  }
  if (state.previous_speaker() == speaker) {
    throw std::invalid_argument("speaker cannot take two consecutive turns");
  }
  ConversationState next = state;
  next.last_spoke[speaker] = state.current_turn;
  next.current_turn = state.current_turn + 1;
  return next;
}

double sequence_log_likelihood(const TeamParams& team, const TurnSequence& seq) {
  ConversationState state(team.size());
  double ll = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const std::size_t speaker = seq[t];
    if (speaker >= team.size()) {
      throw std::invalid_argument("sequence speaker index out of roster range");
    }
    const std::vector<double> probs = turn_probabilities(team, state);
    ll += std::log(probs[speaker]);  // -inf if the history is impossible
    state = advance(state, speaker);
  }
  return ll;
}

double multi_meeting_log_likelihood(const TeamParams& team,
                                    const std::vector<TurnSequence>& meetings) {
  double ll = 0.0;
  for (const TurnSequence& seq : meetings) {
    ll += sequence_log_likelihood(team, seq);
  }
  return ll;
}

}  // namespace turntaker
