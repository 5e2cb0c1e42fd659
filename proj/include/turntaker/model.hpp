#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "turntaker/types.hpp"

namespace turntaker {

/// Memory boost for a member whose last turn was `gap` turns ago:
/// d * exp(-0.5 * gap). `std::nullopt` means the member has not spoken yet
/// and contributes no memory. A gap of zero is rejected: that member would be
/// the current speaker.
double memory_value(double d, std::optional<std::int64_t> gap);

/// Unnormalized likelihood that each member takes the next turn. The previous
/// speaker's entry is exactly zero; everyone else gets pi + memory.
std::vector<double> speaking_likelihoods(const TeamParams& team,
                                         const ConversationState& state);

/// Likelihoods normalized into a probability vector over the roster.
std::vector<double> turn_probabilities(const TeamParams& team,
                                       const ConversationState& state);

/// State after `speaker` takes the current turn. Pure; the input is unchanged.
ConversationState advance(const ConversationState& state, std::size_t speaker);

/// Log-likelihood of observing one meeting's turn sequence, streamed turn by
/// turn. Empty sequence gives 0.
double sequence_log_likelihood(const TeamParams& team, const TurnSequence& seq);

/// Sum of per-meeting log-likelihoods; conversation state resets at every
/// meeting boundary.
double multi_meeting_log_likelihood(const TeamParams& team,
                                    const std::vector<TurnSequence>& meetings);

}  // namespace turntaker
