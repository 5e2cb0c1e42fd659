#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace turntaker {

// Smallest admissible baseline propensity. Keeps every likelihood vector
// summable and every observed history representable with finite log-likelihood.
inline constexpr double kPiFloor = 1e-9;

// Decay rate of the memory term. Fixed, not a fitted parameter.
inline constexpr double kMemoryDecayRate = 0.5;

// Tolerance on the sum-to-one constraint of normalized baselines.
inline constexpr double kNormalizationTol = 1e-9;

/// Thrown when a likelihood vector sums to zero and no probability
/// distribution over speakers exists. Unreachable while the pi floor holds;
/// kept as a guard.
class DegenerateDistributionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered list of unique member identifiers. The index order is the
/// canonical member order used by every vector-valued quantity in the
/// library, including inverse-CDF sampling.
class Roster {
 public:
  explicit Roster(std::vector<std::string> members);

  std::size_t size() const noexcept { return members_.size(); }
  const std::vector<std::string>& members() const noexcept { return members_; }
  const std::string& member(std::size_t i) const { return members_.at(i); }
  std::optional<std::size_t> index_of(std::string_view id) const;

  bool operator==(const Roster&) const = default;

 private:
  std::vector<std::string> members_;
};

/// Per-member parameter pair: baseline speaking propensity and memory scale.
struct MemberParams {
  double pi = 0.0;
  double d = 0.0;

  bool operator==(const MemberParams&) const = default;
};

/// Parameters for a whole team. The probabilities the model produces are
/// invariant to jointly scaling all (pi, d) by a positive constant, so the
/// canonical form pins sum(pi) = 1; `normalized()` records whether this
/// instance is in that form.
class TeamParams {
 public:
  TeamParams(Roster roster, std::vector<MemberParams> params, bool normalized);

  /// Canonical form: divides every pi and d by sum(pi), then raises any pi
  /// below the floor (taking the added mass from the largest entry so the
  /// sum stays exactly 1).
  static TeamParams canonical(Roster roster, std::vector<double> pi,
                              std::vector<double> d);

  /// Unnormalized parameters, e.g. for scale-invariance checks. Member
  /// invariants (pi >= floor, d >= 0) still hold.
  static TeamParams raw(Roster roster, std::vector<double> pi,
                        std::vector<double> d);

  const Roster& roster() const noexcept { return roster_; }
  std::size_t size() const noexcept { return params_.size(); }
  const std::vector<MemberParams>& params() const noexcept { return params_; }
  const MemberParams& member(std::size_t i) const { return params_.at(i); }
  bool normalized() const noexcept { return normalized_; }

  std::vector<double> pis() const;
  std::vector<double> ds() const;

  bool operator==(const TeamParams&) const = default;

 private:
  Roster roster_;
  std::vector<MemberParams> params_;
  bool normalized_ = false;
};

/// Ordered speakers of one meeting, as indices into a roster. Consecutive
/// entries always differ; utterances that would repeat a speaker belong to
/// the same turn and are collapsed during ingest.
class TurnSequence {
 public:
  TurnSequence() = default;
  TurnSequence(std::vector<std::size_t> speakers, std::size_t n_members);

  std::size_t size() const noexcept { return speakers_.size(); }
  bool empty() const noexcept { return speakers_.empty(); }
  std::size_t operator[](std::size_t t) const { return speakers_[t]; }
  const std::vector<std::size_t>& speakers() const noexcept { return speakers_; }

  auto begin() const noexcept { return speakers_.begin(); }
  auto end() const noexcept { return speakers_.end(); }

  bool operator==(const TurnSequence&) const = default;

 private:
  std::vector<std::size_t> speakers_;
};

/// Rolling per-member bookkeeping for one conversation. Turn indices are
/// 1-based; `last_spoke[i] == kNever` means member i has not spoken yet.
struct ConversationState {
  static constexpr std::int64_t kNever = 0;

  std::vector<std::int64_t> last_spoke;
  std::int64_t current_turn = 1;

  explicit ConversationState(std::size_t n_members)
      : last_spoke(n_members, kNever) {}

  std::size_t size() const noexcept { return last_spoke.size(); }

  /// Member who spoke on the immediately preceding turn, if any.
  std::optional<std::size_t> previous_speaker() const;

  bool operator==(const ConversationState&) const = default;
};

}  // namespace turntaker
