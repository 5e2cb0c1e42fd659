#include "turntaker/types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace turntaker {

Roster::Roster(std::vector<std::string> members) : members_(std::move(members)) {
  if (members_.size() < 2) {
    throw std::invalid_argument("roster needs at least two members");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& id : members_) {
    if (id.empty()) {
      throw std::invalid_argument("roster member identifiers must be non-empty");
    }
    if (!seen.insert(id).second) {
      throw std::invalid_argument("duplicate roster member: " + id);
    }
  }
}

std::optional<std::size_t> Roster::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] == id) return i;
  }
  return std::nullopt;
}

namespace {

void validate_member_params(const std::vector<MemberParams>& params) {
  for (const auto& p : params) {
    if (!std::isfinite(p.pi) || p.pi < kPiFloor) {
      throw std::invalid_argument("member pi must be finite and >= pi floor");
    }
    if (!std::isfinite(p.d) || p.d < 0.0) {
      throw std::invalid_argument("member d must be finite and non-negative");
    }
  }
}

std::vector<MemberParams> zip_params(const std::vector<double>& pi,
                                     const std::vector<double>& d) {
  if (pi.size() != d.size()) {
    throw std::invalid_argument("pi and d vectors must have equal length");
  }
  std::vector<MemberParams> out(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i) out[i] = {pi[i], d[i]};
  return out;
}

}  // namespace

TeamParams::TeamParams(Roster roster, std::vector<MemberParams> params,
                       bool normalized)
    : roster_(std::move(roster)),
      params_(std::move(params)),
      normalized_(normalized) {
  if (params_.size() != roster_.size()) {
    throw std::invalid_argument("params length must equal roster size");
  }
  validate_member_params(params_);
  if (normalized_) {
    double sum = 0.0;
    for (const auto& p : params_) sum += p.pi;
    if (std::abs(sum - 1.0) > kNormalizationTol) {
      throw std::invalid_argument("normalized TeamParams require sum(pi) == 1");
    }
  }
}

TeamParams TeamParams::canonical(Roster roster, std::vector<double> pi,
                                 std::vector<double> d) {
  if (pi.size() != d.size() || pi.size() != roster.size()) {
    throw std::invalid_argument("parameter vectors must match roster size");
  }
  double sum = 0.0;
  for (double v : pi) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("pi entries must be finite and non-negative");
    }
    sum += v;
  }
  if (sum <= 0.0) {
    throw std::invalid_argument("sum(pi) must be positive");
  }
  for (auto& v : pi) v /= sum;
  for (auto& v : d) v /= sum;

  // Raise floored entries; take the added mass from the largest entry so the
  // sum stays exactly 1.
  double deficit = 0.0;
  std::size_t largest = 0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] < kPiFloor) {
      deficit += kPiFloor - pi[i];
      pi[i] = kPiFloor;
    }
    if (pi[i] > pi[largest]) largest = i;
  }
  pi[largest] -= deficit;

  return TeamParams(std::move(roster), zip_params(pi, d), true);
}

TeamParams TeamParams::raw(Roster roster, std::vector<double> pi,
                           std::vector<double> d) {
  return TeamParams(std::move(roster), zip_params(pi, d), false);
}

std::vector<double> TeamParams::pis() const {
  std::vector<double> out(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) out[i] = params_[i].pi;
  return out;
}

std::vector<double> TeamParams::ds() const {
  std::vector<double> out(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) out[i] = params_[i].d;
  return out;
}

TurnSequence::TurnSequence(std::vector<std::size_t> speakers,
                           std::size_t n_members)
    : speakers_(std::move(speakers)) {
  for (std::size_t t = 0; t < speakers_.size(); ++t) {
    if (speakers_[t] >= n_members) {
      throw std::invalid_argument("speaker index out of roster range");
    }
    if (t > 0 && speakers_[t] == speakers_[t - 1]) {
      throw std::invalid_argument(
          "consecutive turns by the same speaker are one turn");
    }
  }
}

std::optional<std::size_t> ConversationState::previous_speaker() const {
  for (std::size_t i = 0; i < last_spoke.size(); ++i) {
    if (last_spoke[i] == current_turn - 1 && last_spoke[i] != kNever) return i;
  }
  return std::nullopt;
}

}  // namespace turntaker
