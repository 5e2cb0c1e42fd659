#include "turntaker/likelihood_kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace turntaker {

LikelihoodKernel::LikelihoodKernel(const std::vector<TurnSequence>& meetings,
                                   std::size_t n_members)
    : n_(n_members) {
  if (n_ < 2) throw std::invalid_argument("kernel needs at least two members");
  std::size_t total = 0;
  for (const auto& seq : meetings) total += seq.size();
  decay_.resize(total * n_);
  speaker_.resize(total);
  excluded_.resize(total);

  std::size_t row = 0;
  std::vector<std::int64_t> last_spoke(n_);
  for (const auto& seq : meetings) {
    std::fill(last_spoke.begin(), last_spoke.end(), ConversationState::kNever);
    std::int32_t prev = -1;
    for (std::size_t t = 0; t < seq.size(); ++t, ++row) {
      if (seq[t] >= n_) {
        throw std::invalid_argument("speaker index out of roster range");
      }
      const auto turn = static_cast<std::int64_t>(t) + 1;  // 1-based
      double* w = decay_.data() + row * n_;
      for (std::size_t j = 0; j < n_; ++j) {
        w[j] = last_spoke[j] == ConversationState::kNever
                   ? 0.0
                   : std::exp(-kMemoryDecayRate *
                              static_cast<double>(turn - last_spoke[j]));
      }
      speaker_[row] = static_cast<std::int32_t>(seq[t]);
      excluded_[row] = prev;
      prev = speaker_[row];
      last_spoke[seq[t]] = turn;
    }
  }
}

double LikelihoodKernel::log_likelihood(std::span<const double> pi,
                                        std::span<const double> d) const {
  return split_log_likelihood(pi, d, total_turns()).train;
}

LikelihoodKernel::SplitLogLikelihood LikelihoodKernel::split_log_likelihood(
    std::span<const double> pi, std::span<const double> d,
    std::size_t n_train) const {
  if (pi.size() != n_ || d.size() != n_) {
    throw std::invalid_argument("parameter vectors must match member count");
  }
  SplitLogLikelihood out;
  const std::size_t total = total_turns();
  const double* w = decay_.data();
  for (std::size_t row = 0; row < total; ++row, w += n_) {
    const std::int32_t ex = excluded_[row];
    double sum = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (static_cast<std::int32_t>(j) == ex) continue;
      sum += pi[j] + d[j] * w[j];
    }
    const std::int32_t h = speaker_[row];
    const double term = std::log((pi[h] + d[h] * w[h]) / sum);
    (row < n_train ? out.train : out.test) += term;
  }
  return out;
}

}  // namespace turntaker
