#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "turntaker/types.hpp"

namespace turntaker {

/// Repeated-evaluation kernel for the observed-data log-likelihood.
///
/// The decay factor exp(-0.5 * gap) of every member at every turn depends
/// only on the observed history, not on the parameters, so it is precomputed
/// once. Each evaluation is then pure arithmetic over (pi, d), which is what
/// makes maximum-likelihood fitting cheap. The streaming implementation in
/// model.hpp is the reference this kernel is tested against.
class LikelihoodKernel {
 public:
  LikelihoodKernel(const std::vector<TurnSequence>& meetings,
                   std::size_t n_members);

  std::size_t n_members() const noexcept { return n_; }
  std::size_t total_turns() const noexcept { return speaker_.size(); }

  /// Log-likelihood of the whole dataset under (pi, d). Meeting boundaries
  /// (state resets) are baked into the precomputed weights.
  double log_likelihood(std::span<const double> pi,
                        std::span<const double> d) const;

  struct SplitLogLikelihood {
    double train = 0.0;
    double test = 0.0;
  };

  /// Same pass, but the per-turn terms are accumulated separately for the
  /// first `n_train` turns of the concatenated timeline and the rest. Test
  /// turns are scored conditional on the true prior history.
  SplitLogLikelihood split_log_likelihood(std::span<const double> pi,
                                          std::span<const double> d,
                                          std::size_t n_train) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> decay_;          // total_turns x n_members, row-major
  std::vector<std::int32_t> speaker_;  // actual speaker of each turn
  std::vector<std::int32_t> excluded_; // previous speaker, -1 on first turns
};

}  // namespace turntaker
