#include "turntaker/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>

#include "turntaker/likelihood_kernel.hpp"
#include "turntaker/nelder_mead.hpp"
#include "turntaker/rng.hpp"
#include "turntaker/threads.hpp"

namespace turntaker {

std::string_view variant_name(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::kFull: return "full";
    case ModelVariant::kReduced: return "reduced";
    case ModelVariant::kTied: return "tied";
  }
  return "full";
}

std::optional<ModelVariant> variant_from_name(std::string_view name) {
  if (name == "full") return ModelVariant::kFull;
  if (name == "reduced") return ModelVariant::kReduced;
  if (name == "tied") return ModelVariant::kTied;
  return std::nullopt;
}

int free_parameter_count(ModelVariant variant, std::size_t n_members) {
  const int n = static_cast<int>(n_members);
  switch (variant) {
    case ModelVariant::kFull: return 2 * n - 1;
    case ModelVariant::kReduced: return n - 1;
    case ModelVariant::kTied: return 1;
  }
  return 2 * n - 1;
}

namespace {

constexpr double kLogitClamp = 30.0;
constexpr double kLogDLow = -30.0;
constexpr double kLogDHigh = 10.0;

double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// Baselines from n-1 free logits with the last logit pinned to 0. Clamping
// flattens the objective at extreme logits, which lets the simplex collapse
// instead of chasing an unbounded direction.
void decode_pi(std::span<const double> logits, std::vector<double>& pi) {
  const std::size_t n = logits.size() + 1;
  pi.resize(n);
  double maxv = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    pi[i] = clamp(logits[i], -kLogitClamp, kLogitClamp);
    maxv = std::max(maxv, pi[i]);
  }
  pi[n - 1] = 0.0;
  double sum = 0.0;
  for (double& v : pi) {
    v = std::exp(v - maxv);
    sum += v;
  }
  for (double& v : pi) v /= sum;
}

struct VariantCodec {
  ModelVariant variant;
  std::size_t n;

  std::size_t dim() const {
    switch (variant) {
      case ModelVariant::kFull: return 2 * n - 1;
      case ModelVariant::kReduced: return n - 1;
      case ModelVariant::kTied: return 1;
    }
    return 2 * n - 1;
  }

  void decode(std::span<const double> x, std::vector<double>& pi,
              std::vector<double>& d) const {
    switch (variant) {
      case ModelVariant::kFull:
        decode_pi(x.subspan(0, n - 1), pi);
        d.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
          d[i] = std::exp(clamp(x[n - 1 + i], kLogDLow, kLogDHigh));
        }
        break;
      case ModelVariant::kReduced:
        decode_pi(x.subspan(0, n - 1), pi);
        d.assign(n, 0.0);
        break;
      case ModelVariant::kTied:
        pi.assign(n, 1.0 / static_cast<double>(n));
        d.assign(n, std::exp(clamp(x[0], kLogDLow, kLogDHigh)));
        break;
    }
  }
};

// Logits that reproduce `pi` under decode_pi.
std::vector<double> pi_to_logits(const std::vector<double>& pi) {
  std::vector<double> logits(pi.size() - 1);
  const double ref = std::log(pi.back());
  for (std::size_t i = 0; i + 1 < pi.size(); ++i) {
    logits[i] = clamp(std::log(pi[i]) - ref, -kLogitClamp, kLogitClamp);
  }
  return logits;
}

std::vector<double> restart_point(const VariantCodec& codec, int restart,
                                  std::uint64_t seed,
                                  const std::vector<double>* reduced_pi) {
  const std::size_t n = codec.n;
  std::vector<double> x(codec.dim(), 0.0);
  const double log_d0 = std::log(0.5);

  if (restart == 0) {
    switch (codec.variant) {
      case ModelVariant::kFull:
        // The reduced optimum seeds the first full restart; near-zero d keeps
        // the starting likelihood at the reduced value.
        if (reduced_pi) {
          auto logits = pi_to_logits(*reduced_pi);
          std::copy(logits.begin(), logits.end(), x.begin());
        }
        for (std::size_t i = 0; i < n; ++i) x[n - 1 + i] = std::log(1e-3);
        return x;
      case ModelVariant::kReduced:
        return x;  // uniform baselines
      case ModelVariant::kTied:
        x[0] = log_d0;
        return x;
    }
  }
  if (restart == 1 && codec.variant == ModelVariant::kFull) {
    for (std::size_t i = 0; i < n; ++i) x[n - 1 + i] = log_d0;
    return x;
  }
  RngStream rng(seed, static_cast<std::uint64_t>(restart));
  switch (codec.variant) {
    case ModelVariant::kFull:
      for (std::size_t i = 0; i + 1 < n; ++i) x[i] = rng.next_normal();
      for (std::size_t i = 0; i < n; ++i) {
        x[n - 1 + i] = log_d0 + rng.next_normal();
      }
      break;
    case ModelVariant::kReduced:
      for (std::size_t i = 0; i + 1 < n; ++i) x[i] = rng.next_normal();
      break;
    case ModelVariant::kTied:
      x[0] = log_d0 + rng.next_normal();
      break;
  }
  return x;
}

}  // namespace

FitResult fit(const std::vector<TurnSequence>& data, const Roster& roster,
              ModelVariant variant, const FitOptions& options) {
  const std::size_t n = roster.size();
  const int k = free_parameter_count(variant, n);
  if (options.restarts < 1) {
    throw std::invalid_argument("at least one restart is required");
  }

  LikelihoodKernel kernel(data, n);
  const std::size_t total = kernel.total_turns();
  if (total < static_cast<std::size_t>(k) + 1) {
    throw std::invalid_argument(
        "not enough turns to fit: need at least k+1 = " + std::to_string(k + 1));
  }

  std::vector<std::string> warnings;
  if (total < static_cast<std::size_t>(10 * k)) {
    warnings.push_back("fewer than 10 turns per free parameter; estimates "
                       "will be noisy");
  }
  if (n == 2) {
    warnings.push_back("n = 2 forces alternation after the first turn; "
                       "parameters are weakly identified");
  }
  std::vector<std::size_t> turn_counts(n, 0);
  for (const auto& seq : data) {
    for (std::size_t s : seq) ++turn_counts[s];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (turn_counts[i] == 0) {
      warnings.push_back("member " + roster.member(i) +
                         " never observed speaking; pi rests at the floor");
    }
  }

  // The reduced optimum joins a full fit's candidate set (evaluated at d = 0
  // exactly), which makes LL(full) >= LL(reduced) hold by construction.
  std::optional<FitResult> reduced_result;
  std::optional<std::vector<double>> reduced_pi;
  if (variant == ModelVariant::kFull) {
    reduced_result = fit(data, roster, ModelVariant::kReduced, options);
    reduced_pi = reduced_result->team.pis();
  }

  const VariantCodec codec{variant, n};
  const NelderMeadOptions nm_options{options.max_iterations, options.tolerance,
                                     0.5};
  std::vector<NelderMeadResult> outcomes(
      static_cast<std::size_t>(options.restarts));

#pragma omp parallel for schedule(dynamic) num_threads(worker_thread_count())
  for (int r = 0; r < options.restarts; ++r) {
    std::vector<double> pi_buf, d_buf;
    const auto objective = [&](std::span<const double> x) {
      codec.decode(x, pi_buf, d_buf);
      return -kernel.log_likelihood(pi_buf, d_buf);
    };
    const std::vector<double> x0 = restart_point(
        codec, r, options.seed, reduced_pi ? &*reduced_pi : nullptr);
    outcomes[static_cast<std::size_t>(r)] = nelder_mead(objective, x0, nm_options);
  }

  std::size_t winner = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r) {
    if (outcomes[r].f < outcomes[winner].f) winner = r;
  }

  if (variant == ModelVariant::kFull) {
    const std::vector<double> zero_d(n, 0.0);
    const double reduced_exact =
        -kernel.log_likelihood(*reduced_pi, zero_d);
    if (reduced_exact <= outcomes[winner].f) {
      FitResult result{reduced_result->team,
                       ModelVariant::kFull,
                       reduced_result->log_likelihood,
                       reduced_result->converged,
                       options.restarts,
                       k,
                       std::move(warnings)};
      return result;
    }
  }

  std::vector<double> pi, d;
  codec.decode(outcomes[winner].x, pi, d);
  TeamParams team = TeamParams::canonical(roster, std::move(pi), std::move(d));
  const double ll = kernel.log_likelihood(team.pis(), team.ds());
  return FitResult{std::move(team),
                   variant,
                   ll,
                   outcomes[winner].converged,
                   options.restarts,
                   k,
                   std::move(warnings)};
}

SplitEvaluation evaluate_split(const std::vector<TurnSequence>& data,
                               const Roster& roster, ModelVariant variant,
                               double fraction, const FitOptions& options) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("split fraction must lie in (0, 1)");
  }
  std::size_t total = 0;
  for (const auto& seq : data) total += seq.size();
  const auto n_train = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(total)));
  if (n_train == 0) {
    throw std::invalid_argument("training split contains no turns");
  }
  if (n_train >= total) {
    throw std::invalid_argument("test split contains no turns");
  }

  // First n_train turns of the concatenated timeline; the straddling meeting
  // is truncated inside.
  std::vector<TurnSequence> train;
  std::size_t taken = 0;
  for (const auto& seq : data) {
    if (taken >= n_train) break;
    const std::size_t want = std::min(seq.size(), n_train - taken);
    if (want == seq.size()) {
      train.push_back(seq);
    } else if (want > 0) {
      std::vector<std::size_t> prefix(seq.begin(), seq.begin() + want);
      train.emplace_back(std::move(prefix), roster.size());
    }
    taken += want;
  }

  const FitResult fitted = fit(train, roster, variant, options);

  LikelihoodKernel kernel(data, roster.size());
  const auto split = kernel.split_log_likelihood(fitted.team.pis(),
                                                 fitted.team.ds(), n_train);
  return SplitEvaluation{split.train, split.test, variant, fraction};
}

}  // namespace turntaker
