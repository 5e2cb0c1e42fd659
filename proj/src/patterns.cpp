#include "turntaker/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "turntaker/threads.hpp"

namespace turntaker {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Count accumulators shared by the single-sequence operations and the pooled
// multi-meeting report.
struct PatternCounts {
  std::vector<std::size_t> turns;          // per member
  std::vector<std::size_t> aba;            // per member, qualifying turns
  std::vector<std::size_t> dyad_attributed;  // per dyad
  std::size_t total = 0;

  explicit PatternCounts(std::size_t n)
      : turns(n, 0), aba(n, 0), dyad_attributed(dyad_count(n), 0) {}
};

void accumulate_counts(const TurnSequence& seq, std::size_t n,
                       std::size_t min_len, PatternCounts& counts) {
  const std::size_t t_len = seq.size();
  counts.total += t_len;
  for (std::size_t t = 0; t < t_len; ++t) {
    ++counts.turns[seq[t]];
    if (t >= 2 && seq[t - 2] == seq[t]) ++counts.aba[seq[t]];
  }
  // Maximal runs whose speakers stay inside one dyad. A run of length >= 2
  // necessarily contains both members, so set equality comes free.
  for (std::size_t a = 0; a + 1 < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const std::size_t idx = dyad_index(a, b, n);
      std::size_t run = 0;
      for (std::size_t t = 0; t <= t_len; ++t) {
        if (t < t_len && (seq[t] == a || seq[t] == b)) {
          ++run;
          continue;
        }
        if (run >= min_len) counts.dyad_attributed[idx] += run;
        run = 0;
      }
    }
  }
}

PatternReport counts_to_report(const PatternCounts& counts) {
  PatternReport report;
  const std::size_t n = counts.turns.size();
  report.speaking.resize(n);
  report.aba.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    report.speaking[i] =
        static_cast<double>(counts.turns[i]) / static_cast<double>(counts.total);
    report.aba[i] = counts.turns[i] == 0
                        ? kNaN
                        : static_cast<double>(counts.aba[i]) /
                              static_cast<double>(counts.turns[i]);
  }
  report.dyadic.resize(counts.dyad_attributed.size());
  for (std::size_t k = 0; k < report.dyadic.size(); ++k) {
    report.dyadic[k] = static_cast<double>(counts.dyad_attributed[k]) /
                       static_cast<double>(counts.total);
  }
  return report;
}

void validate_sequence(const TurnSequence& seq, const Roster& roster) {
  for (std::size_t s : seq) {
    if (s >= roster.size()) {
      throw std::invalid_argument("sequence speaker index out of roster range");
    }
  }
}

}  // namespace

std::size_t dyad_count(std::size_t n_members) {
  return n_members * (n_members - 1) / 2;
}

std::size_t dyad_index(std::size_t i, std::size_t j, std::size_t n_members) {
  if (i > j) std::swap(i, j);
  if (i == j || j >= n_members) {
    throw std::invalid_argument("dyad needs two distinct members in range");
  }
  return i * n_members - i * (i + 1) / 2 + (j - i - 1);
}

std::pair<std::size_t, std::size_t> dyad_members(std::size_t index,
                                                 std::size_t n_members) {
  for (std::size_t i = 0; i + 1 < n_members; ++i) {
    const std::size_t row = n_members - i - 1;
    if (index < row) return {i, i + 1 + index};
    index -= row;
  }
  throw std::invalid_argument("dyad index out of range");
}

std::vector<double> speaking_proportions(const TurnSequence& seq,
                                         const Roster& roster) {
  if (seq.empty()) {
    throw std::invalid_argument("speaking proportions need at least one turn");
  }
  validate_sequence(seq, roster);
  PatternCounts counts(roster.size());
  accumulate_counts(seq, roster.size(), 4, counts);
  return counts_to_report(counts).speaking;
}

std::vector<double> aba_proportions(const TurnSequence& seq,
                                    const Roster& roster) {
  if (seq.empty()) {
    throw std::invalid_argument("aba proportions need at least one turn");
  }
  validate_sequence(seq, roster);
  PatternCounts counts(roster.size());
  accumulate_counts(seq, roster.size(), 4, counts);
  return counts_to_report(counts).aba;
}

std::vector<double> dyadic_long_proportions(const TurnSequence& seq,
                                            const Roster& roster,
                                            std::size_t min_len) {
  if (seq.empty()) {
    throw std::invalid_argument("dyadic proportions need at least one turn");
  }
  if (min_len < 2) {
    throw std::invalid_argument("min_len must be >= 2");
  }
  validate_sequence(seq, roster);
  PatternCounts counts(roster.size());
  accumulate_counts(seq, roster.size(), min_len, counts);
  return counts_to_report(counts).dyadic;
}

PatternReport pattern_report(std::span<const TurnSequence> meetings,
                             const Roster& roster, std::size_t min_len) {
  if (min_len < 2) {
    throw std::invalid_argument("min_len must be >= 2");
  }
  PatternCounts counts(roster.size());
  for (const auto& seq : meetings) {
    validate_sequence(seq, roster);
    accumulate_counts(seq, roster.size(), min_len, counts);
  }
  if (counts.total == 0) {
    throw std::invalid_argument("pattern report needs at least one turn");
  }
  return counts_to_report(counts);
}

PercentileInterval percentile_ci(std::vector<double> values, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("level must lie in (0, 1)");
  }
  PercentileInterval out;
  auto usable_end = std::remove_if(values.begin(), values.end(),
                                   [](double v) { return !std::isfinite(v); });
  out.excluded = static_cast<std::size_t>(values.end() - usable_end);
  values.erase(usable_end, values.end());
  if (values.empty()) {
    throw std::invalid_argument("percentile interval needs at least one value");
  }
  std::sort(values.begin(), values.end());

  const auto m = static_cast<double>(values.size());
  const auto rank = [m](double p) {
    // Nearest rank, 1-based. The slack keeps products like 0.05 * 20 from
    // ceiling up one rank on fp noise.
    auto r = static_cast<std::size_t>(std::ceil(p * m - 1e-9));
    return std::clamp<std::size_t>(r, 1, static_cast<std::size_t>(m));
  };
  out.low = values[rank((1.0 - level) / 2.0) - 1];
  out.high = values[rank((1.0 + level) / 2.0) - 1];
  out.small_sample = values.size() < 40;
  return out;
}

std::vector<CoverageVerdict> coverage_report(
    const PatternReport& observed, std::span<const PatternReport> ensemble,
    double level) {
  if (ensemble.empty()) {
    throw std::invalid_argument("coverage report needs a non-empty ensemble");
  }
  const std::size_t n = observed.speaking.size();
  std::vector<CoverageVerdict> verdicts;
  verdicts.reserve(2 * n + observed.dyadic.size());

  std::vector<double> values(ensemble.size());
  const auto add = [&](PatternStatistic stat, std::size_t subject, double obs,
                       auto accessor) {
    std::size_t usable = 0;
    for (std::size_t r = 0; r < ensemble.size(); ++r) {
      values[r] = accessor(ensemble[r]);
      if (std::isfinite(values[r])) ++usable;
    }
    if (usable == 0) {
      verdicts.push_back({stat, subject, obs, kNaN, kNaN, false, values.size()});
      return;
    }
    const PercentileInterval ci = percentile_ci(values, level);
    verdicts.push_back({stat, subject, obs, ci.low, ci.high,
                        ci.low <= obs && obs <= ci.high, ci.excluded});
  };

  for (std::size_t i = 0; i < n; ++i) {
    add(PatternStatistic::kSpeaking, i, observed.speaking[i],
        [i](const PatternReport& r) { return r.speaking[i]; });
  }
  for (std::size_t i = 0; i < n; ++i) {
    add(PatternStatistic::kAba, i, observed.aba[i],
        [i](const PatternReport& r) { return r.aba[i]; });
  }
  for (std::size_t k = 0; k < observed.dyadic.size(); ++k) {
    add(PatternStatistic::kDyadic, k, observed.dyadic[k],
        [k](const PatternReport& r) { return r.dyadic[k]; });
  }
  return verdicts;
}

std::vector<PatternReport> ensemble_pattern_reports(const TeamParams& team,
                                                    const SimConfig& config,
                                                    std::size_t min_len) {
  if (config.turns < 1) throw std::invalid_argument("turns must be >= 1");
  if (config.replications < 1) {
    throw std::invalid_argument("replications must be >= 1");
  }
  const std::int64_t n_rep = config.replications;
  std::vector<PatternReport> reports(static_cast<std::size_t>(n_rep));
#pragma omp parallel for schedule(dynamic, 8) \
    num_threads(worker_thread_count())
  for (std::int64_t r = 0; r < n_rep; ++r) {
    RngStream rng(config.seed, static_cast<std::uint64_t>(r));
    const TurnSequence seq = simulate_conversation(team, config.turns, rng);
    reports[static_cast<std::size_t>(r)] =
        pattern_report(std::span(&seq, 1), team.roster(), min_len);
  }
  return reports;
}

}  // namespace turntaker
