#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "turntaker/simulate.hpp"
#include "turntaker/types.hpp"

namespace turntaker {

/// Unordered member pairs {i, j}, i < j, laid out lexicographically:
/// {0,1}, {0,2}, ..., {0,n-1}, {1,2}, ...
std::size_t dyad_count(std::size_t n_members);
std::size_t dyad_index(std::size_t i, std::size_t j, std::size_t n_members);
std::pair<std::size_t, std::size_t> dyad_members(std::size_t index,
                                                 std::size_t n_members);

/// Turn share per member: own turn count / total turns.
std::vector<double> speaking_proportions(const TurnSequence& seq,
                                         const Roster& roster);

/// Per member: fraction of the member's own turns whose lag-2 predecessor is
/// also theirs (exactly one intervening turn by someone else). NaN for
/// members with no turns.
std::vector<double> aba_proportions(const TurnSequence& seq,
                                    const Roster& roster);

/// Per unordered dyad: fraction of all turns lying inside a maximal
/// contiguous window whose speaker set is exactly that dyad and whose length
/// is at least `min_len`. A turn shared by overlapping windows of different
/// dyads counts once for each dyad.
std::vector<double> dyadic_long_proportions(const TurnSequence& seq,
                                            const Roster& roster,
                                            std::size_t min_len = 4);

/// The three statistics above, with counts pooled over meetings (lag-2 and
/// window scans never cross a meeting boundary).
struct PatternReport {
  std::vector<double> speaking;
  std::vector<double> aba;     // NaN marks members with zero turns
  std::vector<double> dyadic;  // indexed by dyad_index

  bool operator==(const PatternReport&) const = default;
};

PatternReport pattern_report(std::span<const TurnSequence> meetings,
                             const Roster& roster, std::size_t min_len = 4);

struct PercentileInterval {
  double low = 0.0;
  double high = 0.0;
  std::size_t excluded = 0;  // non-finite entries dropped before ranking
  bool small_sample = false; // fewer than 40 usable values
};

/// Percentile interval by the nearest-rank method: ranks
/// ceil((1 -/+ level)/2 * m) over the sorted usable values.
PercentileInterval percentile_ci(std::vector<double> values,
                                 double level = 0.95);

enum class PatternStatistic { kSpeaking, kAba, kDyadic };

struct CoverageVerdict {
  PatternStatistic statistic = PatternStatistic::kSpeaking;
  std::size_t subject = 0;  // member index; dyad index for kDyadic
  double observed = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool covered = false;
  std::size_t excluded = 0;
};

/// One verdict per member statistic and per dyad statistic; covered means
/// ci_low <= observed <= ci_high.
std::vector<CoverageVerdict> coverage_report(
    const PatternReport& observed, std::span<const PatternReport> ensemble,
    double level = 0.95);

/// Pattern report of every replication of an ensemble, computed without
/// keeping the simulated sequences. Replication r uses substream
/// (config.seed, r), exactly like replicate_ensemble, so the reports match
/// those computed from its output.
std::vector<PatternReport> ensemble_pattern_reports(const TeamParams& team,
                                                    const SimConfig& config,
                                                    std::size_t min_len = 4);

}  // namespace turntaker
