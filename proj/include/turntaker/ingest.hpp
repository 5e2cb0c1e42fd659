#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "turntaker/fit.hpp"
#include "turntaker/stats.hpp"
#include "turntaker/types.hpp"

namespace turntaker {

/// Bad files, malformed rows, schema mismatches: anything the caller handed
/// us that cannot be used. The CLI maps this to the usage exit code.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One annotated utterance: speaker and time span within a meeting.
struct RawAnnotation {
  std::string meeting;
  std::string speaker;
  double start = 0.0;
  double end = 0.0;

  bool operator==(const RawAnnotation&) const = default;
};

struct ParseIssue {
  std::size_t line = 0;  // 1-based, header is line 1
  std::string message;
};

struct AnnotationParse {
  std::vector<RawAnnotation> rows;
  std::vector<ParseIssue> issues;
};

/// Parses `meeting,speaker,start,end` rows. Every row either lands in `rows`
/// or produces a row-addressed issue; nothing is dropped silently.
AnnotationParse parse_annotations(std::istream& in, char delimiter = ',');

struct Meeting {
  std::string id;
  TurnSequence turns;

  bool operator==(const Meeting&) const = default;
};

struct Dataset {
  Roster roster;
  std::vector<Meeting> meetings;        // ordered by meeting id
  std::vector<TraitRecord> traits;      // empty unless a trait file was given

  std::vector<TurnSequence> sequences() const;
  std::size_t total_turns() const;
};

/// Normalizes annotations into turn sequences: within each meeting sort by
/// (start, end, speaker), collapse consecutive annotations by the same
/// speaker into one turn. The roster is the lexicographically sorted union
/// of speakers; meetings are ordered by id.
Dataset build_sequences(std::vector<RawAnnotation> annotations);

struct TraitParse {
  std::vector<TraitRecord> records;
  std::vector<ParseIssue> issues;
};

/// Parses `member,team,extraversion,agreeableness,conscientiousness,sex,
/// nationality` rows. Categories normalize case-insensitively (male/female,
/// american/non-american); member ids must be unique.
TraitParse parse_traits(std::istream& in, char delimiter = ',');

/// Writes meetings in annotation format with unit-spaced synthetic
/// timestamps (turn t spans [t, t+1)). parse_annotations + build_sequences
/// reproduce the sequences exactly.
void write_annotations(std::ostream& out,
                       const std::vector<Meeting>& meetings,
                       const Roster& roster);

/// Reads and validates an annotation file (plus optional trait file) into a
/// Dataset. Throws InputError listing the offending rows on any issue.
Dataset load_dataset(const std::filesystem::path& annotations,
                     const std::optional<std::filesystem::path>& traits = {});

// ---------------------------------------------------------------------------
// Result persistence. JSON files carry {"schema_version": 1, "kind": ...};
// loading a file with a different version or kind is an explicit error.
// The tabular report kinds can also be written as plot-ready CSV, which
// loads back through the same load_* entry points.
// ---------------------------------------------------------------------------

inline constexpr int kSchemaVersion = 1;

enum class ReportFormat { kJson, kCsv };

struct PatternReportRow {
  std::string variant;    // "full" | "reduced"
  std::string statistic;  // "speaking" | "aba" | "dyadic"
  std::string subject;    // member id, or "a|b" for a dyad
  double observed = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool covered = false;
  std::int64_t excluded = 0;

  bool operator==(const PatternReportRow&) const = default;
};

struct PatternReportFile {
  double level = 0.95;
  std::int64_t replications = 0;
  std::int64_t turns = 0;
  std::vector<PatternReportRow> rows;

  bool operator==(const PatternReportFile&) const = default;
};

struct SplitReportRow {
  std::string dataset;
  double train_ll_reduced = 0.0;
  double test_ll_reduced = 0.0;
  double train_ll_full = 0.0;
  double test_ll_full = 0.0;

  bool operator==(const SplitReportRow&) const = default;
};

struct SplitReportFile {
  double split_fraction = 0.8;
  std::vector<SplitReportRow> rows;

  bool operator==(const SplitReportFile&) const = default;
};

struct TraitRankingRow {
  std::string target;  // "pi" | "d"
  std::string model;
  int k = 0;
  double aicc_value = 0.0;
  double delta = 0.0;
  double weight = 0.0;
  bool top_set = false;
  double evidence_ratio_vs_null = 0.0;

  bool operator==(const TraitRankingRow&) const = default;
};

struct TraitRankingsFile {
  int n_observations = 0;
  std::vector<TraitRankingRow> rows;

  bool operator==(const TraitRankingsFile&) const = default;
};

void save_team_params(const std::filesystem::path& path, const TeamParams& team);
TeamParams load_team_params(const std::filesystem::path& path);

void save_fit_result(const std::filesystem::path& path, const FitResult& result);
FitResult load_fit_result(const std::filesystem::path& path);

/// Accepts either a team_params or a fit_result file and returns the params.
TeamParams load_params_or_fit(const std::filesystem::path& path);

void save_split_report(const std::filesystem::path& path,
                       const SplitReportFile& report,
                       ReportFormat format = ReportFormat::kJson);
SplitReportFile load_split_report(const std::filesystem::path& path);

void save_pattern_report(const std::filesystem::path& path,
                         const PatternReportFile& report,
                         ReportFormat format = ReportFormat::kJson);
PatternReportFile load_pattern_report(const std::filesystem::path& path);

void save_trait_rankings(const std::filesystem::path& path,
                         const TraitRankingsFile& rankings,
                         ReportFormat format = ReportFormat::kJson);
TraitRankingsFile load_trait_rankings(const std::filesystem::path& path);

}  // namespace turntaker
