#include "turntaker/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace turntaker {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == delimiter) {
      fields.push_back(trim(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(trim(field));
  return fields;
}

bool parse_double(const std::string& field, double& out) {
  if (field.empty()) return false;
  char* end = nullptr;
  out = std::strtod(field.c_str(), &end);
  return end == field.c_str() + field.size();
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_csv_field(const std::string& field) {
  if (field.find_first_of(",\n\r") != std::string::npos) {
    throw InputError("field contains a delimiter or newline: " + field);
  }
}

// --- JSON envelope -------------------------------------------------------

json make_envelope(std::string_view kind) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = std::string(kind);
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InputError("not valid JSON (" + path.string() + "): " + e.what());
  }
  return j;
}

json load_envelope(const std::filesystem::path& path, std::string_view kind) {
  const json j = read_json(path);
  if (!j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
    throw InputError("missing schema_version: " + path.string());
  }
  if (j["schema_version"].get<int>() != kSchemaVersion) {
    throw InputError("unsupported schema_version " +
                     j["schema_version"].dump() + " in " + path.string());
  }
  const std::string got = j.value("kind", "");
  if (got != kind) {
    throw InputError("expected kind '" + std::string(kind) + "' but found '" +
                     got + "' in " + path.string());
  }
  return j;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(); }

double from_nullable(const json& j) {
  return j.is_null() ? kNaN : j.get<double>();
}

json team_to_json(const TeamParams& team) {
  json j;
  j["roster"] = team.roster().members();
  j["pi"] = team.pis();
  j["d"] = team.ds();
  j["normalized"] = team.normalized();
  return j;
}

TeamParams team_from_json(const json& j) {
  const auto members = j.at("roster").get<std::vector<std::string>>();
  const auto pi = j.at("pi").get<std::vector<double>>();
  const auto d = j.at("d").get<std::vector<double>>();
  std::vector<MemberParams> params(pi.size());
  if (pi.size() != d.size()) throw InputError("pi and d lengths differ");
  for (std::size_t i = 0; i < pi.size(); ++i) params[i] = {pi[i], d[i]};
  try {
    return TeamParams(Roster(members), std::move(params),
                      j.at("normalized").get<bool>());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("invalid team parameters: ") + e.what());
  }
}

bool looks_like_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open: " + path.string());
  char c = 0;
  while (in.get(c)) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    return c == '{';
  }
  throw InputError("empty file: " + path.string());
}

// --- CSV tables ----------------------------------------------------------

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path,
                  const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open: " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InputError("empty file: " + path.string());
  table.header = split_fields(line, ',');
  const auto expected = split_fields(expected_header, ',');
  if (table.header != expected) {
    throw InputError("unexpected column schema in " + path.string() +
                     " (expected header: " + expected_header + ")");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_fields(line, ',');
    if (fields.size() != expected.size()) {
      throw InputError("line " + std::to_string(line_no) + " of " +
                       path.string() + ": expected " +
                       std::to_string(expected.size()) + " fields");
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

double csv_double(const std::vector<std::string>& fields, std::size_t i,
                  std::size_t line_hint) {
  double v = 0.0;
  if (fields[i] == "nan") return kNaN;
  if (!parse_double(fields[i], v)) {
    throw InputError("row " + std::to_string(line_hint) +
                     ": not a number: " + fields[i]);
  }
  return v;
}

std::int64_t csv_int(const std::vector<std::string>& fields, std::size_t i,
                     std::size_t line_hint) {
  const double v = csv_double(fields, i, line_hint);
  if (std::floor(v) != v) {
    throw InputError("row " + std::to_string(line_hint) +
                     ": not an integer: " + fields[i]);
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

// --- annotations ----------------------------------------------------------

AnnotationParse parse_annotations(std::istream& in, char delimiter) {
  AnnotationParse out;
  std::string line;
  if (!std::getline(in, line)) {
    out.issues.push_back({1, "missing header row"});
    return out;
  }
  const std::vector<std::string> header = split_fields(line, delimiter);
  if (header != std::vector<std::string>{"meeting", "speaker", "start", "end"}) {
    out.issues.push_back({1, "header must be meeting,speaker,start,end"});
    return out;
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, delimiter);
    if (fields.size() != 4) {
      out.issues.push_back({line_no, "expected 4 fields"});
      continue;
    }
    RawAnnotation row;
    row.meeting = fields[0];
    row.speaker = fields[1];
    if (row.meeting.empty() || row.speaker.empty()) {
      out.issues.push_back({line_no, "meeting and speaker must be non-empty"});
      continue;
    }
    if (!parse_double(fields[2], row.start) || !parse_double(fields[3], row.end)) {
      out.issues.push_back({line_no, "start and end must be numbers"});
      continue;
    }
    if (row.start < 0.0 || !(row.end > row.start)) {
      out.issues.push_back({line_no, "need 0 <= start < end"});
      continue;
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::vector<TurnSequence> Dataset::sequences() const {
  std::vector<TurnSequence> out;
  out.reserve(meetings.size());
  for (const auto& m : meetings) out.push_back(m.turns);
  return out;
}

std::size_t Dataset::total_turns() const {
  std::size_t total = 0;
  for (const auto& m : meetings) total += m.turns.size();
  return total;
}

Dataset build_sequences(std::vector<RawAnnotation> annotations) {
  std::set<std::string> speakers;
  for (const auto& row : annotations) speakers.insert(row.speaker);
  Roster roster(std::vector<std::string>(speakers.begin(), speakers.end()));

  std::map<std::string, std::vector<const RawAnnotation*>> by_meeting;
  for (const auto& row : annotations) by_meeting[row.meeting].push_back(&row);

  Dataset dataset{std::move(roster), {}, {}};
  for (auto& [meeting_id, rows] : by_meeting) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawAnnotation* a, const RawAnnotation* b) {
                       return std::tie(a->start, a->end, a->speaker) <
                              std::tie(b->start, b->end, b->speaker);
                     });
    std::vector<std::size_t> turns;
    for (const RawAnnotation* row : rows) {
      const std::size_t idx = *dataset.roster.index_of(row->speaker);
      if (turns.empty() || turns.back() != idx) turns.push_back(idx);
    }
    dataset.meetings.push_back(
        {meeting_id, TurnSequence(std::move(turns), dataset.roster.size())});
  }
  return dataset;
}

TraitParse parse_traits(std::istream& in, char delimiter) {
  TraitParse out;
  std::string line;
  if (!std::getline(in, line)) {
    out.issues.push_back({1, "missing header row"});
    return out;
  }
  const std::vector<std::string> expected{
      "member", "team", "extraversion", "agreeableness",
      "conscientiousness", "sex", "nationality"};
  if (split_fields(line, delimiter) != expected) {
    out.issues.push_back(
        {1, "header must be member,team,extraversion,agreeableness,"
            "conscientiousness,sex,nationality"});
    return out;
  }
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line, delimiter);
    if (fields.size() != expected.size()) {
      out.issues.push_back({line_no, "expected 7 fields"});
      continue;
    }
    TraitRecord record;
    record.member = fields[0];
    record.team = fields[1];
    if (record.member.empty() || record.team.empty()) {
      out.issues.push_back({line_no, "member and team must be non-empty"});
      continue;
    }
    if (!seen.insert(record.member).second) {
      out.issues.push_back({line_no, "duplicate member id: " + record.member});
      continue;
    }
    if (!parse_double(fields[2], record.extraversion) ||
        !parse_double(fields[3], record.agreeableness) ||
        !parse_double(fields[4], record.conscientiousness)) {
      out.issues.push_back({line_no, "trait values must be numbers"});
      continue;
    }
    const std::string sex = lower(fields[5]);
    if (sex == "male") {
      record.sex = Sex::kMale;
    } else if (sex == "female") {
      record.sex = Sex::kFemale;
    } else {
      out.issues.push_back({line_no, "unknown sex value: " + fields[5]});
      continue;
    }
    const std::string nat = lower(fields[6]);
    if (nat == "american") {
      record.nationality = Nationality::kAmerican;
    } else if (nat == "non-american") {
      record.nationality = Nationality::kNonAmerican;
    } else {
      out.issues.push_back({line_no, "unknown nationality value: " + fields[6]});
      continue;
    }
    out.records.push_back(std::move(record));
  }
  return out;
}

void write_annotations(std::ostream& out, const std::vector<Meeting>& meetings,
                       const Roster& roster) {
  out << "meeting,speaker,start,end\n";
  for (const auto& meeting : meetings) {
    check_csv_field(meeting.id);
    for (std::size_t t = 0; t < meeting.turns.size(); ++t) {
      const std::string& speaker = roster.member(meeting.turns[t]);
      check_csv_field(speaker);
      out << meeting.id << ',' << speaker << ',' << format_double(static_cast<double>(t))
          << ',' << format_double(static_cast<double>(t + 1)) << '\n';
    }
  }
}

namespace {

std::string format_issues(const std::filesystem::path& path,
                          const std::vector<ParseIssue>& issues) {
  std::ostringstream msg;
  msg << path.string() << ": " << issues.size() << " bad row(s)";
  const std::size_t show = std::min<std::size_t>(issues.size(), 5);
  for (std::size_t i = 0; i < show; ++i) {
    msg << "\n  line " << issues[i].line << ": " << issues[i].message;
  }
  if (issues.size() > show) msg << "\n  ...";
  return msg.str();
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& annotations,
                     const std::optional<std::filesystem::path>& traits) {
  std::ifstream in(annotations);
  if (!in) throw InputError("cannot open: " + annotations.string());
  AnnotationParse parsed = parse_annotations(in);
  if (!parsed.issues.empty()) {
    throw InputError(format_issues(annotations, parsed.issues));
  }
  if (parsed.rows.empty()) {
    throw InputError("no annotations in " + annotations.string());
  }
  Dataset dataset = build_sequences(std::move(parsed.rows));
  if (traits) {
    std::ifstream tin(*traits);
    if (!tin) throw InputError("cannot open: " + traits->string());
    TraitParse tp = parse_traits(tin);
    if (!tp.issues.empty()) throw InputError(format_issues(*traits, tp.issues));
    dataset.traits = std::move(tp.records);
  }
  return dataset;
}

// --- result files ---------------------------------------------------------

void save_team_params(const std::filesystem::path& path, const TeamParams& team) {
  json j = make_envelope("team_params");
  j.update(team_to_json(team));
  write_json(path, j);
}

TeamParams load_team_params(const std::filesystem::path& path) {
  return team_from_json(load_envelope(path, "team_params"));
}

void save_fit_result(const std::filesystem::path& path, const FitResult& result) {
  json j = make_envelope("fit_result");
  j.update(team_to_json(result.team));
  j["variant"] = std::string(variant_name(result.variant));
  j["log_likelihood"] = result.log_likelihood;
  j["converged"] = result.converged;
  j["n_restarts_used"] = result.n_restarts_used;
  j["free_parameter_count"] = result.free_parameter_count;
  j["warnings"] = result.warnings;
  write_json(path, j);
}

FitResult load_fit_result(const std::filesystem::path& path) {
  const json j = load_envelope(path, "fit_result");
  const auto variant = variant_from_name(j.at("variant").get<std::string>());
  if (!variant) {
    throw InputError("unknown variant in " + path.string());
  }
  return FitResult{team_from_json(j),
                   *variant,
                   j.at("log_likelihood").get<double>(),
                   j.at("converged").get<bool>(),
                   j.at("n_restarts_used").get<int>(),
                   j.at("free_parameter_count").get<int>(),
                   j.at("warnings").get<std::vector<std::string>>()};
}

TeamParams load_params_or_fit(const std::filesystem::path& path) {
  const json j = read_json(path);
  const std::string kind = j.value("kind", "");
  if (kind == "team_params") return load_team_params(path);
  if (kind == "fit_result") return load_fit_result(path).team;
  throw InputError("expected a team_params or fit_result file: " + path.string());
}

namespace {

const std::string kSplitHeader =
    "dataset,split_fraction,train_ll_reduced,test_ll_reduced,train_ll_full,"
    "test_ll_full";
const std::string kPatternHeader =
    "variant,statistic,subject,observed,ci_low,ci_high,covered,excluded,"
    "level,replications,turns";
const std::string kTraitHeader =
    "target,model,k,aicc,delta,weight,top_set,evidence_ratio_vs_null,n";

}  // namespace

void save_split_report(const std::filesystem::path& path,
                       const SplitReportFile& report, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    json j = make_envelope("split_report");
    j["split_fraction"] = report.split_fraction;
    j["rows"] = json::array();
    for (const auto& row : report.rows) {
      j["rows"].push_back({{"dataset", row.dataset},
                           {"train_ll_reduced", row.train_ll_reduced},
                           {"test_ll_reduced", row.test_ll_reduced},
                           {"train_ll_full", row.train_ll_full},
                           {"test_ll_full", row.test_ll_full}});
    }
    write_json(path, j);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << kSplitHeader << '\n';
  for (const auto& row : report.rows) {
    check_csv_field(row.dataset);
    out << row.dataset << ',' << format_double(report.split_fraction) << ','
        << format_double(row.train_ll_reduced) << ','
        << format_double(row.test_ll_reduced) << ','
        << format_double(row.train_ll_full) << ','
        << format_double(row.test_ll_full) << '\n';
  }
}

SplitReportFile load_split_report(const std::filesystem::path& path) {
  SplitReportFile report;
  if (looks_like_json(path)) {
    const json j = load_envelope(path, "split_report");
    report.split_fraction = j.at("split_fraction").get<double>();
    for (const auto& row : j.at("rows")) {
      report.rows.push_back({row.at("dataset").get<std::string>(),
                             row.at("train_ll_reduced").get<double>(),
                             row.at("test_ll_reduced").get<double>(),
                             row.at("train_ll_full").get<double>(),
                             row.at("test_ll_full").get<double>()});
    }
    return report;
  }
  const CsvTable table = read_csv(path, kSplitHeader);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    report.split_fraction = csv_double(f, 1, i + 2);
    report.rows.push_back({f[0], csv_double(f, 2, i + 2), csv_double(f, 3, i + 2),
                           csv_double(f, 4, i + 2), csv_double(f, 5, i + 2)});
  }
  if (report.rows.empty()) throw InputError("no rows in " + path.string());
  return report;
}

void save_pattern_report(const std::filesystem::path& path,
                         const PatternReportFile& report, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    json j = make_envelope("pattern_report");
    j["level"] = report.level;
    j["replications"] = report.replications;
    j["turns"] = report.turns;
    j["rows"] = json::array();
    for (const auto& row : report.rows) {
      j["rows"].push_back({{"variant", row.variant},
                           {"statistic", row.statistic},
                           {"subject", row.subject},
                           {"observed", nullable(row.observed)},
                           {"ci_low", nullable(row.ci_low)},
                           {"ci_high", nullable(row.ci_high)},
                           {"covered", row.covered},
                           {"excluded", row.excluded}});
    }
    write_json(path, j);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << kPatternHeader << '\n';
  for (const auto& row : report.rows) {
    check_csv_field(row.subject);
    out << row.variant << ',' << row.statistic << ',' << row.subject << ','
        << format_double(row.observed) << ',' << format_double(row.ci_low)
        << ',' << format_double(row.ci_high) << ',' << (row.covered ? 1 : 0)
        << ',' << row.excluded << ',' << format_double(report.level) << ','
        << report.replications << ',' << report.turns << '\n';
  }
}

PatternReportFile load_pattern_report(const std::filesystem::path& path) {
  PatternReportFile report;
  if (looks_like_json(path)) {
    const json j = load_envelope(path, "pattern_report");
    report.level = j.at("level").get<double>();
    report.replications = j.at("replications").get<std::int64_t>();
    report.turns = j.at("turns").get<std::int64_t>();
    for (const auto& row : j.at("rows")) {
      report.rows.push_back({row.at("variant").get<std::string>(),
                             row.at("statistic").get<std::string>(),
                             row.at("subject").get<std::string>(),
                             from_nullable(row.at("observed")),
                             from_nullable(row.at("ci_low")),
                             from_nullable(row.at("ci_high")),
                             row.at("covered").get<bool>(),
                             row.at("excluded").get<std::int64_t>()});
    }
    return report;
  }
  const CsvTable table = read_csv(path, kPatternHeader);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::size_t line = i + 2;
    report.rows.push_back({f[0], f[1], f[2], csv_double(f, 3, line),
                           csv_double(f, 4, line), csv_double(f, 5, line),
                           csv_int(f, 6, line) != 0, csv_int(f, 7, line)});
    report.level = csv_double(f, 8, line);
    report.replications = csv_int(f, 9, line);
    report.turns = csv_int(f, 10, line);
  }
  if (report.rows.empty()) throw InputError("no rows in " + path.string());
  return report;
}

void save_trait_rankings(const std::filesystem::path& path,
                         const TraitRankingsFile& rankings, ReportFormat format) {
  if (format == ReportFormat::kJson) {
    json j = make_envelope("trait_rankings");
    j["n_observations"] = rankings.n_observations;
    j["rows"] = json::array();
    for (const auto& row : rankings.rows) {
      j["rows"].push_back({{"target", row.target},
                           {"model", row.model},
                           {"k", row.k},
                           {"aicc", row.aicc_value},
                           {"delta", row.delta},
                           {"weight", row.weight},
                           {"top_set", row.top_set},
                           {"evidence_ratio_vs_null", row.evidence_ratio_vs_null}});
    }
    write_json(path, j);
    return;
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << kTraitHeader << '\n';
  for (const auto& row : rankings.rows) {
    out << row.target << ',' << row.model << ',' << row.k << ','
        << format_double(row.aicc_value) << ',' << format_double(row.delta)
        << ',' << format_double(row.weight) << ',' << (row.top_set ? 1 : 0)
        << ',' << format_double(row.evidence_ratio_vs_null) << ','
        << rankings.n_observations << '\n';
  }
}

TraitRankingsFile load_trait_rankings(const std::filesystem::path& path) {
  TraitRankingsFile rankings;
  if (looks_like_json(path)) {
    const json j = load_envelope(path, "trait_rankings");
    rankings.n_observations = j.at("n_observations").get<int>();
    for (const auto& row : j.at("rows")) {
      rankings.rows.push_back({row.at("target").get<std::string>(),
                               row.at("model").get<std::string>(),
                               row.at("k").get<int>(),
                               row.at("aicc").get<double>(),
                               row.at("delta").get<double>(),
                               row.at("weight").get<double>(),
                               row.at("top_set").get<bool>(),
                               row.at("evidence_ratio_vs_null").get<double>()});
    }
    return rankings;
  }
  const CsvTable table = read_csv(path, kTraitHeader);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& f = table.rows[i];
    const std::size_t line = i + 2;
    rankings.rows.push_back({f[0], f[1], static_cast<int>(csv_int(f, 2, line)),
                             csv_double(f, 3, line), csv_double(f, 4, line),
                             csv_double(f, 5, line), csv_int(f, 6, line) != 0,
                             csv_double(f, 7, line)});
    rankings.n_observations = static_cast<int>(csv_int(f, 8, line));
  }
  if (rankings.rows.empty()) throw InputError("no rows in " + path.string());
  return rankings;
}

}  // namespace turntaker
