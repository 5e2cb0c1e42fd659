// Command-line front end: simulate | fit | evaluate | patterns | traits.
// Exit codes: 0 success, 1 internal failure, 2 usage or bad input.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "turntaker/fit.hpp"
#include "turntaker/ingest.hpp"
#include "turntaker/patterns.hpp"
#include "turntaker/simulate.hpp"
#include "turntaker/stats.hpp"
#include "turntaker/types.hpp"

namespace {

using namespace turntaker;

struct CommonArgs {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  FitOptions fit_options;
};

ReportFormat parse_format(const std::string& format) {
  return format == "csv" ? ReportFormat::kCsv : ReportFormat::kJson;
}

void add_fit_flags(CLI::App* cmd, FitOptions& options) {
  cmd->add_option("--restarts", options.restarts, "Optimizer restarts")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iterations", options.max_iterations,
                  "Iteration cap per restart")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tolerance", options.tolerance,
                  "Log-likelihood improvement threshold")
      ->check(CLI::PositiveNumber);
}

std::string dyad_label(const Roster& roster, std::size_t dyad,
                       std::size_t n_members) {
  const auto [a, b] = dyad_members(dyad, n_members);
  return roster.member(a) + "|" + roster.member(b);
}

std::string statistic_label(PatternStatistic stat) {
  switch (stat) {
    case PatternStatistic::kSpeaking: return "speaking";
    case PatternStatistic::kAba: return "aba";
    case PatternStatistic::kDyadic: return "dyadic";
  }
  return "speaking";
}

int run_simulate(const CommonArgs& args, const std::string& params_path,
                 std::int64_t turns, std::int64_t replications) {
  const TeamParams team = load_params_or_fit(params_path);
  const SimConfig config{turns, args.seed, replications};
  const std::vector<TurnSequence> conversations = replicate_ensemble(team, config);

  std::vector<Meeting> meetings;
  meetings.reserve(conversations.size());
  char id[16];
  for (std::size_t r = 0; r < conversations.size(); ++r) {
    std::snprintf(id, sizeof(id), "m%04zu", r);
    meetings.push_back({id, conversations[r]});
  }
  std::ofstream out(args.out);
  if (!out) throw InputError("cannot open for writing: " + args.out);
  write_annotations(out, meetings, team.roster());
  std::cerr << "wrote " << conversations.size() << " conversation(s) of "
            << turns << " turns to " << args.out << "\n";
  return 0;
}

int run_fit(const CommonArgs& args, const std::string& data_path,
            const std::string& variant_name_arg) {
  const auto variant = variant_from_name(variant_name_arg);
  if (!variant) throw InputError("unknown variant: " + variant_name_arg);
  const Dataset dataset = load_dataset(data_path);
  FitOptions options = args.fit_options;
  options.seed = args.seed;
  const FitResult result = fit(dataset.sequences(), dataset.roster, *variant,
                               options);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (!result.converged) {
    std::cerr << "warning: optimizer did not converge; best point kept\n";
  }
  save_fit_result(args.out, result);
  std::cout << "train log-likelihood: " << result.log_likelihood << "\n";
  return 0;
}

int run_evaluate(const CommonArgs& args, const std::vector<std::string>& data_paths,
                 double split) {
  SplitReportFile report;
  report.split_fraction = split;
  FitOptions options = args.fit_options;
  options.seed = args.seed;
  std::cout << "dataset no_memory memory\n";
  for (const auto& path : data_paths) {
    const Dataset dataset = load_dataset(path);
    const auto sequences = dataset.sequences();
    const SplitEvaluation reduced = evaluate_split(
        sequences, dataset.roster, ModelVariant::kReduced, split, options);
    const SplitEvaluation full = evaluate_split(
        sequences, dataset.roster, ModelVariant::kFull, split, options);
    const std::string name = std::filesystem::path(path).stem().string();
    report.rows.push_back({name, reduced.train_ll, reduced.test_ll,
                           full.train_ll, full.test_ll});
    std::cout << name << " " << reduced.test_ll << " " << full.test_ll << "\n";
  }
  save_split_report(args.out, report, parse_format(args.format));
  return 0;
}

int run_patterns(const CommonArgs& args, const std::string& data_path,
                 const std::string& fit_full_path,
                 const std::string& fit_reduced_path, std::int64_t replications,
                 std::int64_t turns, double level, std::size_t min_len) {
  const Dataset dataset = load_dataset(data_path);
  const FitResult fit_full = load_fit_result(fit_full_path);
  const FitResult fit_reduced = load_fit_result(fit_reduced_path);
  for (const FitResult* f : {&fit_full, &fit_reduced}) {
    if (f->team.roster() != dataset.roster) {
      throw InputError("fit roster does not match the dataset roster");
    }
  }
  if (replications < 40) {
    std::cerr << "warning: fewer than 40 replications gives a degenerate "
                 "percentile interval\n";
  }
  const std::int64_t t_sim =
      turns > 0 ? turns : static_cast<std::int64_t>(dataset.total_turns());
  const auto sequences = dataset.sequences();
  const PatternReport observed =
      pattern_report(std::span(sequences.data(), sequences.size()),
                     dataset.roster, min_len);

  PatternReportFile file;
  file.level = level;
  file.replications = replications;
  file.turns = t_sim;
  const std::size_t n = dataset.roster.size();
  const auto append = [&](const std::string& label, const TeamParams& team) {
    const SimConfig config{t_sim, args.seed, replications};
    const std::vector<PatternReport> ensemble =
        ensemble_pattern_reports(team, config, min_len);
    const auto verdicts = coverage_report(
        observed, std::span(ensemble.data(), ensemble.size()), level);
    for (const auto& v : verdicts) {
      const std::string subject = v.statistic == PatternStatistic::kDyadic
                                      ? dyad_label(dataset.roster, v.subject, n)
                                      : dataset.roster.member(v.subject);
      file.rows.push_back({label, statistic_label(v.statistic), subject,
                           v.observed, v.ci_low, v.ci_high, v.covered,
                           static_cast<std::int64_t>(v.excluded)});
    }
  };
  append("full", fit_full.team);
  append("reduced", fit_reduced.team);
  save_pattern_report(args.out, file, parse_format(args.format));

  std::size_t covered = 0;
  for (const auto& row : file.rows) covered += row.covered ? 1 : 0;
  std::cout << "covered " << covered << "/" << file.rows.size()
            << " statistic(s)\n";
  return 0;
}

int run_traits(const CommonArgs& args, const std::vector<std::string>& fit_paths,
               const std::string& traits_path) {
  if (fit_paths.size() < 2) {
    throw InputError("trait analysis needs fit results from at least 2 teams");
  }
  std::ifstream in(traits_path);
  if (!in) throw InputError("cannot open: " + traits_path);
  const TraitParse parsed = parse_traits(in);
  if (!parsed.issues.empty()) {
    std::string msg = traits_path + ": bad trait rows:";
    for (const auto& issue : parsed.issues) {
      msg += "\n  line " + std::to_string(issue.line) + ": " + issue.message;
    }
    throw InputError(msg);
  }

  std::vector<TraitRecord> records;
  std::vector<double> pi_values, d_values;
  for (const auto& path : fit_paths) {
    const FitResult result = load_fit_result(path);
    for (std::size_t i = 0; i < result.team.size(); ++i) {
      const std::string& member = result.team.roster().member(i);
      const auto record =
          std::find_if(parsed.records.begin(), parsed.records.end(),
                       [&](const TraitRecord& r) { return r.member == member; });
      if (record == parsed.records.end()) {
        throw InputError("no trait record for member " + member);
      }
      records.push_back(*record);
      pi_values.push_back(result.team.member(i).pi);
      d_values.push_back(result.team.member(i).d);
    }
  }

  TraitRankingsFile file;
  file.n_observations = static_cast<int>(records.size());
  const auto append = [&](const std::string& target,
                          const std::vector<double>& values) {
    const ModelRanking ranking = rank_trait_models(records, values);
    double null_weight = 0.0;
    for (const auto& row : ranking.rows) {
      if (row.name == "Null") null_weight = row.weight;
    }
    for (const auto& row : ranking.rows) {
      file.rows.push_back({target, row.name, row.k, row.aicc_value, row.delta,
                           row.weight, row.top_set,
                           evidence_ratio(row.weight, null_weight)});
    }
  };
  append("pi", pi_values);
  append("d", d_values);
  save_trait_rankings(args.out, file, parse_format(args.format));

  for (const auto& row : file.rows) {
    if (row.delta == 0.0) {
      std::cout << row.target << " best model: " << row.model
                << " (weight " << row.weight << ")\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-weighted stochastic model of conversational "
               "turn-taking: simulation, fitting, validation"};
  app.require_subcommand(1);
  app.set_config("--config");

  CommonArgs args;

  auto* simulate_cmd =
      app.add_subcommand("simulate", "Generate synthetic conversations");
  std::string params_path;
  std::int64_t turns = 0;
  std::int64_t sim_replications = 1;
  simulate_cmd->add_option("--params", params_path,
                           "team_params or fit_result JSON")
      ->required();
  simulate_cmd->add_option("--turns", turns, "Turns per conversation")
      ->required()
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--replications", sim_replications,
                           "Number of conversations")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", args.seed, "Master seed");
  simulate_cmd->add_option("--out", args.out, "Output annotation CSV")
      ->required();

  auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fit");
  std::string data_path;
  std::string variant = "full";
  fit_cmd->add_option("--data", data_path, "Annotation CSV")->required();
  fit_cmd->add_option("--variant", variant, "full|reduced|tied")
      ->check(CLI::IsMember({"full", "reduced", "tied"}));
  fit_cmd->add_option("--seed", args.seed, "Restart seed");
  fit_cmd->add_option("--out", args.out, "Output fit_result JSON")->required();
  add_fit_flags(fit_cmd, args.fit_options);

  auto* evaluate_cmd = app.add_subcommand(
      "evaluate", "Train/test split predictive comparison (full vs reduced)");
  std::vector<std::string> data_paths;
  double split = 0.8;
  evaluate_cmd->add_option("--data", data_paths, "Annotation CSV(s)")
      ->required();
  evaluate_cmd->add_option("--split", split, "Training fraction")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  evaluate_cmd->add_option("--seed", args.seed, "Restart seed");
  evaluate_cmd->add_option("--out", args.out, "Output report")->required();
  evaluate_cmd->add_option("--format", args.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  add_fit_flags(evaluate_cmd, args.fit_options);

  auto* patterns_cmd = app.add_subcommand(
      "patterns", "Coverage of observed statistics by simulation ensembles");
  std::string fit_full_path, fit_reduced_path;
  std::int64_t replications = 10000;
  std::int64_t sim_turns = 0;
  double level = 0.95;
  std::size_t min_len = 4;
  patterns_cmd->add_option("--data", data_path, "Annotation CSV")->required();
  patterns_cmd->add_option("--fit-full", fit_full_path, "Full-model fit file")
      ->required();
  patterns_cmd
      ->add_option("--fit-reduced", fit_reduced_path, "Reduced-model fit file")
      ->required();
  patterns_cmd->add_option("--replications", replications, "Ensemble size")
      ->check(CLI::PositiveNumber);
  patterns_cmd->add_option("--turns", sim_turns,
                           "Simulated turns (default: observed total)");
  patterns_cmd->add_option("--seed", args.seed, "Ensemble seed");
  patterns_cmd->add_option("--level", level, "Interval level")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  patterns_cmd->add_option("--min-len", min_len, "Dyadic window length")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  patterns_cmd->add_option("--out", args.out, "Output report")->required();
  patterns_cmd->add_option("--format", args.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* traits_cmd = app.add_subcommand(
      "traits", "AICc ranking of trait models for fitted pi and d");
  std::vector<std::string> fit_paths;
  std::string traits_path;
  traits_cmd->add_option("--fits", fit_paths, "fit_result files, one per team")
      ->required();
  traits_cmd->add_option("--traits", traits_path, "Trait CSV")->required();
  traits_cmd->add_option("--out", args.out, "Output rankings")->required();
  traits_cmd->add_option("--format", args.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate_cmd->parsed()) {
      return run_simulate(args, params_path, turns, sim_replications);
    }
    if (fit_cmd->parsed()) return run_fit(args, data_path, variant);
    if (evaluate_cmd->parsed()) return run_evaluate(args, data_paths, split);
    if (patterns_cmd->parsed()) {
      return run_patterns(args, data_path, fit_full_path, fit_reduced_path,
                          replications, sim_turns, level, min_len);
    }
    if (traits_cmd->parsed()) return run_traits(args, fit_paths, traits_path);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
