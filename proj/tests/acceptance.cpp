// Acceptance suite. Each criterion prints one PASS/FAIL line with the
// measured quantities; the process exit code is the number of failures.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "turntaker/fit.hpp"
#include "turntaker/ingest.hpp"
#include "turntaker/model.hpp"
#include "turntaker/patterns.hpp"
#include "turntaker/rng.hpp"
#include "turntaker/simulate.hpp"
#include "turntaker/stats.hpp"

using namespace turntaker;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

const Roster kRoster4({"a", "b", "c", "d"});

// 1. Yates chi-squared on the three published tables.
void criterion_chi_squared() {
  struct Case {
    ContingencyTable2x2 table;
    double chi2;
    double p;
  };
  const std::vector<Case> cases = {{{24, 0, 17, 7}, 6.0, 0.014},
                                   {{21, 3, 7, 17}, 14.5, 0.00014},
                                   {{26, 4, 11, 19}, 13.8, 0.00020}};
  bool pass = true;
  std::ostringstream detail;
  for (const auto& c : cases) {
    const auto result = chi_squared_yates(c.table);
    const bool ok = std::abs(result.statistic - c.chi2) <= 0.1 &&
                    std::abs(result.p_value - c.p) / c.p <= 0.05;
    pass = pass && ok;
    detail << "chi2=" << result.statistic << " p=" << result.p_value << "; ";
  }
  report(1, "chi-squared reproduction", pass, detail.str());
}

// 2. Akaike weights from the published delta vector, and the evidence ratio.
void criterion_akaike_weights() {
  const std::vector<double> deltas = {0.0, 7.2, 8.2, 9.3, 9.6, 9.7};
  const std::vector<double> published = {0.94, 0.025, 0.015, 0.010, 0.010, 0.010};
  std::vector<ModelCandidate> candidates;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    candidates.push_back({"m" + std::to_string(i), -deltas[i] / 2.0, 1});
  }
  const ModelRanking ranking = rank_models(candidates, 1000);
  bool pass = true;
  double max_err = 0.0;
  for (std::size_t i = 0; i < published.size(); ++i) {
    max_err = std::max(max_err, std::abs(ranking.rows[i].weight - published[i]));
    pass = pass && std::abs(ranking.rows[i].weight - published[i]) <= 0.01;
  }
  const double er = evidence_ratio(0.94, 0.025);
  pass = pass && std::abs(er - 37.6) <= 0.1;
  std::ostringstream detail;
  detail << "max weight error " << max_err << ", evidence ratio " << er;
  report(2, "akaike weight reproduction", pass, detail.str());
}

// 3. Parameter recovery: n=4, pi=(.4,.3,.2,.1), d=(2,1,.5,0), T=5000,
//    20 seeds, pi within 0.03 absolute, d within 15% relative (0 -> < 0.1),
//    required in at least 18 of 20 seeds.
void criterion_parameter_recovery() {
  const TeamParams truth = TeamParams::canonical(
      kRoster4, {0.4, 0.3, 0.2, 0.1}, {2.0, 1.0, 0.5, 0.0});
  int ok_seeds = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TurnSequence seq = simulate_conversation(truth, {5000, seed, 1});
    const FitResult result = fit({seq}, kRoster4, ModelVariant::kFull);
    bool ok = true;
    for (std::size_t i = 0; i < 4; ++i) {
      if (std::abs(result.team.member(i).pi - truth.member(i).pi) > 0.03) {
        ok = false;
      }
      const double d_true = truth.member(i).d;
      if (d_true == 0.0) {
        if (result.team.member(i).d >= 0.1) ok = false;
      } else if (std::abs(result.team.member(i).d - d_true) / d_true > 0.15) {
        ok = false;
      }
    }
    ok_seeds += ok ? 1 : 0;
  }
  std::ostringstream detail;
  detail << ok_seeds << "/20 seeds within tolerance, need >= 18";
  report(3, "parameter recovery", ok_seeds >= 18, detail.str());
}

// 4. Held-out ordering: with d_i >= 1, the full model's test log-likelihood
//    beats the reduced model's in at least 95 of 100 seeds.
void criterion_heldout_ordering() {
  const TeamParams truth = TeamParams::canonical(
      kRoster4, {0.4, 0.3, 0.2, 0.1}, {3.0, 2.0, 1.5, 1.0});
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::vector<TurnSequence> data = {
        simulate_conversation(truth, {1000, seed, 1})};
    const auto full = evaluate_split(data, kRoster4, ModelVariant::kFull, 0.8);
    const auto reduced =
        evaluate_split(data, kRoster4, ModelVariant::kReduced, 0.8);
    wins += full.test_ll > reduced.test_ll ? 1 : 0;
  }
  std::ostringstream detail;
  detail << wins << "/100 seeds favor the full model, need >= 95";
  report(4, "held-out full-model advantage", wins >= 95, detail.str());
}

// 5. Normalization and exclusion over 1e5 random reachable states.
void criterion_invariants() {
  RngStream rng(501, 0);
  bool pass = true;
  for (int trial = 0; trial < 100000 && pass; ++trial) {
    const std::size_t n = 2 + rng.next_u64() % 5;
    std::vector<double> pi(n), d(n);
    std::vector<std::string> names(n);
    for (std::size_t i = 0; i < n; ++i) {
      pi[i] = 0.02 + rng.next_unit();
      d[i] = 3.0 * rng.next_unit();
      names[i] = "m" + std::to_string(i);
    }
    const TeamParams team = TeamParams::raw(Roster(names), pi, d);
    ConversationState state(n);
    const auto t = static_cast<std::int64_t>(rng.next_u64() % 40) + 1;
    state.current_turn = t;
    std::optional<std::size_t> prev;
    if (t >= 2) {
      prev = rng.next_u64() % n;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == *prev) {
          state.last_spoke[i] = t - 1;
        } else {
          const auto pick = static_cast<std::int64_t>(rng.next_u64() % t);
          state.last_spoke[i] = pick >= t - 1 ? 0 : pick;
        }
      }
    }
    const auto probs = turn_probabilities(team, state);
    double sum = 0.0;
    for (double p : probs) sum += p;
    if (std::abs(sum - 1.0) > 1e-12) pass = false;
    if (prev && probs[*prev] != 0.0) pass = false;
  }
  report(5, "normalization and exclusion invariants", pass,
         pass ? "1e5 random states clean" : "violation found");
}

// 6. Scale invariance under c in {0.1, 3, 100} for 1e3 parameter sets.
void criterion_scale_invariance() {
  RngStream rng(601, 0);
  bool pass = true;
  for (int trial = 0; trial < 1000 && pass; ++trial) {
    const std::size_t n = 2 + rng.next_u64() % 5;
    std::vector<double> pi(n), d(n);
    std::vector<std::string> names(n);
    for (std::size_t i = 0; i < n; ++i) {
      pi[i] = 0.05 + rng.next_unit();
      d[i] = 2.5 * rng.next_unit();
      names[i] = "m" + std::to_string(i);
    }
    const Roster roster(names);
    ConversationState state(n);
    const auto t = static_cast<std::int64_t>(rng.next_u64() % 20) + 2;
    state.current_turn = t;
    const std::size_t prev = rng.next_u64() % n;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == prev) {
        state.last_spoke[i] = t - 1;
      } else {
        const auto pick = static_cast<std::int64_t>(rng.next_u64() % t);
        state.last_spoke[i] = pick >= t - 1 ? 0 : pick;
      }
    }
    const auto base = turn_probabilities(TeamParams::raw(roster, pi, d), state);
    for (const double c : {0.1, 3.0, 100.0}) {
      std::vector<double> cpi(n), cd(n);
      for (std::size_t i = 0; i < n; ++i) {
        cpi[i] = c * pi[i];
        cd[i] = c * d[i];
      }
      const auto scaled =
          turn_probabilities(TeamParams::raw(roster, cpi, cd), state);
      for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(scaled[i] - base[i]) > 1e-12) pass = false;
      }
    }
  }
  report(6, "scale invariance", pass,
         pass ? "1000 parameter sets x {0.1,3,100} identical"
              : "violation found");
}

// 7. Streaming pattern statistics equal brute force on every valid sequence
//    of length <= 8 over 3 members.
void criterion_pattern_oracle() {
  const Roster roster({"A", "B", "C"});
  std::vector<std::size_t> seq;
  bool pass = true;
  long checked = 0;

  const auto oracle_dyadic = [](const std::vector<std::size_t>& s,
                                std::size_t min_len) {
    std::vector<double> out(3, 0.0);
    const std::size_t t_len = s.size();
    const std::size_t pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<bool> attributed(t_len, false);
      for (std::size_t lo = 0; lo < t_len; ++lo) {
        for (std::size_t hi = lo + min_len - 1; hi < t_len; ++hi) {
          bool only_pair = true, saw_a = false, saw_b = false;
          for (std::size_t t = lo; t <= hi; ++t) {
            if (s[t] == pairs[k][0]) {
              saw_a = true;
            } else if (s[t] == pairs[k][1]) {
              saw_b = true;
            } else {
              only_pair = false;
              break;
            }
          }
          if (only_pair && saw_a && saw_b) {
            for (std::size_t t = lo; t <= hi; ++t) attributed[t] = true;
          }
        }
      }
      std::size_t count = 0;
      for (bool v : attributed) count += v ? 1 : 0;
      out[k] = static_cast<double>(count) / static_cast<double>(t_len);
    }
    return out;
  };

  const auto visit = [&](auto&& self, std::size_t depth) -> void {
    if (!pass) return;
    if (depth > 0) {
      ++checked;
      const TurnSequence turn_seq(seq, 3);

      std::vector<std::size_t> turns(3, 0), hits(3, 0);
      for (std::size_t t = 0; t < seq.size(); ++t) {
        ++turns[seq[t]];
        if (t >= 2 && seq[t] == seq[t - 2]) ++hits[seq[t]];
      }
      const auto aba = aba_proportions(turn_seq, roster);
      for (std::size_t i = 0; i < 3; ++i) {
        if (turns[i] == 0) {
          if (!std::isnan(aba[i])) pass = false;
        } else if (std::abs(aba[i] - static_cast<double>(hits[i]) /
                                         static_cast<double>(turns[i])) >
                   1e-12) {
          pass = false;
        }
      }
      const auto dyads = dyadic_long_proportions(turn_seq, roster, 4);
      const auto expected = oracle_dyadic(seq, 4);
      for (std::size_t k = 0; k < 3; ++k) {
        if (std::abs(dyads[k] - expected[k]) > 1e-12) pass = false;
      }
    }
    if (depth == 8) return;
    for (std::size_t s = 0; s < 3; ++s) {
      if (depth > 0 && seq.back() == s) continue;
      seq.push_back(s);
      self(self, depth + 1);
      seq.pop_back();
    }
  };
  visit(visit, 0);
  std::ostringstream detail;
  detail << checked << " sequences checked exhaustively";
  report(7, "pattern statistic oracle equivalence", pass && checked == 765,
         detail.str());
}

// 8. Interval calibration: parameters fitted to one synthetic conversation,
//    then 200 trials of observed-vs-ensemble coverage at R = 2000.
void criterion_ci_calibration() {
  const TeamParams truth = TeamParams::canonical(
      kRoster4, {0.4, 0.3, 0.2, 0.1}, {2.0, 1.0, 0.5, 0.0});
  const TurnSequence fit_obs = simulate_conversation(truth, {2000, 12345, 1});
  const FitResult fitted = fit({fit_obs}, kRoster4, ModelVariant::kFull);

  std::size_t covered = 0, total = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const TurnSequence observed = simulate_conversation(
        fitted.team, {300, static_cast<std::uint64_t>(50000 + trial), 1});
    const PatternReport observed_report =
        pattern_report(std::span(&observed, 1), kRoster4, 4);
    const SimConfig ensemble_config{
        300, static_cast<std::uint64_t>(80000 + trial), 2000};
    const auto ensemble = ensemble_pattern_reports(fitted.team, ensemble_config);
    const auto verdicts = coverage_report(
        observed_report, std::span(ensemble.data(), ensemble.size()), 0.95);
    for (const auto& v : verdicts) {
      if (std::isnan(v.observed)) continue;
      ++total;
      covered += v.covered ? 1 : 0;
    }
  }
  const double rate = static_cast<double>(covered) / static_cast<double>(total);
  std::ostringstream detail;
  detail << "coverage " << rate << " over " << total
         << " statistics, need [0.90, 0.99]";
  report(8, "interval calibration", rate >= 0.90 && rate <= 0.99, detail.str());
}

// 9. Byte-identical ensemble and fit outputs across thread caps.
void criterion_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "turntaker_acceptance";
  fs::create_directories(dir);
  const TeamParams truth = TeamParams::canonical(
      kRoster4, {0.4, 0.3, 0.2, 0.1}, {2.0, 1.0, 0.5, 0.0});
  const TurnSequence data = simulate_conversation(truth, {400, 77, 1});

  const auto slurp = [](const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
  };
  const auto run_once = [&](const char* cap, const fs::path& ens_path,
                            const fs::path& fit_path) {
    setenv("TURNTAKER_THREADS", cap, 1);
    const auto ensemble = replicate_ensemble(truth, {120, 9, 500});
    std::vector<Meeting> meetings;
    for (std::size_t r = 0; r < ensemble.size(); ++r) {
      meetings.push_back({"m" + std::to_string(r), ensemble[r]});
    }
    std::ofstream out(ens_path);
    write_annotations(out, meetings, kRoster4);
    out.close();
    save_fit_result(fit_path, fit({data}, kRoster4, ModelVariant::kFull));
  };
  run_once("1", dir / "ens1.csv", dir / "fit1.json");
  run_once("4", dir / "ens4.csv", dir / "fit4.json");
  unsetenv("TURNTAKER_THREADS");

  const bool ens_equal = slurp(dir / "ens1.csv") == slurp(dir / "ens4.csv");
  const bool fit_equal = slurp(dir / "fit1.json") == slurp(dir / "fit4.json");
  std::ostringstream detail;
  detail << "ensemble bytes " << (ens_equal ? "equal" : "differ")
         << ", fit bytes " << (fit_equal ? "equal" : "differ");
  report(9, "thread-count determinism", ens_equal && fit_equal, detail.str());
}

// 10. Trait analysis end to end on a synthetic 24-member, 7-team cohort:
//     nationality drives pi, d is noise.
void criterion_trait_analysis() {
  const int team_sizes[7] = {4, 4, 4, 3, 3, 3, 3};
  RngStream rng(2024, 0);
  std::vector<TraitRecord> records;
  std::vector<double> pi_values, d_values;
  int member_no = 0;
  for (int team = 0; team < 7; ++team) {
    for (int m = 0; m < team_sizes[team]; ++m, ++member_no) {
      TraitRecord r;
      r.member = "m" + std::to_string(member_no);
      r.team = "t" + std::to_string(team);
      r.extraversion = rng.next_normal();
      r.agreeableness = rng.next_normal();
      r.conscientiousness = rng.next_normal();
      r.sex = member_no % 2 == 0 ? Sex::kFemale : Sex::kMale;
      r.nationality = m < team_sizes[team] / 2 + 1 ? Nationality::kAmerican
                                                   : Nationality::kNonAmerican;
      pi_values.push_back(
          (r.nationality == Nationality::kAmerican ? 0.32 : 0.12) +
          0.01 * rng.next_normal());
      d_values.push_back(1.0 + 0.4 * rng.next_normal());
      records.push_back(r);
    }
  }
  const ModelRanking pi_ranking = rank_trait_models(records, pi_values);
  const ModelRanking d_ranking = rank_trait_models(records, d_values);
  bool null_top = false;
  for (const auto& row : d_ranking.rows) {
    if (row.name == "Null" && row.top_set) null_top = true;
  }
  const bool pass = pi_ranking.rows[0].name == "Nationality" &&
                    pi_ranking.rows[0].weight > 0.9 && null_top;
  std::ostringstream detail;
  detail << "pi best " << pi_ranking.rows[0].name << " (weight "
         << pi_ranking.rows[0].weight << "), d-null in top set "
         << (null_top ? "yes" : "no");
  report(10, "trait analysis end-to-end", pass, detail.str());
}

}  // namespace

int main() {
  criterion_chi_squared();
  criterion_akaike_weights();
  criterion_parameter_recovery();
  criterion_heldout_ordering();
  criterion_invariants();
  criterion_scale_invariance();
  criterion_pattern_oracle();
  criterion_ci_calibration();
  criterion_determinism();
  criterion_trait_analysis();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
