#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <vector>

#include "turntaker/model.hpp"
#include "turntaker/patterns.hpp"
#include "turntaker/simulate.hpp"

using namespace turntaker;

namespace {

TeamParams team4() {
  return TeamParams::canonical(Roster({"a", "b", "c", "d"}),
                               {0.4, 0.3, 0.2, 0.1}, {2.0, 1.0, 0.5, 0.0});
}

}  // namespace

TEST_CASE("fixed seed and params give identical conversations") {
  const TeamParams team = team4();
  const SimConfig config{200, 42, 1};
  CHECK(simulate_conversation(team, config) == simulate_conversation(team, config));
  CHECK(simulate_conversation(team, {200, 43, 1}) !=
        simulate_conversation(team, config));
}

TEST_CASE("two-member teams alternate strictly after the first turn") {
  const TeamParams pair =
      TeamParams::canonical(Roster({"a", "b"}), {0.6, 0.4}, {1.0, 2.0});
  const TurnSequence seq = simulate_conversation(pair, {5, 9, 1});
  for (std::size_t t = 1; t < seq.size(); ++t) {
    CHECK(seq[t] == 1 - seq[t - 1]);
  }
}

TEST_CASE("sampling a forced distribution always picks the eligible member") {
  const TeamParams pair =
      TeamParams::canonical(Roster({"a", "b"}), {0.9, 0.1}, {0.0, 0.0});
  const ConversationState state = advance(ConversationState(2), 0);
  RngStream rng(77, 0);
  for (int i = 0; i < 100; ++i) {
    CHECK(sample_next_speaker(pair, state, rng) == 1);
  }
}

TEST_CASE("empirical frequencies match the sampling distribution") {
  const TeamParams uniform = TeamParams::canonical(
      Roster({"a", "b", "c"}), {1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.0, 0.0, 0.0});
  ConversationState fresh(3);
  RngStream rng(5, 0);
  std::vector<int> counts(3, 0);
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) {
    ++counts[sample_next_speaker(uniform, fresh, rng)];
  }
  for (int c : counts) {
    CHECK(std::abs(static_cast<double>(c) / draws - 1.0 / 3) <= 0.02);
  }

  const TeamParams plain = TeamParams::canonical(
      Roster({"a", "b", "c"}), {0.5, 0.3, 0.2}, {0.0, 0.0, 0.0});
  const ConversationState after = advance(ConversationState(3), 0);
  std::vector<int> counts2(3, 0);
  RngStream rng2(6, 0);
  for (int i = 0; i < draws; ++i) {
    ++counts2[sample_next_speaker(plain, after, rng2)];
  }
  CHECK(counts2[0] == 0);
  CHECK(std::abs(static_cast<double>(counts2[1]) / draws - 0.6) <= 0.02);
  CHECK(std::abs(static_cast<double>(counts2[2]) / draws - 0.4) <= 0.02);
}

TEST_CASE("single-turn conversations split evenly for a symmetric pair") {
  const TeamParams pair =
      TeamParams::canonical(Roster({"a", "b"}), {0.5, 0.5}, {1.0, 1.0});
  const auto ensemble = replicate_ensemble(pair, {1, 31, 10000});
  int first = 0;
  for (const auto& seq : ensemble) first += seq[0] == 0 ? 1 : 0;
  CHECK(std::abs(first / 10000.0 - 0.5) <= 0.02);
}

TEST_CASE("parallel ensemble equals the serial reference") {
  const TeamParams team = team4();
  const SimConfig config{60, 123, 400};
  const auto parallel = replicate_ensemble(team, config);
  const auto serial = replicate_ensemble_serial(team, config);
  CHECK(parallel == serial);
}

TEST_CASE("ensemble output is independent of the thread cap") {
  const TeamParams team = team4();
  const SimConfig config{80, 3, 200};
  setenv("TURNTAKER_THREADS", "1", 1);
  const auto one = replicate_ensemble(team, config);
  setenv("TURNTAKER_THREADS", "4", 1);
  const auto four = replicate_ensemble(team, config);
  unsetenv("TURNTAKER_THREADS");
  CHECK(one == four);
}

TEST_CASE("each replication depends only on its own substream") {
  const TeamParams team = team4();
  const SimConfig config{50, 99, 20};
  const auto ensemble = replicate_ensemble(team, config);
  for (std::size_t r = 0; r < 20; ++r) {
    RngStream rng(99, r);
    CHECK(ensemble[r] == simulate_conversation(team, 50, rng));
  }
}

TEST_CASE("generated sequences never repeat a speaker") {
  const TeamParams team = team4();
  for (const auto& seq : replicate_ensemble(team, {70, 8, 50})) {
    for (std::size_t t = 1; t < seq.size(); ++t) {
      CHECK(seq[t] != seq[t - 1]);
    }
  }
}

TEST_CASE("replication means agree with one long run") {
  const TeamParams team = TeamParams::canonical(
      Roster({"a", "b", "c"}), {0.5, 0.3, 0.2}, {1.0, 0.5, 0.0});
  const auto ensemble = replicate_ensemble(team, {100, 21, 1000});
  std::vector<double> mean(3, 0.0);
  for (const auto& seq : ensemble) {
    const auto props = speaking_proportions(seq, team.roster());
    for (std::size_t i = 0; i < 3; ++i) mean[i] += props[i] / 1000.0;
  }
  const TurnSequence long_run = simulate_conversation(team, {100000, 22, 1});
  const auto long_props = speaking_proportions(long_run, team.roster());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(mean[i] - long_props[i]) <= 0.02);
  }
}

TEST_CASE("configs are validated") {
  const TeamParams team = team4();
  CHECK_THROWS_AS(simulate_conversation(team, {0, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(replicate_ensemble(team, {10, 1, 0}), std::invalid_argument);
}
