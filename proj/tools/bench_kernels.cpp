// Benchmark of the parallel kernels against their serial references:
// ensemble generation (OpenMP vs single-thread) and log-likelihood
// evaluation (precomputed-weight kernel vs streaming model functions).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "turntaker/likelihood_kernel.hpp"
#include "turntaker/model.hpp"
#include "turntaker/patterns.hpp"
#include "turntaker/simulate.hpp"
#include "turntaker/threads.hpp"

using namespace turntaker;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

TeamParams demo_team() {
  Roster roster({"a", "b", "c", "d"});
  return TeamParams::canonical(roster, {0.4, 0.3, 0.2, 0.1},
                               {2.0, 1.0, 0.5, 0.0});
}

}  // namespace

int main(int argc, char** argv) {
  std::int64_t turns = 500;
  std::int64_t replications = 2000;
  int ll_evals = 200;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    const long value = std::strtol(argv[i + 1], nullptr, 10);
    if (flag == "--turns") turns = value;
    if (flag == "--replications") replications = value;
    if (flag == "--ll-evals") ll_evals = static_cast<int>(value);
  }

  const TeamParams team = demo_team();
  const SimConfig config{turns, 42, replications};
  std::printf("threads: %d\n", worker_thread_count());

  auto start = std::chrono::steady_clock::now();
  const auto serial = replicate_ensemble_serial(team, config);
  const double t_serial = seconds_since(start);

  start = std::chrono::steady_clock::now();
  const auto parallel = replicate_ensemble(team, config);
  const double t_parallel = seconds_since(start);

  std::printf("ensemble %lld x %lld turns: serial %.3fs, parallel %.3fs "
              "(x%.2f), identical: %s\n",
              static_cast<long long>(replications),
              static_cast<long long>(turns), t_serial, t_parallel,
              t_serial / t_parallel, serial == parallel ? "yes" : "NO");

  const std::vector<TurnSequence> data = {serial.front()};
  const LikelihoodKernel kernel(data, team.size());
  const std::vector<double> pi = team.pis();
  const std::vector<double> d = team.ds();

  start = std::chrono::steady_clock::now();
  double ll_stream = 0.0;
  for (int i = 0; i < ll_evals; ++i) {
    ll_stream = multi_meeting_log_likelihood(team, data);
  }
  const double t_stream = seconds_since(start);

  start = std::chrono::steady_clock::now();
  double ll_kernel = 0.0;
  for (int i = 0; i < ll_evals; ++i) {
    ll_kernel = kernel.log_likelihood(pi, d);
  }
  const double t_kernel = seconds_since(start);

  std::printf("log-likelihood x%d: streaming %.3fs, kernel %.3fs (x%.1f), "
              "|diff| = %.3g\n",
              ll_evals, t_stream, t_kernel, t_stream / t_kernel,
              std::abs(ll_stream - ll_kernel));
  return 0;
}
