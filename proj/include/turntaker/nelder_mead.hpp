#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace turntaker {

struct NelderMeadOptions {
  int max_iterations = 2000;
  double f_tolerance = 1e-8;   // stop when f(worst) - f(best) drops below this
  double initial_step = 0.5;   // per-coordinate offset of the initial simplex
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Downhill simplex minimization (Nelder-Mead, standard coefficients).
/// Deterministic: the trajectory depends only on f, x0 and the options.
inline NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& f,
    std::vector<double> x0, const NelderMeadOptions& options = {}) {
  const std::size_t dim = x0.size();
  if (dim == 0) throw std::invalid_argument("nelder_mead needs >= 1 dimension");

  constexpr double kReflect = 1.0;
  constexpr double kExpand = 2.0;
  constexpr double kContract = 0.5;
  constexpr double kShrink = 0.5;

  std::vector<std::vector<double>> simplex(dim + 1, x0);
  for (std::size_t i = 0; i < dim; ++i) {
    simplex[i + 1][i] += options.initial_step;
  }
  std::vector<double> fx(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) fx[i] = f(simplex[i]);

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim), reflected(dim), trial(dim);

  NelderMeadResult result;
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    for (std::size_t i = 0; i <= dim; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[dim - 1];

    if (fx[worst] - fx[best] < options.f_tolerance) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    for (std::size_t j = 0; j < dim; ++j) {
      reflected[j] = centroid[j] + kReflect * (centroid[j] - simplex[worst][j]);
    }
    const double f_reflected = f(reflected);

    if (f_reflected < fx[best]) {
      for (std::size_t j = 0; j < dim; ++j) {
        trial[j] = centroid[j] + kExpand * (reflected[j] - centroid[j]);
      }
      const double f_expanded = f(trial);
      if (f_expanded < f_reflected) {
        simplex[worst] = trial;
        fx[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        fx[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fx[second_worst]) {
      simplex[worst] = reflected;
      fx[worst] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < fx[worst];
    const auto& toward = outside ? reflected : simplex[worst];
    for (std::size_t j = 0; j < dim; ++j) {
      trial[j] = centroid[j] + kContract * (toward[j] - centroid[j]);
    }
    const double f_contracted = f(trial);
    if (f_contracted < (outside ? f_reflected : fx[worst])) {
      simplex[worst] = trial;
      fx[worst] = f_contracted;
      continue;
    }

    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        simplex[i][j] = simplex[best][j] + kShrink * (simplex[i][j] - simplex[best][j]);
      }
      fx[i] = f(simplex[i]);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= dim; ++i) {
    if (fx[i] < fx[best]) best = i;
  }
  result.x = simplex[best];
  result.f = fx[best];
  result.iterations = iter;
  return result;
}

}  // namespace turntaker
