#include "turntaker/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace turntaker {

namespace {

constexpr double kPerfectFitRss = 1e-12;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Continued fraction for the incomplete beta function, modified Lentz.
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxTerms = 500;

  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxTerms; ++m) {
    const double dm = static_cast<double>(m);
    double numer = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
    d = 1.0 + numer * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + numer / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    numer = -(a + dm) * (a + b + dm) * x /
            ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
    d = 1.0 + numer * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + numer / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double mult = d * c;
    h *= mult;
    if (std::abs(mult - 1.0) <= kEps) break;
  }
  return h;
}

double trait_value(const TraitRecord& record, ContinuousTrait trait) {
  switch (trait) {
    case ContinuousTrait::kExtraversion: return record.extraversion;
    case ContinuousTrait::kAgreeableness: return record.agreeableness;
    case ContinuousTrait::kConscientiousness: return record.conscientiousness;
  }
  return record.extraversion;
}

double gaussian_log_likelihood(double rss, std::size_t n) {
  const auto dn = static_cast<double>(n);
  const double sigma2 = rss / dn;  // MLE variance
  return -0.5 * dn * (std::log(kTwoPi * sigma2) + 1.0);
}

}  // namespace

double incomplete_beta_regularized(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw std::invalid_argument("incomplete beta needs a > 0 and b > 0");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(log_front) * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - std::exp(log_front) * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_p_two_sided(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("df must be positive");
  const double x = df / (df + t * t);
  return incomplete_beta_regularized(df / 2.0, 0.5, x);
}

double chi_squared_1df_sf(double x) {
  if (x < 0.0) throw std::invalid_argument("chi-squared statistic must be >= 0");
  return std::erfc(std::sqrt(x / 2.0));
}

ChiSquaredResult chi_squared_yates(const ContingencyTable2x2& table) {
  if (table.a < 0 || table.b < 0 || table.c < 0 || table.d < 0) {
    throw std::invalid_argument("contingency counts must be non-negative");
  }
  const double a = static_cast<double>(table.a);
  const double b = static_cast<double>(table.b);
  const double c = static_cast<double>(table.c);
  const double d = static_cast<double>(table.d);
  const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
  const double total = r1 + r2;
  if (r1 == 0.0 || r2 == 0.0 || c1 == 0.0 || c2 == 0.0) {
    throw std::invalid_argument(
        "zero marginal: every expected count must be positive");
  }
  const double diff = std::max(std::abs(a * d - b * c) - total / 2.0, 0.0);
  const double statistic = total * diff * diff / (r1 * r2 * c1 * c2);
  return {statistic, chi_squared_1df_sf(statistic)};
}

CenteredTrait group_mean_center(std::span<const TraitRecord> records,
                                ContinuousTrait trait) {
  std::map<std::string, std::pair<double, std::size_t>> team_sums;
  for (const auto& r : records) {
    if (r.team.empty()) {
      throw std::invalid_argument("every record needs a team id");
    }
    auto& [sum, count] = team_sums[r.team];
    sum += trait_value(r, trait);
    ++count;
  }
  CenteredTrait out;
  out.values.reserve(records.size());
  for (const auto& [team, sum_count] : team_sums) {
    if (sum_count.second == 1) out.singleton_teams.push_back(team);
  }
  for (const auto& r : records) {
    const auto& [sum, count] = team_sums[r.team];
    out.values.push_back(trait_value(r, trait) -
                         sum / static_cast<double>(count));
  }
  return out;
}

OlsResult ols_univariate(std::span<const double> y, std::span<const double> x) {
  const std::size_t n = y.size();
  if (n < 3) throw std::invalid_argument("ols needs at least 3 observations");
  if (x.size() != n) throw std::invalid_argument("y and x lengths differ");

  const double dn = static_cast<double>(n);
  const double x_mean = std::accumulate(x.begin(), x.end(), 0.0) / dn;
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / dn;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - x_mean;
    sxx += dx * dx;
    sxy += dx * (y[i] - y_mean);
  }
  if (sxx <= 0.0) throw std::invalid_argument("x is constant");

  OlsResult out;
  out.beta = sxy / sxx;
  out.intercept = y_mean - out.beta * x_mean;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = y[i] - out.intercept - out.beta * x[i];
    out.residual_ss += resid * resid;
  }
  if (out.residual_ss < kPerfectFitRss) {
    throw PerfectFitError("residual sum of squares is ~0; likelihood unbounded");
  }
  const double df = dn - 2.0;
  const double se_beta = std::sqrt(out.residual_ss / df / sxx);
  out.p_beta = student_t_p_two_sided(out.beta / se_beta, df);
  out.log_likelihood = gaussian_log_likelihood(out.residual_ss, n);
  return out;
}

NullModelResult null_model(std::span<const double> y) {
  const std::size_t n = y.size();
  if (n < 2) throw std::invalid_argument("null model needs at least 2 values");
  NullModelResult out;
  out.mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  for (double v : y) out.residual_ss += (v - out.mean) * (v - out.mean);
  if (out.residual_ss < kPerfectFitRss) {
    throw PerfectFitError("residual sum of squares is ~0; likelihood unbounded");
  }
  out.log_likelihood = gaussian_log_likelihood(out.residual_ss, n);
  return out;
}

double aicc(double log_likelihood, int k, int n) {
  if (k < 1) throw std::invalid_argument("aicc needs k >= 1");
  if (n <= k + 1) {
    throw std::invalid_argument("aicc correction needs n > k + 1");
  }
  const double dk = static_cast<double>(k);
  return -2.0 * log_likelihood + 2.0 * dk +
         2.0 * dk * (dk + 1.0) / static_cast<double>(n - k - 1);
}

ModelRanking rank_models(std::vector<ModelCandidate> candidates, int n) {
  if (candidates.size() < 2) {
    throw std::invalid_argument("ranking needs at least 2 candidates");
  }
  ModelRanking ranking;
  ranking.n_observations = n;
  ranking.rows.reserve(candidates.size());
  for (const auto& c : candidates) {
    ranking.rows.push_back({c.name, c.k, aicc(c.log_likelihood, c.k, n),
                            0.0, 0.0, false});
  }
  std::stable_sort(ranking.rows.begin(), ranking.rows.end(),
                   [](const RankedModel& a, const RankedModel& b) {
                     return a.aicc_value < b.aicc_value;
                   });
  const double best = ranking.rows.front().aicc_value;
  double weight_sum = 0.0;
  for (auto& row : ranking.rows) {
    row.delta = row.aicc_value - best;
    row.weight = std::exp(-row.delta / 2.0);
    weight_sum += row.weight;
  }
  for (auto& row : ranking.rows) {
    row.weight /= weight_sum;
    row.top_set = row.delta < 2.0;
  }
  return ranking;
}

double evidence_ratio(double w_i, double w_j) {
  if (!(w_j > 0.0)) {
    throw std::invalid_argument("evidence ratio needs w_j > 0");
  }
  return w_i / w_j;
}

ModelRanking rank_trait_models(std::span<const TraitRecord> records,
                               std::span<const double> target) {
  if (records.size() != target.size()) {
    throw std::invalid_argument("records and target lengths differ");
  }
  const std::vector<double> y(target.begin(), target.end());

  std::vector<ModelCandidate> candidates;
  candidates.push_back({"Null", null_model(y).log_likelihood, 2});

  const auto add_continuous = [&](std::string name, ContinuousTrait trait) {
    const CenteredTrait centered = group_mean_center(records, trait);
    candidates.push_back(
        {std::move(name), ols_univariate(y, centered.values).log_likelihood, 3});
  };
  add_continuous("Extraversion", ContinuousTrait::kExtraversion);
  add_continuous("Agreeableness", ContinuousTrait::kAgreeableness);
  add_continuous("Conscientiousness", ContinuousTrait::kConscientiousness);

  std::vector<double> x(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    x[i] = records[i].sex == Sex::kMale ? 1.0 : 0.0;
  }
  candidates.push_back({"Sex", ols_univariate(y, x).log_likelihood, 3});
  for (std::size_t i = 0; i < records.size(); ++i) {
    x[i] = records[i].nationality == Nationality::kAmerican ? 1.0 : 0.0;
  }
  candidates.push_back({"Nationality", ols_univariate(y, x).log_likelihood, 3});

  return rank_models(std::move(candidates), static_cast<int>(records.size()));
}

}  // namespace turntaker
