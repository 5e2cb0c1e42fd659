#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace turntaker {

/// Thrown when a regression's residual sum of squares vanishes and the
/// Gaussian log-likelihood would be unbounded.
class PerfectFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Regularized incomplete beta function I_x(a, b), by Lentz's continued
/// fraction. Absolute accuracy around 1e-10 over the ranges used here.
double incomplete_beta_regularized(double a, double b, double x);

/// Two-sided p-value of a t statistic with df degrees of freedom.
double student_t_p_two_sided(double t, double df);

/// Survival function of chi-squared with 1 degree of freedom,
/// erfc(sqrt(x / 2)) — the regularized upper incomplete gamma Q(1/2, x/2).
double chi_squared_1df_sf(double x);

/// 2x2 counts; rows are model variants, columns matched / not matched.
struct ContingencyTable2x2 {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 0;
};

struct ChiSquaredResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Pearson chi-squared with Yates continuity correction, 1 df. Errors on a
/// zero marginal (an expected count would be zero).
ChiSquaredResult chi_squared_yates(const ContingencyTable2x2& table);

enum class Sex { kFemale, kMale };
enum class Nationality { kAmerican, kNonAmerican };

struct TraitRecord {
  std::string member;
  std::string team;
  double extraversion = 0.0;
  double agreeableness = 0.0;
  double conscientiousness = 0.0;
  Sex sex = Sex::kFemale;
  Nationality nationality = Nationality::kAmerican;

  bool operator==(const TraitRecord&) const = default;
};

enum class ContinuousTrait { kExtraversion, kAgreeableness, kConscientiousness };

struct CenteredTrait {
  std::vector<double> values;                // aligned with the input records
  std::vector<std::string> singleton_teams;  // teams of one member, centered to 0
};

/// Subtracts each record's within-team mean of the chosen trait; centered
/// values sum to zero inside every team.
CenteredTrait group_mean_center(std::span<const TraitRecord> records,
                                ContinuousTrait trait);

struct OlsResult {
  double beta = 0.0;
  double intercept = 0.0;
  double p_beta = 1.0;
  double residual_ss = 0.0;
  double log_likelihood = 0.0;  // Gaussian, at the MLE variance RSS / n
};

/// Univariate least squares y ~ intercept + beta * x. p is a two-sided
/// t-test on beta with n-2 df. Errors on constant x, n < 3, or a perfect fit.
OlsResult ols_univariate(std::span<const double> y, std::span<const double> x);

struct NullModelResult {
  double mean = 0.0;
  double residual_ss = 0.0;
  double log_likelihood = 0.0;
};

/// Intercept-only fit (two parameters counting the variance).
NullModelResult null_model(std::span<const double> y);

/// Small-sample Akaike criterion: -2 LL + 2k + 2k(k+1)/(n-k-1).
/// Requires k >= 1 and n > k + 1.
double aicc(double log_likelihood, int k, int n);

struct ModelCandidate {
  std::string name;
  double log_likelihood = 0.0;
  int k = 0;
};

struct RankedModel {
  std::string name;
  int k = 0;
  double aicc_value = 0.0;
  double delta = 0.0;
  double weight = 0.0;
  bool top_set = false;  // best model, or within 2 AICc points of it

  bool operator==(const RankedModel&) const = default;
};

struct ModelRanking {
  std::vector<RankedModel> rows;  // ascending AICc
  int n_observations = 0;

  bool operator==(const ModelRanking&) const = default;
};

/// AICc table: deltas against the best candidate, Akaike weights
/// exp(-delta/2) normalized to 1, rows sorted ascending by AICc.
ModelRanking rank_models(std::vector<ModelCandidate> candidates, int n);

/// Relative support of model i over model j.
double evidence_ratio(double w_i, double w_j);

/// Ranks the Null model and the five univariate trait models for one target
/// (a fitted parameter per member). Continuous predictors are group-mean
/// centered; sex and nationality enter as 0/1 (male = 1, American = 1).
ModelRanking rank_trait_models(std::span<const TraitRecord> records,
                               std::span<const double> target);

}  // namespace turntaker
