#pragma once

#include <optional>
#include <string>
#include <vector>

namespace forkhealth::stats {

// Predictor matrix plus binary outcome. The intercept column is implicit and
// always prepended by the fitter; `columns` holds predictor names only.
struct DesignMatrix {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows; // rows.size() x columns.size()
  std::vector<int> outcome;              // 0/1 per row
  std::size_t dropped_missing = 0;       // rows discarded for MISSING cells

  // Drops rows containing a MISSING cell (counting them), then checks the
  // invariants: no missing entries, n >= columns + 1.
  static DesignMatrix build(std::vector<std::string> columns,
                            const std::vector<std::vector<std::optional<double>>>& raw_rows,
                            const std::vector<int>& outcome);

  DesignMatrix without(const std::string& column) const;
};

struct RegressionFit {
  std::vector<std::string> names; // "(Intercept)" first, then predictors
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  std::vector<double> z_values;
  std::vector<double> p_values;
  double log_likelihood = 0.0;
  double aic = 0.0;
  std::size_t n_obs = 0;
  bool converged = false;
  int iterations = 0;
};

struct StepwiseStep {
  std::vector<std::string> columns; // predictors in the model at this step
  double aic = 0.0;
  std::string dropped; // empty on the initial full-model step
};

struct StepwiseTrace {
  std::vector<StepwiseStep> steps;
  RegressionFit final;
};

struct OutlierSplit {
  std::vector<double> kept;    // input order preserved
  std::vector<double> removed; // input order preserved
  double q1 = 0.0;
  double q3 = 0.0;
  double lower_fence = 0.0;
  double upper_fence = 0.0;
};

// Quantile by linear interpolation between order statistics at position
// 1 + (n-1)q. `sorted` must be ascending and non-empty.
double quantile(const std::vector<double>& sorted, double q);

// Tukey fences at 1.5 IQR, strict inequalities; values exactly on a fence
// are kept. Throws on empty or non-finite input.
OutlierSplit remove_outliers_iqr(const std::vector<double>& values);

// Binomial logistic regression by iteratively reweighted least squares from
// beta = 0. Converges on max |delta beta| < 1e-8 within 50 iterations, with
// step halving whenever a step would lower the log-likelihood. Standard
// errors come from the inverse Fisher information at the optimum. Any
// |coefficient| > 15 is flagged as quasi-separation: converged=false plus a
// warning, coefficients still returned.
RegressionFit fit_logistic(const DesignMatrix& design);

// 1 - logLik(fit) / logLik(null). `null_fit` must be the intercept-only fit
// on the same rows. Tiny negative results (> -1e-12) clamp to zero.
double mcfadden_r2(const RegressionFit& fit, const RegressionFit& null_fit);

// R-style stars: p < .001 "***", < .01 "**", < .05 "*", < .1 ".", else "".
std::string significance_code(double p);

// Backward elimination by AIC from the full model. Each step removes the
// single predictor whose removal gives the lowest AIC, while that AIC is
// strictly below the current model's. Ties break by column name order.
StepwiseTrace backward_stepwise(const DesignMatrix& design);

// Phi(z), absolute error well under 1e-10.
double standard_normal_cdf(double z);

// Bernoulli log-likelihood of the given coefficients (intercept first) on
// the design; shared by the fitter and diagnostics.
double log_likelihood(const DesignMatrix& design, const std::vector<double>& beta);

} // namespace forkhealth::stats
