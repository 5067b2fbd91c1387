#include "forkhealth/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "forkhealth/errors.hpp"
#include "forkhealth/linalg.hpp"
#include "forkhealth/log.hpp"

namespace forkhealth::stats {

namespace {

constexpr double kCoefficientTolerance = 1e-8;
constexpr int kMaxIterations = 50;
constexpr double kSeparationThreshold = 15.0;

double softplus(double x) {
  // log(1 + e^x) without overflow.
  return x > 35.0 ? x : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

// Linear predictor for row i with intercept-first coefficients.
double eta_for_row(const DesignMatrix& d, const std::vector<double>& beta, std::size_t i) {
  double eta = beta[0];
  for (std::size_t j = 0; j < d.columns.size(); ++j) eta += beta[j + 1] * d.rows[i][j];
  return eta;
}

// Weighted least-squares factorization of the IRLS working system at beta.
linalg::QrFactorization irls_system(const DesignMatrix& d, const std::vector<double>& beta,
                                    bool with_working_response) {
  const std::size_t n = d.rows.size();
  const std::size_t k = d.columns.size() + 1;
  linalg::Matrix a(n, k);
  std::vector<double> rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double eta = eta_for_row(d, beta, i);
    double p = sigmoid(eta);
    double w = std::max(p * (1.0 - p), 1e-10);
    double sw = std::sqrt(w);
    a(i, 0) = sw;
    for (std::size_t j = 0; j < d.columns.size(); ++j) a(i, j + 1) = sw * d.rows[i][j];
    if (with_working_response)
      rhs[i] = sw * (eta + (static_cast<double>(d.outcome[i]) - p) / w);
  }
  return linalg::qr_decompose(std::move(a), std::move(rhs));
}

[[noreturn]] void throw_collinear(const DesignMatrix& d, const linalg::QrFactorization& qr) {
  std::vector<std::string> bad;
  for (std::size_t j = qr.rank; j < qr.pivot.size(); ++j) {
    std::size_t col = qr.pivot[j];
    bad.push_back(col == 0 ? "(Intercept)" : d.columns[col - 1]);
  }
  std::sort(bad.begin(), bad.end());
  throw Error("design matrix is rank-deficient; collinear columns: " + join_names(bad));
}

} // namespace

DesignMatrix DesignMatrix::build(std::vector<std::string> columns,
                                 const std::vector<std::vector<std::optional<double>>>& raw_rows,
                                 const std::vector<int>& outcome) {
  if (raw_rows.size() != outcome.size())
    throw Error("design matrix: rows and outcome lengths differ");
  DesignMatrix d;
  d.columns = std::move(columns);
  for (std::size_t i = 0; i < raw_rows.size(); ++i) {
    if (raw_rows[i].size() != d.columns.size())
      throw Error("design matrix: row width mismatch");
    bool complete = std::all_of(raw_rows[i].begin(), raw_rows[i].end(),
                                [](const std::optional<double>& v) { return v.has_value(); });
    if (!complete) {
      ++d.dropped_missing;
      continue;
    }
    std::vector<double> row(d.columns.size());
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = *raw_rows[i][j];
    d.rows.push_back(std::move(row));
    d.outcome.push_back(outcome[i] ? 1 : 0);
  }
  if (d.rows.size() < d.columns.size() + 1)
    throw Error("design matrix: need at least " + std::to_string(d.columns.size() + 1) +
                " complete rows, have " + std::to_string(d.rows.size()));
  return d;
}

DesignMatrix DesignMatrix::without(const std::string& column) const {
  auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw Error("design matrix: no column named " + column);
  std::size_t drop = static_cast<std::size_t>(it - columns.begin());
  DesignMatrix d;
  d.dropped_missing = dropped_missing;
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (j != drop) d.columns.push_back(columns[j]);
  d.rows.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<double> r;
    r.reserve(row.size() - 1);
    for (std::size_t j = 0; j < row.size(); ++j)
      if (j != drop) r.push_back(row[j]);
    d.rows.push_back(std::move(r));
  }
  d.outcome = outcome;
  return d;
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw Error("quantile of empty sample");
  const double pos = 1.0 + (static_cast<double>(sorted.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos)) - 1;
  const double frac = pos - std::floor(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

OutlierSplit remove_outliers_iqr(const std::vector<double>& values) {
  if (values.empty()) throw Error("remove_outliers_iqr: empty input");
  for (double v : values)
    if (!std::isfinite(v)) throw Error("remove_outliers_iqr: non-finite value");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  OutlierSplit out;
  out.q1 = quantile(sorted, 0.25);
  out.q3 = quantile(sorted, 0.75);
  const double iqr = out.q3 - out.q1;
  out.lower_fence = out.q1 - 1.5 * iqr;
  out.upper_fence = out.q3 + 1.5 * iqr;
  for (double v : values) {
    if (v < out.lower_fence || v > out.upper_fence) out.removed.push_back(v);
    else out.kept.push_back(v);
  }
  return out;
}

double log_likelihood(const DesignMatrix& design, const std::vector<double>& beta) {
  double ll = 0.0;
  for (std::size_t i = 0; i < design.rows.size(); ++i) {
    double eta = eta_for_row(design, beta, i);
    ll += static_cast<double>(design.outcome[i]) * eta - softplus(eta);
  }
  return ll;
}

RegressionFit fit_logistic(const DesignMatrix& design) {
  const std::size_t n = design.rows.size();
  const std::size_t k = design.columns.size() + 1;
  if (n < k) throw Error("fit_logistic: fewer rows than coefficients");

  bool any0 = false, any1 = false;
  for (int y : design.outcome) (y ? any1 : any0) = true;
  if (!any0 || !any1)
    throw Error("fit_logistic: degenerate outcome (all " + std::string(any1 ? "1" : "0") + "s)");

  std::vector<double> beta(k, 0.0);
  {
    // At beta = 0 the weights are constant, so this checks the rank of X.
    auto qr = irls_system(design, beta, false);
    if (qr.rank < k) throw_collinear(design, qr);
  }

  RegressionFit fit;
  fit.names.push_back("(Intercept)");
  for (const auto& c : design.columns) fit.names.push_back(c);
  fit.n_obs = n;

  double ll = log_likelihood(design, beta);
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    fit.iterations = iter;
    auto qr = irls_system(design, beta, true);
    if (qr.rank < k) throw_collinear(design, qr);
    std::vector<double> proposal = linalg::qr_solve(qr);

    // Step-halving keeps the likelihood non-decreasing.
    double new_ll = log_likelihood(design, proposal);
    for (int halvings = 0; new_ll < ll - 1e-12 && halvings < 30; ++halvings) {
      for (std::size_t j = 0; j < k; ++j) proposal[j] = 0.5 * (proposal[j] + beta[j]);
      new_ll = log_likelihood(design, proposal);
    }

    double max_delta = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      max_delta = std::max(max_delta, std::abs(proposal[j] - beta[j]));
    beta = std::move(proposal);
    ll = new_ll;
    if (max_delta < kCoefficientTolerance) {
      fit.converged = true;
      break;
    }
  }

  fit.coefficients = beta;
  fit.log_likelihood = ll;
  fit.aic = 2.0 * static_cast<double>(k) - 2.0 * ll;

  auto qr = irls_system(design, beta, false);
  if (qr.rank < k) throw_collinear(design, qr);
  std::vector<double> variance = linalg::normal_inverse_diagonal(qr);
  fit.standard_errors.resize(k);
  fit.z_values.resize(k);
  fit.p_values.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    fit.standard_errors[j] = std::sqrt(variance[j]);
    fit.z_values[j] = fit.coefficients[j] / fit.standard_errors[j];
    fit.p_values[j] = 2.0 * (1.0 - standard_normal_cdf(std::abs(fit.z_values[j])));
  }

  for (double b : beta) {
    if (std::abs(b) > kSeparationThreshold) {
      fit.converged = false;
      log::warn("fit_logistic: quasi-separation suspected (|coefficient| > 15); "
                "estimates unreliable");
      break;
    }
  }
  return fit;
}

double mcfadden_r2(const RegressionFit& fit, const RegressionFit& null_fit) {
  if (null_fit.log_likelihood == 0.0)
    throw Error("mcfadden_r2: degenerate null model (log-likelihood 0)");
  if (fit.n_obs != null_fit.n_obs)
    throw Error("mcfadden_r2: fits cover different rows");
  double r2 = 1.0 - fit.log_likelihood / null_fit.log_likelihood;
  if (r2 < 0.0 && r2 > -1e-12) r2 = 0.0;
  return r2;
}

std::string significance_code(double p) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error("significance_code: p-value outside [0,1]");
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  if (p < 0.1) return ".";
  return "";
}

StepwiseTrace backward_stepwise(const DesignMatrix& design) {
  StepwiseTrace trace;
  DesignMatrix current = design;
  RegressionFit fit = fit_logistic(current);
  trace.steps.push_back({current.columns, fit.aic, ""});

  while (!current.columns.empty()) {
    std::vector<std::string> candidates = current.columns;
    std::sort(candidates.begin(), candidates.end()); // tie-break by name

    std::string best_column;
    double best_aic = 0.0;
    RegressionFit best_fit;
    DesignMatrix best_design;
    for (const auto& column : candidates) {
      DesignMatrix reduced = current.without(column);
      RegressionFit candidate = fit_logistic(reduced);
      if (best_column.empty() || candidate.aic < best_aic) {
        best_column = column;
        best_aic = candidate.aic;
        best_fit = candidate;
        best_design = std::move(reduced);
      }
    }
    if (best_aic >= fit.aic) break; // no strict improvement
    current = std::move(best_design);
    fit = std::move(best_fit);
    trace.steps.push_back({current.columns, fit.aic, best_column});
  }
  trace.final = std::move(fit);
  return trace;
}

double standard_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

} // namespace forkhealth::stats
