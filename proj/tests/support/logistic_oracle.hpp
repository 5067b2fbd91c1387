#pragma once

#include <vector>

namespace testsupport {

// Test-side Bernoulli log-likelihood; `x` rows already include the leading
// intercept column. Written independently of the library's fitter.
double oracle_log_likelihood(const std::vector<std::vector<double>>& x,
                             const std::vector<int>& y, const std::vector<double>& beta);

// Brute-force maximizer: coarse grid over [-8,8]^d, compass search down to
// step 1e-10, then a few finite-difference Newton polish steps. Derivative
// information comes only from differencing the log-likelihood.
std::vector<double> oracle_max_likelihood(const std::vector<std::vector<double>>& x,
                                          const std::vector<int>& y);

} // namespace testsupport
