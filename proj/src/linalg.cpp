#include "forkhealth/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "forkhealth/errors.hpp"

namespace forkhealth::linalg {

QrFactorization qr_decompose(Matrix a, std::vector<double> b) {
  const std::size_t n = a.rows();
  const std::size_t k = a.cols();
  if (b.size() != n) throw Error("qr_decompose: rhs length mismatch");
  if (n < k) throw Error("qr_decompose: more columns than rows");

  QrFactorization out;
  out.pivot.resize(k);
  for (std::size_t j = 0; j < k; ++j) out.pivot[j] = j;

  auto col_norm_from = [&](std::size_t col, std::size_t row0) {
    double s = 0.0;
    for (std::size_t i = row0; i < n; ++i) s += a(i, col) * a(i, col);
    return s;
  };

  double max_diag = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    // Pivot: bring the column with the largest residual norm to position j.
    std::size_t best = j;
    double best_norm = col_norm_from(j, j);
    for (std::size_t c = j + 1; c < k; ++c) {
      double norm = col_norm_from(c, j);
      if (norm > best_norm) {
        best = c;
        best_norm = norm;
      }
    }
    if (best != j) {
      for (std::size_t i = 0; i < n; ++i) std::swap(a(i, j), a(i, best));
      std::swap(out.pivot[j], out.pivot[best]);
    }

    // Householder reflection zeroing a(j+1..n-1, j).
    double alpha = std::sqrt(best_norm);
    if (a(j, j) > 0) alpha = -alpha;
    if (alpha != 0.0) {
      std::vector<double> v(n - j, 0.0);
      v[0] = a(j, j) - alpha;
      for (std::size_t i = j + 1; i < n; ++i) v[i - j] = a(i, j);
      double vtv = 0.0;
      for (double x : v) vtv += x * x;
      if (vtv > 0.0) {
        for (std::size_t c = j; c < k; ++c) {
          double dot = 0.0;
          for (std::size_t i = j; i < n; ++i) dot += v[i - j] * a(i, c);
          double f = 2.0 * dot / vtv;
          for (std::size_t i = j; i < n; ++i) a(i, c) -= f * v[i - j];
        }
        double dot = 0.0;
        for (std::size_t i = j; i < n; ++i) dot += v[i - j] * b[i];
        double f = 2.0 * dot / vtv;
        for (std::size_t i = j; i < n; ++i) b[i] -= f * v[i - j];
      }
      a(j, j) = alpha;
    }
    max_diag = std::max(max_diag, std::abs(a(j, j)));
  }

  out.r = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) out.r(i, j) = a(i, j);
  out.qtb.assign(b.begin(), b.begin() + static_cast<long>(k));

  const double tol =
      max_diag * static_cast<double>(std::max(n, k)) * std::numeric_limits<double>::epsilon();
  out.rank = 0;
  for (std::size_t j = 0; j < k; ++j)
    if (std::abs(out.r(j, j)) > tol) ++out.rank;
    else break; // pivoting puts dependent columns last
  return out;
}

std::vector<double> qr_solve(const QrFactorization& qr) {
  const std::size_t k = qr.r.cols();
  if (qr.rank < k) throw Error("qr_solve: rank-deficient system");
  std::vector<double> y(k, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    double s = qr.qtb[i];
    for (std::size_t j = i + 1; j < k; ++j) s -= qr.r(i, j) * y[j];
    y[i] = s / qr.r(i, i);
  }
  std::vector<double> x(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) x[qr.pivot[j]] = y[j];
  return x;
}

std::vector<double> normal_inverse_diagonal(const QrFactorization& qr) {
  const std::size_t k = qr.r.cols();
  if (qr.rank < k) throw Error("normal_inverse_diagonal: rank-deficient system");
  // U = R^-1 (upper triangular); diag((A^T A)^-1) = rows of U dotted with
  // themselves, mapped back through the pivot.
  Matrix u(k, k);
  for (std::size_t j = k; j-- > 0;) {
    u(j, j) = 1.0 / qr.r(j, j);
    for (std::size_t i = j; i-- > 0;) {
      double s = 0.0;
      for (std::size_t m = i + 1; m <= j; ++m) s += qr.r(i, m) * u(m, j);
      u(i, j) = -s / qr.r(i, i);
    }
  }
  std::vector<double> diag(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double s = 0.0;
    for (std::size_t j = i; j < k; ++j) s += u(i, j) * u(i, j);
    diag[qr.pivot[i]] = s;
  }
  return diag;
}

} // namespace forkhealth::linalg
