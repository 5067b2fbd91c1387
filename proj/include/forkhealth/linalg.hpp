#pragma once

#include <cstddef>
#include <vector>

namespace forkhealth::linalg {

// Dense row-major matrix. Only the handful of operations the stats engine
// needs; sizes here are tiny (columns <= 9).
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Householder QR with column pivoting of A (n x k, n >= k), with the same
// transformations applied to b. A P = Q R.
struct QrFactorization {
  Matrix r;                       // k x k upper triangle of R
  std::vector<std::size_t> pivot; // position j holds original column pivot[j]
  std::size_t rank = 0;           // numerical rank by relative pivot threshold
  std::vector<double> qtb;        // first k entries of Q^T b
};

QrFactorization qr_decompose(Matrix a, std::vector<double> b);

// Least-squares solution x of min ||A x - b||, un-permuted. Requires full rank.
std::vector<double> qr_solve(const QrFactorization& qr);

// Diagonal of (A^T A)^-1, un-permuted. Requires full rank.
std::vector<double> normal_inverse_diagonal(const QrFactorization& qr);

} // namespace forkhealth::linalg
