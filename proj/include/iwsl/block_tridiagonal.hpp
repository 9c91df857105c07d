#pragma once

#include <Eigen/Dense>

#include <vector>

namespace iwsl {

/// Symmetric block-tridiagonal matrix with n square blocks of size d.
/// lower[i] is block (i+1, i); block (i, i+1) is its transpose.
struct BlockTridiagonal {
  std::vector<Eigen::MatrixXd> diagonal;
  std::vector<Eigen::MatrixXd> lower;

  BlockTridiagonal() = default;
  BlockTridiagonal(std::size_t blocks, Eigen::Index dim);

  std::size_t blocks() const { return diagonal.size(); }
  Eigen::Index block_dim() const { return diagonal.empty() ? 0 : diagonal.front().rows(); }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd to_dense() const;
};

/// Block Cholesky factorization A = L L^T, L block lower bidiagonal.
class BlockTridiagonalCholesky {
 public:
  /// Returns false if some pivot block is not positive definite.
  bool compute(const BlockTridiagonal& a);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

 private:
  std::vector<Eigen::LLT<Eigen::MatrixXd>> pivots_;
  std::vector<Eigen::MatrixXd> sub_;  // L_{i+1,i}
};

}  // namespace iwsl
