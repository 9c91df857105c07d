#include "iwsl/block_tridiagonal.hpp"

#include "iwsl/error.hpp"

namespace iwsl {

BlockTridiagonal::BlockTridiagonal(std::size_t blocks, Eigen::Index dim)
    : diagonal(blocks, Eigen::MatrixXd::Zero(dim, dim)),
      lower(blocks > 0 ? blocks - 1 : 0, Eigen::MatrixXd::Zero(dim, dim)) {}

Eigen::VectorXd BlockTridiagonal::multiply(const Eigen::VectorXd& x) const {
  const Eigen::Index d = block_dim();
  const auto n = static_cast<Eigen::Index>(blocks());
  if (x.size() != n * d) fail(ErrorCode::kDimensionMismatch, "block-tridiagonal product size");
  Eigen::VectorXd y(x.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    auto out = y.segment(i * d, d);
    out.noalias() = diagonal[i] * x.segment(i * d, d);
    if (i > 0) out.noalias() += lower[i - 1] * x.segment((i - 1) * d, d);
    if (i + 1 < n) out.noalias() += lower[i].transpose() * x.segment((i + 1) * d, d);
  }
  return y;
}

Eigen::MatrixXd BlockTridiagonal::to_dense() const {
  const Eigen::Index d = block_dim();
  const auto n = static_cast<Eigen::Index>(blocks());
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n * d, n * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    dense.block(i * d, i * d, d, d) = diagonal[i];
    if (i + 1 < n) {
      dense.block((i + 1) * d, i * d, d, d) = lower[i];
      dense.block(i * d, (i + 1) * d, d, d) = lower[i].transpose();
    }
  }
  return dense;
}

bool BlockTridiagonalCholesky::compute(const BlockTridiagonal& a) {
  const std::size_t n = a.blocks();
  pivots_.clear();
  sub_.clear();
  pivots_.reserve(n);
  sub_.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::MatrixXd pivot = a.diagonal[i];
    if (i > 0) pivot.noalias() -= sub_.back() * sub_.back().transpose();
    pivots_.emplace_back(pivot);
    if (pivots_.back().info() != Eigen::Success) return false;
    if (i + 1 < n) {
      // L_{i+1,i} = A_{i+1,i} L_ii^-T
      const auto& l = pivots_.back().matrixL();
      sub_.push_back(l.solve(a.lower[i].transpose()).transpose());
    }
  }
  return true;
}

Eigen::VectorXd BlockTridiagonalCholesky::solve(const Eigen::VectorXd& b) const {
  const auto n = static_cast<Eigen::Index>(pivots_.size());
  const Eigen::Index d = n > 0 ? pivots_.front().rows() : 0;
  Eigen::VectorXd y = b;
  for (Eigen::Index i = 0; i < n; ++i) {
    auto seg = y.segment(i * d, d);
    if (i > 0) seg.noalias() -= sub_[i - 1] * y.segment((i - 1) * d, d);
    pivots_[i].matrixL().solveInPlace(seg);
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    auto seg = y.segment(i * d, d);
    if (i + 1 < n) seg.noalias() -= sub_[i].transpose() * y.segment((i + 1) * d, d);
    pivots_[i].matrixU().solveInPlace(seg);
  }
  return y;
}

}  // namespace iwsl
