#pragma once

#include <vector>

#include <Eigen/Core>

namespace lassocert {

/// Exact zero test; Eigen's isZero() is tolerance based and meaningless for
/// rationals.
template <typename Derived>
bool is_zero(const Eigen::DenseBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != Scalar(0)) return false;
  return true;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix_power(
    const Eigen::MatrixBase<Derived>& m, unsigned exponent) {
  using Result = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Result result = Result::Identity(m.rows(), m.cols());
  for (unsigned i = 0; i < exponent; ++i) result = result * m;
  return result;
}

/// In-place reduced row echelon form by exact Gauss-Jordan elimination.
/// Only the first `pivot_cols` columns are eligible as pivots; the remaining
/// columns are carried along (augmented part). Returns the pivot column of
/// each of the leading rows, in order; rows past the returned count have zeros
/// in every eligible column.
template <typename Scalar>
std::vector<Eigen::Index> reduce_rows(
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m, Eigen::Index pivot_cols) {
  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < pivot_cols && row < m.rows(); ++col) {
    Eigen::Index found = -1;
    for (Eigen::Index r = row; r < m.rows(); ++r) {
      if (m(r, col) != Scalar(0)) {
        found = r;
        break;
      }
    }
    if (found < 0) continue;
    m.row(row).swap(m.row(found));
    Scalar inv = Scalar(1) / m(row, col);
    m.row(row) *= inv;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == row || m(r, col) == Scalar(0)) continue;
      Scalar factor = m(r, col);
      m.row(r) -= factor * m.row(row);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace lassocert
