#pragma once

#include "disaudit/embedding/affinity.hpp"
#include "disaudit/error.hpp"
#include "disaudit/types.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace disaudit::embedding {

namespace detail {

// Neighbours of i ordered by (distance, index), self excluded.
template <typename Scalar>
std::vector<Eigen::Index> neighbour_order(const Matrix<Scalar>& d2, Eigen::Index i) {
  std::vector<Eigen::Index> order;
  order.reserve(d2.rows() - 1);
  for (Eigen::Index j = 0; j < d2.rows(); ++j)
    if (j != i) order.push_back(j);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return d2(i, a) < d2(i, b) || (d2(i, a) == d2(i, b) && a < b);
  });
  return order;
}

}  // namespace detail

/// Trustworthiness T(k): penalises points that enter an embedding
/// neighbourhood without being original-space neighbours, weighted by how far
/// down the original ranking they sit. 1 means every embedding neighbourhood
/// is faithful.
template <typename DerivedA, typename DerivedB>
double trustworthiness(const Eigen::MatrixBase<DerivedA>& original, const Eigen::MatrixBase<DerivedB>& embedded, int k = 15) {
  const Eigen::Index n = original.rows();
  if (embedded.rows() != n) fail(Errc::LengthMismatch, "trustworthiness: row counts differ");
  if (k < 1 || !(2 * static_cast<Eigen::Index>(k) < n)) fail(Errc::KTooLarge, "trustworthiness needs 1 <= k < N/2");

  const auto d_orig = squared_distances(original);
  const auto d_emb = squared_distances(embedded);
  std::vector<Eigen::Index> rank(n);
  double penalty = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto orig = detail::neighbour_order(d_orig, i);
    for (std::size_t r = 0; r < orig.size(); ++r) rank[orig[r]] = static_cast<Eigen::Index>(r) + 1;
    const auto emb = detail::neighbour_order(d_emb, i);
    for (int m = 0; m < k; ++m) {
      const Eigen::Index r = rank[emb[m]];
      if (r > k) penalty += static_cast<double>(r - k);
    }
  }
  const double nd = static_cast<double>(n), kd = k;
  return 1.0 - 2.0 / (nd * kd * (2.0 * nd - 3.0 * kd - 1.0)) * penalty;
}

}  // namespace disaudit::embedding
