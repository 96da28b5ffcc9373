#pragma once

#include "disaudit/cluster/labels.hpp"
#include "disaudit/error.hpp"
#include "disaudit/types.hpp"

#include <vector>

namespace disaudit::cluster {

/// Adjusted Rand Index from the contingency table. When both partitions are
/// trivial (expected index equals its maximum) the result is 1 for identical
/// partitions and 0 otherwise.
inline double adjusted_rand_index(const Labels& a, const Labels& b) {
  if (a.size() != b.size()) fail(Errc::LengthMismatch, "adjusted_rand_index: partitions differ in length");
  if (a.size() < 2) fail(Errc::InvalidParams, "adjusted_rand_index needs at least two samples");
  Labels ca, cb;
  const int ka = compact_labels(a, ca);
  const int kb = compact_labels(b, cb);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(ka, kb);
  for (Eigen::Index i = 0; i < a.size(); ++i) table(ca[i], cb[i]) += 1;

  auto pairs = [](double m) { return m * (m - 1) / 2; };
  double index = 0;
  for (Eigen::Index i = 0; i < table.size(); ++i) index += pairs(table.data()[i]);
  double sum_a = 0, sum_b = 0;
  for (Eigen::Index i = 0; i < ka; ++i) sum_a += pairs(table.row(i).sum());
  for (Eigen::Index j = 0; j < kb; ++j) sum_b += pairs(table.col(j).sum());
  const double expected = sum_a * sum_b / pairs(static_cast<double>(a.size()));
  const double max_index = (sum_a + sum_b) / 2;
  if (max_index == expected) {
    bool same = ka == kb;
    for (Eigen::Index i = 0; same && i < ka; ++i) same = (table.row(i).array() > 0).count() == 1;
    return same ? 1.0 : 0.0;
  }
  return (index - expected) / (max_index - expected);
}

}  // namespace disaudit::cluster
