#pragma once

#include "disaudit/cluster/labels.hpp"
#include "disaudit/error.hpp"
#include "disaudit/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace disaudit::cluster {

struct QualityScores {
  double silhouette = 0;
  double davies_bouldin = 0;
  double calinski_harabasz = 0;
  Eigen::Index n = 0;
  int k = 0;
};

namespace detail {

template <typename Derived>
void check_shapes(const Eigen::MatrixBase<Derived>& points, const Labels& labels, const char* who) {
  if (points.rows() != labels.size()) fail(Errc::LengthMismatch, std::string(who) + ": labels and points differ in length");
}

template <typename Derived>
Matrix<typename Derived::Scalar> cluster_means(const Eigen::MatrixBase<Derived>& x, const Labels& compact, int k,
                                               std::vector<Eigen::Index>& sizes) {
  using Scalar = typename Derived::Scalar;
  Matrix<Scalar> c = Matrix<Scalar>::Zero(k, x.cols());
  sizes.assign(k, 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    c.row(compact[i]) += x.row(i);
    ++sizes[compact[i]];
  }
  for (int j = 0; j < k; ++j) c.row(j) /= static_cast<Scalar>(sizes[j]);
  return c;
}

}  // namespace detail

/// Mean silhouette coefficient. a(i) excludes the sample itself; a sample in a
/// singleton cluster scores 0, as does a sample with a(i) = b(i) = 0.
template <typename Derived>
double silhouette(const Eigen::MatrixBase<Derived>& points, const Labels& labels) {
  detail::check_shapes(points, labels, "silhouette");
  Labels c;
  const int k = compact_labels(labels, c);
  if (k < 2) fail(Errc::SingleCluster, "silhouette needs at least two clusters");
  const Eigen::Index n = points.rows();
  std::vector<Eigen::Index> sizes(k, 0);
  for (Eigen::Index i = 0; i < n; ++i) ++sizes[c[i]];

  std::vector<double> sums(k);
  double total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) sums[c[j]] += static_cast<double>((points.row(i) - points.row(j)).norm());
    const int own = c[i];
    if (sizes[own] <= 1) continue;
    const double a = sums[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j)
      if (j != own) b = std::min(b, sums[j] / static_cast<double>(sizes[j]));
    const double denom = std::max(a, b);
    if (denom > 0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

/// Davies-Bouldin index with scatter = mean distance of members to their
/// centroid. Coinciding centroids are an error rather than an infinite score.
template <typename Derived>
double davies_bouldin(const Eigen::MatrixBase<Derived>& points, const Labels& labels) {
  detail::check_shapes(points, labels, "davies_bouldin");
  Labels c;
  const int k = compact_labels(labels, c);
  if (k < 2) fail(Errc::SingleCluster, "davies_bouldin needs at least two clusters");
  std::vector<Eigen::Index> sizes;
  const auto centroids = detail::cluster_means(points, c, k, sizes);
  std::vector<double> scatter(k, 0.0);
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    scatter[c[i]] += static_cast<double>((points.row(i) - centroids.row(c[i])).norm());
  for (int j = 0; j < k; ++j) scatter[j] /= static_cast<double>(sizes[j]);

  double sum = 0;
  for (int i = 0; i < k; ++i) {
    double worst = 0;
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      const double d = static_cast<double>((centroids.row(i) - centroids.row(j)).norm());
      if (d == 0) fail(Errc::IdenticalCentroids, "davies_bouldin: two cluster centroids coincide");
      worst = std::max(worst, (scatter[i] + scatter[j]) / d);
    }
    sum += worst;
  }
  return sum / k;
}

/// Calinski-Harabasz variance ratio (SS_B / (k-1)) / (SS_W / (n-k)).
template <typename Derived>
double calinski_harabasz(const Eigen::MatrixBase<Derived>& points, const Labels& labels) {
  detail::check_shapes(points, labels, "calinski_harabasz");
  Labels c;
  const int k = compact_labels(labels, c);
  const Eigen::Index n = points.rows();
  if (k < 2) fail(Errc::SingleCluster, "calinski_harabasz needs at least two clusters");
  if (n <= k) fail(Errc::TooFewPoints, "calinski_harabasz needs more samples than clusters");
  std::vector<Eigen::Index> sizes;
  const auto centroids = detail::cluster_means(points, c, k, sizes);
  const auto grand = points.colwise().mean().eval();
  double ss_b = 0, ss_w = 0;
  for (int j = 0; j < k; ++j) ss_b += static_cast<double>(sizes[j]) * static_cast<double>((centroids.row(j) - grand).squaredNorm());
  for (Eigen::Index i = 0; i < n; ++i) ss_w += static_cast<double>((points.row(i) - centroids.row(c[i])).squaredNorm());
  if (ss_w == 0) fail(Errc::ZeroWithinScatter, "calinski_harabasz: every cluster collapsed to a point");
  return (ss_b / (k - 1)) / (ss_w / static_cast<double>(n - k));
}

template <typename Derived>
QualityScores quality_scores(const Eigen::MatrixBase<Derived>& points, const Labels& labels) {
  QualityScores q;
  q.silhouette = silhouette(points, labels);
  q.davies_bouldin = davies_bouldin(points, labels);
  q.calinski_harabasz = calinski_harabasz(points, labels);
  q.n = points.rows();
  Labels c;
  q.k = compact_labels(labels, c);
  return q;
}

}  // namespace disaudit::cluster
