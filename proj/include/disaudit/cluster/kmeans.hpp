#pragma once

#include "disaudit/error.hpp"
#include "disaudit/random.hpp"
#include "disaudit/types.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace disaudit::cluster {

struct KMeansOptions {
  int k = 3;
  int n_init = 10;
  int max_iter = 300;
  // Lloyd stops once no centroid moves further than this.
  double tol = 1e-4;
  std::uint64_t seed = 0;
};

template <typename Scalar>
struct ClusterResult {
  Labels labels;
  Matrix<Scalar> centroids;  // k x D
  Scalar inertia = 0;
  std::uint64_t seed = 0;
  int n_init_used = 0;
};

namespace detail {

template <typename Scalar>
int nearest_centroid(const Matrix<Scalar>& x, Eigen::Index i, const Matrix<Scalar>& c, Scalar& best) {
  int arg = 0;
  best = std::numeric_limits<Scalar>::infinity();
  for (Eigen::Index j = 0; j < c.rows(); ++j) {
    const Scalar d = (x.row(i) - c.row(j)).squaredNorm();
    if (d < best) {
      best = d;
      arg = static_cast<int>(j);
    }
  }
  return arg;
}

template <typename Scalar>
Matrix<Scalar> kmeanspp_seed(const Matrix<Scalar>& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Matrix<Scalar> centers(k, x.cols());
  std::vector<bool> taken(n, false);
  Eigen::Index first = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
  centers.row(0) = x.row(first);
  taken[first] = true;
  Vector<Scalar> d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2[i] = (x.row(i) - centers.row(0)).squaredNorm();

  for (int c = 1; c < k; ++c) {
    const Scalar total = d2.sum();
    Eigen::Index pick = -1;
    if (total > 0) {
      const double u = std::uniform_real_distribution<double>(0.0, static_cast<double>(total))(rng);
      double acc = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += static_cast<double>(d2[i]);
        if (d2[i] > 0 && acc >= u) {
          pick = i;
          break;
        }
      }
      if (pick < 0)  // u landed on rounding slack past the last positive entry
        for (Eigen::Index i = n - 1; i >= 0 && pick < 0; --i)
          if (d2[i] > 0) pick = i;
    } else {
      for (Eigen::Index i = 0; i < n && pick < 0; ++i)
        if (!taken[i]) pick = i;
    }
    taken[pick] = true;
    centers.row(c) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) d2[i] = std::min<Scalar>(d2[i], (x.row(i) - centers.row(c)).squaredNorm());
  }
  return centers;
}

// Assigns every point to its nearest centroid, then repairs empty clusters by
// moving in the point farthest from its own centroid.
template <typename Scalar>
void assign(const Matrix<Scalar>& x, Matrix<Scalar>& c, Labels& labels, Vector<Scalar>& dist) {
  const Eigen::Index n = x.rows();
  const int k = static_cast<int>(c.rows());
  for (Eigen::Index i = 0; i < n; ++i) labels[i] = nearest_centroid(x, i, c, dist[i]);
  std::vector<int> counts(k, 0);
  for (Eigen::Index i = 0; i < n; ++i) ++counts[labels[i]];
  for (int j = 0; j < k; ++j) {
    if (counts[j] > 0) continue;
    Eigen::Index far = -1;
    for (Eigen::Index i = 0; i < n; ++i)
      if (counts[labels[i]] > 1 && (far < 0 || dist[i] > dist[far])) far = i;
    --counts[labels[far]];
    labels[far] = j;
    ++counts[j];
    dist[far] = 0;
    c.row(j) = x.row(far);
  }
}

template <typename Scalar>
Matrix<Scalar> centroids_of(const Matrix<Scalar>& x, const Labels& labels, int k) {
  Matrix<Scalar> c = Matrix<Scalar>::Zero(k, x.cols());
  std::vector<Eigen::Index> counts(k, 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    c.row(labels[i]) += x.row(i);
    ++counts[labels[i]];
  }
  for (int j = 0; j < k; ++j) c.row(j) /= static_cast<Scalar>(counts[j]);
  return c;
}

template <typename Scalar>
ClusterResult<Scalar> lloyd(const Matrix<Scalar>& x, const KMeansOptions& opt, std::uint64_t seed) {
  Rng rng(seed);
  Matrix<Scalar> c = kmeanspp_seed(x, opt.k, rng);
  Labels labels(x.rows());
  Vector<Scalar> dist(x.rows());
  for (int it = 0; it < opt.max_iter; ++it) {
    assign(x, c, labels, dist);
    Matrix<Scalar> next = centroids_of(x, labels, opt.k);
    const Scalar shift = (next - c).rowwise().norm().maxCoeff();
    c = std::move(next);
    if (shift < static_cast<Scalar>(opt.tol)) break;
  }
  assign(x, c, labels, dist);
  ClusterResult<Scalar> out;
  out.centroids = centroids_of(x, labels, opt.k);
  out.labels = std::move(labels);
  out.inertia = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.inertia += (x.row(i) - out.centroids.row(out.labels[i])).squaredNorm();
  return out;
}

}  // namespace detail

/// k-means++ seeded Lloyd clustering, best of opt.n_init restarts by inertia.
/// Restart r draws from an RNG seeded with opt.seed + r, so the result is a
/// pure function of (points, opt).
template <typename Derived>
ClusterResult<typename Derived::Scalar> kmeans(const Eigen::MatrixBase<Derived>& points, const KMeansOptions& opt) {
  using Scalar = typename Derived::Scalar;
  if (opt.k < 1 || opt.n_init < 1 || opt.max_iter < 1) fail(Errc::InvalidParams, "kmeans: k, n_init and max_iter must be positive");
  if (points.rows() < opt.k) fail(Errc::TooFewPoints, "kmeans: fewer points than clusters");
  const Matrix<Scalar> x = points;
  ClusterResult<Scalar> best;
  for (int r = 0; r < opt.n_init; ++r) {
    auto run = detail::lloyd(x, opt, opt.seed + static_cast<std::uint64_t>(r));
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  best.seed = opt.seed;
  best.n_init_used = opt.n_init;
  return best;
}

}  // namespace disaudit::cluster
