#pragma once

#include "disaudit/cluster/ari.hpp"
#include "disaudit/cluster/kmeans.hpp"
#include "disaudit/parallel.hpp"
#include "disaudit/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace disaudit::cluster {

struct StabilityOptions {
  int iterations = 20;     // B
  double fraction = 0.8;   // subsample size as a fraction of N, drawn without replacement
  std::uint64_t seed = 0;
};

struct StabilityResult {
  double mean_ari = 0;
  std::vector<double> per_iteration_ari;
  int iterations = 0;
  double subsample_fraction = 0;
};

/// Re-clusters B random subsamples and scores each against the full
/// clustering restricted to the same samples. Iteration b draws its subsample
/// with seed derive(seed, b) and clusters with kmeans seed `seed + b + 1`.
template <typename Derived, typename Scalar>
StabilityResult bootstrap_stability(const Eigen::MatrixBase<Derived>& points, const ClusterResult<Scalar>& full,
                                    const KMeansOptions& kmeans_opt, const StabilityOptions& opt) {
  const Eigen::Index n = points.rows();
  if (full.labels.size() != n) fail(Errc::LengthMismatch, "bootstrap_stability: labels and points differ in length");
  if (opt.iterations < 1 || !(opt.fraction > 0 && opt.fraction <= 1))
    fail(Errc::InvalidParams, "bootstrap_stability: need B >= 1 and 0 < fraction <= 1");
  const auto m = static_cast<Eigen::Index>(std::floor(opt.fraction * static_cast<double>(n)));
  if (m < kmeans_opt.k || m < 2) fail(Errc::TooFewPoints, "bootstrap_stability: subsample smaller than k");

  StabilityResult out;
  out.iterations = opt.iterations;
  out.subsample_fraction = opt.fraction;
  out.per_iteration_ari.assign(opt.iterations, 0.0);
  parallel_for(static_cast<std::size_t>(opt.iterations), [&](std::size_t b) {
    std::vector<Eigen::Index> idx(n);
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    Rng rng(derive_seed(opt.seed, "bootstrap", std::to_string(b)));
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(m);
    std::sort(idx.begin(), idx.end());

    Matrix<typename Derived::Scalar> sub(m, points.cols());
    Labels reference(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      sub.row(r) = points.row(idx[r]);
      reference[r] = full.labels[idx[r]];
    }
    KMeansOptions o = kmeans_opt;
    o.seed = opt.seed + static_cast<std::uint64_t>(b) + 1;
    const auto again = kmeans(sub, o);
    out.per_iteration_ari[b] = adjusted_rand_index(reference, again.labels);
  });
  out.mean_ari = std::accumulate(out.per_iteration_ari.begin(), out.per_iteration_ari.end(), 0.0) / opt.iterations;
  return out;
}

}  // namespace disaudit::cluster
