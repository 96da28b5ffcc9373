#include "disaudit/confound/overlap.hpp"

#include "disaudit/cluster/labels.hpp"
#include "disaudit/error.hpp"
#include "disaudit/parallel.hpp"
#include "disaudit/random.hpp"
#include "disaudit/report/stats.hpp"

#include <algorithm>
#include <numeric>

namespace disaudit::confound {

SharedSubspace build_shared_subspace(const Eigen::MatrixXd& path_features, const Eigen::MatrixXd& ling_features) {
  SharedSubspace s;
  s.d_shared = std::min({path_features.cols(), ling_features.cols(), kMaxSharedDimensions});
  if (s.d_shared < 1) fail(Errc::InvalidParams, "build_shared_subspace: empty feature set");
  if (path_features.rows() < s.d_shared + 1 || ling_features.rows() < s.d_shared + 1)
    fail(Errc::TooFewSamples, "build_shared_subspace needs at least d_shared + 1 samples per set");
  s.path_pca = embedding::fit_pca(path_features, s.d_shared);
  s.ling_pca = embedding::fit_pca(ling_features, s.d_shared);
  s.projected_path = s.path_pca.transform(path_features);
  s.projected_ling = s.ling_pca.transform(ling_features);
  s.path_zero_variance = embedding::zscore_columns(s.projected_path).zero_variance;
  s.ling_zero_variance = embedding::zscore_columns(s.projected_ling).zero_variance;
  return s;
}

SharedSubspace build_shared_subspace(const FeatureMatrix& path_features, const FeatureMatrix& ling_features) {
  return build_shared_subspace(path_features.values, ling_features.values);
}

OverlapResult overlap(const Eigen::MatrixXd& path_points, const Eigen::MatrixXd& ling_points, const Labels& ling_labels) {
  if (ling_points.rows() != ling_labels.size()) fail(Errc::LengthMismatch, "overlap: labels and linguistic points differ in length");
  if (path_points.cols() != ling_points.cols()) fail(Errc::LengthMismatch, "overlap: sets live in different dimensions");
  if (path_points.rows() == 0) fail(Errc::TooFewSamples, "overlap: no pathological samples");
  Labels compact;
  const int k = cluster::compact_labels(ling_labels, compact);
  const Eigen::Index d = ling_points.cols();

  OverlapResult r;
  r.k_ling = k;
  r.per_cluster.assign(k, 0.0);
  r.sigma.assign(k, 0.0);
  r.zero_sigma.assign(k, false);
  for (int j = 0; j < k; ++j) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < compact.size(); ++i)
      if (compact[i] == j) members.push_back(i);
    if (members.empty()) fail(Errc::EmptyCluster, "overlap: empty linguistic cluster");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(members.size()), d);
    for (std::size_t r_ = 0; r_ < members.size(); ++r_) m.row(static_cast<Eigen::Index>(r_)) = ling_points.row(members[r_]);
    const Eigen::RowVectorXd mu = m.colwise().mean();
    const Eigen::RowVectorXd sd = ((m.rowwise() - mu).array().square().colwise().mean()).sqrt();
    const double sigma = sd.mean();
    r.sigma[j] = sigma;
    if (!(sigma > 0)) {
      r.zero_sigma[j] = true;
      continue;
    }
    const double radius2 = 4 * sigma * sigma;
    Eigen::Index inside = 0;
    for (Eigen::Index i = 0; i < path_points.rows(); ++i)
      if ((path_points.row(i) - mu).squaredNorm() < radius2) ++inside;
    r.per_cluster[j] = static_cast<double>(inside) / static_cast<double>(path_points.rows());
  }
  r.mean_overlap = std::accumulate(r.per_cluster.begin(), r.per_cluster.end(), 0.0) / k;
  r.max_overlap = *std::max_element(r.per_cluster.begin(), r.per_cluster.end());
  return r;
}

OverlapResult observed_overlap(const SharedSubspace& shared, const cluster::KMeansOptions& kmeans_opt) {
  const auto clusters = cluster::kmeans(shared.projected_ling, kmeans_opt);
  return overlap(shared, clusters);
}

PermutationNull permutation_null(const SharedSubspace& shared, int n_perm, std::uint64_t seed,
                                 const cluster::KMeansOptions& kmeans_opt) {
  if (n_perm < 2) fail(Errc::InvalidParams, "permutation_null needs n_perm >= 2");
  const Eigen::Index np = shared.projected_path.rows(), nl = shared.projected_ling.rows();
  Eigen::MatrixXd pool(np + nl, shared.d_shared);
  pool << shared.projected_path, shared.projected_ling;

  PermutationNull out;
  out.n_perm = n_perm;
  out.null_values.assign(n_perm, 0.0);
  parallel_for(static_cast<std::size_t>(n_perm), [&](std::size_t p) {
    std::vector<Eigen::Index> idx(np + nl);
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    Rng rng(derive_seed(seed, "permutation", std::to_string(p)));
    std::shuffle(idx.begin(), idx.end(), rng);
    Eigen::MatrixXd pseudo_path(np, shared.d_shared), pseudo_ling(nl, shared.d_shared);
    for (Eigen::Index r = 0; r < np; ++r) pseudo_path.row(r) = pool.row(idx[r]);
    for (Eigen::Index r = 0; r < nl; ++r) pseudo_ling.row(r) = pool.row(idx[np + r]);
    cluster::KMeansOptions o = kmeans_opt;
    o.seed = seed + static_cast<std::uint64_t>(p);
    const auto clusters = cluster::kmeans(pseudo_ling, o);
    out.null_values[p] = overlap(pseudo_path, pseudo_ling, clusters.labels).mean_overlap;
  });
  out.mean_null = report::mean(out.null_values);
  out.p5 = report::quantile(out.null_values, 0.05);
  out.p95 = report::quantile(out.null_values, 0.95);
  return out;
}

Verdict confound_verdict(const OverlapResult& observed, const PermutationNull& null, double bounded_threshold) {
  Verdict v;
  v.headline = observed.mean_overlap;
  v.threshold = bounded_threshold;
  v.exceeds_null = v.headline > null.p95;
  v.bounded = v.headline < bounded_threshold;
  return v;
}

}  // namespace disaudit::confound
