#pragma once

#include "disaudit/cluster/kmeans.hpp"
#include "disaudit/embedding/normalize.hpp"
#include "disaudit/embedding/pca.hpp"
#include "disaudit/types.hpp"

#include <cstdint>
#include <vector>

namespace disaudit::confound {

/// Pathological and linguistic samples expressed in a common d-dimensional
/// coordinate system: each set is PCA-projected on its own to
/// d = min(d_path, d_ling, 10) axes and then z-scored per axis.
struct SharedSubspace {
  Eigen::Index d_shared = 0;
  Eigen::MatrixXd projected_path;  // N_p x d_shared
  Eigen::MatrixXd projected_ling;  // N_l x d_shared
  embedding::PcaModel<double> path_pca;
  embedding::PcaModel<double> ling_pca;
  std::vector<bool> path_zero_variance;
  std::vector<bool> ling_zero_variance;
};

struct OverlapResult {
  std::vector<double> per_cluster;   // fraction of pathological samples within 2 sigma of cluster j
  std::vector<double> sigma;         // mean per-axis standard deviation of cluster j
  std::vector<bool> zero_sigma;      // singleton clusters, overlap forced to 0
  double mean_overlap = 0;
  double max_overlap = 0;
  int k_ling = 0;
};

struct PermutationNull {
  int n_perm = 0;
  std::vector<double> null_values;
  double mean_null = 0;
  double p5 = 0;
  double p95 = 0;
};

struct Verdict {
  bool exceeds_null = false;
  bool bounded = false;
  double headline = 0;
  double threshold = 0.21;
};

inline constexpr Eigen::Index kMaxSharedDimensions = 10;

SharedSubspace build_shared_subspace(const FeatureMatrix& path_features, const FeatureMatrix& ling_features);
SharedSubspace build_shared_subspace(const Eigen::MatrixXd& path_features, const Eigen::MatrixXd& ling_features);

/// Fraction of pathological rows closer than 2 sigma_j (strict) to each
/// linguistic cluster centroid, where sigma_j averages the per-axis standard
/// deviations of cluster j.
OverlapResult overlap(const Eigen::MatrixXd& path_points, const Eigen::MatrixXd& ling_points, const Labels& ling_labels);

inline OverlapResult overlap(const SharedSubspace& shared, const cluster::ClusterResult<double>& ling_clusters) {
  return overlap(shared.projected_path, shared.projected_ling, ling_clusters.labels);
}

/// Clusters the projected linguistic set with kmeans and measures overlap.
OverlapResult observed_overlap(const SharedSubspace& shared, const cluster::KMeansOptions& kmeans_opt);

/// Null distribution of the mean overlap: pool both projected sets, split
/// them at random into groups of the original sizes, re-cluster the
/// pseudo-linguistic group (kmeans seed = seed + perm) and recompute.
PermutationNull permutation_null(const SharedSubspace& shared, int n_perm, std::uint64_t seed,
                                 const cluster::KMeansOptions& kmeans_opt);

Verdict confound_verdict(const OverlapResult& observed, const PermutationNull& null, double bounded_threshold = 0.21);

}  // namespace disaudit::confound
