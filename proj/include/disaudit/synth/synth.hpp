#pragma once

#include "disaudit/acoustics/audio.hpp"
#include "disaudit/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace disaudit::synth {

struct BlobSpec {
  int n_clusters = 3;
  int points_per_cluster = 100;
  double center_separation = 8;  // pairwise center distance in within-cluster std units
  int dimension = 2;
  // Width of the subspace carrying the clusters; 0 means `dimension`. The
  // subspace is rotated into the full space by a seeded orthonormal frame.
  int informative_dimension = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct BlobData {
  FeatureMatrix features;  // columns x1..xd, sample ids s0000...
  Labels labels;
  Eigen::MatrixXd centers;  // n_clusters x dimension
};

BlobData generate_blobs(const BlobSpec& spec);

/// Separation per dimension used by the hierarchy fixture:
/// emotional 8, pathological 4, linguistic 2.
double hierarchy_separation(DimensionTag tag);
inline constexpr int kHierarchyInformativeDimension = 8;

/// Blob data shaped like one dimension of a combination: the default schema's
/// column count and names, hierarchy separation, 8 informative axes.
BlobData generate_dimension_fixture(DimensionTag tag, std::uint64_t seed, int points_per_cluster = 100);

enum class SignalKind { sine, jittered_sine, pulse_train_filtered, noise, silence };
std::string_view to_string(SignalKind kind) noexcept;
SignalKind parse_signal_kind(std::string_view name);

enum class JitterMode {
  gaussian,     // relative period deviation ~ N(0, jitter)
  random_sign,  // relative period deviation = +-jitter with a fair coin
};

struct SignalParams {
  double frequency = 220;  // sine frequency, or pulse rate for pulse trains
  double duration = 1.0;
  double sample_rate = 16000;
  double amplitude = 0.5;  // peak for tonal kinds, std for noise
  double jitter = 0.03;
  JitterMode jitter_mode = JitterMode::gaussian;
  std::vector<double> pole_frequencies{500, 1500, 2500};
  double pole_bandwidth = 80;

  void validate(SignalKind kind) const;
};

struct SignalTruth {
  std::vector<double> periods;  // seconds per cycle (jittered_sine)
  std::vector<double> pole_frequencies;
  std::vector<double> pole_bandwidths;

  /// mean |T_i - T_{i-1}| / mean T over the recorded periods.
  double jitter_local() const;
};

struct SyntheticSignal {
  acoustics::AudioClip clip;
  SignalTruth truth;
};

SyntheticSignal generate_signal(SignalKind kind, const SignalParams& params, std::uint64_t seed);

/// Feature CSV of the matrix plus a `labels.csv`-style sidecar
/// (`sample_id,label`) when `labels_path` is non-empty.
void export_blobs(const BlobData& data, const std::filesystem::path& csv_path, const std::filesystem::path& labels_path = {});

}  // namespace disaudit::synth
