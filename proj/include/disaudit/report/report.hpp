#pragma once

#include "disaudit/report/kde.hpp"
#include "disaudit/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace disaudit::report {

inline constexpr const char* kToolVersion = "0.1.0";

struct StabilityBlock {
  double mean_ari = 0;
  std::vector<double> values;
  double subsample_fraction = 0.8;

  bool operator==(const StabilityBlock&) const = default;
};

struct EmbeddingMeta {
  double perplexity = 0;
  int iterations = 0;
  double initial_kl = 0;
  double final_kl = 0;
  std::uint64_t seed = 0;

  bool operator==(const EmbeddingMeta&) const = default;
};

struct KdeMeta {
  double bandwidth = 0.4;
  double isoline_level = 0;
  int grid_resolution = 0;

  bool operator==(const KdeMeta&) const = default;
};

/// Results for one dimension. Any metric that could not be computed is empty
/// and explained in `warnings`.
struct DimensionBlock {
  std::string schema_fingerprint;
  std::int64_t n = 0;
  std::int64_t d = 0;
  int k = 0;
  std::optional<double> silhouette;
  std::optional<double> davies_bouldin;
  std::optional<double> calinski_harabasz;
  std::optional<StabilityBlock> stability;
  std::optional<double> trustworthiness;
  std::optional<EmbeddingMeta> embedding;
  // Same scores on the z-scored features with the embedding's labels.
  std::optional<double> raw_silhouette;
  std::optional<double> raw_davies_bouldin;
  std::optional<KdeMeta> kde;
  std::vector<std::string> warnings;

  bool operator==(const DimensionBlock&) const = default;
};

struct ConfoundBlock {
  std::int64_t d_shared = 0;
  std::vector<double> per_cluster;
  std::vector<double> sigma;
  double mean = 0;
  double max = 0;
  int n_perm = 0;
  std::vector<double> null_values;
  double null_mean = 0;
  double p5 = 0;
  double p95 = 0;
  bool exceeds_null = false;
  bool bounded = false;
  double headline = 0;
  double bounded_threshold = 0.21;
  std::vector<std::string> warnings;

  bool operator==(const ConfoundBlock&) const = default;
};

struct Failure {
  std::string stage;
  std::string code;
  std::string message;

  bool operator==(const Failure&) const = default;
};

struct Meta {
  std::string version = kToolVersion;
  std::uint64_t master_seed = 0;
  std::map<std::string, std::uint64_t> seeds;  // stage name -> derived seed
  std::vector<std::string> warnings;
  std::optional<Failure> failure;
  // Wall-clock seconds per stage. Only serialized when requested, since
  // timings would break byte-identical reruns.
  std::map<std::string, double> timings;

  bool operator==(const Meta&) const = default;
};

struct AuditReport {
  std::string combination;
  std::map<std::string, DimensionBlock> dimensions;  // keyed by dimension name
  std::optional<ConfoundBlock> confound;
  std::optional<double> silhouette_stability_r;
  std::optional<double> mean_silhouette;
  Meta meta;

  bool operator==(const AuditReport&) const = default;
};

struct SerializeOptions {
  bool include_timings = false;
  int indent = 2;
};

std::string to_json_text(const AuditReport& r, const SerializeOptions& opt = {});
AuditReport parse_report(std::string_view json_text);

/// Plot-ready data that does not belong in report.json.
struct EmbeddingPoints {
  std::vector<std::string> sample_ids;
  Eigen::MatrixXd y;  // N x 2
  Labels labels;      // cluster per sample, may be empty
};

struct PlotData {
  std::map<std::string, EmbeddingPoints> embeddings;
  std::map<std::string, KdeGrid> kde;
};

/// Writes report.json, embedding_<dim>.csv, kde_<dim>.csv and confound.csv
/// into `out_dir` (created if needed). Returns the written paths.
std::vector<std::filesystem::path> emit_report(const AuditReport& r, const PlotData& plots, const std::filesystem::path& out_dir,
                                               const SerializeOptions& opt = {});

/// Per-dimension metric aggregated over combinations. `sd` is empty with a
/// single contributing value.
struct MetricAggregate {
  std::optional<double> mean;
  std::optional<double> sd;
  int count = 0;

  bool operator==(const MetricAggregate&) const = default;
};

struct OverlapPoint {
  std::string combination;
  double observed_mean = 0;
  double observed_max = 0;
  double null_mean = 0;
  double p5 = 0;
  double p95 = 0;
  bool exceeds_null = false;

  bool operator==(const OverlapPoint&) const = default;
};

struct SuiteSummary {
  std::vector<std::string> combinations;
  std::vector<std::string> failed;
  // dimension -> metric -> aggregate; metrics silhouette, davies_bouldin,
  // calinski_harabasz, stability, trustworthiness.
  std::map<std::string, std::map<std::string, MetricAggregate>> quality;
  // combination -> dimension -> trustworthiness
  std::map<std::string, std::map<std::string, std::optional<double>>> trustworthiness;
  std::vector<OverlapPoint> overlap_series;
  std::optional<double> silhouette_stability_r;  // across all dimension x combination cells
  int correlation_cells = 0;
  std::vector<std::string> warnings;

  bool operator==(const SuiteSummary&) const = default;
};

SuiteSummary summarize_suite(const std::vector<AuditReport>& reports);

std::string to_json_text(const SuiteSummary& s, int indent = 2);
SuiteSummary parse_summary(std::string_view json_text);

/// summary.json, quality_summary.csv (dimension, metric, mean, sd, count),
/// trustworthiness.csv (combination x dimension) and overlap_series.csv.
std::vector<std::filesystem::path> emit_summary(const SuiteSummary& s, const std::filesystem::path& out_dir);

}  // namespace disaudit::report
