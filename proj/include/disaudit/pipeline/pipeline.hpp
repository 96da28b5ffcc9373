#pragma once

#include "disaudit/acoustics/features.hpp"
#include "disaudit/pipeline/config.hpp"
#include "disaudit/report/report.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace disaudit::pipeline {

struct IngestResult {
  FeatureMatrix features;                     // imputed
  std::vector<acoustics::FeatureVector> rows;  // as read, with missing masks
  acoustics::FeatureSchema schema;
  std::vector<std::string> warnings;
};

/// Audio: every *.wav in the directory in filename order through
/// assemble_features (unreadable files are skipped with a warning).
/// CSV: parsed and checked against the schema width. Missing cells are
/// imputed with column means in both cases.
IngestResult ingest_dimension(const DimensionInput& input, DimensionTag tag);

/// One combination's feature matrices, already ingested.
struct CombinationData {
  std::string id;
  std::map<DimensionTag, FeatureMatrix> features;
  std::map<DimensionTag, std::string> schema_fingerprints;
  std::vector<std::string> warnings;
};

struct CombinationResult {
  report::AuditReport report;
  report::PlotData plots;
  bool ok() const { return !report.meta.failure; }
};

/// Seed for a stage of a combination, stable under adding combinations.
std::uint64_t stage_seed(std::uint64_t master, const std::string& combination, const std::string& stage);

/// z-score, t-SNE, k-means and quality scores per dimension, then the
/// confound test on pathological against linguistic features. A failing
/// stage ends the run; the report keeps the finished stages and the failure.
CombinationResult audit_features(const RunConfig& cfg, const CombinationData& data);

CombinationResult run_combination(const RunConfig& cfg, const CombinationSpec& combo);

struct SuiteResult {
  std::vector<CombinationResult> combinations;
  report::SuiteSummary summary;
  bool all_ok() const;
};

/// Runs every combination (ingesting each distinct input once) and
/// aggregates the reports. Failures are recorded and the suite continues.
SuiteResult run_suite(const RunConfig& cfg, const std::vector<CombinationSpec>& combos);
SuiteResult run_suite(const RunConfig& cfg, const std::vector<CombinationData>& data);

/// <out>/<combination>/... per combination and the summary files in <out>.
void write_suite(const SuiteResult& result, const std::filesystem::path& out_dir, bool include_timings = false);

}  // namespace disaudit::pipeline
