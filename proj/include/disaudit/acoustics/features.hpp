#pragma once

#include "disaudit/acoustics/audio.hpp"
#include "disaudit/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace disaudit::acoustics {

enum class Aggregation { value, mean, std, max, min, range, median, q1, q3 };

std::string_view to_string(Aggregation a) noexcept;
Aggregation parse_aggregation(std::string_view name);

struct SchemaEntry {
  std::string name;
  std::string extractor;  // see known_extractors()
  Aggregation aggregation = Aggregation::mean;

  bool operator==(const SchemaEntry&) const = default;
};

/// Ordered feature definitions for one dimension; the entry count is the
/// dimension's width.
struct FeatureSchema {
  DimensionTag tag = DimensionTag::emotional;
  std::vector<SchemaEntry> entries;

  std::size_t size() const { return entries.size(); }
  std::vector<std::string> names() const;

  /// Text form: a `dimension <tag>` line followed by one
  /// `<name> <extractor> <aggregation>` line per entry; `#` starts a comment.
  std::string to_text() const;
  static FeatureSchema parse(std::string_view text);

  /// Hex FNV-1a digest of to_text(), recorded in reports.
  std::string fingerprint() const;

  bool operator==(const FeatureSchema&) const = default;
};

/// Frame-track extractors take a statistical aggregation; scalar extractors
/// take `value`.
struct ExtractorInfo {
  std::string id;
  bool scalar = false;
};
const std::vector<ExtractorInfo>& known_extractors();

/// Default enumerations: emotional 28, linguistic 33, pathological 16.
FeatureSchema default_schema(DimensionTag tag);

/// `name` is either a dimension name (default schema) or a schema file path.
FeatureSchema load_schema(std::string_view name);

struct FeatureVector {
  std::string source_id;
  std::vector<double> values;  // placeholder 0 where missing
  std::vector<bool> missing;   // extraction failed; imputed later from the corpus
  std::vector<std::string> warnings;

  std::size_t missing_count() const;
};

/// Runs the extractors the schema needs once each and aggregates per entry.
/// Failing extractors mark their entries missing with a warning; only an
/// empty clip is an error.
FeatureVector assemble_features(const AudioClip& clip, const FeatureSchema& schema);

/// Feature CSV: header `source_id,<names...>`, one row per utterance,
/// shortest round-trip decimal numbers, empty cell for a missing value.
void write_feature_csv(const std::filesystem::path& path, const FeatureSchema& schema, const std::vector<FeatureVector>& rows);

/// Same format for an already-assembled matrix (no missing cells).
void write_feature_matrix_csv(const std::filesystem::path& path, const FeatureMatrix& m);

struct FeatureTable {
  std::vector<std::string> column_names;
  std::vector<FeatureVector> rows;
};
FeatureTable read_feature_csv(const std::filesystem::path& path);

/// Stacks vectors into a matrix, replacing missing cells with the column mean
/// of the observed cells (0 when a column has none). Returns the number of
/// imputed cells through `imputed`.
FeatureMatrix to_feature_matrix(const std::vector<FeatureVector>& rows, const std::vector<std::string>& column_names,
                                DimensionTag tag, std::size_t* imputed = nullptr);

}  // namespace disaudit::acoustics
