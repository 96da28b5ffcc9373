#pragma once

#include "disaudit/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace disaudit::pipeline {

/// Where one dimension's features come from: a directory of WAV files run
/// through a schema, or a ready-made feature CSV checked against it.
struct DimensionInput {
  std::optional<std::filesystem::path> audio_dir;
  std::optional<std::filesystem::path> csv;
  std::string schema;  // dimension name (default schema) or schema file; empty means the dimension's default

  std::string cache_key() const;
  bool operator==(const DimensionInput&) const = default;
};

struct CombinationSpec {
  std::string id;
  std::map<DimensionTag, DimensionInput> inputs;

  void validate() const;  // InvalidConfig unless all three dimensions are present
};

/// A corpus contributes one dimension; suites pair every emotional, linguistic
/// and pathological corpus into combinations named <EMO>-<LING>-<PATH>.
struct CorpusSpec {
  std::string name;
  DimensionTag tag = DimensionTag::emotional;
  DimensionInput input;
};

struct RunConfig {
  std::filesystem::path out_dir = "disaudit_out";
  std::uint64_t seed = 0;

  double perplexity = 30;
  int tsne_iterations = 1000;
  int k = 3;
  int n_init = 10;
  int bootstrap_iterations = 20;
  double bootstrap_fraction = 0.8;
  int n_perm = 200;
  double bounded_threshold = 0.21;
  int trust_k = 15;
  double kde_bandwidth = 0.4;
  double kde_isoline = 0.30;
  int kde_resolution = 200;
  bool emit_timings = false;

  std::map<DimensionTag, DimensionInput> inputs;  // single-combination runs
  std::vector<CorpusSpec> corpora;
  std::vector<CombinationSpec> combinations;  // explicit combinations

  /// InvalidConfig for any out-of-range parameter.
  void validate() const;

  /// Explicit combinations, then every corpus pairing, then the top-level
  /// inputs as a combination named `default_id` when nothing else is given.
  std::vector<CombinationSpec> resolve_combinations(const std::string& default_id = "combination") const;

  /// Applies one `key = value` assignment; relative paths resolve against
  /// `base`. Throws InvalidConfig for unknown keys or malformed values.
  void set(const std::string& key, const std::string& value, const std::filesystem::path& base = {});
};

/// Parses the key-value config format: one `key = value` per line, `#`
/// comments, blank lines ignored.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace disaudit::pipeline
