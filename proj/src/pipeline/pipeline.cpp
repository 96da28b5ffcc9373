#include "disaudit/pipeline/pipeline.hpp"

#include "disaudit/acoustics/audio.hpp"
#include "disaudit/cluster/kmeans.hpp"
#include "disaudit/cluster/metrics.hpp"
#include "disaudit/cluster/stability.hpp"
#include "disaudit/confound/overlap.hpp"
#include "disaudit/embedding/normalize.hpp"
#include "disaudit/embedding/trustworthiness.hpp"
#include "disaudit/embedding/tsne.hpp"
#include "disaudit/error.hpp"
#include "disaudit/parallel.hpp"
#include "disaudit/random.hpp"
#include "disaudit/report/kde.hpp"
#include "disaudit/report/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>
#include <optional>

namespace disaudit::pipeline {

namespace fs = std::filesystem;
using report::AuditReport;

namespace {

bool is_wav(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".wav";
}

acoustics::FeatureSchema schema_for(const DimensionInput& input, DimensionTag tag) {
  auto schema = input.schema.empty() ? acoustics::default_schema(tag) : acoustics::load_schema(input.schema);
  if (schema.tag != tag)
    fail(Errc::SchemaMismatch, "schema '" + input.schema + "' describes " + std::string(to_string(schema.tag)) + ", not " +
                                   std::string(to_string(tag)));
  return schema;
}

// Metric values that are undefined for degenerate partitions become null with
// a warning instead of aborting the combination.
std::optional<double> soft_metric(const char* name, std::vector<std::string>& warnings, const std::function<double()>& f) {
  try {
    return f();
  } catch (const Error& e) {
    warnings.push_back(std::string(name) + " unavailable: " + e.what());
    return std::nullopt;
  }
}

class StageClock {
public:
  explicit StageClock(std::map<std::string, double>& sink) : sink_(sink) {}
  template <typename F>
  auto time(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Record {
      std::map<std::string, double>& sink;
      std::string stage;
      std::chrono::steady_clock::time_point t0;
      ~Record() { sink[stage] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
    } record{sink_, stage, t0};
    return f();
  }

private:
  std::map<std::string, double>& sink_;
};

}  // namespace

std::uint64_t stage_seed(std::uint64_t master, const std::string& combination, const std::string& stage) {
  return derive_seed(master, combination, stage);
}

IngestResult ingest_dimension(const DimensionInput& input, DimensionTag tag) {
  IngestResult out;
  out.schema = schema_for(input, tag);
  std::vector<acoustics::FeatureVector> rows;
  std::vector<std::string> names = out.schema.names();

  if (input.audio_dir) {
    const auto& dir = *input.audio_dir;
    if (!fs::is_directory(dir)) fail(Errc::MissingInput, "audio directory " + dir.string() + " does not exist");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && is_wav(e.path())) files.push_back(e.path());
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    if (files.empty()) fail(Errc::EmptyCorpus, "no WAV files in " + dir.string());

    std::vector<std::optional<acoustics::FeatureVector>> slots(files.size());
    std::vector<std::string> errors(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
      try {
        slots[i] = acoustics::assemble_features(acoustics::load_audio(files[i]), out.schema);
      } catch (const Error& e) {
        errors[i] = files[i].filename().string() + " skipped: " + e.what();
      }
    });
    for (std::size_t i = 0; i < files.size(); ++i) {
      if (!slots[i]) {
        out.warnings.push_back(errors[i]);
        continue;
      }
      for (const auto& w : slots[i]->warnings) out.warnings.push_back(slots[i]->source_id + ": " + w);
      rows.push_back(std::move(*slots[i]));
    }
    if (rows.empty()) fail(Errc::EmptyCorpus, "no usable audio in " + dir.string());
  } else if (input.csv) {
    if (!fs::exists(*input.csv)) fail(Errc::MissingInput, "feature CSV " + input.csv->string() + " does not exist");
    auto table = acoustics::read_feature_csv(*input.csv);
    if (table.column_names.size() != out.schema.size())
      fail(Errc::SchemaMismatch, input.csv->string() + " has " + std::to_string(table.column_names.size()) + " feature columns, the " +
                                     std::string(to_string(tag)) + " schema has " + std::to_string(out.schema.size()));
    if (table.column_names != names) out.warnings.push_back(input.csv->string() + ": column names differ from the schema; using the CSV's");
    if (table.rows.empty()) fail(Errc::EmptyCorpus, input.csv->string() + " has no rows");
    names = table.column_names;
    rows = std::move(table.rows);
  } else {
    fail(Errc::MissingInput, "no input given for the " + std::string(to_string(tag)) + " dimension");
  }

  std::size_t imputed = 0;
  out.features = acoustics::to_feature_matrix(rows, names, tag, &imputed);
  if (imputed) out.warnings.push_back(std::to_string(imputed) + " missing feature values imputed with column means");
  out.rows = std::move(rows);
  return out;
}

CombinationResult audit_features(const RunConfig& cfg, const CombinationData& data) {
  cfg.validate();
  CombinationResult result;
  AuditReport& r = result.report;
  r.combination = data.id;
  r.meta.master_seed = cfg.seed;
  r.meta.warnings = data.warnings;
  StageClock clock(r.meta.timings);
  const auto t_start = std::chrono::steady_clock::now();
  std::string stage = "setup";

  auto seed_for = [&](const std::string& name) {
    const auto s = stage_seed(cfg.seed, data.id, name);
    r.meta.seeds[name] = s;
    return s;
  };

  std::map<DimensionTag, FeatureMatrix> normalized;
  try {
    for (auto tag : kAllDimensions) {
      if (!data.features.count(tag)) continue;
      const std::string dim(to_string(tag));
      const auto& raw = data.features.at(tag);
      auto& block = r.dimensions[dim];
      block.n = raw.rows();
      block.d = raw.cols();
      block.k = cfg.k;
      if (const auto it = data.schema_fingerprints.find(tag); it != data.schema_fingerprints.end()) block.schema_fingerprint = it->second;

      stage = "normalize." + dim;
      raw.validate();
      auto norm = clock.time(stage, [&] { return embedding::zscore_normalize(raw); });
      for (std::size_t j = 0; j < norm.scaling.zero_variance.size(); ++j)
        if (norm.scaling.zero_variance[j]) block.warnings.push_back("feature '" + raw.column_names[j] + "' has zero variance");

      stage = "tsne." + dim;
      embedding::TsneOptions topt;
      topt.perplexity = cfg.perplexity;
      topt.iterations = cfg.tsne_iterations;
      topt.seed = seed_for(stage);
      const auto emb = clock.time(stage, [&] { return embedding::run_tsne(norm.matrix, topt); });
      for (const auto& w : emb.warnings) block.warnings.push_back(w);
      block.embedding = report::EmbeddingMeta{emb.perplexity, emb.iterations_run, emb.initial_kl, emb.final_kl, emb.seed};

      stage = "kmeans." + dim;
      cluster::KMeansOptions kopt;
      kopt.k = cfg.k;
      kopt.n_init = cfg.n_init;
      kopt.seed = seed_for(stage);
      const auto clusters = clock.time(stage, [&] { return cluster::kmeans(emb.y, kopt); });

      stage = "quality." + dim;
      clock.time(stage, [&] {
        block.silhouette = soft_metric("silhouette", block.warnings, [&] { return cluster::silhouette(emb.y, clusters.labels); });
        block.davies_bouldin = soft_metric("davies_bouldin", block.warnings, [&] { return cluster::davies_bouldin(emb.y, clusters.labels); });
        block.calinski_harabasz =
            soft_metric("calinski_harabasz", block.warnings, [&] { return cluster::calinski_harabasz(emb.y, clusters.labels); });
        block.raw_silhouette =
            soft_metric("raw-space silhouette", block.warnings, [&] { return cluster::silhouette(norm.matrix.values, clusters.labels); });
        block.raw_davies_bouldin = soft_metric("raw-space davies_bouldin", block.warnings,
                                               [&] { return cluster::davies_bouldin(norm.matrix.values, clusters.labels); });
        return 0;
      });

      stage = "bootstrap." + dim;
      cluster::StabilityOptions sopt;
      sopt.iterations = cfg.bootstrap_iterations;
      sopt.fraction = cfg.bootstrap_fraction;
      sopt.seed = seed_for(stage);
      const auto stab = clock.time(stage, [&] { return cluster::bootstrap_stability(emb.y, clusters, kopt, sopt); });
      block.stability = report::StabilityBlock{stab.mean_ari, stab.per_iteration_ari, stab.subsample_fraction};

      stage = "trustworthiness." + dim;
      block.trustworthiness = clock.time(stage, [&] {
        return soft_metric("trustworthiness", block.warnings,
                           [&] { return embedding::trustworthiness(norm.matrix.values, emb.y, cfg.trust_k); });
      });

      stage = "kde." + dim;
      report::KdeOptions kde_opt{cfg.kde_bandwidth, cfg.kde_resolution, cfg.kde_isoline};
      auto grid = clock.time(stage, [&] { return report::kde_2d(emb.y, kde_opt); });
      block.kde = report::KdeMeta{grid.bandwidth, grid.isoline_level, cfg.kde_resolution};
      result.plots.kde[dim] = std::move(grid);
      result.plots.embeddings[dim] = report::EmbeddingPoints{emb.sample_ids, emb.y, clusters.labels};
      normalized[tag] = std::move(norm.matrix);
    }

    if (normalized.count(DimensionTag::pathological) && normalized.count(DimensionTag::linguistic)) {
      stage = "confound";
      clock.time(stage, [&] {
        const auto shared =
            confound::build_shared_subspace(normalized.at(DimensionTag::pathological), normalized.at(DimensionTag::linguistic));
        cluster::KMeansOptions kopt;
        kopt.k = cfg.k;
        kopt.n_init = cfg.n_init;
        kopt.seed = seed_for("confound.kmeans");
        const auto observed = confound::observed_overlap(shared, kopt);
        const auto null = confound::permutation_null(shared, cfg.n_perm, seed_for("confound.null"), kopt);
        const auto verdict = confound::confound_verdict(observed, null, cfg.bounded_threshold);
        report::ConfoundBlock c;
        c.d_shared = shared.d_shared;
        c.per_cluster = observed.per_cluster;
        c.sigma = observed.sigma;
        c.mean = observed.mean_overlap;
        c.max = observed.max_overlap;
        c.n_perm = null.n_perm;
        c.null_values = null.null_values;
        c.null_mean = null.mean_null;
        c.p5 = null.p5;
        c.p95 = null.p95;
        c.exceeds_null = verdict.exceeds_null;
        c.bounded = verdict.bounded;
        c.headline = verdict.headline;
        c.bounded_threshold = verdict.threshold;
        for (std::size_t j = 0; j < observed.zero_sigma.size(); ++j)
          if (observed.zero_sigma[j]) c.warnings.push_back("linguistic cluster " + std::to_string(j) + " is a singleton; overlap set to 0");
        if (shared.path_pca.rank_deficient() || shared.ling_pca.rank_deficient())
          c.warnings.push_back("shared subspace exceeds the numerical rank of one feature set");
        r.confound = std::move(c);
        return 0;
      });
    } else {
      r.meta.warnings.push_back("confound test skipped: needs pathological and linguistic features");
    }
  } catch (const Error& e) {
    r.meta.failure = report::Failure{stage, std::string(to_string(e.code())), e.what()};
  } catch (const std::exception& e) {
    r.meta.failure = report::Failure{stage, "Internal", e.what()};
  }

  std::vector<double> sil, stab;
  for (const auto& [dim, b] : r.dimensions)
    if (b.silhouette && b.stability) {
      sil.push_back(*b.silhouette);
      stab.push_back(b.stability->mean_ari);
    }
  if (!sil.empty()) r.mean_silhouette = report::mean(sil);
  if (sil.size() >= 3) {
    try {
      r.silhouette_stability_r = report::pearson_correlation(sil, stab);
    } catch (const Error& e) {
      r.meta.warnings.push_back(std::string("silhouette-stability correlation unavailable: ") + e.what());
    }
  } else {
    r.meta.warnings.push_back("silhouette-stability correlation needs three dimensions with both scores");
  }
  r.meta.timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return result;
}

CombinationResult run_combination(const RunConfig& cfg, const CombinationSpec& combo) {
  combo.validate();
  CombinationData data;
  data.id = combo.id;
  for (const auto& [tag, input] : combo.inputs) {
    try {
      auto ingested = ingest_dimension(input, tag);
      data.schema_fingerprints[tag] = ingested.schema.fingerprint();
      for (auto& w : ingested.warnings) data.warnings.push_back(std::string(to_string(tag)) + ": " + w);
      data.features[tag] = std::move(ingested.features);
    } catch (const Error& e) {
      CombinationResult failed;
      failed.report.combination = combo.id;
      failed.report.meta.master_seed = cfg.seed;
      failed.report.meta.warnings = data.warnings;
      failed.report.meta.failure = report::Failure{"ingest." + std::string(to_string(tag)), std::string(to_string(e.code())), e.what()};
      return failed;
    }
  }
  return audit_features(cfg, data);
}

bool SuiteResult::all_ok() const {
  return std::all_of(combinations.begin(), combinations.end(), [](const CombinationResult& c) { return c.ok(); });
}

SuiteResult run_suite(const RunConfig& cfg, const std::vector<CombinationData>& data) {
  if (data.empty()) fail(Errc::InvalidConfig, "suite has no combinations");
  SuiteResult out;
  std::vector<AuditReport> reports;
  for (const auto& d : data) {
    out.combinations.push_back(audit_features(cfg, d));
    reports.push_back(out.combinations.back().report);
  }
  out.summary = report::summarize_suite(reports);
  return out;
}

SuiteResult run_suite(const RunConfig& cfg, const std::vector<CombinationSpec>& combos) {
  cfg.validate();
  if (combos.empty()) fail(Errc::InvalidConfig, "suite has no combinations");
  // Each distinct input is ingested once even when several combinations share it.
  std::map<std::string, std::optional<IngestResult>> cache;
  std::map<std::string, Error> failures;
  SuiteResult out;
  std::vector<AuditReport> reports;
  for (const auto& combo : combos) {
    combo.validate();
    CombinationData data;
    data.id = combo.id;
    std::optional<report::Failure> failure;
    for (const auto& [tag, input] : combo.inputs) {
      const auto key = std::string(to_string(tag)) + "|" + input.cache_key();
      if (!cache.count(key) && !failures.count(key)) {
        try {
          cache[key] = ingest_dimension(input, tag);
        } catch (const Error& e) {
          failures.emplace(key, e);
        }
      }
      if (const auto f = failures.find(key); f != failures.end()) {
        failure = report::Failure{"ingest." + std::string(to_string(tag)), std::string(to_string(f->second.code())), f->second.what()};
        break;
      }
      const auto& ingested = *cache.at(key);
      data.features[tag] = ingested.features;
      data.schema_fingerprints[tag] = ingested.schema.fingerprint();
      for (const auto& w : ingested.warnings) data.warnings.push_back(std::string(to_string(tag)) + ": " + w);
    }
    if (failure) {
      CombinationResult failed;
      failed.report.combination = combo.id;
      failed.report.meta.master_seed = cfg.seed;
      failed.report.meta.failure = failure;
      out.combinations.push_back(std::move(failed));
    } else {
      out.combinations.push_back(audit_features(cfg, data));
    }
    reports.push_back(out.combinations.back().report);
  }
  out.summary = report::summarize_suite(reports);
  return out;
}

void write_suite(const SuiteResult& result, const fs::path& out_dir, bool include_timings) {
  report::SerializeOptions opt;
  opt.include_timings = include_timings;
  for (const auto& c : result.combinations) report::emit_report(c.report, c.plots, out_dir / c.report.combination, opt);
  report::emit_summary(result.summary, out_dir);
}

}  // namespace disaudit::pipeline
