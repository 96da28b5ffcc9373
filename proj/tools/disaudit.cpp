// Command-line front end: extract, audit, suite, synth.

#include "disaudit/acoustics/audio.hpp"
#include "disaudit/acoustics/features.hpp"
#include "disaudit/error.hpp"
#include "disaudit/pipeline/pipeline.hpp"
#include "disaudit/random.hpp"
#include "disaudit/synth/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

using namespace disaudit;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitInvalid = 2;

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> perplexity;
  std::optional<int> iterations;
  std::optional<int> k;
  std::optional<int> n_init;
  std::optional<int> bootstrap_iterations;
  std::optional<double> bootstrap_fraction;
  std::optional<int> n_perm;
  std::optional<double> bounded_threshold;
  std::optional<int> trust_k;
  std::optional<double> kde_bandwidth;
  std::optional<double> kde_isoline;
  std::optional<int> kde_resolution;
  bool timings = false;
  std::map<DimensionTag, std::string> csv, audio, schema;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "Key-value config file");
    app->add_option("--seed", seed, "Master seed");
    app->add_option("--out", out, "Output directory");
    app->add_option("--perplexity", perplexity, "t-SNE perplexity");
    app->add_option("--iterations", iterations, "t-SNE iterations");
    app->add_option("--k", k, "Clusters per dimension");
    app->add_option("--n-init", n_init, "k-means restarts");
    app->add_option("--bootstrap-iterations", bootstrap_iterations, "Stability subsamples");
    app->add_option("--bootstrap-fraction", bootstrap_fraction, "Stability subsample fraction");
    app->add_option("--n-perm", n_perm, "Confound permutations");
    app->add_option("--bounded-threshold", bounded_threshold, "Overlap bound for the verdict");
    app->add_option("--trust-k", trust_k, "Trustworthiness neighbourhood");
    app->add_option("--kde-bandwidth", kde_bandwidth, "KDE bandwidth in embedding units");
    app->add_option("--kde-isoline", kde_isoline, "KDE isoline as a fraction of the peak");
    app->add_option("--kde-resolution", kde_resolution, "KDE grid nodes per axis");
    app->add_flag("--timings", timings, "Record per-stage wall-clock times in report.json");
    for (auto tag : kAllDimensions) {
      const std::string d(to_string(tag));
      app->add_option("--" + d + "-csv", csv[tag], "Feature CSV for the " + d + " dimension");
      app->add_option("--" + d + "-audio", audio[tag], "WAV directory for the " + d + " dimension");
      app->add_option("--" + d + "-schema", schema[tag], "Schema name or file for the " + d + " dimension");
    }
  }

  pipeline::RunConfig build() const {
    pipeline::RunConfig cfg = config ? pipeline::load_config(*config) : pipeline::RunConfig{};
    if (seed) cfg.seed = *seed;
    if (out) cfg.out_dir = *out;
    if (perplexity) cfg.perplexity = *perplexity;
    if (iterations) cfg.tsne_iterations = *iterations;
    if (k) cfg.k = *k;
    if (n_init) cfg.n_init = *n_init;
    if (bootstrap_iterations) cfg.bootstrap_iterations = *bootstrap_iterations;
    if (bootstrap_fraction) cfg.bootstrap_fraction = *bootstrap_fraction;
    if (n_perm) cfg.n_perm = *n_perm;
    if (bounded_threshold) cfg.bounded_threshold = *bounded_threshold;
    if (trust_k) cfg.trust_k = *trust_k;
    if (kde_bandwidth) cfg.kde_bandwidth = *kde_bandwidth;
    if (kde_isoline) cfg.kde_isoline = *kde_isoline;
    if (kde_resolution) cfg.kde_resolution = *kde_resolution;
    if (timings) cfg.emit_timings = true;
    for (auto tag : kAllDimensions) {
      const std::string d(to_string(tag));
      if (!csv.at(tag).empty()) cfg.set(d + ".csv", csv.at(tag));
      if (!audio.at(tag).empty()) cfg.set(d + ".audio", audio.at(tag));
      if (!schema.at(tag).empty()) cfg.set(d + ".schema", schema.at(tag));
    }
    cfg.validate();
    return cfg;
  }
};

void print_report_line(const report::AuditReport& r) {
  std::printf("%s:", r.combination.c_str());
  for (const auto& [dim, b] : r.dimensions)
    std::printf(" %s silhouette=%s", dim.c_str(), b.silhouette ? std::to_string(*b.silhouette).c_str() : "null");
  if (r.confound) std::printf(" overlap=%.4f p95=%.4f", r.confound->mean, r.confound->p95);
  if (r.meta.failure) std::printf(" FAILED at %s (%s): %s", r.meta.failure->stage.c_str(), r.meta.failure->code.c_str(), r.meta.failure->message.c_str());
  std::printf("\n");
}

int run_extract(const std::string& input, const std::string& dimension, const std::string& schema_name, const std::string& out) {
  const auto tag = parse_dimension(dimension);
  pipeline::DimensionInput in;
  in.audio_dir = input;
  in.schema = schema_name;
  const auto result = pipeline::ingest_dimension(in, tag);
  const auto& rows = result.rows;
  acoustics::write_feature_csv(out, result.schema, rows);
  for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("wrote %zu rows x %zu features to %s\n", rows.size(), result.schema.size(), out.c_str());
  return kExitOk;
}

int run_audit(const pipeline::RunConfig& cfg, const std::string& combination) {
  auto combos = cfg.resolve_combinations(combination.empty() ? "combination" : combination);
  if (!combination.empty() && combos.size() > 1) {
    std::erase_if(combos, [&](const pipeline::CombinationSpec& c) { return c.id != combination; });
    if (combos.empty()) fail(Errc::InvalidConfig, "no combination named '" + combination + "' in the config");
  }
  if (combos.size() != 1) fail(Errc::InvalidConfig, "audit needs exactly one combination; pass --combination or use suite");
  const auto result = pipeline::run_combination(cfg, combos.front());
  report::SerializeOptions opt;
  opt.include_timings = cfg.emit_timings;
  report::emit_report(result.report, result.plots, cfg.out_dir, opt);
  print_report_line(result.report);
  return result.ok() ? kExitOk : kExitPartial;
}

int run_suite(const pipeline::RunConfig& cfg) {
  const auto combos = cfg.resolve_combinations();
  if (combos.empty()) fail(Errc::InvalidConfig, "the config defines no combinations");
  const auto result = pipeline::run_suite(cfg, combos);
  pipeline::write_suite(result, cfg.out_dir, cfg.emit_timings);
  for (const auto& c : result.combinations) print_report_line(c.report);
  if (result.summary.silhouette_stability_r) std::printf("silhouette-stability r = %.4f\n", *result.summary.silhouette_stability_r);
  return result.all_ok() ? kExitOk : kExitPartial;
}

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 0;
  std::string kind = "suite";
  int points = 100;
  int corpora = 2;
  int clusters = 3;
  double separation = 8;
  int dimension = 2;
  double frequency = 220;
  double duration = 1;
  double jitter = 0.03;
};

int run_synth(const SynthArgs& a) {
  const fs::path out(a.out);
  fs::create_directories(out);
  if (a.kind == "suite") {
    // Hierarchy fixture corpora plus a suite config pairing them.
    std::ofstream conf(out / "suite.conf");
    conf << "# synthetic hierarchy suite\nseed = " << a.seed << "\nout = results\n";
    const std::map<DimensionTag, std::string> prefix{
        {DimensionTag::emotional, "SE"}, {DimensionTag::linguistic, "SL"}, {DimensionTag::pathological, "SP"}};
    for (auto tag : kAllDimensions)
      for (int c = 1; c <= a.corpora; ++c) {
        const std::string name = prefix.at(tag) + std::to_string(c);
        const auto data = synth::generate_dimension_fixture(tag, derive_seed(a.seed, "synth", name), a.points);
        synth::export_blobs(data, out / (name + ".csv"), out / (name + ".labels.csv"));
        conf << "corpus." << name << ".dimension = " << to_string(tag) << "\ncorpus." << name << ".csv = " << name << ".csv\n";
      }
    if (!conf) fail(Errc::IoFailure, "cannot write " + (out / "suite.conf").string());
    std::printf("wrote %d corpora per dimension and suite.conf to %s\n", a.corpora, a.out.c_str());
    return kExitOk;
  }
  if (a.kind == "blobs") {
    synth::BlobSpec spec;
    spec.n_clusters = a.clusters;
    spec.points_per_cluster = a.points;
    spec.center_separation = a.separation;
    spec.dimension = a.dimension;
    spec.seed = a.seed;
    synth::export_blobs(synth::generate_blobs(spec), out / "blobs.csv", out / "blobs.labels.csv");
    std::printf("wrote blobs.csv and blobs.labels.csv to %s\n", a.out.c_str());
    return kExitOk;
  }
  const auto kind = synth::parse_signal_kind(a.kind);
  synth::SignalParams p;
  p.frequency = a.frequency;
  p.duration = a.duration;
  p.jitter = a.jitter;
  const auto sig = synth::generate_signal(kind, p, a.seed);
  acoustics::write_wav(out / (a.kind + ".wav"), sig.clip, acoustics::WavEncoding::float32);
  nlohmann::json truth = {{"kind", a.kind},
                          {"sample_rate", sig.clip.sample_rate},
                          {"periods", sig.truth.periods},
                          {"jitter_local", sig.truth.jitter_local()},
                          {"pole_frequencies", sig.truth.pole_frequencies},
                          {"pole_bandwidths", sig.truth.pole_bandwidths}};
  std::ofstream(out / (a.kind + ".truth.json")) << truth.dump(2) << "\n";
  std::printf("wrote %s.wav and %s.truth.json to %s\n", a.kind.c_str(), a.kind.c_str(), a.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit acoustic feature dimensions: embedding quality, cluster stability and confound overlap"};
  app.require_subcommand(1);

  auto* extract = app.add_subcommand("extract", "Audio directory to feature CSV");
  std::string ex_input, ex_dimension, ex_schema, ex_out;
  extract->add_option("--input", ex_input, "Directory of WAV files")->required();
  extract->add_option("--dimension", ex_dimension, "emotional, linguistic or pathological")->required();
  extract->add_option("--schema", ex_schema, "Schema name or file (default: the dimension's schema)");
  extract->add_option("--out", ex_out, "Output CSV path")->required();

  auto* audit = app.add_subcommand("audit", "Audit one combination");
  Overrides audit_over;
  audit_over.attach(audit);
  std::string combination;
  audit->add_option("--combination", combination, "Combination id");

  auto* suite = app.add_subcommand("suite", "Audit every combination in a config and summarise");
  Overrides suite_over;
  suite_over.attach(suite);

  auto* synth_cmd = app.add_subcommand("synth", "Write synthetic fixtures");
  SynthArgs sa;
  synth_cmd->add_option("--out", sa.out, "Output directory")->required();
  synth_cmd->add_option("--seed", sa.seed, "Seed");
  synth_cmd->add_option("--kind", sa.kind, "suite, blobs, sine, jittered_sine, pulse_train_filtered, noise or silence");
  synth_cmd->add_option("--points", sa.points, "Points per cluster");
  synth_cmd->add_option("--corpora", sa.corpora, "Corpora per dimension for --kind suite");
  synth_cmd->add_option("--clusters", sa.clusters, "Clusters for --kind blobs");
  synth_cmd->add_option("--separation", sa.separation, "Center separation for --kind blobs");
  synth_cmd->add_option("--dimension", sa.dimension, "Columns for --kind blobs");
  synth_cmd->add_option("--frequency", sa.frequency, "Tone frequency or pulse rate in Hz");
  synth_cmd->add_option("--duration", sa.duration, "Seconds");
  synth_cmd->add_option("--jitter", sa.jitter, "Relative period deviation for jittered_sine");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*extract) return run_extract(ex_input, ex_dimension, ex_schema, ex_out);
    if (*audit) return run_audit(audit_over.build(), combination);
    if (*suite) return run_suite(suite_over.build());
    if (*synth_cmd) return run_synth(sa);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    const bool invalid = e.code() == Errc::InvalidConfig || e.code() == Errc::InvalidParams || e.code() == Errc::ParseError;
    return invalid ? kExitInvalid : kExitPartial;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPartial;
  }
  return kExitInvalid;
}
