// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "disaudit/acoustics/formants.hpp"
#include "disaudit/acoustics/pitch.hpp"
#include "disaudit/cluster/ari.hpp"
#include "disaudit/cluster/metrics.hpp"
#include "disaudit/confound/overlap.hpp"
#include "disaudit/embedding/affinity.hpp"
#include "disaudit/embedding/trustworthiness.hpp"
#include "disaudit/embedding/tsne.hpp"
#include "disaudit/pipeline/pipeline.hpp"
#include "disaudit/random.hpp"
#include "disaudit/synth/synth.hpp"

#include <oracles.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

using namespace disaudit;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMasterSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double time_limit_s;  // 0: no limit
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Eigen::VectorXi random_labels(Eigen::Index n, int k, std::mt19937_64& rng) {
  // Every label in [0, k) appears at least once.
  Eigen::VectorXi l(n);
  std::uniform_int_distribution<int> pick(0, k - 1);
  for (Eigen::Index i = 0; i < n; ++i) l[i] = i < k ? static_cast<int>(i) : pick(rng);
  std::shuffle(l.data(), l.data() + n, rng);
  return l;
}

Outcome metric_oracles() {
  std::mt19937_64 rng(kMasterSeed);
  double worst = 0;
  int checked = 0;
  for (int inst = 0; inst < 200; ++inst) {
    const int k = 2 + inst % 2;
    const Eigen::Index n = 4 + inst % 9;
    const Eigen::MatrixXd x = oracle::random_matrix(n, 1 + inst % 3, derive_seed(kMasterSeed, "oracle", std::to_string(inst)));
    const auto a = random_labels(n, k, rng), b = random_labels(n, k, rng);
    auto diff = [&](double got, double want) { worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want))); };
    diff(cluster::silhouette(x, a), oracle::silhouette(x, a));
    diff(cluster::davies_bouldin(x, a), oracle::davies_bouldin(x, a));
    diff(cluster::calinski_harabasz(x, a), oracle::calinski_harabasz(x, a));
    diff(cluster::adjusted_rand_index(a, b), oracle::adjusted_rand(a, b));
    ++checked;
  }
  return {worst <= 1e-10, fmt("%d instances, max relative diff = %.2e (tol 1e-10)", checked, worst)};
}

Eigen::MatrixXd pts(std::initializer_list<std::pair<double, double>> xy) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xy.size()), 2);
  Eigen::Index i = 0;
  for (auto [x, y] : xy) m.row(i++) << x, y;
  return m;
}

Eigen::VectorXi labs(std::initializer_list<int> v) {
  Eigen::VectorXi l(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (int x : v) l[i++] = x;
  return l;
}

Outcome hand_fixtures() {
  const auto pairs = pts({{0, 0}, {0, 1}, {10, 0}, {10, 1}});
  const auto split = labs({0, 0, 1, 1});
  const double sil = cluster::silhouette(pairs, split);
  const double sil_want = 1 - 2 / (10 + std::sqrt(101.0));
  const double db = cluster::davies_bouldin(pairs, split);
  const double ch = cluster::calinski_harabasz(pts({{0, 0}, {0, 2}, {10, 0}, {10, 2}}), split);
  const double ari = cluster::adjusted_rand_index(labs({0, 0, 1, 1}), labs({0, 1, 0, 1}));
  const double err = std::max({std::abs(sil - sil_want), std::abs(db - 0.1), std::abs(ch - 50.0), std::abs(ari + 0.5)});
  return {err <= 1e-10, fmt("silhouette %.9f, DB %.12f, CH %.12f, ARI %.12f, max err %.1e", sil, db, ch, ari, err)};
}

Outcome gradient_check() {
  const Eigen::MatrixXd x = oracle::random_matrix(15, 4, kMasterSeed);
  const Eigen::MatrixXd p = embedding::compute_affinities(x, 4.0).p;
  const Eigen::MatrixXd y = oracle::random_matrix(15, 2, kMasterSeed + 1);
  const Eigen::MatrixXd g = embedding::tsne_gradient(p, y);
  Eigen::MatrixXd fd(15, 2);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    Eigen::MatrixXd up = y, down = y;
    up.data()[i] += h;
    down.data()[i] -= h;
    fd.data()[i] = (embedding::tsne_objective(p, up) - embedding::tsne_objective(p, down)) / (2 * h);
  }
  const double rel = (g - fd).norm() / fd.norm();
  return {rel < 1e-4, fmt("relative error %.2e (tol 1e-4)", rel)};
}

Outcome affinity_normalization() {
  const Eigen::MatrixXd x = oracle::random_matrix(500, 10, kMasterSeed);
  const auto aff = embedding::compute_affinities(x, 30.0);
  const double sum_err = std::abs(aff.p.sum() - 1.0);
  double worst_entropy = 0;
  for (double h : aff.entropy_bits) worst_entropy = std::max(worst_entropy, std::abs(h - std::log2(30.0)));
  return {sum_err <= 1e-9 && worst_entropy <= 1e-4,
          fmt("|sum p - 1| = %.2e (tol 1e-9), max |H - log2 30| = %.2e (tol 1e-4)", sum_err, worst_entropy)};
}

// The eight pseudo-combinations at N = 300 per dimension, shared by the
// hierarchy, trustworthiness and summary-shape criteria.
struct HierarchySuite {
  pipeline::SuiteResult result;
  fs::path out_dir;
};

const HierarchySuite& hierarchy_suite() {
  static const HierarchySuite suite = [] {
    pipeline::RunConfig cfg;
    cfg.seed = kMasterSeed;
    std::vector<pipeline::CombinationData> data;
    for (int c = 0; c < 8; ++c) {
      pipeline::CombinationData d;
      d.id = "synthetic-" + std::to_string(c + 1);
      for (auto tag : kAllDimensions)
        d.features[tag] = synth::generate_dimension_fixture(tag, derive_seed(kMasterSeed, "hierarchy", d.id), 100).features;
      data.push_back(std::move(d));
    }
    HierarchySuite s;
    s.result = pipeline::run_suite(cfg, data);
    s.out_dir = fs::temp_directory_path() / "disaudit_acceptance_suite";
    fs::remove_all(s.out_dir);
    pipeline::write_suite(s.result, s.out_dir);
    return s;
  }();
  return suite;
}

Outcome hierarchy() {
  const auto& suite = hierarchy_suite();
  int sil_ok = 0, db_ok = 0;
  for (const auto& c : suite.result.combinations) {
    if (!c.ok()) return {false, c.report.combination + " failed: " + c.report.meta.failure->message};
    const auto& d = c.report.dimensions;
    auto s = [&](const char* k) { return d.at(k).silhouette.value_or(NAN); };
    auto b = [&](const char* k) { return d.at(k).davies_bouldin.value_or(NAN); };
    if (s("emotional") > s("pathological") && s("pathological") > s("linguistic")) ++sil_ok;
    if (b("emotional") < b("pathological") && b("pathological") < b("linguistic")) ++db_ok;
  }
  const auto r = suite.result.summary.silhouette_stability_r;
  const auto& q = suite.result.summary.quality;
  return {sil_ok == 8 && db_ok == 8 && r && *r > 0.4,
          fmt("silhouette E>P>L in %d/8, DB E<P<L in %d/8, r = %.3f (> 0.4); mean silhouette E %.3f P %.3f L %.3f", sil_ok, db_ok,
              r.value_or(NAN), q.at("emotional").at("silhouette").mean.value_or(NAN),
              q.at("pathological").at("silhouette").mean.value_or(NAN), q.at("linguistic").at("silhouette").mean.value_or(NAN))};
}

struct CalibrationCounts {
  int inside = 0, above = 0, below = 0;
};

CalibrationCounts calibration_trials(double offset) {
  CalibrationCounts counts;
  for (int t = 0; t < 100; ++t) {
    const std::string trial = std::to_string(t);
    const Eigen::MatrixXd ling = oracle::random_matrix(150, 12, derive_seed(kMasterSeed, "calibration.ling", trial));
    const Eigen::MatrixXd path = oracle::random_matrix(150, 12, derive_seed(kMasterSeed, "calibration.path", trial));
    auto shared = confound::build_shared_subspace(path, ling);
    // Shared coordinates are z-scored, so one unit is one sigma.
    shared.projected_path.col(0).array() += offset;
    cluster::KMeansOptions km;
    km.seed = derive_seed(kMasterSeed, "calibration.kmeans", trial);
    const double observed = confound::observed_overlap(shared, km).mean_overlap;
    const auto null = confound::permutation_null(shared, 200, derive_seed(kMasterSeed, "calibration.null", trial), km);
    if (observed > null.p95)
      ++counts.above;
    else if (observed < null.p5)
      ++counts.below;
    else
      ++counts.inside;
  }
  return counts;
}

Outcome confound_calibration() {
  const auto same = calibration_trials(0.0);
  const auto shifted = calibration_trials(3.0);
  return {same.inside >= 90 && shifted.above >= 95,
          fmt("same distribution: inside [p5, p95] %d/100 (need >= 90, above %d, below %d); "
              "3 sigma offset: above p95 %d/100 (need >= 95, inside %d, below %d)",
              same.inside, same.above, same.below, shifted.above, shifted.inside, shifted.below)};
}

Outcome trustworthiness_contracts() {
  const Eigen::MatrixXd x = oracle::random_matrix(40, 2, kMasterSeed);
  const double identity = embedding::trustworthiness(x, x, 5);
  const Eigen::MatrixXd hx = oracle::random_matrix(8, 5, kMasterSeed + 1), hy = oracle::random_matrix(8, 2, kMasterSeed + 2);
  const double small_err = std::abs(embedding::trustworthiness(hx, hy, 3) - oracle::trustworthiness(hx, hy, 3));
  double lowest = 1;
  int cells = 0;
  for (const auto& c : hierarchy_suite().result.combinations)
    for (const auto& [dim, block] : c.report.dimensions) {
      lowest = std::min(lowest, block.trustworthiness.value_or(-1));
      ++cells;
    }
  return {identity == 1.0 && small_err <= 1e-12 && lowest > 0.79,
          fmt("identity T = %.17g, N=8 oracle |diff| = %.1e (tol 1e-12), suite min T = %.4f over %d cells (> 0.79)", identity, small_err,
              lowest, cells)};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome dsp_ground_truth() {
  synth::SignalParams jp;
  jp.frequency = 200;
  jp.jitter = 0.03;
  const auto jittered = synth::generate_signal(synth::SignalKind::jittered_sine, jp, kMasterSeed);
  const double truth = jittered.truth.jitter_local();
  const double measured = acoustics::perturbation_measures(jittered.clip, acoustics::estimate_f0(jittered.clip)).jitter_local;
  const double jitter_rel = std::abs(measured - truth) / truth;

  synth::SignalParams vp;
  vp.frequency = 120;
  const auto vowel = synth::generate_signal(synth::SignalKind::pulse_train_filtered, vp, kMasterSeed);
  const auto track = acoustics::estimate_formants(vowel.clip);
  double formant_err = 0;
  std::string formants;
  for (int k = 0; k < 3; ++k) {
    const auto v = track.values(k);
    const double f = v.empty() ? NAN : median(v);
    formant_err = std::max(formant_err, std::isnan(f) ? INFINITY : std::abs(f - vowel.truth.pole_frequencies[k]));
    formants += fmt("%s%.0f", k ? "/" : "", f);
  }

  const auto tone = synth::generate_signal(synth::SignalKind::sine, synth::SignalParams{}, kMasterSeed);
  const double hnr = acoustics::perturbation_measures(tone.clip, acoustics::estimate_f0(tone.clip)).hnr_mean;

  return {jitter_rel <= 0.2 && formant_err <= 50 && hnr > 30,
          fmt("jitter %.4f vs %.4f (rel %.1f%%, tol 20%%); F1-F3 %s Hz, max err %.1f Hz (tol 50); sine HNR %.1f dB (> 30)", measured, truth,
              100 * jitter_rel, formants.c_str(), formant_err, hnr)};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files[fs::relative(e.path(), root).string()] = ss.str();
  }
  return files;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "disaudit_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
#ifdef DISAUDIT_CLI_PATH
  const std::string cli = DISAUDIT_CLI_PATH;
  auto sh = [&](const std::string& args) {
    return std::system(("DISAUDIT_THREADS=4 " + cli + " " + args + " > " + (root / "log.txt").string() + " 2>&1").c_str());
  };
  if (sh("synth --out " + (root / "fx").string() + " --seed 5 --points 40 --corpora 2") != 0) return {false, "synth failed"};
  for (const char* run : {"a", "b"})
    if (sh("suite --config " + (root / "fx" / "suite.conf").string() + " --out " + (root / run).string()) != 0)
      return {false, std::string("suite run ") + run + " failed"};
  const std::string how = "CLI suite x2 with DISAUDIT_THREADS=4";
#else
  pipeline::RunConfig cfg = pipeline::parse_config("");
  cfg.seed = 5;
  std::vector<pipeline::CombinationData> data(2);
  for (int c = 0; c < 2; ++c) {
    data[c].id = "c" + std::to_string(c);
    for (auto tag : kAllDimensions) data[c].features[tag] = synth::generate_dimension_fixture(tag, derive_seed(5, "det", data[c].id), 40).features;
  }
  for (const char* run : {"a", "b"}) pipeline::write_suite(pipeline::run_suite(cfg, data), root / run);
  const std::string how = "API suite x2";
#endif
  const auto a = read_tree(root / "a"), b = read_tree(root / "b");
  std::size_t same = 0;
  for (const auto& [name, bytes] : a)
    if (const auto it = b.find(name); it != b.end() && it->second == bytes) ++same;
  return {!a.empty() && a.size() == b.size() && same == a.size(),
          fmt("%s: %zu/%zu files byte-identical", how.c_str(), same, a.size())};
}

Outcome summary_shapes() {
  const auto& suite = hierarchy_suite();
  const auto& s = suite.result.summary;
  int metrics = 0;
  for (const auto& [dim, m] : s.quality) metrics += static_cast<int>(m.size());
  const bool files = fs::exists(suite.out_dir / "summary.json") && fs::exists(suite.out_dir / "quality_summary.csv") &&
                     fs::exists(suite.out_dir / "overlap_series.csv") && fs::exists(suite.out_dir / "trustworthiness.csv");
  const bool ok = files && s.quality.size() == 3 && metrics == 15 && s.overlap_series.size() == 8 && s.trustworthiness.size() == 8;
  return {ok, fmt("quality table %zu dimensions x %d metric cells, overlap series %zu points, files %s; "
                  "corpus-scale reproduction needs the licensed corpora and is not attempted",
                  s.quality.size(), metrics, s.overlap_series.size(), files ? "present" : "missing")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"metric oracle equivalence", 10, metric_oracles},
      {"hand-computed metric fixtures", 0, hand_fixtures},
      {"t-SNE gradient check", 5, gradient_check},
      {"affinity normalization", 0, affinity_normalization},
      {"hierarchy ordering on the synthetic suite", 180, hierarchy},
      {"confound calibration", 300, confound_calibration},
      {"trustworthiness contracts", 0, trustworthiness_contracts},
      {"DSP ground truth", 0, dsp_ground_truth},
      {"suite determinism", 0, determinism},
      {"summary table and overlap series shapes", 0, summary_shapes},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.1fs", secs);
    if (c.time_limit_s > 0) {
      timing += fmt(" (limit %.0fs)", c.time_limit_s);
      if (secs > c.time_limit_s) o.pass = false;
    }
    if (!o.pass) ++failed;
    std::printf("%s  %s: %s [%s]\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed ? 1 : 0;
}
