#include "disaudit/report/report.hpp"

#include "disaudit/error.hpp"
#include "disaudit/report/stats.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>

namespace disaudit::report {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::vector<std::string> strings(const json& j, const char* key) {
  return j.contains(key) ? j.at(key).get<std::vector<std::string>>() : std::vector<std::string>{};
}

// Every number must be finite: a NaN would silently become null.
void require_finite(const json& j, const std::string& path) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) fail(Errc::InvalidParams, "non-finite value at " + path);
  if (j.is_object())
    for (auto it = j.begin(); it != j.end(); ++it) require_finite(it.value(), path + "." + it.key());
  if (j.is_array())
    for (std::size_t i = 0; i < j.size(); ++i) require_finite(j[i], path + "[" + std::to_string(i) + "]");
}

json dimension_json(const DimensionBlock& d) {
  json j;
  j["schema_fingerprint"] = d.schema_fingerprint;
  j["n"] = d.n;
  j["d"] = d.d;
  j["k"] = d.k;
  j["silhouette"] = opt(d.silhouette);
  j["davies_bouldin"] = opt(d.davies_bouldin);
  j["calinski_harabasz"] = opt(d.calinski_harabasz);
  j["stability"] = d.stability ? json{{"mean_ari", d.stability->mean_ari},
                                      {"values", d.stability->values},
                                      {"subsample_fraction", d.stability->subsample_fraction}}
                               : json(nullptr);
  j["trustworthiness"] = opt(d.trustworthiness);
  j["embedding"] = d.embedding ? json{{"perplexity", d.embedding->perplexity},
                                      {"iterations", d.embedding->iterations},
                                      {"initial_kl", d.embedding->initial_kl},
                                      {"final_kl", d.embedding->final_kl},
                                      {"seed", d.embedding->seed}}
                               : json(nullptr);
  j["raw_space"] = {{"silhouette", opt(d.raw_silhouette)}, {"davies_bouldin", opt(d.raw_davies_bouldin)}};
  j["kde"] = d.kde ? json{{"bandwidth", d.kde->bandwidth}, {"isoline_level", d.kde->isoline_level}, {"grid_resolution", d.kde->grid_resolution}}
                   : json(nullptr);
  j["warnings"] = d.warnings;
  return j;
}

DimensionBlock dimension_from(const json& j) {
  DimensionBlock d;
  d.schema_fingerprint = j.at("schema_fingerprint").get<std::string>();
  d.n = j.at("n").get<std::int64_t>();
  d.d = j.at("d").get<std::int64_t>();
  d.k = j.at("k").get<int>();
  d.silhouette = get_opt(j, "silhouette");
  d.davies_bouldin = get_opt(j, "davies_bouldin");
  d.calinski_harabasz = get_opt(j, "calinski_harabasz");
  if (const auto& s = j.at("stability"); !s.is_null())
    d.stability = StabilityBlock{s.at("mean_ari").get<double>(), s.at("values").get<std::vector<double>>(),
                                 s.at("subsample_fraction").get<double>()};
  d.trustworthiness = get_opt(j, "trustworthiness");
  if (const auto& e = j.at("embedding"); !e.is_null())
    d.embedding = EmbeddingMeta{e.at("perplexity").get<double>(), e.at("iterations").get<int>(), e.at("initial_kl").get<double>(),
                                e.at("final_kl").get<double>(), e.at("seed").get<std::uint64_t>()};
  d.raw_silhouette = get_opt(j.at("raw_space"), "silhouette");
  d.raw_davies_bouldin = get_opt(j.at("raw_space"), "davies_bouldin");
  if (j.contains("kde") && !j.at("kde").is_null()) {
    const auto& k = j.at("kde");
    d.kde = KdeMeta{k.at("bandwidth").get<double>(), k.at("isoline_level").get<double>(), k.at("grid_resolution").get<int>()};
  }
  d.warnings = strings(j, "warnings");
  return d;
}

json confound_json(const ConfoundBlock& c) {
  return {{"d_shared", c.d_shared},
          {"observed", {{"per_cluster", c.per_cluster}, {"sigma", c.sigma}, {"mean", c.mean}, {"max", c.max}}},
          {"null", {{"n_perm", c.n_perm}, {"mean", c.null_mean}, {"p5", c.p5}, {"p95", c.p95}, {"values", c.null_values}}},
          {"verdict", {{"exceeds_null", c.exceeds_null}, {"bounded", c.bounded}, {"headline", c.headline}, {"threshold", c.bounded_threshold}}},
          {"warnings", c.warnings}};
}

ConfoundBlock confound_from(const json& j) {
  ConfoundBlock c;
  c.d_shared = j.at("d_shared").get<std::int64_t>();
  const auto& o = j.at("observed");
  c.per_cluster = o.at("per_cluster").get<std::vector<double>>();
  c.sigma = o.at("sigma").get<std::vector<double>>();
  c.mean = o.at("mean").get<double>();
  c.max = o.at("max").get<double>();
  const auto& n = j.at("null");
  c.n_perm = n.at("n_perm").get<int>();
  c.null_mean = n.at("mean").get<double>();
  c.p5 = n.at("p5").get<double>();
  c.p95 = n.at("p95").get<double>();
  c.null_values = n.at("values").get<std::vector<double>>();
  const auto& v = j.at("verdict");
  c.exceeds_null = v.at("exceeds_null").get<bool>();
  c.bounded = v.at("bounded").get<bool>();
  c.headline = v.at("headline").get<double>();
  c.bounded_threshold = v.at("threshold").get<double>();
  c.warnings = strings(j, "warnings");
  return c;
}

std::string number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string opt_number(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

class Writer {
public:
  explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) fail(Errc::IoFailure, "cannot write " + path.string());
  }
  std::ofstream& stream() { return out_; }
  std::filesystem::path close() {
    out_.close();
    if (!out_) fail(Errc::IoFailure, "short write to " + path_.string());
    return path_;
  }

private:
  std::filesystem::path path_;
  std::ofstream out_;
};

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) fail(Errc::IoFailure, "cannot create output directory " + dir.string());
}

json aggregate_json(const MetricAggregate& a) { return {{"mean", opt(a.mean)}, {"sd", opt(a.sd)}, {"count", a.count}}; }

}  // namespace

std::string to_json_text(const AuditReport& r, const SerializeOptions& opt) {
  json j;
  j["combination"] = r.combination;
  j["dimensions"] = json::object();
  for (const auto& [name, d] : r.dimensions) j["dimensions"][name] = dimension_json(d);
  j["confound"] = r.confound ? confound_json(*r.confound) : json(nullptr);
  j["summary"] = {{"silhouette_stability_r", report::opt(r.silhouette_stability_r)}, {"mean_silhouette", report::opt(r.mean_silhouette)}};
  json meta = {{"version", r.meta.version}, {"master_seed", r.meta.master_seed}, {"seeds", r.meta.seeds}, {"warnings", r.meta.warnings}};
  meta["failure"] = r.meta.failure ? json{{"stage", r.meta.failure->stage}, {"code", r.meta.failure->code}, {"message", r.meta.failure->message}}
                                   : json(nullptr);
  if (opt.include_timings) meta["timings"] = r.meta.timings;
  j["meta"] = std::move(meta);
  require_finite(j, "report");
  return j.dump(opt.indent) + "\n";
}

AuditReport parse_report(std::string_view text) {
  try {
    const json j = json::parse(text);
    AuditReport r;
    r.combination = j.at("combination").get<std::string>();
    for (auto it = j.at("dimensions").begin(); it != j.at("dimensions").end(); ++it) r.dimensions[it.key()] = dimension_from(it.value());
    if (!j.at("confound").is_null()) r.confound = confound_from(j.at("confound"));
    r.silhouette_stability_r = get_opt(j.at("summary"), "silhouette_stability_r");
    r.mean_silhouette = get_opt(j.at("summary"), "mean_silhouette");
    const auto& m = j.at("meta");
    r.meta.version = m.at("version").get<std::string>();
    r.meta.master_seed = m.at("master_seed").get<std::uint64_t>();
    r.meta.seeds = m.at("seeds").get<std::map<std::string, std::uint64_t>>();
    r.meta.warnings = strings(m, "warnings");
    if (m.contains("failure") && !m.at("failure").is_null()) {
      const auto& f = m.at("failure");
      r.meta.failure = Failure{f.at("stage").get<std::string>(), f.at("code").get<std::string>(), f.at("message").get<std::string>()};
    }
    if (m.contains("timings")) r.meta.timings = m.at("timings").get<std::map<std::string, double>>();
    return r;
  } catch (const json::exception& e) {
    fail(Errc::ParseError, std::string("report.json: ") + e.what());
  }
}

std::vector<std::filesystem::path> emit_report(const AuditReport& r, const PlotData& plots, const std::filesystem::path& out_dir,
                                               const SerializeOptions& opt) {
  make_dir(out_dir);
  std::vector<std::filesystem::path> written;
  {
    Writer w(out_dir / "report.json");
    w.stream() << to_json_text(r, opt);
    written.push_back(w.close());
  }
  for (const auto& [name, e] : plots.embeddings) {
    if (e.sample_ids.size() != static_cast<std::size_t>(e.y.rows()) || e.y.cols() != 2)
      fail(Errc::InvalidParams, "embedding plot data for " + name + " is malformed");
    Writer w(out_dir / ("embedding_" + name + ".csv"));
    auto& o = w.stream();
    o << "sample_id,x,y,cluster\n";
    for (Eigen::Index i = 0; i < e.y.rows(); ++i) {
      o << csv_field(e.sample_ids[static_cast<std::size_t>(i)]) << ',' << number(e.y(i, 0)) << ',' << number(e.y(i, 1)) << ',';
      if (e.labels.size() == e.y.rows()) o << e.labels[i];
      o << '\n';
    }
    written.push_back(w.close());
  }
  for (const auto& [name, g] : plots.kde) {
    Writer w(out_dir / ("kde_" + name + ".csv"));
    auto& o = w.stream();
    o << "x,y,density\n";
    for (Eigen::Index ix = 0; ix < g.grid_x.size(); ++ix)
      for (Eigen::Index iy = 0; iy < g.grid_y.size(); ++iy)
        o << number(g.grid_x[ix]) << ',' << number(g.grid_y[iy]) << ',' << number(g.density(ix, iy)) << '\n';
    written.push_back(w.close());
  }
  {
    Writer w(out_dir / "confound.csv");
    auto& o = w.stream();
    o << "series,index,value\n";
    if (r.confound) {
      const auto& c = *r.confound;
      for (std::size_t j = 0; j < c.per_cluster.size(); ++j) o << "observed," << j << ',' << number(c.per_cluster[j]) << '\n';
      o << "observed_mean,," << number(c.mean) << '\n';
      o << "observed_max,," << number(c.max) << '\n';
      for (std::size_t p = 0; p < c.null_values.size(); ++p) o << "null," << p << ',' << number(c.null_values[p]) << '\n';
      o << "null_mean,," << number(c.null_mean) << '\n';
      o << "null_p5,," << number(c.p5) << '\n';
      o << "null_p95,," << number(c.p95) << '\n';
    }
    written.push_back(w.close());
  }
  return written;
}

SuiteSummary summarize_suite(const std::vector<AuditReport>& reports) {
  if (reports.empty()) fail(Errc::InvalidParams, "summarize_suite needs at least one report");
  SuiteSummary s;
  std::map<std::string, std::map<std::string, std::vector<double>>> cells;
  std::vector<double> sil, stab;
  for (const auto& r : reports) {
    s.combinations.push_back(r.combination);
    if (r.meta.failure) s.failed.push_back(r.combination);
    for (const auto& [dim, d] : r.dimensions) {
      auto add = [&](const char* metric, const std::optional<double>& v) {
        if (v) cells[dim][metric].push_back(*v);
      };
      add("silhouette", d.silhouette);
      add("davies_bouldin", d.davies_bouldin);
      add("calinski_harabasz", d.calinski_harabasz);
      add("stability", d.stability ? std::optional<double>(d.stability->mean_ari) : std::nullopt);
      add("trustworthiness", d.trustworthiness);
      s.trustworthiness[r.combination][dim] = d.trustworthiness;
      if (d.silhouette && d.stability) {
        sil.push_back(*d.silhouette);
        stab.push_back(d.stability->mean_ari);
      }
    }
    if (r.confound)
      s.overlap_series.push_back({r.combination, r.confound->mean, r.confound->max, r.confound->null_mean, r.confound->p5, r.confound->p95,
                                  r.confound->exceeds_null});
  }
  bool single = false;
  for (const auto& [dim, metrics] : cells)
    for (const auto& [metric, values] : metrics) {
      MetricAggregate a;
      a.count = static_cast<int>(values.size());
      a.mean = mean(values);
      a.sd = sample_stddev(values);
      single = single || !a.sd;
      s.quality[dim][metric] = a;
    }
  if (single) s.warnings.push_back("standard deviation is null where only one combination contributed");
  s.correlation_cells = static_cast<int>(sil.size());
  try {
    s.silhouette_stability_r = pearson_correlation(sil, stab);
  } catch (const Error& e) {
    s.warnings.push_back(std::string("silhouette-stability correlation unavailable: ") + e.what());
  }
  return s;
}

std::string to_json_text(const SuiteSummary& s, int indent) {
  json j;
  j["combinations"] = s.combinations;
  j["failed"] = s.failed;
  j["quality"] = json::object();
  for (const auto& [dim, metrics] : s.quality)
    for (const auto& [metric, a] : metrics) j["quality"][dim][metric] = aggregate_json(a);
  j["trustworthiness"] = json::object();
  for (const auto& [combo, dims] : s.trustworthiness)
    for (const auto& [dim, v] : dims) j["trustworthiness"][combo][dim] = opt(v);
  j["overlap_series"] = json::array();
  for (const auto& p : s.overlap_series)
    j["overlap_series"].push_back({{"combination", p.combination},
                                   {"observed_mean", p.observed_mean},
                                   {"observed_max", p.observed_max},
                                   {"null_mean", p.null_mean},
                                   {"p5", p.p5},
                                   {"p95", p.p95},
                                   {"exceeds_null", p.exceeds_null}});
  j["silhouette_stability_r"] = opt(s.silhouette_stability_r);
  j["correlation_cells"] = s.correlation_cells;
  j["warnings"] = s.warnings;
  require_finite(j, "summary");
  return j.dump(indent) + "\n";
}

SuiteSummary parse_summary(std::string_view text) {
  try {
    const json j = json::parse(text);
    SuiteSummary s;
    s.combinations = j.at("combinations").get<std::vector<std::string>>();
    s.failed = j.at("failed").get<std::vector<std::string>>();
    for (auto d = j.at("quality").begin(); d != j.at("quality").end(); ++d)
      for (auto m = d.value().begin(); m != d.value().end(); ++m)
        s.quality[d.key()][m.key()] = MetricAggregate{get_opt(m.value(), "mean"), get_opt(m.value(), "sd"), m.value().at("count").get<int>()};
    for (auto c = j.at("trustworthiness").begin(); c != j.at("trustworthiness").end(); ++c)
      for (auto d = c.value().begin(); d != c.value().end(); ++d)
        s.trustworthiness[c.key()][d.key()] = d.value().is_null() ? std::nullopt : std::optional<double>(d.value().get<double>());
    for (const auto& p : j.at("overlap_series"))
      s.overlap_series.push_back({p.at("combination").get<std::string>(), p.at("observed_mean").get<double>(), p.at("observed_max").get<double>(),
                                  p.at("null_mean").get<double>(), p.at("p5").get<double>(), p.at("p95").get<double>(),
                                  p.at("exceeds_null").get<bool>()});
    s.silhouette_stability_r = get_opt(j, "silhouette_stability_r");
    s.correlation_cells = j.at("correlation_cells").get<int>();
    s.warnings = strings(j, "warnings");
    return s;
  } catch (const json::exception& e) {
    fail(Errc::ParseError, std::string("summary.json: ") + e.what());
  }
}

std::vector<std::filesystem::path> emit_summary(const SuiteSummary& s, const std::filesystem::path& out_dir) {
  make_dir(out_dir);
  std::vector<std::filesystem::path> written;
  {
    Writer w(out_dir / "summary.json");
    w.stream() << to_json_text(s);
    written.push_back(w.close());
  }
  {
    Writer w(out_dir / "quality_summary.csv");
    auto& o = w.stream();
    o << "dimension,metric,mean,sd,count\n";
    for (const auto& [dim, metrics] : s.quality)
      for (const auto& [metric, a] : metrics) o << dim << ',' << metric << ',' << opt_number(a.mean) << ',' << opt_number(a.sd) << ',' << a.count << '\n';
    written.push_back(w.close());
  }
  {
    Writer w(out_dir / "trustworthiness.csv");
    auto& o = w.stream();
    o << "combination,dimension,trustworthiness\n";
    for (const auto& [combo, dims] : s.trustworthiness)
      for (const auto& [dim, v] : dims) o << csv_field(combo) << ',' << dim << ',' << opt_number(v) << '\n';
    written.push_back(w.close());
  }
  {
    Writer w(out_dir / "overlap_series.csv");
    auto& o = w.stream();
    o << "combination,observed_mean,observed_max,null_mean,null_p5,null_p95,exceeds_null\n";
    for (const auto& p : s.overlap_series)
      o << csv_field(p.combination) << ',' << number(p.observed_mean) << ',' << number(p.observed_max) << ',' << number(p.null_mean) << ','
        << number(p.p5) << ',' << number(p.p95) << ',' << (p.exceeds_null ? "true" : "false") << '\n';
    written.push_back(w.close());
  }
  return written;
}

}  // namespace disaudit::report
