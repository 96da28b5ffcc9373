#include "disaudit/acoustics/features.hpp"

#include "disaudit/acoustics/formants.hpp"
#include "disaudit/acoustics/pitch.hpp"
#include "disaudit/acoustics/spectral.hpp"
#include "disaudit/error.hpp"
#include "dsp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <variant>

namespace disaudit::acoustics {

namespace {

constexpr std::pair<Aggregation, std::string_view> kAggregationNames[] = {
    {Aggregation::value, "value"}, {Aggregation::mean, "mean"},     {Aggregation::std, "std"},
    {Aggregation::max, "max"},     {Aggregation::min, "min"},       {Aggregation::range, "range"},
    {Aggregation::median, "median"}, {Aggregation::q1, "q1"},       {Aggregation::q3, "q3"},
};

std::vector<ExtractorInfo> build_extractors() {
  std::vector<ExtractorInfo> e;
  for (const char* id : {"f0", "hnr", "rms", "centroid", "flux", "rolloff", "f1", "f2", "f3", "b1", "b2", "b3", "f2_velocity"})
    e.push_back({id, false});
  for (int i = 1; i <= 13; ++i) {
    e.push_back({"mfcc" + std::to_string(i), false});
    e.push_back({"delta_mfcc" + std::to_string(i), false});
    e.push_back({"delta2_mfcc" + std::to_string(i), false});
  }
  for (const char* id : {"jitter_local", "jitter_rap", "jitter_ppq5", "shimmer_local", "shimmer_apq3", "shimmer_apq5", "cv_f1",
                         "cv_f2", "cv_f3", "tempo", "duration", "voiced_fraction"})
    e.push_back({id, true});
  return e;
}

const ExtractorInfo* find_extractor(std::string_view id) {
  for (const auto& e : known_extractors())
    if (e.id == id) return &e;
  return nullptr;
}

// numpy-style linear quantile (positions (n - 1) q).
double linear_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double aggregate(const std::vector<double>& v, Aggregation a) {
  switch (a) {
    case Aggregation::mean: return dsp::mean_of(v);
    case Aggregation::std: return dsp::stddev_of(v);
    case Aggregation::max: return *std::max_element(v.begin(), v.end());
    case Aggregation::min: return *std::min_element(v.begin(), v.end());
    case Aggregation::range: return *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end());
    case Aggregation::median: return linear_quantile(v, 0.5);
    case Aggregation::q1: return linear_quantile(v, 0.25);
    case Aggregation::q3: return linear_quantile(v, 0.75);
    case Aggregation::value: return v.front();
  }
  return 0;
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index c) { return {m.col(c).data(), m.col(c).data() + m.rows()}; }
std::vector<double> as_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  out.push_back(std::move(cell));
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

// Lazily computed extractor outputs for one clip. Each group records its
// failure message instead of throwing.
class ExtractionContext {
public:
  explicit ExtractionContext(const AudioClip& clip) : clip_(clip) {}

  // Returns the track/scalar for an extractor id, or the failure message.
  std::variant<std::vector<double>, std::string> get(const std::string& id) {
    try {
      return lookup(id);
    } catch (const Error& e) {
      return std::string(e.what());
    }
  }

private:
  std::vector<double> lookup(const std::string& id) {
    if (id == "duration") return {clip_.duration()};
    if (id == "f0") return require_voiced(pitch().voiced_f0());
    if (id == "voiced_fraction") return {pitch().voiced_fraction()};
    if (id == "hnr") return require_voiced(frame_hnr_db(pitch()));
    if (id.rfind("jitter_", 0) == 0 || id.rfind("shimmer_", 0) == 0) {
      const auto& p = perturbation();
      static const std::map<std::string, double PerturbationMeasures::*> fields = {
          {"jitter_local", &PerturbationMeasures::jitter_local},   {"jitter_rap", &PerturbationMeasures::jitter_rap},
          {"jitter_ppq5", &PerturbationMeasures::jitter_ppq5},     {"shimmer_local", &PerturbationMeasures::shimmer_local},
          {"shimmer_apq3", &PerturbationMeasures::shimmer_apq3},   {"shimmer_apq5", &PerturbationMeasures::shimmer_apq5}};
      return {p.*fields.at(id)};
    }
    if (id == "rms") return as_vector(spectral().rms);
    if (id == "centroid") return as_vector(spectral().centroid);
    if (id == "rolloff") return as_vector(spectral().rolloff);
    if (id == "flux") {
      const auto& s = spectral();
      return s.flux.size() ? as_vector(s.flux) : std::vector<double>{0.0};
    }
    if (id == "tempo") {
      const auto r = rhythm_features(clip_);
      if (r.tempo_flagged) fail(Errc::InsufficientFrames, "no periodic onset structure");
      return {r.tempo};
    }
    if (id.size() == 2 && (id[0] == 'f' || id[0] == 'b') && id[1] >= '1' && id[1] <= '3') {
      auto v = formants().values(id[1] - '1', id[0] == 'b');
      if (v.empty()) fail(Errc::InsufficientFrames, "no frame carried three formants");
      return v;
    }
    if (id.rfind("cv_f", 0) == 0) {
      const auto& d = dynamics();
      return {id == "cv_f1" ? d.cv_f1 : id == "cv_f2" ? d.cv_f2 : d.cv_f3};
    }
    if (id == "f2_velocity") return dynamics().f2_velocity;
    for (const auto& [prefix, which] : {std::pair{"delta2_mfcc", 2}, std::pair{"delta_mfcc", 1}, std::pair{"mfcc", 0}}) {
      const std::string p = prefix;
      if (id.rfind(p, 0) == 0) {
        const int c = std::stoi(id.substr(p.size())) - 1;
        const auto& m = mfcc();
        const Eigen::MatrixXd& src = which == 0 ? m.mfcc : which == 1 ? m.delta : m.delta2;
        return column(src, c);
      }
    }
    fail(Errc::InvalidParams, "unknown extractor '" + id + "'");
  }

  static std::vector<double> require_voiced(std::vector<double> v) {
    if (v.empty()) fail(Errc::InsufficientVoicing, "no voiced frames");
    return v;
  }

  template <typename T, typename F>
  const T& cached(std::optional<T>& slot, std::optional<std::string>& err, F&& compute) {
    if (err) throw Error(Errc::InsufficientFrames, *err);
    if (!slot) {
      try {
        slot = compute();
      } catch (const Error& e) {
        err = e.what();
        throw;
      }
    }
    return *slot;
  }

  const F0Track& pitch() { return cached(pitch_, pitch_err_, [&] { return estimate_f0(clip_); }); }
  const PerturbationMeasures& perturbation() {
    return cached(perturbation_, perturbation_err_, [&] { return perturbation_measures(clip_, pitch()); });
  }
  const SpectralEnergyStats& spectral() { return cached(spectral_, spectral_err_, [&] { return spectral_energy_stats(clip_); }); }
  const MfccResult& mfcc() { return cached(mfcc_, mfcc_err_, [&] { return mfcc_features(clip_); }); }
  const FormantTrack& formants() { return cached(formants_, formants_err_, [&] { return estimate_formants(clip_); }); }
  const FormantDynamics& dynamics() { return cached(dynamics_, dynamics_err_, [&] { return pathology_dynamics(formants()); }); }

  const AudioClip& clip_;
  std::optional<F0Track> pitch_;
  std::optional<PerturbationMeasures> perturbation_;
  std::optional<SpectralEnergyStats> spectral_;
  std::optional<MfccResult> mfcc_;
  std::optional<FormantTrack> formants_;
  std::optional<FormantDynamics> dynamics_;
  std::optional<std::string> pitch_err_, perturbation_err_, spectral_err_, mfcc_err_, formants_err_, dynamics_err_;
};

}  // namespace

std::string_view to_string(Aggregation a) noexcept {
  for (const auto& [agg, name] : kAggregationNames)
    if (agg == a) return name;
  return "value";
}

Aggregation parse_aggregation(std::string_view name) {
  for (const auto& [agg, n] : kAggregationNames)
    if (n == name) return agg;
  fail(Errc::ParseError, "unknown aggregation '" + std::string(name) + "'");
}

const std::vector<ExtractorInfo>& known_extractors() {
  static const std::vector<ExtractorInfo> all = build_extractors();
  return all;
}

std::vector<std::string> FeatureSchema::names() const {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(e.name);
  return out;
}

std::string FeatureSchema::to_text() const {
  std::string out = "dimension " + std::string(disaudit::to_string(tag)) + "\n";
  for (const auto& e : entries) out += e.name + " " + e.extractor + " " + std::string(acoustics::to_string(e.aggregation)) + "\n";
  return out;
}

FeatureSchema FeatureSchema::parse(std::string_view text) {
  FeatureSchema schema;
  bool have_tag = false;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    const std::string where = "schema line " + std::to_string(lineno);
    if (tok[0] == "dimension") {
      if (tok.size() != 2) fail(Errc::ParseError, where + ": expected 'dimension <tag>'");
      schema.tag = parse_dimension(tok[1]);
      have_tag = true;
      continue;
    }
    if (tok.size() != 3) fail(Errc::ParseError, where + ": expected '<name> <extractor> <aggregation>'");
    const auto* info = find_extractor(tok[1]);
    if (!info) fail(Errc::ParseError, where + ": unknown extractor '" + tok[1] + "'");
    const Aggregation agg = parse_aggregation(tok[2]);
    if (info->scalar != (agg == Aggregation::value))
      fail(Errc::ParseError, where + ": '" + tok[1] + (info->scalar ? "' is scalar and needs 'value'" : "' is a track and needs a statistic"));
    if (!seen.insert(tok[0]).second) fail(Errc::ParseError, where + ": duplicate feature name '" + tok[0] + "'");
    schema.entries.push_back({tok[0], tok[1], agg});
  }
  if (!have_tag) fail(Errc::ParseError, "schema is missing its 'dimension' line");
  if (schema.entries.empty()) fail(Errc::ParseError, "schema has no entries");
  return schema;
}

std::string FeatureSchema::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

FeatureSchema default_schema(DimensionTag tag) {
  FeatureSchema s;
  s.tag = tag;
  auto add = [&](std::string name, std::string extractor, Aggregation a) { s.entries.push_back({std::move(name), std::move(extractor), a}); };
  auto add_perturbation = [&] {
    for (const char* id : {"jitter_local", "jitter_rap", "jitter_ppq5", "shimmer_local", "shimmer_apq3", "shimmer_apq5"})
      add(id, id, Aggregation::value);
    add("hnr_mean", "hnr", Aggregation::mean);
    add("hnr_std", "hnr", Aggregation::std);
  };
  switch (tag) {
    case DimensionTag::emotional:
      add("f0_mean", "f0", Aggregation::mean);
      add("f0_std", "f0", Aggregation::std);
      add("f0_range", "f0", Aggregation::range);
      add("f0_median", "f0", Aggregation::median);
      add("f0_q1", "f0", Aggregation::q1);
      add("f0_q3", "f0", Aggregation::q3);
      add_perturbation();
      add("rms_mean", "rms", Aggregation::mean);
      add("rms_std", "rms", Aggregation::std);
      add("rms_max", "rms", Aggregation::max);
      for (const char* id : {"centroid", "flux", "rolloff"}) {
        add(std::string(id) + "_mean", id, Aggregation::mean);
        add(std::string(id) + "_std", id, Aggregation::std);
      }
      for (int i = 1; i <= 5; ++i) add("mfcc" + std::to_string(i) + "_mean", "mfcc" + std::to_string(i), Aggregation::mean);
      break;
    case DimensionTag::linguistic:
      for (const char* id : {"f1", "f2", "f3", "b1", "b2", "b3"}) add(std::string(id) + "_mean", id, Aggregation::mean);
      for (int i = 1; i <= 13; ++i) add("mfcc" + std::to_string(i) + "_mean", "mfcc" + std::to_string(i), Aggregation::mean);
      for (int i = 1; i <= 13; ++i)
        add("delta2_mfcc" + std::to_string(i) + "_mean", "delta2_mfcc" + std::to_string(i), Aggregation::mean);
      add("tempo", "tempo", Aggregation::value);
      break;
    case DimensionTag::pathological:
      add_perturbation();
      for (const char* id : {"cv_f1", "cv_f2", "cv_f3"}) add(id, id, Aggregation::value);
      add("f2_velocity_mean", "f2_velocity", Aggregation::mean);
      add("f2_velocity_max", "f2_velocity", Aggregation::max);
      add("f0_std", "f0", Aggregation::std);
      add("rms_std", "rms", Aggregation::std);
      add("voiced_fraction", "voiced_fraction", Aggregation::value);
      break;
  }
  return s;
}

FeatureSchema load_schema(std::string_view name) {
  for (auto tag : kAllDimensions)
    if (disaudit::to_string(tag) == name) return default_schema(tag);
  std::ifstream in{std::filesystem::path(name)};
  if (!in) fail(Errc::MissingInput, "schema '" + std::string(name) + "' is neither a dimension name nor a readable file");
  std::stringstream buf;
  buf << in.rdbuf();
  return FeatureSchema::parse(buf.str());
}

std::size_t FeatureVector::missing_count() const { return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), true)); }

FeatureVector assemble_features(const AudioClip& clip, const FeatureSchema& schema) {
  if (clip.samples.empty()) fail(Errc::EmptyAudio, "assemble_features: clip '" + clip.source_id + "' is empty");
  FeatureVector v;
  v.source_id = clip.source_id;
  v.values.assign(schema.size(), 0.0);
  v.missing.assign(schema.size(), false);
  ExtractionContext ctx(clip);
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const auto& e = schema.entries[i];
    auto got = ctx.get(e.extractor);
    if (auto* err = std::get_if<std::string>(&got)) {
      v.missing[i] = true;
      v.warnings.push_back(e.name + ": " + *err);
      continue;
    }
    const double value = aggregate(std::get<std::vector<double>>(got), e.aggregation);
    if (!std::isfinite(value)) {
      v.missing[i] = true;
      v.warnings.push_back(e.name + ": non-finite value");
      continue;
    }
    v.values[i] = value;
  }
  return v;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureSchema& schema, const std::vector<FeatureVector>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoFailure, "cannot write " + path.string());
  out << "source_id";
  for (const auto& e : schema.entries) out << ',' << csv_escape(e.name);
  out << '\n';
  for (const auto& r : rows) {
    if (r.values.size() != schema.size()) fail(Errc::SchemaMismatch, "row '" + r.source_id + "' does not match the schema width");
    out << csv_escape(r.source_id);
    for (std::size_t i = 0; i < r.values.size(); ++i) {
      out << ',';
      if (!r.missing[i]) out << format_double(r.values[i]);
    }
    out << '\n';
  }
  if (!out) fail(Errc::IoFailure, "short write to " + path.string());
}

void write_feature_matrix_csv(const std::filesystem::path& path, const FeatureMatrix& m) {
  m.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoFailure, "cannot write " + path.string());
  out << "source_id";
  for (const auto& name : m.column_names) out << ',' << csv_escape(name);
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << csv_escape(m.sample_ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m.values(i, j));
    out << '\n';
  }
  if (!out) fail(Errc::IoFailure, "short write to " + path.string());
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::MissingInput, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(Errc::EmptyCorpus, path.string() + " is empty");
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "source_id") fail(Errc::ParseError, path.string() + ": first column must be source_id");
  FeatureTable t;
  t.column_names.assign(header.begin() + 1, header.end());
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      fail(Errc::ParseError, path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) + " cells");
    FeatureVector v;
    v.source_id = cells[0];
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto& s = cells[c];
      if (s.empty()) {
        v.values.push_back(0);
        v.missing.push_back(true);
        continue;
      }
      double x = 0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(x))
        fail(Errc::ParseError, path.string() + ":" + std::to_string(lineno) + ": bad number '" + s + "'");
      v.values.push_back(x);
      v.missing.push_back(false);
    }
    t.rows.push_back(std::move(v));
  }
  return t;
}

FeatureMatrix to_feature_matrix(const std::vector<FeatureVector>& rows, const std::vector<std::string>& column_names,
                                DimensionTag tag, std::size_t* imputed) {
  FeatureMatrix m;
  m.tag = tag;
  m.column_names = column_names;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(column_names.size());
  m.values.resize(n, d);
  std::size_t filled = 0;
  for (Eigen::Index c = 0; c < d; ++c) {
    double sum = 0;
    std::size_t count = 0;
    for (const auto& r : rows)
      if (!r.missing[c]) {
        sum += r.values[c];
        ++count;
      }
    const double fill = count ? sum / static_cast<double>(count) : 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& r = rows[static_cast<std::size_t>(i)];
      if (r.values.size() != static_cast<std::size_t>(d)) fail(Errc::SchemaMismatch, "row '" + r.source_id + "' has the wrong width");
      m.values(i, c) = r.missing[c] ? fill : r.values[c];
      filled += r.missing[c] ? 1 : 0;
    }
  }
  for (const auto& r : rows) m.sample_ids.push_back(r.source_id);
  if (imputed) *imputed = filled;
  return m;
}

}  // namespace disaudit::acoustics
