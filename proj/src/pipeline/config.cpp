#include "disaudit/pipeline/config.hpp"

#include "disaudit/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace disaudit::pipeline {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_dots(const std::string& key) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : key) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size())
    fail(Errc::InvalidConfig, "config key '" + key + "': '" + value + "' is not a valid number");
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(Errc::InvalidConfig, "config key '" + key + "': expected true or false");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() || base.empty() ? p : base / p;
}

DimensionTag dimension_or_fail(const std::string& key, const std::string& name) {
  try {
    return parse_dimension(name);
  } catch (const Error&) {
    fail(Errc::InvalidConfig, "config key '" + key + "': unknown dimension '" + name + "'");
  }
}

void set_input_field(DimensionInput& in, const std::string& key, const std::string& field, const std::string& value,
                     const std::filesystem::path& base) {
  if (field == "audio") {
    in.audio_dir = resolve(base, value);
  } else if (field == "csv") {
    in.csv = resolve(base, value);
  } else if (field == "schema") {
    // Dimension names stay names; anything else is a schema file path.
    bool is_name = false;
    for (auto t : kAllDimensions) is_name = is_name || to_string(t) == value;
    in.schema = is_name ? value : resolve(base, value).string();
  } else {
    fail(Errc::InvalidConfig, "unknown config key '" + key + "'");
  }
}

void check_input(const DimensionInput& in, const std::string& where) {
  if (in.audio_dir.has_value() == in.csv.has_value())
    fail(Errc::InvalidConfig, where + ": give exactly one of an audio directory or a feature CSV");
}

}  // namespace

std::string DimensionInput::cache_key() const {
  return (audio_dir ? "audio:" + audio_dir->string() : "csv:" + (csv ? csv->string() : std::string())) + "|" + schema;
}

void CombinationSpec::validate() const {
  if (id.empty()) fail(Errc::InvalidConfig, "combination id is empty");
  // Ids name output directories.
  if (!std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isalnum(c) || c == '-' || c == '_' || c == '.'; }) || id == "." ||
      id == "..")
    fail(Errc::InvalidConfig, "combination id '" + id + "' may only contain letters, digits, '-', '_' and '.'");
  for (auto tag : kAllDimensions) {
    const auto it = inputs.find(tag);
    if (it == inputs.end())
      fail(Errc::InvalidConfig, "combination '" + id + "' lacks the " + std::string(to_string(tag)) + " dimension");
    check_input(it->second, "combination '" + id + "' " + std::string(to_string(tag)));
  }
}

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) fail(Errc::InvalidConfig, what);
  };
  require(perplexity > 0, "perplexity must be positive");
  require(tsne_iterations >= 1, "tsne.iterations must be at least 1");
  require(k >= 2, "k must be at least 2");
  require(n_init >= 1, "n_init must be at least 1");
  require(bootstrap_iterations >= 1, "bootstrap.iterations must be at least 1");
  require(bootstrap_fraction > 0 && bootstrap_fraction <= 1, "bootstrap.fraction must lie in (0, 1]");
  require(n_perm >= 2, "n_perm must be at least 2");
  require(bounded_threshold > 0 && bounded_threshold < 1, "bounded_threshold must lie in (0, 1)");
  require(trust_k >= 1, "trust_k must be at least 1");
  require(kde_bandwidth > 0, "kde.bandwidth must be positive");
  require(kde_isoline > 0 && kde_isoline < 1, "kde.isoline must lie in (0, 1)");
  require(kde_resolution >= 2, "kde.resolution must be at least 2");
  for (const auto& [tag, in] : inputs) check_input(in, std::string(to_string(tag)));
  for (const auto& c : corpora) check_input(c.input, "corpus '" + c.name + "'");
  for (const auto& c : combinations) c.validate();
}

std::vector<CombinationSpec> RunConfig::resolve_combinations(const std::string& default_id) const {
  std::vector<CombinationSpec> out = combinations;
  std::map<DimensionTag, std::vector<const CorpusSpec*>> by_tag;
  for (const auto& c : corpora) by_tag[c.tag].push_back(&c);
  if (!corpora.empty()) {
    for (auto tag : kAllDimensions)
      if (by_tag[tag].empty()) fail(Errc::InvalidConfig, "no corpus supplies the " + std::string(to_string(tag)) + " dimension");
    for (const auto* e : by_tag[DimensionTag::emotional])
      for (const auto* l : by_tag[DimensionTag::linguistic])
        for (const auto* p : by_tag[DimensionTag::pathological]) {
          CombinationSpec spec;
          spec.id = e->name + "-" + l->name + "-" + p->name;
          spec.inputs = {{DimensionTag::emotional, e->input}, {DimensionTag::linguistic, l->input}, {DimensionTag::pathological, p->input}};
          out.push_back(std::move(spec));
        }
  }
  if (out.empty() && !inputs.empty()) out.push_back({default_id, inputs});
  for (const auto& c : out) c.validate();
  std::vector<std::string> ids;
  for (const auto& c : out) ids.push_back(c.id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) fail(Errc::InvalidConfig, "duplicate combination id");
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value, const std::filesystem::path& base) {
  if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "out") out_dir = resolve(base, value);
  else if (key == "perplexity") perplexity = parse_number<double>(key, value);
  else if (key == "tsne.iterations" || key == "iterations") tsne_iterations = parse_number<int>(key, value);
  else if (key == "k") k = parse_number<int>(key, value);
  else if (key == "n_init") n_init = parse_number<int>(key, value);
  else if (key == "bootstrap.iterations") bootstrap_iterations = parse_number<int>(key, value);
  else if (key == "bootstrap.fraction") bootstrap_fraction = parse_number<double>(key, value);
  else if (key == "n_perm") n_perm = parse_number<int>(key, value);
  else if (key == "bounded_threshold") bounded_threshold = parse_number<double>(key, value);
  else if (key == "trust_k") trust_k = parse_number<int>(key, value);
  else if (key == "kde.bandwidth") kde_bandwidth = parse_number<double>(key, value);
  else if (key == "kde.isoline") kde_isoline = parse_number<double>(key, value);
  else if (key == "kde.resolution") kde_resolution = parse_number<int>(key, value);
  else if (key == "timings") emit_timings = parse_bool(key, value);
  else {
    const auto parts = split_dots(key);
    if (parts.size() == 2) {
      set_input_field(inputs[dimension_or_fail(key, parts[0])], key, parts[1], value, base);
    } else if (parts.size() == 3 && parts[0] == "corpus") {
      auto it = std::find_if(corpora.begin(), corpora.end(), [&](const CorpusSpec& c) { return c.name == parts[1]; });
      if (it == corpora.end()) {
        corpora.push_back({parts[1], DimensionTag::emotional, {}});
        it = std::prev(corpora.end());
      }
      if (parts[2] == "dimension") it->tag = dimension_or_fail(key, value);
      else set_input_field(it->input, key, parts[2], value, base);
    } else if (parts.size() == 4 && parts[0] == "combination") {
      auto it = std::find_if(combinations.begin(), combinations.end(), [&](const CombinationSpec& c) { return c.id == parts[1]; });
      if (it == combinations.end()) {
        combinations.push_back({parts[1], {}});
        it = std::prev(combinations.end());
      }
      set_input_field(it->inputs[dimension_or_fail(key, parts[2])], key, parts[3], value, base);
    } else {
      fail(Errc::InvalidConfig, "unknown config key '" + key + "'");
    }
  }
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base) {
  RunConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(Errc::InvalidConfig, "config line " + std::to_string(lineno) + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(Errc::InvalidConfig, "config line " + std::to_string(lineno) + ": empty key or value");
    cfg.set(key, value, base);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::InvalidConfig, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

}  // namespace disaudit::pipeline
