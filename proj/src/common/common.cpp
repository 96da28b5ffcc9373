#include "disaudit/error.hpp"
#include "disaudit/parallel.hpp"
#include "disaudit/random.hpp"
#include "disaudit/types.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace disaudit {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::UnreadableFile: return "UnreadableFile";
    case Errc::UnsupportedEncoding: return "UnsupportedEncoding";
    case Errc::EmptyAudio: return "EmptyAudio";
    case Errc::ClipTooShort: return "ClipTooShort";
    case Errc::InsufficientVoicing: return "InsufficientVoicing";
    case Errc::InsufficientFrames: return "InsufficientFrames";
    case Errc::PerplexityTooLarge: return "PerplexityTooLarge";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::SingleCluster: return "SingleCluster";
    case Errc::IdenticalCentroids: return "IdenticalCentroids";
    case Errc::ZeroWithinScatter: return "ZeroWithinScatter";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::EmptyCluster: return "EmptyCluster";
    case Errc::ConstantInput: return "ConstantInput";
    case Errc::IoFailure: return "IoFailure";
    case Errc::MissingInput: return "MissingInput";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

std::string_view to_string(DimensionTag tag) noexcept {
  switch (tag) {
    case DimensionTag::emotional: return "emotional";
    case DimensionTag::linguistic: return "linguistic";
    case DimensionTag::pathological: return "pathological";
  }
  return "unknown";
}

DimensionTag parse_dimension(std::string_view name) {
  for (auto tag : kAllDimensions)
    if (to_string(tag) == name) return tag;
  fail(Errc::InvalidParams, "unknown dimension '" + std::string(name) + "'");
}

void FeatureMatrix::validate() const {
  if (static_cast<std::size_t>(values.rows()) != sample_ids.size())
    fail(Errc::InvalidParams, "sample id count does not match row count");
  if (static_cast<std::size_t>(values.cols()) != column_names.size())
    fail(Errc::InvalidParams, "column name count does not match column count");
  if (!values.allFinite()) fail(Errc::InvalidParams, "feature matrix contains non-finite values");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view scope, std::string_view stage) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(h, scope);
  h = fnv1a(h, "\x1f");
  h = fnv1a(h, stage);
  return splitmix64(master ^ splitmix64(h));
}

std::size_t thread_limit() {
  if (const char* env = std::getenv("DISAUDIT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace disaudit
