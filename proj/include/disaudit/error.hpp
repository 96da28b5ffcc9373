#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace disaudit {

enum class Errc {
  UnreadableFile,
  UnsupportedEncoding,
  EmptyAudio,
  ClipTooShort,
  InsufficientVoicing,
  InsufficientFrames,
  PerplexityTooLarge,
  KTooLarge,
  TooFewPoints,
  SingleCluster,
  IdenticalCentroids,
  ZeroWithinScatter,
  LengthMismatch,
  TooFewSamples,
  EmptyCluster,
  ConstantInput,
  IoFailure,
  MissingInput,
  SchemaMismatch,
  EmptyCorpus,
  InvalidParams,
  InvalidConfig,
  ParseError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace disaudit
