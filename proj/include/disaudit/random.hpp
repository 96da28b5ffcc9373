#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace disaudit {

using Rng = std::mt19937_64;

/// Stable 64-bit hash of (master, scope, stage). Adding new scopes never
/// changes the seeds handed to existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view scope, std::string_view stage = {});

}  // namespace disaudit
