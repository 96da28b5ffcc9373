#pragma once

#include <optional>
#include <span>
#include <vector>

namespace disaudit::report {

/// Sample Pearson correlation. Throws ConstantInput when either series has
/// zero variance and InvalidParams for mismatched or too-short input.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Linearly interpolated quantile on the Weibull plotting positions
/// p_i = i / (n + 1): positions outside [1, n] clamp to the extremes.
double quantile(std::span<const double> values, double q);

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1); empty when fewer than two values.
std::optional<double> sample_stddev(std::span<const double> values);

}  // namespace disaudit::report
