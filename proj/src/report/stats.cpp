#include "disaudit/report/stats.hpp"

#include "disaudit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace disaudit::report {

double mean(std::span<const double> values) {
  if (values.empty()) fail(Errc::InvalidParams, "mean of an empty sequence");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::optional<double> sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return std::nullopt;
  const double m = mean(values);
  double ss = 0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(Errc::LengthMismatch, "pearson_correlation: series differ in length");
  if (x.size() < 3) fail(Errc::InvalidParams, "pearson_correlation needs at least three pairs");
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) fail(Errc::ConstantInput, "pearson_correlation: constant input series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) fail(Errc::InvalidParams, "quantile of an empty sequence");
  if (!(q >= 0 && q <= 1)) fail(Errc::InvalidParams, "quantile level outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const double h = (n + 1) * q;  // 1-based position
  if (h <= 1) return sorted.front();
  if (h >= n) return sorted.back();
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  return sorted[lo - 1] + frac * (sorted[lo] - sorted[lo - 1]);
}

}  // namespace disaudit::report
