#include "disaudit/synth/synth.hpp"

#include "disaudit/acoustics/features.hpp"
#include "disaudit/error.hpp"
#include "disaudit/random.hpp"

#include <Eigen/QR>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

namespace disaudit::synth {

namespace {

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  // Row-major fill keeps the draw order independent of Eigen's storage order.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

// d x m matrix with orthonormal columns.
Eigen::MatrixXd orthonormal_frame(Eigen::Index d, Eigen::Index m, Rng& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(d, m, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, m);
}

// Vertices of a regular simplex with edge `sep`, rotated into m dimensions by
// a random orthonormal frame. Needs m >= k - 1; below that the centers sit on
// random unit directions scaled by sep / sqrt(2).
Eigen::MatrixXd simplex_centers(Eigen::Index k, Eigen::Index m, double sep, Rng& rng) {
  if (k == 1) return Eigen::MatrixXd::Zero(1, m);
  if (m < k - 1) {
    Eigen::MatrixXd d = gaussian_matrix(k, m, rng);
    d.rowwise().normalize();
    return d * (sep / std::numbers::sqrt2);
  }
  // Rows e_i - (1/k) 1 are pairwise sqrt(2) apart and span k - 1 dimensions.
  const Eigen::MatrixXd centered =
      Eigen::MatrixXd::Identity(k, k) - Eigen::MatrixXd::Constant(k, k, 1.0 / static_cast<double>(k));
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(centered);
  const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(k, k - 1);
  const Eigen::MatrixXd coords = centered * basis;
  return coords * orthonormal_frame(m, k - 1, rng).transpose() * (sep / std::numbers::sqrt2);
}

std::string sample_id(Eigen::Index i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%04ld", static_cast<long>(i));
  return buf;
}

}  // namespace

void BlobSpec::validate() const {
  if (n_clusters < 1 || points_per_cluster < 1 || dimension < 1)
    fail(Errc::InvalidParams, "BlobSpec: counts and dimension must be >= 1");
  if (!(center_separation >= 0)) fail(Errc::InvalidParams, "BlobSpec: separation must be >= 0");
  if (informative_dimension < 0 || informative_dimension > dimension)
    fail(Errc::InvalidParams, "BlobSpec: informative_dimension must lie in [0, dimension]");
}

BlobData generate_blobs(const BlobSpec& spec) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, "blobs"));
  const Eigen::Index k = spec.n_clusters;
  const Eigen::Index d = spec.dimension;
  const Eigen::Index m = spec.informative_dimension ? spec.informative_dimension : spec.dimension;
  const Eigen::Index n = k * spec.points_per_cluster;

  const Eigen::MatrixXd centers_m = simplex_centers(k, m, spec.center_separation, rng);

  Eigen::MatrixXd points = gaussian_matrix(n, m, rng);
  BlobData out;
  out.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index c = i / spec.points_per_cluster;
    out.labels[i] = static_cast<int>(c);
    points.row(i) += centers_m.row(c);
  }

  if (m == d) {
    out.features.values = std::move(points);
    out.centers = centers_m;
  } else {
    const Eigen::MatrixXd frame = orthonormal_frame(d, m, rng);
    out.features.values = points * frame.transpose();
    out.centers = centers_m * frame.transpose();
  }
  for (Eigen::Index j = 0; j < d; ++j) out.features.column_names.push_back("x" + std::to_string(j + 1));
  for (Eigen::Index i = 0; i < n; ++i) out.features.sample_ids.push_back(sample_id(i));
  return out;
}

double hierarchy_separation(DimensionTag tag) {
  switch (tag) {
    case DimensionTag::emotional: return 8;
    case DimensionTag::pathological: return 4;
    case DimensionTag::linguistic: return 2;
  }
  return 0;
}

BlobData generate_dimension_fixture(DimensionTag tag, std::uint64_t seed, int points_per_cluster) {
  const auto schema = acoustics::default_schema(tag);
  BlobSpec spec;
  spec.n_clusters = 3;
  spec.points_per_cluster = points_per_cluster;
  spec.center_separation = hierarchy_separation(tag);
  spec.dimension = static_cast<int>(schema.size());
  spec.informative_dimension = kHierarchyInformativeDimension;
  spec.seed = derive_seed(seed, "fixture", to_string(tag));
  BlobData data = generate_blobs(spec);
  data.features.column_names = schema.names();
  data.features.tag = tag;
  return data;
}

std::string_view to_string(SignalKind kind) noexcept {
  switch (kind) {
    case SignalKind::sine: return "sine";
    case SignalKind::jittered_sine: return "jittered_sine";
    case SignalKind::pulse_train_filtered: return "pulse_train_filtered";
    case SignalKind::noise: return "noise";
    case SignalKind::silence: return "silence";
  }
  return "sine";
}

SignalKind parse_signal_kind(std::string_view name) {
  for (auto k : {SignalKind::sine, SignalKind::jittered_sine, SignalKind::pulse_train_filtered, SignalKind::noise, SignalKind::silence})
    if (to_string(k) == name) return k;
  fail(Errc::InvalidParams, "unknown signal kind '" + std::string(name) + "'");
}

void SignalParams::validate(SignalKind kind) const {
  if (!(duration > 0) || !(sample_rate > 0)) fail(Errc::InvalidParams, "signal duration and sample rate must be positive");
  if (!(amplitude >= 0)) fail(Errc::InvalidParams, "signal amplitude must be >= 0");
  const bool tonal = kind == SignalKind::sine || kind == SignalKind::jittered_sine || kind == SignalKind::pulse_train_filtered;
  if (tonal && !(frequency > 0 && frequency < sample_rate / 2))
    fail(Errc::InvalidParams, "signal frequency must lie in (0, Nyquist)");
  if (kind == SignalKind::jittered_sine && !(jitter >= 0 && jitter < 0.5))
    fail(Errc::InvalidParams, "jitter must lie in [0, 0.5)");
  if (kind == SignalKind::pulse_train_filtered) {
    if (!(pole_bandwidth > 0)) fail(Errc::InvalidParams, "pole bandwidth must be positive");
    for (double f : pole_frequencies)
      if (!(f > 0 && f < sample_rate / 2)) fail(Errc::InvalidParams, "pole frequency must lie in (0, Nyquist)");
  }
}

double SignalTruth::jitter_local() const {
  if (periods.size() < 2) return 0;
  double diff = 0, sum = 0;
  for (std::size_t i = 0; i < periods.size(); ++i) {
    sum += periods[i];
    if (i) diff += std::abs(periods[i] - periods[i - 1]);
  }
  return (diff / static_cast<double>(periods.size() - 1)) / (sum / static_cast<double>(periods.size()));
}

SyntheticSignal generate_signal(SignalKind kind, const SignalParams& p, std::uint64_t seed) {
  p.validate(kind);
  Rng rng(derive_seed(seed, "signal", to_string(kind)));
  SyntheticSignal out;
  auto& clip = out.clip;
  clip.sample_rate = p.sample_rate;
  clip.source_id = std::string(to_string(kind));
  const auto n = static_cast<std::size_t>(std::llround(p.duration * p.sample_rate));
  clip.samples.assign(n, 0.0);
  const double two_pi = 2 * std::numbers::pi;

  switch (kind) {
    case SignalKind::silence: break;
    case SignalKind::sine:
      for (std::size_t i = 0; i < n; ++i) clip.samples[i] = p.amplitude * std::sin(two_pi * p.frequency * static_cast<double>(i) / p.sample_rate);
      break;
    case SignalKind::noise: {
      std::normal_distribution<double> normal(0.0, p.amplitude);
      for (auto& s : clip.samples) s = normal(rng);
      break;
    }
    case SignalKind::jittered_sine: {
      // One full sine cycle per period; the phase advances linearly within a
      // cycle so each period is exactly the recorded value.
      const double t0 = 1.0 / p.frequency;
      std::normal_distribution<double> normal;
      std::bernoulli_distribution coin;
      double cycle_start = 0, period = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / p.sample_rate;
        while (period == 0 || t >= cycle_start + period) {
          if (period != 0) cycle_start += period;
          const double dev = p.jitter_mode == JitterMode::gaussian ? p.jitter * normal(rng) : (coin(rng) ? p.jitter : -p.jitter);
          period = t0 * std::max(1.0 + dev, 0.5);
          out.truth.periods.push_back(period);
        }
        clip.samples[i] = p.amplitude * std::sin(two_pi * (t - cycle_start) / period);
      }
      // The final cycle is truncated by the clip end; only complete cycles count.
      if (cycle_start + period > p.duration && !out.truth.periods.empty()) out.truth.periods.pop_back();
      break;
    }
    case SignalKind::pulse_train_filtered: {
      const double interval = p.sample_rate / p.frequency;
      for (double pos = 0; pos < static_cast<double>(n); pos += interval) clip.samples[static_cast<std::size_t>(std::llround(pos)) % n] = 1.0;
      // Cascade of two-pole resonators.
      for (double f : p.pole_frequencies) {
        const double r = std::exp(-std::numbers::pi * p.pole_bandwidth / p.sample_rate);
        const double a1 = -2 * r * std::cos(two_pi * f / p.sample_rate);
        const double a2 = r * r;
        double y1 = 0, y2 = 0;
        for (auto& s : clip.samples) {
          const double y = s - a1 * y1 - a2 * y2;
          y2 = y1;
          y1 = y;
          s = y;
        }
        out.truth.pole_frequencies.push_back(f);
        out.truth.pole_bandwidths.push_back(p.pole_bandwidth);
      }
      double peak = 0;
      for (double s : clip.samples) peak = std::max(peak, std::abs(s));
      if (peak > 0)
        for (auto& s : clip.samples) s *= p.amplitude / peak;
      break;
    }
  }
  return out;
}

void export_blobs(const BlobData& data, const std::filesystem::path& csv_path, const std::filesystem::path& labels_path) {
  acoustics::write_feature_matrix_csv(csv_path, data.features);
  if (labels_path.empty()) return;
  std::ofstream out(labels_path, std::ios::binary);
  if (!out) fail(Errc::IoFailure, "cannot write " + labels_path.string());
  out << "sample_id,label\n";
  for (Eigen::Index i = 0; i < data.labels.size(); ++i) out << data.features.sample_ids[static_cast<std::size_t>(i)] << ',' << data.labels[i] << '\n';
  if (!out) fail(Errc::IoFailure, "short write to " + labels_path.string());
}

}  // namespace disaudit::synth
