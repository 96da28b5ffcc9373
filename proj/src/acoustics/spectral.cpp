#include "disaudit/acoustics/spectral.hpp"

#include "disaudit/error.hpp"
#include "dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace disaudit::acoustics {

namespace {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// filters x bins triangular weights, continuous in frequency.
Eigen::MatrixXd mel_filterbank(int filters, std::size_t bins, std::size_t nfft, double fs, double high_hz) {
  const double top = std::min(high_hz, fs / 2);
  const double mel_lo = hz_to_mel(0), mel_hi = hz_to_mel(top);
  std::vector<double> edges(filters + 2);
  for (int i = 0; i < filters + 2; ++i) edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (filters + 1));
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(filters, static_cast<Eigen::Index>(bins));
  for (int m = 0; m < filters; ++m) {
    const double lo = edges[m], centre = edges[m + 1], hi = edges[m + 2];
    for (std::size_t b = 0; b < bins; ++b) {
      const double f = static_cast<double>(b) * fs / static_cast<double>(nfft);
      if (f > lo && f <= centre) w(m, static_cast<Eigen::Index>(b)) = (f - lo) / (centre - lo);
      else if (f > centre && f < hi) w(m, static_cast<Eigen::Index>(b)) = (hi - f) / (hi - centre);
    }
  }
  return w;
}

// Orthonormal DCT-II, first `keep` rows.
Eigen::MatrixXd dct_matrix(int keep, int size) {
  Eigen::MatrixXd d(keep, size);
  for (int k = 0; k < keep; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / size) : std::sqrt(2.0 / size);
    for (int m = 0; m < size; ++m) d(k, m) = scale * std::cos(std::numbers::pi * k * (m + 0.5) / size);
  }
  return d;
}

std::size_t fft_size(const dsp::Framing& framing, const SpectralOptions& opt) {
  return std::max(opt.nfft, dsp::next_pow2(framing.length));
}

}  // namespace

Eigen::MatrixXd delta_features(const Eigen::MatrixXd& frames, int window) {
  const Eigen::Index t = frames.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(t, frames.cols());
  if (t == 0) return out;
  double denom = 0;
  for (int n = 1; n <= window; ++n) denom += 2.0 * n * n;
  for (Eigen::Index i = 0; i < t; ++i)
    for (int n = 1; n <= window; ++n) {
      const Eigen::Index ahead = std::min<Eigen::Index>(i + n, t - 1);
      const Eigen::Index behind = std::max<Eigen::Index>(i - n, 0);
      out.row(i) += n * (frames.row(ahead) - frames.row(behind));
    }
  return out / denom;
}

MfccResult mfcc_features(const AudioClip& clip, const SpectralOptions& opt) {
  const auto framing = dsp::make_framing(clip.samples.size(), clip.sample_rate, opt.frame_seconds, opt.hop_seconds);
  if (framing.count == 0) fail(Errc::ClipTooShort, "mfcc_features: clip shorter than one analysis frame");
  const std::size_t nfft = fft_size(framing, opt);
  const dsp::Spectrogram spec(clip.samples, framing, nfft);
  const Eigen::MatrixXd bank = mel_filterbank(opt.mel_filters, spec.bins(), nfft, clip.sample_rate, opt.mel_high_hz);
  const Eigen::MatrixXd dct = dct_matrix(opt.coefficients, opt.mel_filters);

  MfccResult r;
  r.mfcc.resize(static_cast<Eigen::Index>(spec.frames()), opt.coefficients);
  Eigen::VectorXd power(static_cast<Eigen::Index>(spec.bins()));
  for (std::size_t f = 0; f < spec.frames(); ++f) {
    for (std::size_t b = 0; b < spec.bins(); ++b) power[static_cast<Eigen::Index>(b)] = spec[f][b] * spec[f][b];
    const Eigen::VectorXd log_energy = (bank * power).array().max(1e-10).log();
    r.mfcc.row(static_cast<Eigen::Index>(f)) = (dct * log_energy).transpose();
  }
  r.delta = delta_features(r.mfcc, opt.delta_window);
  r.delta2 = delta_features(r.delta, opt.delta_window);
  return r;
}

SpectralEnergyStats spectral_energy_stats(const AudioClip& clip, const SpectralOptions& opt) {
  SpectralEnergyStats s;
  const auto framing = dsp::make_framing(clip.samples.size(), clip.sample_rate, opt.frame_seconds, opt.hop_seconds);
  if (framing.count == 0) return s;
  const std::size_t nfft = fft_size(framing, opt);
  const dsp::Spectrogram spec(clip.samples, framing, nfft);
  const auto frames = static_cast<Eigen::Index>(framing.count);
  s.rms.resize(frames);
  s.centroid.resize(frames);
  s.rolloff.resize(frames);
  s.flux.resize(std::max<Eigen::Index>(frames - 1, 0));
  const double bin_hz = clip.sample_rate / static_cast<double>(nfft);

  for (Eigen::Index f = 0; f < frames; ++f) {
    double sq = 0;
    for (std::size_t i = 0; i < framing.length; ++i) {
      const double v = clip.samples[static_cast<std::size_t>(f) * framing.hop + i];
      sq += v * v;
    }
    s.rms[f] = std::sqrt(sq / static_cast<double>(framing.length));

    const auto& mag = spec[static_cast<std::size_t>(f)];
    double weighted = 0, total = 0, energy = 0;
    for (std::size_t b = 0; b < mag.size(); ++b) {
      weighted += static_cast<double>(b) * bin_hz * mag[b];
      total += mag[b];
      energy += mag[b] * mag[b];
    }
    if (!(total > 0)) {
      ++s.silent_frames;
      s.centroid[f] = 0;
      s.rolloff[f] = 0;
    } else {
      s.centroid[f] = weighted / total;
      double acc = 0;
      std::size_t b = 0;
      for (; b < mag.size(); ++b) {
        acc += mag[b] * mag[b];
        if (acc >= opt.rolloff_fraction * energy) break;
      }
      s.rolloff[f] = static_cast<double>(std::min(b, mag.size() - 1)) * bin_hz;
    }
    if (f > 0) {
      const auto& prev = spec[static_cast<std::size_t>(f - 1)];
      double d2 = 0;
      for (std::size_t b = 0; b < mag.size(); ++b) d2 += (mag[b] - prev[b]) * (mag[b] - prev[b]);
      s.flux[f - 1] = std::sqrt(d2);
    }
  }
  auto mean = [](const Eigen::VectorXd& v) { return v.size() ? v.mean() : 0.0; };
  auto sd = [&](const Eigen::VectorXd& v) { return v.size() ? std::sqrt((v.array() - v.mean()).square().mean()) : 0.0; };
  s.rms_mean = mean(s.rms);
  s.rms_std = sd(s.rms);
  s.rms_max = s.rms.maxCoeff();
  s.centroid_mean = mean(s.centroid);
  s.centroid_std = sd(s.centroid);
  s.flux_mean = mean(s.flux);
  s.flux_std = sd(s.flux);
  s.rolloff_mean = mean(s.rolloff);
  s.rolloff_std = sd(s.rolloff);
  return s;
}

RhythmFeatures rhythm_features(const AudioClip& clip, const SpectralOptions& opt, const RhythmOptions& rhythm) {
  RhythmFeatures r;
  r.duration = clip.duration();
  r.tempo_flagged = true;
  const auto framing = dsp::make_framing(clip.samples.size(), clip.sample_rate, opt.frame_seconds, opt.hop_seconds);
  if (framing.count < 2) return r;
  const dsp::Spectrogram spec(clip.samples, framing, fft_size(framing, opt));

  std::vector<double> onset(spec.frames(), 0.0);
  for (std::size_t f = 1; f < spec.frames(); ++f)
    for (std::size_t b = 0; b < spec.bins(); ++b) onset[f] += std::max(0.0, spec[f][b] - spec[f - 1][b]);
  const double m = dsp::mean_of(onset);
  for (double& v : onset) v -= m;

  const double frame_rate = clip.sample_rate / static_cast<double>(framing.hop);
  const auto min_lag = static_cast<std::size_t>(std::ceil(60.0 * frame_rate / rhythm.max_bpm));
  const auto max_lag = static_cast<std::size_t>(std::floor(60.0 * frame_rate / rhythm.min_bpm));
  auto acf = [&](std::size_t lag) {
    double s = 0;
    for (std::size_t t = 0; t + lag < onset.size(); ++t) s += onset[t] * onset[t + lag];
    return s;
  };
  const double zero = acf(0);
  if (!(zero > 0) || onset.size() <= min_lag + 1) return r;

  std::size_t best = 0;
  double best_val = 0;
  for (std::size_t lag = min_lag; lag <= max_lag && lag + 1 < onset.size(); ++lag) {
    const double v = acf(lag);
    if (v > best_val && v >= acf(lag - 1) && v >= acf(lag + 1)) {
      best = lag;
      best_val = v;
    }
  }
  if (best == 0 || best_val < rhythm.min_peak_ratio * zero) return r;
  const double a = acf(best - 1), c = acf(best + 1);
  const double curvature = a - 2 * best_val + c;
  const double delta = curvature < 0 ? std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5) : 0.0;
  r.tempo = 60.0 * frame_rate / (static_cast<double>(best) + delta);
  r.tempo_flagged = false;
  return r;
}

}  // namespace disaudit::acoustics
