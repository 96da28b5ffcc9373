#pragma once

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace disaudit::acoustics::dsp {

struct Framing {
  std::size_t length = 0;
  std::size_t hop = 0;
  std::size_t count = 0;
};

// Frames that fit entirely inside n samples; zero when n < length.
inline Framing make_framing(std::size_t n, double sample_rate, double frame_seconds, double hop_seconds) {
  Framing f;
  f.length = static_cast<std::size_t>(std::lround(frame_seconds * sample_rate));
  f.hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(hop_seconds * sample_rate)));
  f.count = n >= f.length && f.length > 0 ? 1 + (n - f.length) / f.hop : 0;
  return f;
}

// Periodic Hann window.
inline std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

inline std::vector<double> hamming(std::size_t n) {
  std::vector<double> w(n);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.54 - 0.46 * std::cos(2 * std::numbers::pi * static_cast<double>(i) / denom);
  return w;
}

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Magnitude spectra (bins 0..nfft/2) of windowed frames.
class Spectrogram {
public:
  Spectrogram(const std::vector<double>& x, const Framing& framing, std::size_t nfft) : nfft_(nfft) {
    const auto window = hann(framing.length);
    Eigen::FFT<double> fft;
    std::vector<double> buf(nfft);
    std::vector<std::complex<double>> spec;
    magnitudes_.reserve(framing.count);
    for (std::size_t f = 0; f < framing.count; ++f) {
      std::fill(buf.begin(), buf.end(), 0.0);
      for (std::size_t i = 0; i < framing.length; ++i) buf[i] = x[f * framing.hop + i] * window[i];
      fft.fwd(spec, buf);
      std::vector<double> mag(nfft / 2 + 1);
      for (std::size_t b = 0; b < mag.size(); ++b) mag[b] = std::abs(spec[b]);
      magnitudes_.push_back(std::move(mag));
    }
  }

  std::size_t frames() const { return magnitudes_.size(); }
  std::size_t bins() const { return nfft_ / 2 + 1; }
  std::size_t nfft() const { return nfft_; }
  const std::vector<double>& operator[](std::size_t f) const { return magnitudes_[f]; }

private:
  std::size_t nfft_;
  std::vector<std::vector<double>> magnitudes_;
};

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0;
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Population standard deviation.
inline double stddev_of(const std::vector<double>& v) {
  if (v.empty()) return 0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace disaudit::acoustics::dsp
