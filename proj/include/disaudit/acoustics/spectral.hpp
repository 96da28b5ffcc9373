#pragma once

#include "disaudit/acoustics/audio.hpp"

#include <Eigen/Dense>

namespace disaudit::acoustics {

struct SpectralOptions {
  double frame_seconds = 0.025;
  double hop_seconds = 0.010;
  std::size_t nfft = 512;
  int mel_filters = 26;
  double mel_high_hz = 8000;
  int coefficients = 13;
  int delta_window = 2;
  double rolloff_fraction = 0.85;
};

struct MfccResult {
  Eigen::MatrixXd mfcc;    // frames x coefficients
  Eigen::MatrixXd delta;
  Eigen::MatrixXd delta2;  // delta applied to delta
};

/// Regression deltas d_t = sum_n n (c_{t+n} - c_{t-n}) / (2 sum_n n^2) with
/// edge frames replicated.
Eigen::MatrixXd delta_features(const Eigen::MatrixXd& frames, int window = 2);

/// Hann-windowed frames, power spectrum, HTK mel filterbank, log energies,
/// orthonormal DCT-II.
MfccResult mfcc_features(const AudioClip& clip, const SpectralOptions& opt = {});

struct SpectralEnergyStats {
  double rms_mean = 0, rms_std = 0, rms_max = 0;
  double centroid_mean = 0, centroid_std = 0;
  double flux_mean = 0, flux_std = 0;
  double rolloff_mean = 0, rolloff_std = 0;
  Eigen::VectorXd rms, centroid, flux, rolloff;  // frame tracks (flux has frames - 1 entries)
  std::size_t silent_frames = 0;                 // all-zero spectra, centroid and roll-off set to 0
};

SpectralEnergyStats spectral_energy_stats(const AudioClip& clip, const SpectralOptions& opt = {});

struct RhythmFeatures {
  double tempo = 0;     // BPM, 0 when no periodic onset structure was found
  double duration = 0;  // seconds
  bool tempo_flagged = false;
};

struct RhythmOptions {
  double min_bpm = 40;
  double max_bpm = 220;
  double min_peak_ratio = 0.1;  // autocorrelation peak relative to lag 0
};

/// Tempo from the autocorrelation of half-wave-rectified spectral flux.
RhythmFeatures rhythm_features(const AudioClip& clip, const SpectralOptions& opt = {}, const RhythmOptions& rhythm = {});

}  // namespace disaudit::acoustics
