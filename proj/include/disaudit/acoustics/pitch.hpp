#pragma once

#include "disaudit/acoustics/audio.hpp"

#include <optional>
#include <vector>

namespace disaudit::acoustics {

struct PitchOptions {
  double f0_min = 75;
  double f0_max = 500;
  double voicing_threshold = 0.45;
  double window_seconds = 0.040;
  double hop_seconds = 0.010;
};

struct F0Track {
  std::vector<double> frame_times;             // window centres, seconds
  std::vector<std::optional<double>> f0;       // Hz, empty when unvoiced
  std::vector<bool> voicing;
  std::vector<double> periodicity;             // interpolated normalized autocorrelation peak, 0 when unvoiced

  std::size_t size() const { return frame_times.size(); }
  std::vector<double> voiced_f0() const;
  double voiced_fraction() const;
};

/// Frame-wise normalized autocorrelation pitch with parabolic peak refinement.
/// The shortest-lag peak within 90% of the strongest one wins, which keeps
/// periodic signals off their subharmonics.
F0Track estimate_f0(const AudioClip& clip, const PitchOptions& opt = {});

/// Glottal cycles located as positive-going zero crossings spaced by the
/// local pitch period. Each chain is an unbroken run of cycles.
struct GlottalCycles {
  std::vector<std::vector<double>> periods;     // seconds, per chain
  std::vector<std::vector<double>> amplitudes;  // peak |x| per cycle, per chain
  std::size_t cycle_count() const;
};

GlottalCycles find_glottal_cycles(const AudioClip& clip, const F0Track& f0, const PitchOptions& opt = {});

struct PerturbationMeasures {
  double jitter_local = 0;
  double jitter_rap = 0;
  double jitter_ppq5 = 0;
  double shimmer_local = 0;
  double shimmer_apq3 = 0;
  double shimmer_apq5 = 0;
  double hnr_mean = 0;  // dB
  double hnr_std = 0;   // dB
};

/// Cycle-to-cycle period (jitter) and amplitude (shimmer) perturbation plus
/// per-frame harmonics-to-noise ratio 10 log10(r / (1 - r)).
PerturbationMeasures perturbation_measures(const AudioClip& clip, const F0Track& f0, const PitchOptions& opt = {});

/// Local, 3-point and 5-point perturbation quotients of a sequence, each
/// normalised by the sequence mean. Chains are never differenced across.
struct PerturbationQuotients {
  double local = 0;
  double three_point = 0;
  double five_point = 0;
};
PerturbationQuotients perturbation_quotients(const std::vector<std::vector<double>>& chains);

std::vector<double> frame_hnr_db(const F0Track& f0);

}  // namespace disaudit::acoustics
