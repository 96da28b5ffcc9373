#pragma once

#include "disaudit/acoustics/audio.hpp"

#include <array>
#include <optional>
#include <vector>

namespace disaudit::acoustics {

struct FormantOptions {
  double frame_seconds = 0.025;
  double hop_seconds = 0.010;
  double pre_emphasis = 0.97;
  double analysis_rate = 10000;
  int lpc_order = 10;
  double min_frequency = 90;
  double max_frequency = 4800;
  double max_bandwidth = 700;
};

struct FormantFrame {
  std::array<double, 3> f{};  // F1 < F2 < F3, Hz
  std::array<double, 3> b{};  // bandwidths, Hz
};

struct FormantTrack {
  std::vector<double> frame_times;
  std::vector<std::optional<FormantFrame>> frames;  // empty where fewer than three resonances qualified
  std::size_t degenerate_frames = 0;                // all-zero input frames

  std::size_t present() const;
  std::vector<double> values(int formant, bool bandwidth = false) const;  // formant in 0..2
};

/// Burg-method LPC coefficients a_1..a_p of A(z) = 1 + sum a_k z^-k.
std::vector<double> burg_lpc(const std::vector<double>& x, int order);

/// Per-frame F1-F3 and bandwidths from the roots of the Burg LPC polynomial.
FormantTrack estimate_formants(const AudioClip& clip, const FormantOptions& opt = {});

struct FormantDynamics {
  double cv_f1 = 0, cv_f2 = 0, cv_f3 = 0;
  double f2_velocity_mean = 0;  // Hz/s
  double f2_velocity_max = 0;
  std::vector<double> f2_velocity;
};

/// Coefficient of variation of each formant and |dF2/dt| between consecutive
/// frames that carry formants.
FormantDynamics pathology_dynamics(const FormantTrack& track);

}  // namespace disaudit::acoustics
