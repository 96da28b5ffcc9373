#include "disaudit/acoustics/formants.hpp"

#include "disaudit/error.hpp"
#include "dsp.hpp"

#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace disaudit::acoustics {

std::size_t FormantTrack::present() const {
  return static_cast<std::size_t>(std::count_if(frames.begin(), frames.end(), [](const auto& f) { return f.has_value(); }));
}

std::vector<double> FormantTrack::values(int formant, bool bandwidth) const {
  std::vector<double> out;
  for (const auto& f : frames)
    if (f) out.push_back(bandwidth ? f->b[formant] : f->f[formant]);
  return out;
}

std::vector<double> burg_lpc(const std::vector<double>& x, int order) {
  const std::size_t n = x.size();
  if (order < 1 || n <= static_cast<std::size_t>(order)) fail(Errc::InvalidParams, "burg_lpc: frame shorter than the model order");
  std::vector<double> a(order + 1, 0.0), prev;
  a[0] = 1;
  std::vector<double> fwd(x), bwd(x);
  for (int m = 0; m < order; ++m) {
    double num = 0, den = 0;
    for (std::size_t i = m + 1; i < n; ++i) {
      num += fwd[i] * bwd[i - 1];
      den += fwd[i] * fwd[i] + bwd[i - 1] * bwd[i - 1];
    }
    const double k = den > 0 ? -2.0 * num / den : 0.0;
    prev = a;
    for (int i = 1; i <= m + 1; ++i) a[i] = prev[i] + k * prev[m + 1 - i];
    for (std::size_t i = n - 1; i > static_cast<std::size_t>(m); --i) {
      const double f = fwd[i];
      fwd[i] = f + k * bwd[i - 1];
      bwd[i] = bwd[i - 1] + k * f;
    }
  }
  return {a.begin() + 1, a.end()};
}

FormantTrack estimate_formants(const AudioClip& clip, const FormantOptions& opt) {
  if (clip.samples.empty()) fail(Errc::EmptyAudio, "estimate_formants: empty clip");
  std::vector<double> emphasised(clip.samples.size());
  emphasised[0] = clip.samples[0];
  for (std::size_t i = 1; i < emphasised.size(); ++i) emphasised[i] = clip.samples[i] - opt.pre_emphasis * clip.samples[i - 1];
  const double fs = opt.analysis_rate;
  const auto x = resample(emphasised, clip.sample_rate, fs);

  FormantTrack track;
  const auto framing = dsp::make_framing(x.size(), fs, opt.frame_seconds, opt.hop_seconds);
  const auto window = dsp::hamming(framing.length);
  std::vector<double> frame(framing.length);
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
  Eigen::VectorXd poly(opt.lpc_order + 1);

  for (std::size_t f = 0; f < framing.count; ++f) {
    const std::size_t start = f * framing.hop;
    track.frame_times.push_back((static_cast<double>(start) + static_cast<double>(framing.length) / 2.0) / fs);
    track.frames.emplace_back();
    bool all_zero = true;
    for (std::size_t i = 0; i < framing.length; ++i) {
      frame[i] = x[start + i] * window[i];
      all_zero = all_zero && x[start + i] == 0;
    }
    if (all_zero) {
      ++track.degenerate_frames;
      continue;
    }
    const auto a = burg_lpc(frame, opt.lpc_order);
    // PolynomialSolver wants ascending powers: z^p + a_1 z^(p-1) + ... + a_p.
    for (int i = 0; i <= opt.lpc_order; ++i) poly[i] = i == opt.lpc_order ? 1.0 : a[opt.lpc_order - 1 - i];
    solver.compute(poly);

    std::vector<std::pair<double, double>> candidates;
    for (const auto& root : solver.roots()) {
      if (!(root.imag() > 0)) continue;
      const double freq = std::arg(root) * fs / (2 * std::numbers::pi);
      const double bw = -(fs / std::numbers::pi) * std::log(std::abs(root));
      if (freq >= opt.min_frequency && freq <= opt.max_frequency && bw > 0 && bw < opt.max_bandwidth)
        candidates.emplace_back(freq, bw);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end(),
                                 [](const auto& l, const auto& r) { return l.first == r.first; }),
                     candidates.end());
    if (candidates.size() < 3) continue;
    FormantFrame ff;
    for (int k = 0; k < 3; ++k) {
      ff.f[k] = candidates[k].first;
      ff.b[k] = candidates[k].second;
    }
    track.frames.back() = ff;
  }
  return track;
}

FormantDynamics pathology_dynamics(const FormantTrack& track) {
  if (track.present() < 2) fail(Errc::InsufficientFrames, "pathology_dynamics needs two frames with formants");
  FormantDynamics d;
  double* cvs[3] = {&d.cv_f1, &d.cv_f2, &d.cv_f3};
  for (int k = 0; k < 3; ++k) {
    const auto v = track.values(k);
    *cvs[k] = dsp::stddev_of(v) / dsp::mean_of(v);
  }
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < track.frames.size(); ++i) {
    if (!track.frames[i]) continue;
    if (last) {
      const double dt = track.frame_times[i] - track.frame_times[*last];
      d.f2_velocity.push_back(std::abs(track.frames[i]->f[1] - track.frames[*last]->f[1]) / dt);
    }
    last = i;
  }
  d.f2_velocity_mean = dsp::mean_of(d.f2_velocity);
  d.f2_velocity_max = *std::max_element(d.f2_velocity.begin(), d.f2_velocity.end());
  return d;
}

}  // namespace disaudit::acoustics
