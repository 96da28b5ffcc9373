#include "disaudit/acoustics/pitch.hpp"

#include "disaudit/error.hpp"
#include "dsp.hpp"

#include <algorithm>
#include <cmath>

namespace disaudit::acoustics {

std::vector<double> F0Track::voiced_f0() const {
  std::vector<double> out;
  for (const auto& v : f0)
    if (v) out.push_back(*v);
  return out;
}

double F0Track::voiced_fraction() const {
  if (voicing.empty()) return 0;
  return static_cast<double>(std::count(voicing.begin(), voicing.end(), true)) / static_cast<double>(voicing.size());
}

std::size_t GlottalCycles::cycle_count() const {
  std::size_t n = 0;
  for (const auto& c : periods) n += c.size();
  return n;
}

F0Track estimate_f0(const AudioClip& clip, const PitchOptions& opt) {
  if (!(opt.f0_min > 0 && opt.f0_min < opt.f0_max)) fail(Errc::InvalidParams, "estimate_f0 needs 0 < f0_min < f0_max");
  const double fs = clip.sample_rate;
  const std::size_t n = clip.samples.size();
  if (static_cast<double>(n) < 2.0 / opt.f0_min * fs) fail(Errc::ClipTooShort, "clip shorter than two periods of f0_min");

  auto framing = dsp::make_framing(n, fs, opt.window_seconds, opt.hop_seconds);
  if (framing.count == 0) {
    framing.length = n;
    framing.count = 1;
  }
  const std::size_t w = framing.length;
  const auto min_lag = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(fs / opt.f0_max)));
  const auto max_lag = std::min<std::size_t>(w - 2, static_cast<std::size_t>(std::ceil(fs / opt.f0_min)));

  F0Track track;
  std::vector<double> x(w), r(max_lag + 2, 0.0), prefix(w + 1);
  for (std::size_t f = 0; f < framing.count; ++f) {
    const std::size_t start = f * framing.hop;
    double mean = 0;
    for (std::size_t i = 0; i < w; ++i) mean += clip.samples[start + i];
    mean /= static_cast<double>(w);
    for (std::size_t i = 0; i < w; ++i) x[i] = clip.samples[start + i] - mean;
    prefix[0] = 0;
    for (std::size_t i = 0; i < w; ++i) prefix[i + 1] = prefix[i] + x[i] * x[i];

    track.frame_times.push_back((static_cast<double>(start) + static_cast<double>(w) / 2.0) / fs);
    track.f0.emplace_back();
    track.voicing.push_back(false);
    track.periodicity.push_back(0);
    if (!(prefix[w] > 1e-12 * static_cast<double>(w)) || min_lag + 1 >= max_lag) continue;

    // r(tau) = <x[0:w-tau], x[tau:w]> / (|x[0:w-tau]| |x[tau:w]|)
    for (std::size_t lag = min_lag - 1; lag <= max_lag + 1 && lag < w; ++lag) {
      double dot = 0;
      for (std::size_t i = 0; i + lag < w; ++i) dot += x[i] * x[i + lag];
      const double e0 = prefix[w - lag], e1 = prefix[w] - prefix[lag];
      r[lag] = (e0 > 0 && e1 > 0) ? dot / std::sqrt(e0 * e1) : 0.0;
    }
    double strongest = 0;
    for (std::size_t lag = min_lag; lag <= max_lag; ++lag) strongest = std::max(strongest, r[lag]);
    if (!(strongest > 0)) continue;
    std::size_t best = 0;
    for (std::size_t lag = min_lag; lag <= max_lag && best == 0; ++lag)
      if (r[lag] >= r[lag - 1] && r[lag] > r[lag + 1] && r[lag] >= 0.9 * strongest) best = lag;
    if (best == 0) continue;

    const double a = r[best - 1], b = r[best], c = r[best + 1];
    const double curvature = a - 2 * b + c;
    const double delta = curvature < 0 ? std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5) : 0.0;
    const double peak = std::min(1.0, b - 0.25 * (a - c) * delta);
    const double f0 = fs / (static_cast<double>(best) + delta);
    track.periodicity.back() = peak;
    if (peak >= opt.voicing_threshold && f0 >= opt.f0_min && f0 <= opt.f0_max) {
      track.f0.back() = f0;
      track.voicing.back() = true;
    }
  }
  return track;
}

GlottalCycles find_glottal_cycles(const AudioClip& clip, const F0Track& f0, const PitchOptions& opt) {
  const double fs = clip.sample_rate;
  const auto& s = clip.samples;
  const double half_window = opt.window_seconds / 2;
  GlottalCycles cycles;

  std::size_t f = 0;
  while (f < f0.size()) {
    if (!f0.voicing[f]) {
      ++f;
      continue;
    }
    std::size_t end = f;
    while (end < f0.size() && f0.voicing[end]) ++end;
    // Voiced run [f, end): analyse the span its windows cover.
    const double t0 = std::max(0.0, f0.frame_times[f] - half_window);
    const double t1 = std::min(static_cast<double>(s.size() - 1) / fs, f0.frame_times[end - 1] + half_window);
    const auto i0 = static_cast<std::size_t>(std::ceil(t0 * fs));
    const auto i1 = static_cast<std::size_t>(std::floor(t1 * fs));

    std::vector<double> crossings;
    for (std::size_t i = std::max<std::size_t>(i0, 1); i <= i1 && i < s.size(); ++i)
      if (s[i - 1] < 0 && s[i] >= 0) crossings.push_back((static_cast<double>(i - 1) + s[i - 1] / (s[i - 1] - s[i])) / fs);

    auto local_period = [&](double t) {
      std::size_t nearest = f;
      for (std::size_t g = f; g < end; ++g)
        if (std::abs(f0.frame_times[g] - t) < std::abs(f0.frame_times[nearest] - t)) nearest = g;
      return 1.0 / *f0.f0[nearest];
    };
    auto peak_between = [&](double a, double b) {
      double peak = 0;
      for (auto i = static_cast<std::size_t>(std::ceil(a * fs)); i <= static_cast<std::size_t>(std::floor(b * fs)) && i < s.size(); ++i)
        peak = std::max(peak, std::abs(s[i]));
      return peak;
    };

    std::vector<double> periods, amps;
    std::size_t c = 0;
    while (c < crossings.size()) {
      const double t = crossings[c];
      const double period = local_period(t);
      std::size_t next = 0;
      double best_err = 0.3 * period;
      for (std::size_t j = c + 1; j < crossings.size() && crossings[j] <= t + 1.3 * period; ++j) {
        const double err = std::abs(crossings[j] - t - period);
        if (crossings[j] > t + 0.7 * period && err <= best_err) {
          best_err = err;
          next = j;
        }
      }
      if (next == 0) {
        if (!periods.empty()) {
          cycles.periods.push_back(std::move(periods));
          cycles.amplitudes.push_back(std::move(amps));
          periods.clear();
          amps.clear();
        }
        ++c;
        continue;
      }
      periods.push_back(crossings[next] - t);
      amps.push_back(peak_between(t, crossings[next]));
      c = next;
    }
    if (!periods.empty()) {
      cycles.periods.push_back(std::move(periods));
      cycles.amplitudes.push_back(std::move(amps));
    }
    f = end;
  }
  return cycles;
}

PerturbationQuotients perturbation_quotients(const std::vector<std::vector<double>>& chains) {
  double total = 0, count = 0;
  double local = 0, three = 0, five = 0;
  std::size_t n_local = 0, n_three = 0, n_five = 0;
  for (const auto& c : chains) {
    for (double v : c) {
      total += v;
      ++count;
    }
    for (std::size_t i = 1; i < c.size(); ++i, ++n_local) local += std::abs(c[i] - c[i - 1]);
    for (std::size_t i = 1; i + 1 < c.size(); ++i, ++n_three) three += std::abs(c[i] - (c[i - 1] + c[i] + c[i + 1]) / 3);
    for (std::size_t i = 2; i + 2 < c.size(); ++i, ++n_five)
      five += std::abs(c[i] - (c[i - 2] + c[i - 1] + c[i] + c[i + 1] + c[i + 2]) / 5);
  }
  if (n_five == 0 || !(total > 0)) fail(Errc::InsufficientVoicing, "need a run of at least five glottal cycles");
  const double m = total / count;
  return {local / static_cast<double>(n_local) / m, three / static_cast<double>(n_three) / m, five / static_cast<double>(n_five) / m};
}

std::vector<double> frame_hnr_db(const F0Track& f0) {
  std::vector<double> out;
  for (std::size_t i = 0; i < f0.size(); ++i) {
    if (!f0.voicing[i]) continue;
    const double r = std::clamp(f0.periodicity[i], 1e-6, 1.0 - 1e-9);
    out.push_back(10.0 * std::log10(r / (1.0 - r)));
  }
  return out;
}

PerturbationMeasures perturbation_measures(const AudioClip& clip, const F0Track& f0, const PitchOptions& opt) {
  std::size_t run = 0, longest = 0;
  for (bool v : f0.voicing) {
    run = v ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  if (longest < 3) fail(Errc::InsufficientVoicing, "fewer than three consecutive voiced frames");

  const auto cycles = find_glottal_cycles(clip, f0, opt);
  const auto jitter = perturbation_quotients(cycles.periods);
  const auto shimmer = perturbation_quotients(cycles.amplitudes);
  const auto hnr = frame_hnr_db(f0);

  PerturbationMeasures m;
  m.jitter_local = jitter.local;
  m.jitter_rap = jitter.three_point;
  m.jitter_ppq5 = jitter.five_point;
  m.shimmer_local = shimmer.local;
  m.shimmer_apq3 = shimmer.three_point;
  m.shimmer_apq5 = shimmer.five_point;
  m.hnr_mean = dsp::mean_of(hnr);
  m.hnr_std = dsp::stddev_of(hnr);
  return m;
}

}  // namespace disaudit::acoustics
