#include "disaudit/acoustics/audio.hpp"
#include "disaudit/acoustics/features.hpp"
#include "disaudit/acoustics/formants.hpp"
#include "disaudit/acoustics/pitch.hpp"
#include "disaudit/acoustics/spectral.hpp"
#include "disaudit/error.hpp"
#include "disaudit/synth/synth.hpp"

#include <unsupported/Eigen/FFT>

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace disaudit;
using namespace disaudit::acoustics;
namespace fs = std::filesystem;

namespace {

Errc error_code(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::ParseError;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "disaudit_test_acoustics";
  fs::create_directories(dir);
  return dir / name;
}

AudioClip signal(synth::SignalKind kind, synth::SignalParams p = {}, std::uint64_t seed = 1) {
  return synth::generate_signal(kind, p, seed).clip;
}

AudioClip sine(double hz, double seconds = 1.0, double amp = 0.5) {
  synth::SignalParams p;
  p.frequency = hz;
  p.duration = seconds;
  p.amplitude = amp;
  return signal(synth::SignalKind::sine, p);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

double column_mean(const Eigen::MatrixXd& m, int c) { return m.col(c).mean(); }

}  // namespace

TEST_CASE("WAV round trip and channel mixing") {
  const auto clip = sine(300, 0.2);
  const auto p16 = scratch("pcm16.wav");
  write_wav(p16, clip);
  const auto back = load_audio(p16);
  REQUIRE(back.samples.size() == clip.samples.size());
  double err = 0;
  for (std::size_t i = 0; i < clip.samples.size(); ++i) err = std::max(err, std::abs(back.samples[i] - clip.samples[i]));
  CHECK(err < 1.0 / 32767);
  CHECK(back.source_id == "pcm16");

  const auto pf = scratch("float.wav");
  write_wav(pf, clip, WavEncoding::float32);
  const auto f = load_audio(pf);
  for (std::size_t i = 0; i < clip.samples.size(); i += 97) CHECK(f.samples[i] == doctest::Approx(clip.samples[i]).epsilon(1e-6));

  std::vector<double> stereo;
  for (int i = 0; i < 1600; ++i) {
    stereo.push_back(0.5);
    stereo.push_back(-0.25);
  }
  const auto ps = scratch("stereo.wav");
  write_wav(ps, stereo, 2, 16000, WavEncoding::float32);
  const auto mixed = load_audio(ps);
  CHECK(mixed.samples.size() == 1600);
  CHECK(mixed.samples[100] == doctest::Approx(0.125));
}

TEST_CASE("resampling keeps a tone at its frequency") {
  synth::SignalParams p;
  p.frequency = 440;
  p.sample_rate = 48000;
  const auto path = scratch("tone48k.wav");
  write_wav(path, signal(synth::SignalKind::sine, p));
  const auto clip = load_audio(path, 16000);
  CHECK(clip.sample_rate == 16000);
  CHECK(clip.samples.size() == 16000);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, clip.samples);
  std::size_t best = 1;
  for (std::size_t k = 1; k < spec.size() / 2; ++k)
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  const double hz = static_cast<double>(best) * 16000.0 / static_cast<double>(spec.size());
  CHECK(std::abs(hz - 440) <= 2);
}

TEST_CASE("decoder errors") {
  CHECK(error_code([] { load_audio(scratch("does_not_exist.wav")); }) == Errc::UnreadableFile);
  const auto junk = scratch("junk.wav");
  std::ofstream(junk) << "this is not a wave file at all";
  CHECK(error_code([&] { load_audio(junk); }) == Errc::UnreadableFile);
  const auto empty = scratch("empty.wav");
  write_wav(empty, std::vector<double>{}, 1, 16000);
  CHECK(error_code([&] { load_audio(empty); }) == Errc::EmptyAudio);

  // A-law (format tag 6) is well-formed RIFF but unsupported.
  auto bytes = [](std::ofstream& o, std::uint32_t v, int n) {
    for (int i = 0; i < n; ++i) o.put(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  const auto alaw = scratch("alaw.wav");
  {
    std::ofstream o(alaw, std::ios::binary);
    o << "RIFF";
    bytes(o, 4 + 24 + 8 + 4, 4);
    o << "WAVEfmt ";
    bytes(o, 16, 4);
    bytes(o, 6, 2);
    bytes(o, 1, 2);
    bytes(o, 8000, 4);
    bytes(o, 8000, 4);
    bytes(o, 1, 2);
    bytes(o, 8, 2);
    o << "data";
    bytes(o, 4, 4);
    bytes(o, 0x55555555, 4);
  }
  CHECK(error_code([&] { load_audio(alaw); }) == Errc::UnsupportedEncoding);
}

TEST_CASE("F0 of a pure tone") {
  const auto track = estimate_f0(sine(220));
  CHECK(track.size() > 90);
  CHECK(track.voiced_fraction() == 1.0);
  const double m = median(track.voiced_f0());
  CHECK(m >= 218);
  CHECK(m <= 222);
  const auto noise = estimate_f0(signal(synth::SignalKind::noise));
  CHECK(noise.voiced_fraction() < 0.2);
}

TEST_CASE("perturbation of a clean tone") {
  const auto clip = sine(220);
  const auto p = perturbation_measures(clip, estimate_f0(clip));
  CHECK(p.jitter_local < 0.002);
  CHECK(p.shimmer_local < 0.01);
  CHECK(p.hnr_mean > 30);
  CHECK(error_code([] {
    const auto s = signal(synth::SignalKind::silence);
    perturbation_measures(s, estimate_f0(s));
  }) == Errc::InsufficientVoicing);
}

TEST_CASE("jitter tracks the recorded period sequence") {
  synth::SignalParams p;
  p.frequency = 200;
  p.jitter = 0.05;
  p.jitter_mode = synth::JitterMode::random_sign;
  const auto sig = synth::generate_signal(synth::SignalKind::jittered_sine, p, 3);
  const auto m = perturbation_measures(sig.clip, estimate_f0(sig.clip));
  CHECK(m.jitter_local >= 0.03);
  CHECK(m.jitter_local <= 0.07);

  p.jitter = 0.03;
  p.jitter_mode = synth::JitterMode::gaussian;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto g = synth::generate_signal(synth::SignalKind::jittered_sine, p, seed);
    const double truth = g.truth.jitter_local();
    const auto measured = perturbation_measures(g.clip, estimate_f0(g.clip)).jitter_local;
    CHECK(std::abs(measured - truth) / truth < 0.2);
  }
}

TEST_CASE("perturbation quotients against the formulas") {
  const std::vector<std::vector<double>> chains{{1, 2, 1, 2, 1, 2}};
  const auto q = perturbation_quotients(chains);
  CHECK(q.local == doctest::Approx(1.0 / 1.5));
  // Three-point: |x_i - mean(x_{i-1..i+1})| alternates 2/3 and 2/3.
  CHECK(q.three_point == doctest::Approx((2.0 / 3) / 1.5));
  // Five-point: windows 1,2,1,2,1 and 2,1,2,1,2 leave |1 - 1.4| and |2 - 1.6|.
  CHECK(q.five_point == doctest::Approx(0.4 / 1.5));
}

TEST_CASE("perturbation measures are invariant to gain and short lead-in") {
  synth::SignalParams p;
  p.frequency = 180;
  p.jitter = 0.02;
  const auto base = synth::generate_signal(synth::SignalKind::jittered_sine, p, 9).clip;
  AudioClip louder = base;
  for (auto& s : louder.samples) s *= 1.7;
  const auto a = perturbation_measures(base, estimate_f0(base));
  const auto b = perturbation_measures(louder, estimate_f0(louder));
  CHECK(b.jitter_local == doctest::Approx(a.jitter_local).epsilon(1e-9));
  CHECK(b.shimmer_local == doctest::Approx(a.shimmer_local).epsilon(1e-9));

  AudioClip shifted = base;
  shifted.samples.insert(shifted.samples.begin(), 80, 0.0);  // 5 ms
  const auto c = perturbation_measures(shifted, estimate_f0(shifted));
  CHECK(std::abs(c.jitter_local - a.jitter_local) / a.jitter_local < 0.01);
  CHECK(std::abs(c.hnr_mean - a.hnr_mean) / a.hnr_mean < 0.01);

  synth::SignalParams v;
  v.frequency = 130;
  const auto vowel = signal(synth::SignalKind::pulse_train_filtered, v);
  AudioClip vowel_shifted = vowel;
  vowel_shifted.samples.insert(vowel_shifted.samples.begin(), 80, 0.0);
  const auto m1 = mfcc_features(vowel), m2 = mfcc_features(vowel_shifted);
  for (int c_ = 0; c_ < 13; ++c_) {
    const double x = column_mean(m1.mfcc, c_), y = column_mean(m2.mfcc, c_);
    if (std::abs(x) > 1.0) CHECK(std::abs(x - y) / std::abs(x) < 0.01);
  }
}

TEST_CASE("formants of a three-resonance source") {
  synth::SignalParams p;
  p.frequency = 120;
  const auto sig = synth::generate_signal(synth::SignalKind::pulse_train_filtered, p, 1);
  const auto track = estimate_formants(sig.clip);
  REQUIRE(track.present() > track.frames.size() / 2);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(median(track.values(k)) - sig.truth.pole_frequencies[k]) <= 50);
  const auto dyn = pathology_dynamics(track);
  CHECK(dyn.cv_f2 < 0.05);
  CHECK(error_code([] { pathology_dynamics(FormantTrack{}); }) == Errc::InsufficientFrames);
}

TEST_CASE("Burg LPC recovers an AR(2) process") {
  // x_t = 1.2 x_{t-1} - 0.5 x_{t-2} + e_t, so A(z) = 1 - 1.2 z^-1 + 0.5 z^-2.
  std::mt19937_64 rng(1);
  std::normal_distribution<double> e;
  std::vector<double> x(20000, 0.0);
  for (std::size_t t = 2; t < x.size(); ++t) x[t] = 1.2 * x[t - 1] - 0.5 * x[t - 2] + e(rng);
  const auto a = burg_lpc(x, 2);
  CHECK(a[0] == doctest::Approx(-1.2).epsilon(0.02));
  CHECK(a[1] == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("MFCC and deltas") {
  const auto clip = sine(440);
  const auto m = mfcc_features(clip);
  CHECK(m.mfcc.cols() == 13);
  CHECK(m.mfcc.rows() == 98);  // 1 + (16000 - 400) / 160
  CHECK(m.delta.rows() == m.mfcc.rows());
  CHECK(m.delta2.rows() == m.mfcc.rows());

  const Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(10, 3, 2.5);
  CHECK(delta_features(flat).isZero());
  Eigen::MatrixXd ramp(10, 1);
  for (int i = 0; i < 10; ++i) ramp(i, 0) = 3.0 * i;
  const auto d = delta_features(ramp);
  for (int i = 2; i < 8; ++i) CHECK(d(i, 0) == doctest::Approx(3.0));
  // Edge replication: frame 0 sees c_{-1} = c_{-2} = c_0.
  CHECK(d(0, 0) == doctest::Approx((1 * (3.0 - 0.0) + 2 * (6.0 - 0.0)) / 10.0));

  AudioClip tiny;
  tiny.samples.assign(100, 0.1);
  CHECK(error_code([&] { mfcc_features(tiny); }) == Errc::ClipTooShort);
}

TEST_CASE("spectral statistics of a tone and of silence") {
  const auto s = spectral_energy_stats(sine(1000));
  CHECK(s.centroid_mean >= 950);
  CHECK(s.centroid_mean <= 1050);
  CHECK(s.rms_mean == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(0.02));
  for (Eigen::Index i = 1; i < s.flux.size(); ++i) CHECK(s.flux[i] < 1e-6 * s.rms_max * 512);

  const auto z = spectral_energy_stats(signal(synth::SignalKind::silence));
  CHECK(z.silent_frames == static_cast<std::size_t>(z.rms.size()));
  CHECK(z.centroid_mean == 0.0);
  CHECK(z.rolloff_mean == 0.0);
}

TEST_CASE("tempo of a click train") {
  synth::SignalParams p;
  p.frequency = 2;
  p.duration = 8;
  p.pole_frequencies.clear();
  const auto clicks = signal(synth::SignalKind::pulse_train_filtered, p);
  const auto r = rhythm_features(clicks);
  CHECK_FALSE(r.tempo_flagged);
  CHECK(r.tempo >= 114);
  CHECK(r.tempo <= 126);
  CHECK(r.duration == doctest::Approx(8.0));
  CHECK(rhythm_features(signal(synth::SignalKind::silence)).tempo_flagged);
}

TEST_CASE("default schemas and the schema text format") {
  CHECK(default_schema(DimensionTag::emotional).size() == 28);
  CHECK(default_schema(DimensionTag::linguistic).size() == 33);
  CHECK(default_schema(DimensionTag::pathological).size() == 16);
  for (auto tag : kAllDimensions) {
    const auto s = default_schema(tag);
    const auto parsed = FeatureSchema::parse(s.to_text());
    CHECK(parsed == s);
    CHECK(parsed.fingerprint() == s.fingerprint());
    CHECK(s.fingerprint().size() == 16);
  }
  CHECK(default_schema(DimensionTag::emotional).fingerprint() != default_schema(DimensionTag::pathological).fingerprint());

  const auto custom = FeatureSchema::parse("# comment\ndimension pathological\npitch_sd f0 std  # trailing\njit jitter_local value\n");
  CHECK(custom.size() == 2);
  CHECK(custom.tag == DimensionTag::pathological);
  CHECK(custom.entries[0] == SchemaEntry{"pitch_sd", "f0", Aggregation::std});

  CHECK(error_code([] { FeatureSchema::parse("a f0 mean\n"); }) == Errc::ParseError);
  CHECK(error_code([] { FeatureSchema::parse("dimension emotional\na nope mean\n"); }) == Errc::ParseError);
  CHECK(error_code([] { FeatureSchema::parse("dimension emotional\na f0 value\n"); }) == Errc::ParseError);
  CHECK(error_code([] { FeatureSchema::parse("dimension emotional\na tempo mean\n"); }) == Errc::ParseError);
  CHECK(error_code([] { FeatureSchema::parse("dimension emotional\na f0 mean\na f0 std\n"); }) == Errc::ParseError);
  CHECK(load_schema("linguistic") == default_schema(DimensionTag::linguistic));
}

TEST_CASE("feature assembly on voiced and silent clips") {
  synth::SignalParams p;
  p.frequency = 150;
  p.duration = 1.5;
  auto vowel = signal(synth::SignalKind::pulse_train_filtered, p);
  vowel.source_id = "vowel";
  for (auto tag : kAllDimensions) {
    const auto schema = default_schema(tag);
    const auto v = assemble_features(vowel, schema);
    CHECK(v.values.size() == schema.size());
    for (double x : v.values) CHECK(std::isfinite(x));
  }
  const auto emo = assemble_features(vowel, default_schema(DimensionTag::emotional));
  CHECK(emo.values[0] == doctest::Approx(150).epsilon(0.02));  // f0_mean

  auto quiet = signal(synth::SignalKind::silence);
  quiet.source_id = "quiet";
  const auto s = assemble_features(quiet, default_schema(DimensionTag::pathological));
  CHECK(s.missing_count() > 0);
  CHECK(s.warnings.size() == s.missing_count());
  AudioClip nothing;
  CHECK(error_code([&] { assemble_features(nothing, default_schema(DimensionTag::emotional)); }) == Errc::EmptyAudio);
}

TEST_CASE("feature CSV round trip and imputation") {
  const auto schema = FeatureSchema::parse("dimension linguistic\na duration value\nb tempo value\n");
  std::vector<FeatureVector> rows(3);
  rows[0] = {"x,1", {0.1, 1e-300}, {false, false}, {}};
  rows[1] = {"y", {2.0 / 3.0, 0}, {false, true}, {}};
  rows[2] = {"z", {-5, 7}, {false, false}, {}};
  const auto path = scratch("features.csv");
  write_feature_csv(path, schema, rows);
  const auto t = read_feature_csv(path);
  CHECK(t.column_names == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].source_id == "x,1");
  CHECK(t.rows[0].values == rows[0].values);
  CHECK(t.rows[1].values[0] == 2.0 / 3.0);
  CHECK(t.rows[1].missing == std::vector<bool>{false, true});

  std::size_t imputed = 0;
  const auto m = to_feature_matrix(t.rows, t.column_names, DimensionTag::linguistic, &imputed);
  CHECK(imputed == 1);
  CHECK(m.values(1, 1) == doctest::Approx((1e-300 + 7) / 2));
  CHECK(m.sample_ids == std::vector<std::string>{"x,1", "y", "z"});

  const auto bad = scratch("bad.csv");
  std::ofstream(bad) << "source_id,a\nr1,abc\n";
  CHECK(error_code([&] { read_feature_csv(bad); }) == Errc::ParseError);
  CHECK(error_code([&] { read_feature_csv(scratch("missing.csv")); }) == Errc::MissingInput);
}
