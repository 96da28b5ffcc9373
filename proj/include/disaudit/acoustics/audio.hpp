#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace disaudit::acoustics {

/// Mono signal with amplitudes nominally in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  double sample_rate = 16000;
  std::string source_id;

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

inline constexpr double kDefaultSampleRate = 16000;

/// Decodes a RIFF/WAVE file (PCM 8/16/24/32-bit or 32-bit float, including
/// WAVE_FORMAT_EXTENSIBLE), mean-mixes channels to mono and resamples to
/// target_rate. The source id is the file stem.
AudioClip load_audio(const std::filesystem::path& path, double target_rate = kDefaultSampleRate);

enum class WavEncoding { pcm16, float32 };

/// Writes a mono clip. Multi-channel output is only needed by tests, which
/// pass interleaved samples and a channel count.
void write_wav(const std::filesystem::path& path, const std::vector<double>& interleaved, int channels, double sample_rate,
               WavEncoding encoding = WavEncoding::pcm16);
inline void write_wav(const std::filesystem::path& path, const AudioClip& clip, WavEncoding encoding = WavEncoding::pcm16) {
  write_wav(path, clip.samples, 1, clip.sample_rate, encoding);
}

/// Linear-interpolation resampler. Downsampling first applies a
/// Blackman-windowed sinc low-pass at 0.9x the target Nyquist frequency.
std::vector<double> resample(const std::vector<double>& samples, double from_rate, double to_rate);

}  // namespace disaudit::acoustics
