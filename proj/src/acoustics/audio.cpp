#include "disaudit/acoustics/audio.hpp"

#include "disaudit/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>

namespace disaudit::acoustics {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t le16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

double decode_sample(const std::uint8_t* p, std::uint16_t format, std::uint16_t bits) {
  if (format == kFormatFloat) {
    const std::uint32_t raw = le32(p);
    return static_cast<double>(std::bit_cast<float>(raw));
  }
  switch (bits) {
    case 8: return (static_cast<double>(p[0]) - 128.0) / 128.0;
    case 16: return static_cast<double>(static_cast<std::int16_t>(le16(p))) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<double>(v) / 8388608.0;
    }
    case 32: return static_cast<double>(static_cast<std::int32_t>(le32(p))) / 2147483648.0;
    default: return 0;
  }
}

void put16(std::ofstream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}
void put32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff), static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>(v >> 24)};
  out.write(b, 4);
}

}  // namespace

AudioClip load_audio(const std::filesystem::path& path, double target_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::UnreadableFile, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    fail(Errc::UnreadableFile, path.string() + " is not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;
  bool have_fmt = false;
  for (std::size_t pos = 12; pos + 8 <= bytes.size();) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::size_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) fail(Errc::UnreadableFile, path.string() + ": truncated fmt chunk");
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = le32(chunk + 12);
      bits = le16(chunk + 22);
      if (format == kFormatExtensible) {
        if (avail < 26) fail(Errc::UnreadableFile, path.string() + ": truncated extensible fmt chunk");
        format = le16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = avail;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || data == nullptr) fail(Errc::UnreadableFile, path.string() + ": missing fmt or data chunk");
  const bool pcm_ok = format == kFormatPcm && (bits == 8 || bits == 16 || bits == 24 || bits == 32);
  const bool float_ok = format == kFormatFloat && bits == 32;
  if (!pcm_ok && !float_ok)
    fail(Errc::UnsupportedEncoding, path.string() + ": format " + std::to_string(format) + " with " + std::to_string(bits) + " bits");
  if (channels == 0 || rate == 0) fail(Errc::UnreadableFile, path.string() + ": zero channels or sample rate");

  const std::size_t frame_bytes = static_cast<std::size_t>(bits / 8) * channels;
  const std::size_t frames = data_size / frame_bytes;
  if (frames == 0) fail(Errc::EmptyAudio, path.string() + " has no samples");

  AudioClip clip;
  clip.source_id = path.stem().string();
  clip.samples.resize(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0;
    for (std::uint16_t c = 0; c < channels; ++c) acc += decode_sample(data + f * frame_bytes + c * (bits / 8), format, bits);
    clip.samples[f] = acc / channels;
  }
  clip.sample_rate = static_cast<double>(rate);
  if (target_rate > 0 && target_rate != clip.sample_rate) {
    clip.samples = resample(clip.samples, clip.sample_rate, target_rate);
    clip.sample_rate = target_rate;
  }
  return clip;
}

void write_wav(const std::filesystem::path& path, const std::vector<double>& interleaved, int channels, double sample_rate,
               WavEncoding encoding) {
  if (channels < 1 || interleaved.size() % static_cast<std::size_t>(channels) != 0)
    fail(Errc::InvalidParams, "write_wav: sample count is not a multiple of the channel count");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoFailure, "cannot write " + path.string());
  const std::uint16_t bits = encoding == WavEncoding::pcm16 ? 16 : 32;
  const std::uint16_t fmt = encoding == WavEncoding::pcm16 ? kFormatPcm : kFormatFloat;
  const auto rate = static_cast<std::uint32_t>(std::lround(sample_rate));
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(interleaved.size() * (bits / 8));
  out.write("RIFF", 4);
  put32(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  put32(out, 16);
  put16(out, fmt);
  put16(out, static_cast<std::uint16_t>(channels));
  put32(out, rate);
  put32(out, rate * channels * (bits / 8));
  put16(out, static_cast<std::uint16_t>(channels * (bits / 8)));
  put16(out, bits);
  out.write("data", 4);
  put32(out, data_bytes);
  for (double v : interleaved) {
    if (encoding == WavEncoding::pcm16) {
      const double clamped = std::clamp(v, -1.0, 32767.0 / 32768.0);
      put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::lround(clamped * 32768.0))));
    } else {
      put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  if (!out) fail(Errc::IoFailure, "short write to " + path.string());
}

std::vector<double> resample(const std::vector<double>& samples, double from_rate, double to_rate) {
  if (!(from_rate > 0) || !(to_rate > 0)) fail(Errc::InvalidParams, "resample: rates must be positive");
  if (from_rate == to_rate || samples.empty()) return samples;
  const double ratio = to_rate / from_rate;
  std::vector<double> src = samples;
  if (ratio < 1) {
    const double cutoff = 0.45 * ratio;  // cycles per input sample
    const int half = static_cast<int>(std::ceil(10.0 / ratio));
    std::vector<double> taps(2 * half + 1);
    double sum = 0;
    for (int i = -half; i <= half; ++i) {
      const double sinc = i == 0 ? 2 * cutoff : std::sin(2 * std::numbers::pi * cutoff * i) / (std::numbers::pi * i);
      const double t = static_cast<double>(i + half) / (2 * half);
      const double w = 0.42 - 0.5 * std::cos(2 * std::numbers::pi * t) + 0.08 * std::cos(4 * std::numbers::pi * t);
      taps[i + half] = sinc * w;
      sum += taps[i + half];
    }
    for (double& t : taps) t /= sum;
    const auto n = static_cast<std::ptrdiff_t>(samples.size());
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      double acc = 0;
      for (int i = -half; i <= half; ++i) {
        const std::ptrdiff_t j = k - i;
        if (j >= 0 && j < n) acc += taps[i + half] * samples[j];
      }
      src[k] = acc;
    }
  }
  const auto out_len = static_cast<std::size_t>(std::llround(static_cast<double>(samples.size()) * ratio));
  std::vector<double> out(std::max<std::size_t>(out_len, 1));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double pos = static_cast<double>(k) / ratio;
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    const double a = src[std::min(i, src.size() - 1)];
    const double b = src[std::min(i + 1, src.size() - 1)];
    out[k] = a + frac * (b - a);
  }
  return out;
}

}  // namespace disaudit::acoustics
