#include "f0priv/error.hpp"
#include "f0priv/pitch.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace f0priv {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
  return std::memcmp(b.data() + at, tag, 4) == 0;
}

}  // namespace

AudioBuffer parse_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw Error(ErrorKind::kUnsupportedCodec, "not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = le32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      throw Error(ErrorKind::kTruncated, "truncated chunk '" +
                                             std::string(bytes.begin() + pos, bytes.begin() + pos + 4) +
                                             "'");
    }
    if (tag_is(bytes, pos, "fmt ")) {
      if (size < 16) throw Error(ErrorKind::kTruncated, "fmt chunk too short");
      const std::uint8_t* p = bytes.data() + body;
      format = le16(p);
      channels = le16(p + 2);
      rate = le32(p + 4);
      bits = le16(p + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw Error(ErrorKind::kTruncated, "extensible fmt chunk too short");
        format = le16(p + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      data = bytes.subspan(body, size);
      have_data = true;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw Error(ErrorKind::kTruncated, "missing fmt chunk");
  if (!have_data) throw Error(ErrorKind::kTruncated, "missing data chunk");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    throw Error(ErrorKind::kUnsupportedCodec, "unsupported codec (format " +
                                                  std::to_string(format) + ", " +
                                                  std::to_string(bits) + " bits)");
  }
  if (channels != 1 && channels != 2) {
    throw Error(ErrorKind::kUnsupportedCodec,
                "unsupported channel count " + std::to_string(channels));
  }
  if (rate < 8000 || rate > 192000) {
    throw Error(ErrorKind::kUnsupportedCodec, "unsupported sample rate " + std::to_string(rate));
  }

  const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
  const std::size_t frames = data.size() / frame_bytes;
  if (frames == 0) throw Error(ErrorKind::kEmpty, "zero-length data chunk");

  AudioBuffer out;
  out.sample_rate = static_cast<int>(rate);
  out.samples.resize(static_cast<Eigen::Index>(frames));
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* p = data.data() + f * frame_bytes + c * (bits / 8);
      if (pcm16) {
        acc += static_cast<double>(static_cast<std::int16_t>(le16(p))) / 32768.0;
      } else {
        float v;
        const std::uint32_t raw = le32(p);
        std::memcpy(&v, &raw, sizeof v);
        if (!std::isfinite(v)) throw Error(ErrorKind::kParse, "non-finite float sample");
        acc += std::clamp(static_cast<double>(v), -1.0, 1.0);
      }
    }
    out.samples[static_cast<Eigen::Index>(f)] = acc / channels;
  }
  return out;
}

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  try {
    return parse_wav(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace f0priv
