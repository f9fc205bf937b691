#pragma once

#include "f0priv/trajectory.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

namespace f0priv {

struct AudioBuffer {
  int sample_rate = 16000;
  Eigen::ArrayXd samples;  // normalized to [-1, 1]
};

/// Reads a RIFF/WAVE file holding 16-bit PCM or 32-bit IEEE float samples,
/// mono or stereo (stereo is averaged down to mono). 16-bit samples are scaled
/// by 1/32768. Throws kUnsupportedCodec, kTruncated, kEmpty, or kIo.
AudioBuffer read_wav(const std::filesystem::path& path);
AudioBuffer parse_wav(std::span<const std::uint8_t> bytes);

struct PitchConfig {
  double frame_len = 0.025;  // seconds
  double frame_hop = 0.010;  // seconds
  double f_min = 60.0;       // Hz
  double f_max = 400.0;      // Hz
  double voicing_threshold = 0.45;

  /// Throws kInvalidArgument when the configuration cannot be used at
  /// `sample_rate`.
  void check(int sample_rate) const;
};

/// Frame-wise autocorrelation pitch tracker.
///
/// Each frame is DC-removed and Hann-windowed; its autocorrelation is
/// normalized by the lag-0 value and divided by the normalized
/// autocorrelation of the window itself, which undoes the taper bias. The
/// strongest peak over lags [sr / f_max, sr / f_min] is taken, preferring the
/// shortest lag whose peak is within 5% of the maximum to avoid sub-octave
/// picks. A peak at or above `voicing_threshold` marks the frame voiced, with
/// F0 = sr / lag refined by parabolic interpolation; otherwise the frame is 0.
/// Frame i starts at sample round(i * frame_hop * sr).
F0Trajectory extract_f0(const AudioBuffer& audio, const PitchConfig& cfg,
                        std::string recording_id = {});

}  // namespace f0priv
