#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace f0priv {

/// Lowest pitch value treated as voiced. Anything in (0, 40) or negative is
/// physically implausible and gets forced to unvoiced by the post rules.
inline constexpr double kMinVoicedHz = 40.0;

/// Uniformly sampled pitch contour. A value of exactly 0.0 marks an unvoiced
/// frame; voiced frames carry the pitch in Hz.
struct F0Trajectory {
  double frame_hop = 0.01;  // seconds per frame
  Eigen::ArrayXd values;
  std::string recording_id;

  F0Trajectory() = default;
  F0Trajectory(double hop, Eigen::ArrayXd v, std::string id = {})
      : frame_hop(hop), values(std::move(v)), recording_id(std::move(id)) {}

  Eigen::Index size() const { return values.size(); }
  bool voiced(Eigen::Index i) const { return values[i] != 0.0; }
  double time(Eigen::Index i) const { return static_cast<double>(i) * frame_hop; }

  /// true where the frame is voiced
  Eigen::Array<bool, Eigen::Dynamic, 1> voicing_mask() const { return values != 0.0; }
  Eigen::Index voiced_count() const { return (values != 0.0).count(); }
};

using VoicingMask = Eigen::Array<bool, Eigen::Dynamic, 1>;

struct Violation {
  std::optional<Eigen::Index> frame;
  std::string message;
};

/// Lists every invariant violation; an empty result means the trajectory is
/// valid. Never throws.
std::vector<Violation> validate(const F0Trajectory& traj);

/// Arithmetic mean of the voiced frames. Throws kNoVoicedFrames.
double voiced_mean(const F0Trajectory& traj);

/// Population standard deviation of the voiced frames in Hz.
double voiced_std(const F0Trajectory& traj);

/// Voiced values in frame order.
Eigen::ArrayXd voiced_values(const F0Trajectory& traj);

/// Speaker-identifying statistics of a single recording. Fields other than
/// `voiced_fraction` are absent when the recording has fewer than three voiced
/// frames.
///
/// Conventions: `log_f0_var` is the unbiased (n - 1) sample variance of ln F0;
/// `log_f0_skew` is the adjusted Fisher-Pearson coefficient
/// G1 = g1 * sqrt(n (n - 1)) / (n - 2), defined as 0 for a constant contour;
/// `rise_rate_hz_s` is the mean of the strictly positive frame-to-frame
/// differences inside contiguous voiced runs, divided by the frame hop
/// (0 when there are no rises).
struct F0Stats {
  std::optional<double> voiced_mean_hz;
  std::optional<double> log_f0_mean;
  std::optional<double> log_f0_var;
  std::optional<double> log_f0_skew;
  std::optional<double> rise_rate_hz_s;
  double voiced_fraction = 0.0;

  bool complete() const {
    return voiced_mean_hz && log_f0_mean && log_f0_var && log_f0_skew && rise_rate_hz_s;
  }
};

inline constexpr Eigen::Index kMinFramesForStats = 3;

F0Stats stats(const F0Trajectory& traj);

struct AlignmentResult {
  long lag_frames = 0;  // b[i + lag] corresponds to a[i]
  double correlation = 0.0;
  double rmse_voiced_hz = 0.0;
  double voicing_agreement = 0.0;
};

/// Finds the delay of `b` relative to `a` within +-max_lag frames.
///
/// Each contour is mean-subtracted over its voiced frames with unvoiced frames
/// contributing zero; the lag maximizing the cross-correlation normalized by
/// the full energies of both contours wins. Ties go to the smaller |lag|.
/// Only lags with at least one frame voiced in both are candidates.
AlignmentResult align(const F0Trajectory& a, const F0Trajectory& b, long max_lag);

}  // namespace f0priv
