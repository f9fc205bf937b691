#include "f0priv/pitch.hpp"

#include "f0priv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace f0priv {

namespace {

// Peaks within this fraction of the strongest one count as equally good; the
// shortest such lag wins.
constexpr double kOctavePreference = 0.95;

// Frames whose windowed energy falls below this are silence.
constexpr double kSilenceEnergy = 1e-20;

}  // namespace

void PitchConfig::check(int sample_rate) const {
  std::ostringstream why;
  if (!(frame_len > 0.0)) why << "frame_len must be positive; ";
  if (!(frame_hop > 0.0)) why << "frame_hop must be positive; ";
  if (frame_hop > frame_len) why << "frame_hop must not exceed frame_len; ";
  if (!(f_min >= kMinVoicedHz)) why << "f_min must be >= 40 Hz; ";
  if (!(f_min < f_max)) why << "f_min must be below f_max; ";
  if (!(f_max <= sample_rate / 2.0)) why << "f_max must not exceed the Nyquist frequency; ";
  if (!(voicing_threshold > 0.0 && voicing_threshold < 1.0)) {
    why << "voicing_threshold must lie in (0, 1); ";
  }
  const std::string msg = why.str();
  if (!msg.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "pitch config: " + msg.substr(0, msg.size() - 2));
  }
}

F0Trajectory extract_f0(const AudioBuffer& audio, const PitchConfig& cfg,
                        std::string recording_id) {
  cfg.check(audio.sample_rate);
  const double sr = audio.sample_rate;
  const auto frame_len = static_cast<Eigen::Index>(std::lround(cfg.frame_len * sr));
  const Eigen::Index total = audio.samples.size();
  if (frame_len < 4 || total < frame_len) {
    throw Error(ErrorKind::kInvalidArgument, "audio shorter than one analysis frame");
  }

  const Eigen::Index lag_min =
      std::max<Eigen::Index>(2, static_cast<Eigen::Index>(std::floor(sr / cfg.f_max)));
  const Eigen::Index lag_max = std::min<Eigen::Index>(
      static_cast<Eigen::Index>(std::ceil(sr / cfg.f_min)), (2 * frame_len) / 3);
  if (lag_max <= lag_min) {
    throw Error(ErrorKind::kInvalidArgument, "frame_len too short for f_min");
  }

  const Eigen::ArrayXd window =
      0.5 - 0.5 * (2.0 * std::numbers::pi *
                   (Eigen::ArrayXd::LinSpaced(frame_len, 0.5, frame_len - 0.5) / frame_len))
                      .cos();
  // Normalized window autocorrelation for lags [0, lag_max + 1].
  Eigen::ArrayXd window_acf(lag_max + 2);
  for (Eigen::Index lag = 0; lag <= lag_max + 1; ++lag) {
    window_acf[lag] = (window.head(frame_len - lag) * window.segment(lag, frame_len - lag)).sum();
  }
  window_acf /= window_acf[0];

  std::vector<double> values;
  Eigen::ArrayXd nacf(lag_max + 2);
  for (Eigen::Index frame = 0;; ++frame) {
    const auto start = static_cast<Eigen::Index>(
        std::llround(static_cast<double>(frame) * cfg.frame_hop * sr));
    if (start + frame_len > total) break;

    const Eigen::ArrayXd raw = audio.samples.segment(start, frame_len);
    const Eigen::ArrayXd x = (raw - raw.mean()) * window;
    const double energy = x.square().sum();
    if (!(energy > kSilenceEnergy)) {
      values.push_back(0.0);
      continue;
    }
    for (Eigen::Index lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
      const double r = (x.head(frame_len - lag) * x.segment(lag, frame_len - lag)).sum();
      nacf[lag] = (r / energy) / window_acf[lag];
    }

    double strongest = -1.0;
    for (Eigen::Index lag = lag_min; lag <= lag_max; ++lag) {
      if (nacf[lag] >= nacf[lag - 1] && nacf[lag] > nacf[lag + 1]) {
        strongest = std::max(strongest, nacf[lag]);
      }
    }
    if (strongest < cfg.voicing_threshold) {
      values.push_back(0.0);
      continue;
    }
    Eigen::Index best = lag_min;
    for (Eigen::Index lag = lag_min; lag <= lag_max; ++lag) {
      if (nacf[lag] >= nacf[lag - 1] && nacf[lag] > nacf[lag + 1] &&
          nacf[lag] >= kOctavePreference * strongest) {
        best = lag;
        break;
      }
    }

    const double left = nacf[best - 1];
    const double mid = nacf[best];
    const double right = nacf[best + 1];
    const double curvature = left - 2.0 * mid + right;
    double offset = curvature < 0.0 ? 0.5 * (left - right) / curvature : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    const double f0 = sr / (static_cast<double>(best) + offset);
    values.push_back(f0 >= kMinVoicedHz && std::isfinite(f0) ? f0 : 0.0);
  }

  return F0Trajectory(cfg.frame_hop,
                      Eigen::Map<const Eigen::ArrayXd>(values.data(),
                                                       static_cast<Eigen::Index>(values.size())),
                      std::move(recording_id));
}

}  // namespace f0priv
