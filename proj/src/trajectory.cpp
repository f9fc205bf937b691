#include "f0priv/trajectory.hpp"

#include "f0priv/error.hpp"

#include <cmath>
#include <string>

namespace f0priv {

std::vector<Violation> validate(const F0Trajectory& traj) {
  std::vector<Violation> out;
  if (!(traj.frame_hop > 0.0) || !std::isfinite(traj.frame_hop)) {
    out.push_back({std::nullopt, "frame_hop must be positive and finite"});
  }
  if (traj.size() == 0) {
    out.push_back({std::nullopt, "empty trajectory"});
  }
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    const double v = traj.values[i];
    const std::string at = " at frame " + std::to_string(i);
    if (!std::isfinite(v)) {
      out.push_back({i, "non-finite" + at});
    } else if (v < 0.0) {
      out.push_back({i, "negative value" + at});
    } else if (v > 0.0 && v < kMinVoicedHz) {
      out.push_back({i, "voiced value < 40 Hz" + at});
    }
  }
  return out;
}

Eigen::ArrayXd voiced_values(const F0Trajectory& traj) {
  Eigen::ArrayXd out(traj.voiced_count());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    if (traj.voiced(i)) out[k++] = traj.values[i];
  }
  return out;
}

double voiced_mean(const F0Trajectory& traj) {
  const Eigen::ArrayXd v = voiced_values(traj);
  if (v.size() == 0) {
    throw Error(ErrorKind::kNoVoicedFrames,
                "no voiced frames in '" + traj.recording_id + "'");
  }
  return v.mean();
}

double voiced_std(const F0Trajectory& traj) {
  const Eigen::ArrayXd v = voiced_values(traj);
  if (v.size() == 0) {
    throw Error(ErrorKind::kNoVoicedFrames,
                "no voiced frames in '" + traj.recording_id + "'");
  }
  return std::sqrt((v - v.mean()).square().mean());
}

namespace {

double rise_rate(const F0Trajectory& traj) {
  double sum = 0.0;
  long count = 0;
  for (Eigen::Index i = 1; i < traj.size(); ++i) {
    if (!traj.voiced(i) || !traj.voiced(i - 1)) continue;
    const double d = traj.values[i] - traj.values[i - 1];
    if (d > 0.0) {
      sum += d;
      ++count;
    }
  }
  if (count == 0) return 0.0;
  return (sum / static_cast<double>(count)) / traj.frame_hop;
}

}  // namespace

F0Stats stats(const F0Trajectory& traj) {
  F0Stats s;
  const Eigen::ArrayXd v = voiced_values(traj);
  const auto n = v.size();
  s.voiced_fraction =
      traj.size() > 0 ? static_cast<double>(n) / static_cast<double>(traj.size()) : 0.0;
  if (n < kMinFramesForStats) return s;

  const Eigen::ArrayXd logv = v.log();
  const double mean = logv.mean();
  const Eigen::ArrayXd shifted = logv - logv[0];
  const Eigen::ArrayXd centered = shifted - shifted.mean();
  const double m2 = centered.square().mean();
  const double m3 = centered.cube().mean();
  const double nd = static_cast<double>(n);

  s.voiced_mean_hz = v.mean();
  s.log_f0_mean = mean;
  s.log_f0_var = centered.square().sum() / (nd - 1.0);
  // A contour whose spread is pure rounding noise is reported as unskewed.
  if (m2 <= 1e-24 * std::max(1.0, mean * mean)) {
    s.log_f0_skew = 0.0;
  } else {
    const double g1 = m3 / std::pow(m2, 1.5);
    s.log_f0_skew = g1 * std::sqrt(nd * (nd - 1.0)) / (nd - 2.0);
  }
  s.rise_rate_hz_s = rise_rate(traj);
  return s;
}

namespace {

Eigen::ArrayXd centered_contour(const F0Trajectory& t) {
  const Eigen::ArrayXd v = voiced_values(t);
  const double mean = v.size() > 0 ? v.mean() : 0.0;
  return (t.values != 0.0).select(t.values - mean, 0.0);
}

}  // namespace

AlignmentResult align(const F0Trajectory& a, const F0Trajectory& b, long max_lag) {
  if (a.size() == 0 || b.size() == 0) {
    throw Error(ErrorKind::kEmpty, "align: empty trajectory");
  }
  if (std::abs(a.frame_hop - b.frame_hop) > 1e-12 * std::max(a.frame_hop, b.frame_hop)) {
    throw Error(ErrorKind::kInvalidArgument, "align: frame hops differ");
  }
  if (max_lag < 0) {
    throw Error(ErrorKind::kInvalidArgument, "align: negative max_lag");
  }

  const Eigen::ArrayXd xa = centered_contour(a);
  const Eigen::ArrayXd xb = centered_contour(b);
  const double energy = std::sqrt(xa.square().sum() * xb.square().sum());
  const long na = static_cast<long>(a.size());
  const long nb = static_cast<long>(b.size());

  bool found = false;
  AlignmentResult best;
  // Visit 0, +1, -1, +2, -2, ... so that a strict improvement test prefers
  // the smaller |lag| on ties.
  for (long step = 0; step <= 2 * max_lag; ++step) {
    const long lag = (step % 2 == 1) ? (step + 1) / 2 : -(step / 2);
    const long lo = std::max(0L, -lag);
    const long hi = std::min(na, nb - lag);
    if (hi <= lo) continue;

    double dot = 0.0;
    long both = 0;
    for (long i = lo; i < hi; ++i) {
      dot += xa[i] * xb[i + lag];
      if (a.values[i] != 0.0 && b.values[i + lag] != 0.0) ++both;
    }
    if (both == 0) continue;
    const double corr = energy > 0.0 ? dot / energy : 0.0;
    if (!found || corr > best.correlation + 1e-12) {
      found = true;
      best.lag_frames = lag;
      best.correlation = corr;
    }
  }
  if (!found) {
    throw Error(ErrorKind::kNoOverlap, "align: no overlapping voiced frames at any lag");
  }

  const long lag = best.lag_frames;
  const long lo = std::max(0L, -lag);
  const long hi = std::min(na, nb - lag);
  double sq = 0.0;
  long both = 0;
  long agree = 0;
  for (long i = lo; i < hi; ++i) {
    const bool va = a.values[i] != 0.0;
    const bool vb = b.values[i + lag] != 0.0;
    if (va == vb) ++agree;
    if (va && vb) {
      const double d = a.values[i] - b.values[i + lag];
      sq += d * d;
      ++both;
    }
  }
  best.rmse_voiced_hz = std::sqrt(sq / static_cast<double>(both));
  best.voicing_agreement = static_cast<double>(agree) / static_cast<double>(hi - lo);
  return best;
}

}  // namespace f0priv
