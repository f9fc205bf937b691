#include "f0priv/modifiers.hpp"

#include "f0priv/error.hpp"
#include "f0priv/spline.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace f0priv {

namespace {

constexpr std::array<std::pair<ModifierKind, std::string_view>, 9> kKindNames{{
    {ModifierKind::kVoicedFlat, "voiced-flat"},
    {ModifierKind::kAllFlat, "all-flat"},
    {ModifierKind::kSmoothingSpline, "smoothing-spline"},
    {ModifierKind::kModulatedSame1, "modulated-same-1"},
    {ModifierKind::kModulatedSame2, "modulated-same-2"},
    {ModifierKind::kModulatedDifferent, "modulated-different"},
    {ModifierKind::kRandomWalkWeak, "random-walk-weak"},
    {ModifierKind::kRandomWalkStrong, "random-walk-strong"},
    {ModifierKind::kShiftAndScale, "shift-and-scale"},
}};

void require_voiced(const F0Trajectory& traj, Eigen::Index needed, const char* what) {
  if (traj.voiced_count() < needed) {
    throw Error(needed <= 1 ? ErrorKind::kNoVoicedFrames : ErrorKind::kInvalidArgument,
                std::string(what) + ": needs at least " + std::to_string(needed) +
                    " voiced frame(s) in '" + traj.recording_id + "'");
  }
}

}  // namespace

std::string_view to_string(ModifierKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<ModifierKind> parse_modifier_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Role role) {
  return role == Role::kEnrollment ? "enrollment" : "trial";
}

std::optional<Role> parse_role(std::string_view name) {
  if (name == "enrollment") return Role::kEnrollment;
  if (name == "trial") return Role::kTrial;
  return std::nullopt;
}

bool is_random_walk(ModifierKind kind) {
  return kind == ModifierKind::kRandomWalkWeak || kind == ModifierKind::kRandomWalkStrong;
}

bool is_modulation(ModifierKind kind) {
  return kind == ModifierKind::kModulatedSame1 || kind == ModifierKind::kModulatedSame2 ||
         kind == ModifierKind::kModulatedDifferent;
}

void ModifierSpec::check() const {
  const std::string name(to_string(kind));
  if (kind == ModifierKind::kModulatedDifferent && !role) {
    throw Error(ErrorKind::kInvalidArgument, name + " requires a role (enrollment or trial)");
  }
  if (is_random_walk(kind) && !seed) {
    throw Error(ErrorKind::kInvalidArgument, name + " requires a seed");
  }
  if (kind == ModifierKind::kShiftAndScale) {
    if (!target_mean_hz || !target_std_hz) {
      throw Error(ErrorKind::kInvalidArgument, name + " requires target mean and std");
    }
    if (!(*target_mean_hz > 0.0) || !(*target_std_hz > 0.0)) {
      throw Error(ErrorKind::kInvalidArgument, name + " targets must be positive");
    }
  }
  if (frequencies) {
    if (!is_modulation(kind) || kind == ModifierKind::kModulatedDifferent) {
      throw Error(ErrorKind::kInvalidArgument,
                  "carrier frequencies only apply to modulated-same-* kinds");
    }
    if (!(frequencies->f1 > 0.0) || !(frequencies->f2 > 0.0) ||
        frequencies->f1 == frequencies->f2) {
      throw Error(ErrorKind::kInvalidArgument,
                  "carrier frequencies must be positive and distinct");
    }
  }
}

ModulationPair ModifierSpec::modulation_pair() const {
  switch (kind) {
    case ModifierKind::kModulatedSame1: return frequencies.value_or(kSame1Pair);
    case ModifierKind::kModulatedSame2: return frequencies.value_or(kSame2Pair);
    case ModifierKind::kModulatedDifferent:
      return role.value_or(Role::kTrial) == Role::kEnrollment ? kEnrollmentPair : kTrialPair;
    default: return kSame1Pair;
  }
}

F0Trajectory post_rules(const F0Trajectory& modified, const VoicingMask& pre_mask) {
  if (pre_mask.size() != modified.size()) {
    throw Error(ErrorKind::kInvalidArgument, "post_rules: mask length differs");
  }
  F0Trajectory out = modified;
  out.values = (pre_mask && (modified.values >= kMinVoicedHz)).select(modified.values, 0.0);
  return out;
}

F0Trajectory post_rules(const F0Trajectory& modified) {
  return post_rules(modified, modified.voicing_mask());
}

F0Trajectory voiced_flat(const F0Trajectory& traj) {
  const double mean = voiced_mean(traj);
  F0Trajectory out = traj;
  out.values = traj.voicing_mask().select(Eigen::ArrayXd::Constant(traj.size(), mean), 0.0);
  return post_rules(out, traj.voicing_mask());
}

F0Trajectory all_flat(const F0Trajectory& traj) {
  F0Trajectory out = traj;
  out.values.setConstant(voiced_mean(traj));
  return out;
}

double modulation_factor(double t, const ModulationPair& pair) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double c1 = std::sin(kTwoPi * pair.f1 * t);
  const double c2 = std::sin(kTwoPi * pair.f2 * t + std::numbers::pi / 2.0);
  return (4.0 + 2.0 * c1 + 2.0 * c2 + c1 * c2) / 4.0;
}

F0Trajectory modulate(const F0Trajectory& traj, const ModulationPair& pair) {
  if (!(pair.f1 > 0.0) || !(pair.f2 > 0.0) || pair.f1 == pair.f2) {
    throw Error(ErrorKind::kInvalidArgument, "modulate: frequencies must be positive and distinct");
  }
  const double mean = voiced_mean(traj);
  F0Trajectory out = traj;
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    const double centered = traj.values[i] - mean;
    out.values[i] = mean + centered * modulation_factor(traj.time(i), pair);
  }
  return post_rules(out, traj.voicing_mask());
}

F0Trajectory random_walk_modulate(const F0Trajectory& traj, int strength,
                                  const WalkNoise& walk) {
  if (strength != 1 && strength != 2) {
    throw Error(ErrorKind::kInvalidArgument, "random walk strength must be 1 or 2");
  }
  if (walk.values.size() != traj.size()) {
    throw Error(ErrorKind::kInvalidArgument, "random walk length differs from trajectory");
  }
  F0Trajectory out = traj;
  out.values = traj.values * (2.0 + strength * walk.values) / 2.0;
  return post_rules(out, traj.voicing_mask());
}

F0Trajectory random_walk_modulate(const F0Trajectory& traj, int strength,
                                  std::uint64_t user_seed) {
  return random_walk_modulate(
      traj, strength, generate_walk(traj.size(), recording_seed(user_seed, traj.recording_id)));
}

F0Trajectory smoothing_spline_modifier(const F0Trajectory& traj) {
  require_voiced(traj, 4, "smoothing-spline");
  const Eigen::Index n = traj.voiced_count();
  Eigen::VectorXd times(n);
  Eigen::VectorXd values(n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    if (!traj.voiced(i)) continue;
    times[k] = traj.time(i);
    values[k] = traj.values[i];
    ++k;
  }
  const SplineModel<double> model = fit_smoothing_spline<double>(times, values);
  F0Trajectory out = traj;
  k = 0;
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    if (traj.voiced(i)) out.values[i] = model.fitted[k++];
  }
  return post_rules(out, traj.voicing_mask());
}

F0Trajectory shift_and_scale(const F0Trajectory& traj, double target_mean_hz,
                             double target_std_hz) {
  require_voiced(traj, 2, "shift-and-scale");
  if (!(target_mean_hz > 0.0) || !(target_std_hz > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "shift-and-scale: targets must be positive");
  }
  const double mean = voiced_mean(traj);
  const double std_dev = voiced_std(traj);
  if (!(std_dev > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument,
                "shift-and-scale: zero source std in '" + traj.recording_id + "'");
  }
  F0Trajectory out = traj;
  const double gain = target_std_hz / std_dev;
  out.values = traj.voicing_mask().select(gain * (traj.values - mean) + target_mean_hz, 0.0);
  return out;
}

F0Trajectory invert_shift_and_scale(const F0Trajectory& modified, double source_mean_hz,
                                    double source_std_hz) {
  return shift_and_scale(modified, source_mean_hz, source_std_hz);
}

F0Trajectory best_affine_inverse(const F0Trajectory& modified, const F0Trajectory& original) {
  if (modified.size() != original.size()) {
    throw Error(ErrorKind::kInvalidArgument, "best_affine_inverse: length mismatch");
  }
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (Eigen::Index i = 0; i < modified.size(); ++i) {
    if (!modified.voiced(i) || !original.voiced(i)) continue;
    const double x = modified.values[i];
    const double y = original.values[i];
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (n == 0) {
    throw Error(ErrorKind::kNoOverlap, "best_affine_inverse: no frames voiced in both");
  }
  const double mx = sx / n;
  const double my = sy / n;
  const double var = sxx / n - mx * mx;
  const double gain = var > 0.0 ? (sxy / n - mx * my) / var : 0.0;
  F0Trajectory out = modified;
  out.values = modified.voicing_mask().select(gain * (modified.values - mx) + my, 0.0);
  return out;
}

F0Trajectory apply(const ModifierSpec& spec, const F0Trajectory& traj) {
  spec.check();
  switch (spec.kind) {
    case ModifierKind::kVoicedFlat: return voiced_flat(traj);
    case ModifierKind::kAllFlat: return all_flat(traj);
    case ModifierKind::kSmoothingSpline: return smoothing_spline_modifier(traj);
    case ModifierKind::kModulatedSame1:
    case ModifierKind::kModulatedSame2:
    case ModifierKind::kModulatedDifferent: return modulate(traj, spec.modulation_pair());
    case ModifierKind::kRandomWalkWeak: return random_walk_modulate(traj, 1, *spec.seed);
    case ModifierKind::kRandomWalkStrong: return random_walk_modulate(traj, 2, *spec.seed);
    case ModifierKind::kShiftAndScale:
      return post_rules(shift_and_scale(traj, *spec.target_mean_hz, *spec.target_std_hz),
                        traj.voicing_mask());
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown modifier kind");
}

}  // namespace f0priv
