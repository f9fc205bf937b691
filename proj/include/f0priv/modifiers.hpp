#pragma once

#include "f0priv/trajectory.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace f0priv {

enum class ModifierKind {
  kVoicedFlat,
  kAllFlat,
  kSmoothingSpline,
  kModulatedSame1,
  kModulatedSame2,
  kModulatedDifferent,
  kRandomWalkWeak,
  kRandomWalkStrong,
  kShiftAndScale,
};

enum class Role { kEnrollment, kTrial };

/// Reference names: "voiced-flat", "all-flat", "smoothing-spline",
/// "modulated-same-1", "modulated-same-2", "modulated-different",
/// "random-walk-weak", "random-walk-strong", "shift-and-scale".
std::string_view to_string(ModifierKind kind);
std::optional<ModifierKind> parse_modifier_kind(std::string_view name);

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view name);

bool is_random_walk(ModifierKind kind);
bool is_modulation(ModifierKind kind);

struct ModulationPair {
  double f1 = 5.0;
  double f2 = 11.0;
};

inline constexpr ModulationPair kSame1Pair{5.0, 11.0};
inline constexpr ModulationPair kSame2Pair{3.0, 7.0};
inline constexpr ModulationPair kEnrollmentPair{5.0, 11.0};
inline constexpr ModulationPair kTrialPair{3.0, 7.0};

struct ModifierSpec {
  ModifierKind kind = ModifierKind::kVoicedFlat;
  std::optional<Role> role;                 // modulated-different
  std::optional<std::uint64_t> seed;        // random-walk kinds
  std::optional<double> target_mean_hz;     // shift-and-scale
  std::optional<double> target_std_hz;      // shift-and-scale
  std::optional<ModulationPair> frequencies;  // overrides the modulated-same-* pair

  /// Throws kInvalidArgument on missing or inconsistent parameters.
  void check() const;

  /// Carrier pair actually used by modulation kinds.
  ModulationPair modulation_pair() const;
};

/// Applies `spec` to `traj`. Output keeps length, hop and recording id.
F0Trajectory apply(const ModifierSpec& spec, const F0Trajectory& traj);

/// Zeroes frames that were unvoiced in `pre_mask` and any value below 40 Hz
/// (negative values included).
F0Trajectory post_rules(const F0Trajectory& modified, const VoicingMask& pre_mask);

/// Floor rule only; every nonzero frame is treated as voiced before the rule.
F0Trajectory post_rules(const F0Trajectory& modified);

F0Trajectory voiced_flat(const F0Trajectory& traj);

/// Every frame, voiced or not, set to the voiced mean. No post rules.
F0Trajectory all_flat(const F0Trajectory& traj);

/// (4 + 2 c1 + 2 c2 + c1 c2) / 4 with c1 = sin(2 pi f1 t),
/// c2 = sin(2 pi f2 t + pi / 2). Always inside [1/4, 9/4].
double modulation_factor(double t, const ModulationPair& pair);

/// Quadrature sinusoidal modulation around the voiced mean:
/// f_out = mean + (f - mean) * modulation_factor(t), t = frame index * hop.
F0Trajectory modulate(const F0Trajectory& traj, const ModulationPair& pair);

/// Random-walk noise normalized so its extremes are exactly -1/2 and +1/2.
struct WalkNoise {
  Eigen::ArrayXd values;
};

/// Affine map (x - min) / (max - min) - 1/2; a constant walk maps to zeros.
WalkNoise normalize_walk(const Eigen::ArrayXd& raw);

/// Cumulative sum of i.i.d. standard normal steps (first sample 0) drawn from
/// a seeded 64-bit Mersenne twister, normalized with `normalize_walk`.
WalkNoise generate_walk(Eigen::Index length, std::uint64_t seed);

/// Stable FNV-1a hash of the recording id mixed into the user seed.
std::uint64_t recording_seed(std::uint64_t user_seed, std::string_view recording_id);

/// f_out = f (2 + M r) / 2 on voiced frames, then post rules.
F0Trajectory random_walk_modulate(const F0Trajectory& traj, int strength, const WalkNoise& walk);

/// Uses the walk generated from recording_seed(user_seed, traj.recording_id).
F0Trajectory random_walk_modulate(const F0Trajectory& traj, int strength, std::uint64_t user_seed);

/// Smoothing spline over the voiced samples (residual target = voiced count),
/// evaluated back at the voiced frame times.
F0Trajectory smoothing_spline_modifier(const F0Trajectory& traj);

/// Voiced frames mapped by f -> target_std / src_std * (f - src_mean) + target_mean,
/// with source statistics in Hz (population std). No post rules.
F0Trajectory shift_and_scale(const F0Trajectory& traj, double target_mean_hz,
                             double target_std_hz);

/// Attack: map a shift-and-scaled trajectory back to known source statistics.
F0Trajectory invert_shift_and_scale(const F0Trajectory& modified, double source_mean_hz,
                                    double source_std_hz);

/// Strongest affine attack: the least-squares affine map from `modified` to
/// `original` over frames voiced in both, applied to `modified`.
F0Trajectory best_affine_inverse(const F0Trajectory& modified, const F0Trajectory& original);

}  // namespace f0priv
