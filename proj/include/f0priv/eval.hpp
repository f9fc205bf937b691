#pragma once

#include "f0priv/modifiers.hpp"
#include "f0priv/trajectory.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace f0priv {

// ---------------------------------------------------------------------------
// Corpus

enum class Split { kEnrollment, kTrial };

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view name);

struct Recording {
  std::string speaker_id;
  Split split = Split::kEnrollment;
  F0Trajectory trajectory;  // trajectory.recording_id identifies the recording

  const std::string& recording_id() const { return trajectory.recording_id; }
};

struct SpeakerCorpus {
  std::vector<Recording> recordings;

  /// Human-readable invariant violations; empty when the corpus can be
  /// evaluated.
  std::vector<std::string> violations() const;
};

// ---------------------------------------------------------------------------
// Scoring

/// ln-F0 mean, ln-F0 variance, ln-F0 skewness, rise rate.
using StatVector = Eigen::Vector4d;

/// Throws kAbsentStatistics when any component is absent.
StatVector stat_vector(const F0Stats& stats, std::string_view recording_id = {});

/// Per-dimension centering and scaling fit on an enrollment population.
/// Dimensions with zero spread keep unit scale.
struct ZNormalizer {
  StatVector center = StatVector::Zero();
  StatVector scale = StatVector::Ones();

  static ZNormalizer fit(std::span<const StatVector> population);
  StatVector operator()(const StatVector& v) const {
    return ((v - center).array() / scale.array()).matrix();
  }
};

/// Negative Euclidean distance between z-normalized vectors; 0 is the best
/// possible score.
double score(const StatVector& enrollment_aggregate, const StatVector& trial,
             const ZNormalizer& norm);

/// Mean of the recording vectors of one speaker. Throws on an empty span.
StatVector aggregate(std::span<const StatVector> recordings);

// ---------------------------------------------------------------------------
// Metrics

struct ScoreSet {
  std::vector<double> target;
  std::vector<double> nontarget;
};

/// Equal error rate in percent, folded into [0, 50].
///
/// The threshold sweeps every observed score (accept when score >= threshold)
/// plus +inf. When no operating point has FAR == FRR, the rate is linearly
/// interpolated on the ROC segment joining the two operating points that
/// bracket the crossing.
double eer(const ScoreSet& scores);

/// Cllr in bits, reading scores as natural-log likelihood ratios.
double cllr(const ScoreSet& scores);

/// Cllr after the optimal monotone recalibration (pool-adjacent-violators on
/// the pooled scores, posteriors converted back to LLRs at the empirical
/// prior).
double cllr_min(const ScoreSet& scores);

/// llr = slope * score + offset, slope >= 0, fitted by minimizing Cllr.
struct AffineCalibration {
  double slope = 1.0;
  double offset = 0.0;

  double operator()(double s) const { return slope * s + offset; }
  ScoreSet apply(const ScoreSet& scores) const;
};

AffineCalibration fit_affine_calibration(const ScoreSet& scores);

// ---------------------------------------------------------------------------
// Scenarios

enum class Scenario { kOO, kOA, kAA };

std::string_view to_string(Scenario scenario);
std::optional<Scenario> parse_scenario(std::string_view name);

struct ScenarioReport {
  Scenario scenario = Scenario::kOO;
  double eer_percent = 0.0;
  double cllr_bits = 0.0;  // after affine calibration of the raw scores
  double cllr_min_bits = 0.0;
  long n_target = 0;
  long n_nontarget = 0;
  AffineCalibration calibration;
};

/// Scores every trial recording against every enrolled speaker.
ScoreSet score_trials(std::span<const Recording> enrollment, std::span<const Recording> trials);

/// OO compares originals; OA modifies trials (role = trial); AA also modifies
/// enrollment (role = enrollment).
ScenarioReport run_scenario(const SpeakerCorpus& original, const ModifierSpec& spec,
                            Scenario scenario);

ScenarioReport make_report(Scenario scenario, const ScoreSet& scores);

}  // namespace f0priv
