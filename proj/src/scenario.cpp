#include "f0priv/error.hpp"
#include "f0priv/eval.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace f0priv {

std::string_view to_string(Split split) {
  return split == Split::kEnrollment ? "enrollment" : "trial";
}

std::optional<Split> parse_split(std::string_view name) {
  if (name == "enrollment") return Split::kEnrollment;
  if (name == "trial") return Split::kTrial;
  return std::nullopt;
}

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kOO: return "OO";
    case Scenario::kOA: return "OA";
    case Scenario::kAA: return "AA";
  }
  return "OO";
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  if (name == "OO") return Scenario::kOO;
  if (name == "OA") return Scenario::kOA;
  if (name == "AA") return Scenario::kAA;
  return std::nullopt;
}

std::vector<std::string> SpeakerCorpus::violations() const {
  std::vector<std::string> out;
  std::set<std::string> ids;
  std::map<std::string, std::pair<int, int>> per_speaker;
  for (const Recording& r : recordings) {
    if (!ids.insert(r.recording_id()).second) {
      out.push_back("duplicate recording_id '" + r.recording_id() + "'");
    }
    auto& [enroll, trial] = per_speaker[r.speaker_id];
    (r.split == Split::kEnrollment ? enroll : trial) += 1;
  }
  for (const auto& [speaker, counts] : per_speaker) {
    if (counts.first == 0) out.push_back("speaker '" + speaker + "' has no enrollment recording");
    if (counts.second == 0) out.push_back("speaker '" + speaker + "' has no trial recording");
  }
  if (per_speaker.size() < 2) {
    out.push_back("corpus needs at least 2 speakers to form nontarget trials");
  }
  return out;
}

StatVector stat_vector(const F0Stats& s, std::string_view recording_id) {
  if (!s.log_f0_mean || !s.log_f0_var || !s.log_f0_skew || !s.rise_rate_hz_s) {
    throw Error(ErrorKind::kAbsentStatistics,
                "absent statistics (fewer than 3 voiced frames) in '" +
                    std::string(recording_id) + "'");
  }
  return StatVector(*s.log_f0_mean, *s.log_f0_var, *s.log_f0_skew, *s.rise_rate_hz_s);
}

ZNormalizer ZNormalizer::fit(std::span<const StatVector> population) {
  if (population.empty()) {
    throw Error(ErrorKind::kEmpty, "z-normalization: empty enrollment population");
  }
  ZNormalizer norm;
  StatVector sum = StatVector::Zero();
  for (const StatVector& v : population) sum += v;
  norm.center = sum / static_cast<double>(population.size());
  StatVector sq = StatVector::Zero();
  for (const StatVector& v : population) sq += (v - norm.center).cwiseAbs2();
  const StatVector spread = (sq / static_cast<double>(population.size())).cwiseSqrt();
  for (int d = 0; d < spread.size(); ++d) {
    norm.scale[d] = spread[d] > 1e-12 * std::max(1.0, std::abs(norm.center[d])) ? spread[d] : 1.0;
  }
  return norm;
}

double score(const StatVector& enrollment_aggregate, const StatVector& trial,
             const ZNormalizer& norm) {
  return -(norm(enrollment_aggregate) - norm(trial)).norm();
}

StatVector aggregate(std::span<const StatVector> recordings) {
  if (recordings.empty()) {
    throw Error(ErrorKind::kEmpty, "aggregate: speaker has no enrollment recordings");
  }
  StatVector sum = StatVector::Zero();
  for (const StatVector& v : recordings) sum += v;
  return sum / static_cast<double>(recordings.size());
}

ScoreSet score_trials(std::span<const Recording> enrollment, std::span<const Recording> trials) {
  std::vector<StatVector> population;
  std::map<std::string, std::vector<StatVector>> by_speaker;
  for (const Recording& r : enrollment) {
    const StatVector v = stat_vector(stats(r.trajectory), r.recording_id());
    population.push_back(v);
    by_speaker[r.speaker_id].push_back(v);
  }
  const ZNormalizer norm = ZNormalizer::fit(population);
  std::vector<std::pair<std::string, StatVector>> models;
  for (const auto& [speaker, vectors] : by_speaker) {
    models.emplace_back(speaker, aggregate(vectors));
  }

  ScoreSet out;
  for (const Recording& t : trials) {
    const StatVector v = stat_vector(stats(t.trajectory), t.recording_id());
    for (const auto& [speaker, model] : models) {
      const double s = score(model, v, norm);
      (speaker == t.speaker_id ? out.target : out.nontarget).push_back(s);
    }
  }
  if (out.target.empty() || out.nontarget.empty()) {
    throw Error(ErrorKind::kCorpus, "scoring produced no target or no nontarget trials");
  }
  return out;
}

ScenarioReport make_report(Scenario scenario, const ScoreSet& scores) {
  ScenarioReport report;
  report.scenario = scenario;
  report.eer_percent = eer(scores);
  report.calibration = fit_affine_calibration(scores);
  report.cllr_bits = cllr(report.calibration.apply(scores));
  report.cllr_min_bits = cllr_min(scores);
  report.n_target = static_cast<long>(scores.target.size());
  report.n_nontarget = static_cast<long>(scores.nontarget.size());
  return report;
}

ScenarioReport run_scenario(const SpeakerCorpus& original, const ModifierSpec& spec,
                            Scenario scenario) {
  const std::vector<std::string> problems = original.violations();
  if (!problems.empty()) {
    std::string msg = "corpus invalid:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorKind::kCorpus, msg);
  }

  ModifierSpec enroll_spec = spec;
  enroll_spec.role = Role::kEnrollment;
  ModifierSpec trial_spec = spec;
  trial_spec.role = Role::kTrial;
  if (scenario != Scenario::kOO) trial_spec.check();

  std::vector<Recording> enrollment;
  std::vector<Recording> trials;
  for (const Recording& r : original.recordings) {
    Recording copy = r;
    if (r.split == Split::kEnrollment) {
      if (scenario == Scenario::kAA) copy.trajectory = apply(enroll_spec, r.trajectory);
      enrollment.push_back(std::move(copy));
    } else {
      if (scenario != Scenario::kOO) copy.trajectory = apply(trial_spec, r.trajectory);
      trials.push_back(std::move(copy));
    }
  }
  return make_report(scenario, score_trials(enrollment, trials));
}

}  // namespace f0priv
