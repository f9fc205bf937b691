#include "f0priv/error.hpp"
#include "f0priv/eval.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace f0priv {

namespace {

void require_scores(const ScoreSet& s, const char* what) {
  if (s.target.empty() || s.nontarget.empty()) {
    throw Error(ErrorKind::kEmpty, std::string(what) + ": empty target or nontarget scores");
  }
  for (const double v : s.target) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "non-finite score");
  }
  for (const double v : s.nontarget) {
    if (!std::isfinite(v)) throw Error(ErrorKind::kInvalidArgument, "non-finite score");
  }
}

// log(1 + e^x), stable for large |x|.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

double eer(const ScoreSet& scores) {
  require_scores(scores, "eer");
  std::vector<double> tar = scores.target;
  std::vector<double> non = scores.nontarget;
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());
  std::vector<double> thresholds;
  thresholds.reserve(tar.size() + non.size());
  std::merge(tar.begin(), tar.end(), non.begin(), non.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  const double nt = static_cast<double>(tar.size());
  const double nn = static_cast<double>(non.size());
  double prev_far = 0.0;
  double prev_frr = 0.0;
  double rate = 0.5;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const double theta = thresholds[k];
    // FRR: targets below theta; FAR: nontargets at or above theta.
    const auto below_t = std::lower_bound(tar.begin(), tar.end(), theta) - tar.begin();
    const auto below_n = std::lower_bound(non.begin(), non.end(), theta) - non.begin();
    const double frr = static_cast<double>(below_t) / nt;
    const double far = static_cast<double>(non.size() - static_cast<std::size_t>(below_n)) / nn;
    if (frr >= far) {
      // The first operating point is always (FAR 1, FRR 0), so k > 0 here.
      if (frr == far) {
        rate = frr;
      } else {
        const double gap_prev = prev_far - prev_frr;  // > 0
        const double gap_cur = far - frr;             // < 0
        const double alpha = gap_prev / (gap_prev - gap_cur);
        rate = prev_frr + alpha * (frr - prev_frr);
      }
      break;
    }
    prev_far = far;
    prev_frr = frr;
  }
  const double percent = 100.0 * rate;
  return std::min(percent, 100.0 - percent);
}

double cllr(const ScoreSet& scores) {
  require_scores(scores, "cllr");
  double tar = 0.0;
  for (const double s : scores.target) tar += softplus(-s);
  double non = 0.0;
  for (const double s : scores.nontarget) non += softplus(s);
  tar /= static_cast<double>(scores.target.size());
  non /= static_cast<double>(scores.nontarget.size());
  return 0.5 * (tar + non) / std::numbers::ln2;
}

double cllr_min(const ScoreSet& scores) {
  require_scores(scores, "cllr_min");
  struct Item {
    double score;
    bool target;
  };
  std::vector<Item> pooled;
  pooled.reserve(scores.target.size() + scores.nontarget.size());
  for (const double s : scores.target) pooled.push_back({s, true});
  for (const double s : scores.nontarget) pooled.push_back({s, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Item& a, const Item& b) { return a.score < b.score; });

  struct Block {
    double targets;
    double count;
    double mean() const { return targets / count; }
  };
  std::vector<Block> blocks;
  for (std::size_t i = 0; i < pooled.size();) {
    // Tied scores must share one calibrated value.
    Block b{0.0, 0.0};
    std::size_t j = i;
    for (; j < pooled.size() && pooled[j].score == pooled[i].score; ++j) {
      b.targets += pooled[j].target ? 1.0 : 0.0;
      b.count += 1.0;
    }
    i = j;
    blocks.push_back(b);
    while (blocks.size() >= 2 && blocks[blocks.size() - 2].mean() >= blocks.back().mean()) {
      const Block top = blocks.back();
      blocks.pop_back();
      blocks.back().targets += top.targets;
      blocks.back().count += top.count;
    }
  }

  const double nt = static_cast<double>(scores.target.size());
  const double nn = static_cast<double>(scores.nontarget.size());
  double tar = 0.0;
  double non = 0.0;
  for (const Block& b : blocks) {
    const double n_tar = b.targets;
    const double n_non = b.count - b.targets;
    // llr = logit(p) - logit(prior) with p = n_tar / count, prior = nt / (nt + nn).
    if (n_tar > 0.0) tar += n_tar * std::log1p((n_non / n_tar) * (nt / nn));
    if (n_non > 0.0) non += n_non * std::log1p((n_tar / n_non) * (nn / nt));
  }
  return 0.5 * (tar / nt + non / nn) / std::numbers::ln2;
}

ScoreSet AffineCalibration::apply(const ScoreSet& scores) const {
  ScoreSet out;
  out.target.reserve(scores.target.size());
  out.nontarget.reserve(scores.nontarget.size());
  for (const double s : scores.target) out.target.push_back((*this)(s));
  for (const double s : scores.nontarget) out.nontarget.push_back((*this)(s));
  return out;
}

AffineCalibration fit_affine_calibration(const ScoreSet& scores) {
  require_scores(scores, "calibration");
  // Work on standardized scores for conditioning.
  double sum = 0.0, sq = 0.0;
  const double total = static_cast<double>(scores.target.size() + scores.nontarget.size());
  for (const double s : scores.target) sum += s;
  for (const double s : scores.nontarget) sum += s;
  const double mu = sum / total;
  for (const double s : scores.target) sq += (s - mu) * (s - mu);
  for (const double s : scores.nontarget) sq += (s - mu) * (s - mu);
  const double sigma = sq > 0.0 ? std::sqrt(sq / total) : 1.0;

  const double wt = 0.5 / static_cast<double>(scores.target.size());
  const double wn = 0.5 / static_cast<double>(scores.nontarget.size());
  auto objective = [&](double a, double b) {
    double j = 0.0;
    for (const double s : scores.target) j += wt * softplus(-(a * (s - mu) / sigma + b));
    for (const double s : scores.nontarget) j += wn * softplus(a * (s - mu) / sigma + b);
    return j;
  };

  double a = 0.0, b = 0.0;
  double current = objective(a, b);
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
    auto accumulate = [&](double z, double weight, double sign) {
      const double l = a * z + b;
      const double p = sigmoid(sign * l);  // derivative of softplus(sign * l)
      const double curvature = p * (1.0 - p);
      const Eigen::Vector2d dz(z, 1.0);
      grad += weight * sign * p * dz;
      hess += weight * curvature * dz * dz.transpose();
    };
    for (const double s : scores.target) accumulate((s - mu) / sigma, wt, -1.0);
    for (const double s : scores.nontarget) accumulate((s - mu) / sigma, wn, 1.0);
    if (grad.norm() < 1e-12) break;
    hess.diagonal().array() += 1e-12;
    const Eigen::Vector2d step = hess.ldlt().solve(-grad);
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls) {
      const double candidate = objective(a + t * step[0], b + t * step[1]);
      if (candidate < current) {
        a += t * step[0];
        b += t * step[1];
        current = candidate;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
  }
  if (a < 0.0) {
    // A decreasing map is not a calibration; the best constant is llr = 0.
    return AffineCalibration{0.0, 0.0};
  }
  return AffineCalibration{a / sigma, b - a * mu / sigma};
}

}  // namespace f0priv
