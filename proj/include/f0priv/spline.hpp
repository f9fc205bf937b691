#pragma once

#include "f0priv/banded.hpp"
#include "f0priv/error.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace f0priv {

/// Piecewise cubic with natural boundary conditions. Interval i covers
/// [knots[i], knots[i+1]] and holds the coefficients of
/// a + b (x - knots[i]) + c (x - knots[i])^2 + d (x - knots[i])^3.
template <typename Scalar = double>
struct SplineModel {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector knots;
  Vector fitted;  // spline value at each knot
  Eigen::Matrix<Scalar, Eigen::Dynamic, 4> coefficients;
  Scalar penalty = 0;  // 0: interpolation, +inf: least-squares line
  Scalar achieved_residual = 0;
  int iterations = 0;  // residual evaluations spent in the penalty search

  /// Piecewise cubic inside the knot range, linear continuation of the end
  /// slope outside it.
  Scalar operator()(Scalar x) const { return eval(x, 0); }
  Scalar derivative(Scalar x) const { return eval(x, 1); }
  Scalar second_derivative(Scalar x) const { return eval(x, 2); }

  template <typename Derived>
  Vector operator()(const Eigen::DenseBase<Derived>& xs) const {
    Vector out(xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i) out[i] = eval(xs(i), 0);
    return out;
  }

 private:
  Scalar eval(Scalar x, int order) const {
    const Eigen::Index last = knots.size() - 1;
    if (x < knots[0]) {
      const Scalar slope = coefficients(0, 1);
      if (order == 0) return fitted[0] + slope * (x - knots[0]);
      return order == 1 ? slope : Scalar(0);
    }
    if (x > knots[last]) {
      const auto row = coefficients.row(last - 1);
      const Scalar h = knots[last] - knots[last - 1];
      const Scalar slope = row(1) + Scalar(2) * row(2) * h + Scalar(3) * row(3) * h * h;
      if (order == 0) return fitted[last] + slope * (x - knots[last]);
      return order == 1 ? slope : Scalar(0);
    }
    const auto* begin = knots.data();
    Eigen::Index i = std::upper_bound(begin, begin + knots.size(), x) - begin - 1;
    i = std::clamp<Eigen::Index>(i, 0, last - 1);
    const Scalar t = x - knots[i];
    const auto row = coefficients.row(i);
    switch (order) {
      case 0: return row(0) + t * (row(1) + t * (row(2) + t * row(3)));
      case 1: return row(1) + t * (Scalar(2) * row(2) + Scalar(3) * t * row(3));
      default: return Scalar(2) * row(2) + Scalar(6) * t * row(3);
    }
  }
};

namespace detail {

/// Reinsch/Green-Silverman system for unit weights. The fit at penalty
/// lambda solves (R + lambda Q^T Q) gamma = Q^T y, g = y - lambda Q gamma,
/// where gamma holds the second derivatives at the interior knots.
template <typename Scalar>
class ReinschSystem {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  ReinschSystem(const Vector& x, const Vector& y) : x_(x), y_(y) {
    const Eigen::Index n = x.size();
    const Eigen::Index m = n - 2;
    h_ = x.tail(n - 1) - x.head(n - 1);
    inv_h_ = h_.cwiseInverse();

    r_diag_.resize(m);
    r_off_ = Vector::Zero(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      r_diag_[k] = (h_[k] + h_[k + 1]) / Scalar(3);
      if (k + 1 < m) r_off_[k] = h_[k + 1] / Scalar(6);
    }

    // Column k of Q has entries at rows k, k+1, k+2.
    q0_.resize(m);
    q1_.resize(m);
    q2_.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      q0_[k] = inv_h_[k];
      q1_[k] = -inv_h_[k] - inv_h_[k + 1];
      q2_[k] = inv_h_[k + 1];
    }
    qq_diag_ = q0_.array().square() + q1_.array().square() + q2_.array().square();
    qq_off1_ = Vector::Zero(m);
    qq_off2_ = Vector::Zero(m);
    for (Eigen::Index k = 0; k + 1 < m; ++k) {
      qq_off1_[k] = q1_[k] * q0_[k + 1] + q2_[k] * q1_[k + 1];
    }
    for (Eigen::Index k = 0; k + 2 < m; ++k) {
      qq_off2_[k] = q2_[k] * q0_[k + 2];
    }
    qty_ = apply_qt(y);
  }

  Scalar initial_penalty() const { return r_diag_.sum() / qq_diag_.sum(); }

  /// Second derivatives at every knot (zero at both ends) and fitted values.
  void solve(Scalar lambda, Vector& gamma_full, Vector& fitted) const {
    const Eigen::Index n = x_.size();
    const Vector diag = r_diag_ + lambda * qq_diag_;
    const Vector off1 = r_off_ + lambda * qq_off1_;
    const Vector off2 = lambda * qq_off2_;
    const SymmetricPentadiagonal<Scalar> system(diag, off1, off2);
    const Vector gamma = system.solve(qty_);
    gamma_full = Vector::Zero(n);
    gamma_full.segment(1, n - 2) = gamma;
    fitted = y_ - lambda * apply_q(gamma);
  }

  Scalar residual(const Vector& fitted) const { return (y_ - fitted).squaredNorm(); }

  const Vector& h() const { return h_; }

 private:
  Vector apply_q(const Vector& gamma) const {
    Vector out = Vector::Zero(x_.size());
    for (Eigen::Index k = 0; k < gamma.size(); ++k) {
      out[k] += q0_[k] * gamma[k];
      out[k + 1] += q1_[k] * gamma[k];
      out[k + 2] += q2_[k] * gamma[k];
    }
    return out;
  }

  Vector apply_qt(const Vector& v) const {
    Vector out(q0_.size());
    for (Eigen::Index k = 0; k < out.size(); ++k) {
      out[k] = q0_[k] * v[k] + q1_[k] * v[k + 1] + q2_[k] * v[k + 2];
    }
    return out;
  }

  Vector x_, y_, h_, inv_h_;
  Vector r_diag_, r_off_;
  Vector q0_, q1_, q2_;
  Vector qq_diag_, qq_off1_, qq_off2_;
  Vector qty_;
};

template <typename Scalar>
SplineModel<Scalar> assemble(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
                             const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& fitted,
                             const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& gamma) {
  SplineModel<Scalar> model;
  const Eigen::Index n = x.size();
  model.knots = x;
  model.fitted = fitted;
  model.coefficients.resize(n - 1, 4);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const Scalar h = x[i + 1] - x[i];
    model.coefficients(i, 0) = fitted[i];
    model.coefficients(i, 1) =
        (fitted[i + 1] - fitted[i]) / h - h * (Scalar(2) * gamma[i] + gamma[i + 1]) / Scalar(6);
    model.coefficients(i, 2) = gamma[i] / Scalar(2);
    model.coefficients(i, 3) = (gamma[i + 1] - gamma[i]) / (Scalar(6) * h);
  }
  return model;
}

}  // namespace detail

inline constexpr int kSplineMaxIterations = 60;

/// Natural cubic smoothing spline through (x, y) with unit weights.
///
/// Returns the spline of least roughness whose residual sum of squares does
/// not exceed `residual_target` (default: the number of points). The penalty
/// is found by a safeguarded Illinois search on log(lambda). When the
/// least-squares line already meets the target the line is returned
/// (penalty = +inf); a target of 0 yields the interpolating spline.
template <typename Scalar = double>
SplineModel<Scalar> fit_smoothing_spline(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y,
    std::optional<Scalar> residual_target = std::nullopt) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using std::abs;
  using std::exp;
  using std::log;

  const Eigen::Index n = x.size();
  if (n < 4) {
    throw Error(ErrorKind::kInvalidArgument, "spline fit needs at least 4 points");
  }
  if (y.size() != n) {
    throw Error(ErrorKind::kInvalidArgument, "spline fit: x and y differ in length");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw Error(ErrorKind::kInvalidArgument, "spline fit: non-finite input");
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(x[i] > x[i - 1])) {
      throw Error(ErrorKind::kInvalidArgument,
                  "spline fit: abscissae must be strictly increasing (index " +
                      std::to_string(i) + ")");
    }
  }
  const Scalar target = residual_target.value_or(static_cast<Scalar>(n));
  if (!(target >= Scalar(0))) {
    throw Error(ErrorKind::kInvalidArgument, "spline fit: negative residual target");
  }

  // Least-squares line, the infinite-penalty limit.
  const Scalar x_mean = x.mean();
  const Scalar y_mean = y.mean();
  const Vector xc = x.array() - x_mean;
  const Scalar slope = xc.dot(y) / xc.squaredNorm();
  const Vector line = (y_mean + slope * xc.array()).matrix();
  const Scalar line_residual = (y - line).squaredNorm();
  if (target >= line_residual * (Scalar(1) - Scalar(1e-12))) {
    SplineModel<Scalar> model = detail::assemble<Scalar>(x, line, Vector::Zero(n));
    model.penalty = std::numeric_limits<Scalar>::infinity();
    model.achieved_residual = line_residual;
    return model;
  }

  const detail::ReinschSystem<Scalar> system(x, y);
  Vector gamma, fitted;

  if (target == Scalar(0)) {
    system.solve(Scalar(0), gamma, fitted);
    SplineModel<Scalar> model = detail::assemble<Scalar>(x, fitted, gamma);
    model.penalty = Scalar(0);
    model.achieved_residual = system.residual(fitted);
    return model;
  }

  // f(u) = log(RSS(e^u) / target) is increasing in u.
  const Scalar log_target = log(target);
  int evaluations = 0;
  auto f = [&](Scalar u) {
    ++evaluations;
    Vector g, fit;
    system.solve(exp(u), g, fit);
    const Scalar rss = system.residual(fit);
    return rss > Scalar(0) ? log(rss) - log_target : -std::numeric_limits<Scalar>::infinity();
  };
  const Scalar tolerance = Scalar(1e-10);
  auto accepted = [&](Scalar value) { return value <= Scalar(0) && value >= -tolerance; };

  Scalar lo = log(system.initial_penalty());
  Scalar f_lo = f(lo);
  Scalar hi = lo;
  Scalar f_hi = f_lo;
  Scalar answer = lo;
  bool done = accepted(f_lo);

  if (!done) {
    Scalar step = 1;
    if (f_lo < 0) {
      while (evaluations < kSplineMaxIterations) {
        hi = lo + step;
        f_hi = f(hi);
        if (accepted(f_hi)) {
          answer = hi;
          done = true;
          break;
        }
        if (f_hi > 0) break;
        lo = hi;
        f_lo = f_hi;
        step *= 2;
      }
    } else {
      while (evaluations < kSplineMaxIterations) {
        lo = hi - step;
        f_lo = f(lo);
        if (accepted(f_lo)) {
          answer = lo;
          done = true;
          break;
        }
        if (f_lo < 0) break;
        hi = lo;
        f_hi = f_lo;
        step *= 2;
      }
    }
    answer = done ? answer : lo;
  }

  // Illinois regula falsi; lo always satisfies the residual bound.
  int last_side = 0;
  while (!done && evaluations < kSplineMaxIterations && f_lo < 0 && f_hi > 0) {
    if (hi - lo <= Scalar(1e-13) * std::max(Scalar(1), abs(lo))) break;
    Scalar u = std::isfinite(static_cast<double>(f_lo))
                   ? hi - f_hi * (hi - lo) / (f_hi - f_lo)
                   : Scalar(0.5) * (lo + hi);
    if (!(u > lo && u < hi)) u = Scalar(0.5) * (lo + hi);
    const Scalar fu = f(u);
    if (accepted(fu)) {
      lo = u;
      f_lo = fu;
      break;
    }
    if (fu < 0) {
      lo = u;
      f_lo = fu;
      if (last_side == -1) f_hi /= 2;
      last_side = -1;
    } else {
      hi = u;
      f_hi = fu;
      if (last_side == 1) f_lo /= 2;
      last_side = 1;
    }
  }
  if (!done) answer = lo;

  const Scalar lambda = exp(answer);
  system.solve(lambda, gamma, fitted);
  SplineModel<Scalar> model = detail::assemble<Scalar>(x, fitted, gamma);
  model.penalty = lambda;
  model.achieved_residual = system.residual(fitted);
  model.iterations = evaluations;
  return model;
}

}  // namespace f0priv
