#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace f0priv {

/// Symmetric positive definite matrix with two sub/super diagonals, factored
/// in place as L D L^T. O(n) factor and solve.
template <typename Scalar>
class SymmetricPentadiagonal {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// `diag` has n entries, `off1` n-1, `off2` n-2 (missing entries may be
  /// passed as longer vectors; only the leading part is read).
  SymmetricPentadiagonal(const Vector& diag, const Vector& off1, const Vector& off2)
      : d_(diag), l1_(Vector::Zero(diag.size())), l2_(Vector::Zero(diag.size())) {
    const Eigen::Index n = d_.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i >= 1) d_[i] -= l1_[i - 1] * l1_[i - 1] * d_[i - 1];
      if (i >= 2) d_[i] -= l2_[i - 2] * l2_[i - 2] * d_[i - 2];
      if (!(d_[i] > Scalar(0))) {
        throw std::domain_error("pentadiagonal matrix is not positive definite");
      }
      if (i + 1 < n) {
        Scalar e = off1[i];
        if (i >= 1) e -= l2_[i - 1] * d_[i - 1] * l1_[i - 1];
        l1_[i] = e / d_[i];
      }
      if (i + 2 < n) l2_[i] = off2[i] / d_[i];
    }
  }

  Vector solve(const Vector& rhs) const {
    const Eigen::Index n = d_.size();
    Vector z = rhs;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i >= 1) z[i] -= l1_[i - 1] * z[i - 1];
      if (i >= 2) z[i] -= l2_[i - 2] * z[i - 2];
    }
    z.array() /= d_.array();
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      if (i + 1 < n) z[i] -= l1_[i] * z[i + 1];
      if (i + 2 < n) z[i] -= l2_[i] * z[i + 2];
    }
    return z;
  }

 private:
  Vector d_;
  Vector l1_;
  Vector l2_;
};

}  // namespace f0priv
