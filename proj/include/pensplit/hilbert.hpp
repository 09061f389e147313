#pragma once

#include <Eigen/Dense>

#include "pensplit/errors.hpp"

namespace pensplit {

/// Element of R^d. Dimension is fixed by construction; solver state never
/// admits NaN/Inf entries (checked at the run-loop boundary).
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

bool all_finite(const Vector& x);

/// <x, y> = sum_i x_i y_i. Throws UsageError on dimension mismatch.
double inner(const Vector& x, const Vector& y);

inline double norm(const Vector& x) { return x.norm(); }

/// Dense linear map K : R^{d_in} -> R^{d_out} with its adjoint K^T.
/// The operator norm (largest singular value) is computed once at
/// construction: exact SVD for dimensions up to 64, deterministic power
/// iteration on K^T K above that.
class LinearMap {
public:
  explicit LinearMap(Matrix m);

  int rows() const { return static_cast<int>(m_.rows()); }
  int cols() const { return static_cast<int>(m_.cols()); }

  const Matrix& matrix() const { return m_; }
  const Matrix& adjoint_matrix() const { return mt_; }

  /// K x. Throws UsageError if dim(x) != cols().
  Vector apply(const Vector& x) const;

  /// K^T y. Throws UsageError if dim(y) != rows().
  Vector apply_adjoint(const Vector& y) const;

  /// Largest singular value; 0 for the zero map.
  double operator_norm() const { return norm_; }

private:
  Matrix m_;
  Matrix mt_;
  double norm_;
};

/// Power iteration on K^T K: at most 500 iterations, stop when successive
/// Rayleigh quotients differ by < 1e-12. Start vector is normalized
/// all-ones; if that lands in a null space the first coordinate is
/// perturbed by 1e-3. Exposed for testing against the SVD path.
double operator_norm_power_iteration(const Matrix& m);

}  // namespace pensplit
