#include "pensplit/hilbert.hpp"

#include <cmath>
#include <string>

namespace pensplit {

bool all_finite(const Vector& x) { return x.allFinite(); }

double inner(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw UsageError("inner: dimension mismatch (" + std::to_string(x.size()) +
                     " vs " + std::to_string(y.size()) + ")");
  }
  return x.dot(y);
}

double operator_norm_power_iteration(const Matrix& m) {
  const Eigen::Index d = m.cols();
  if (d == 0 || m.rows() == 0) return 0.0;
  const Matrix mtm = m.transpose() * m;

  Vector v = Vector::Ones(d) / std::sqrt(static_cast<double>(d));
  if ((mtm * v).norm() == 0.0) {
    v(0) += 1e-3;
    v.normalize();
  }

  double rayleigh = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vector w = mtm * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;  // start vector is in the null space: zero map on it
    v = w / wn;
    const double r = v.dot(mtm * v);
    if (it > 0 && std::abs(r - rayleigh) < 1e-12) {
      rayleigh = r;
      break;
    }
    rayleigh = r;
  }
  return std::sqrt(std::max(rayleigh, 0.0));
}

namespace {

double compute_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (std::max(m.rows(), m.cols()) <= 64) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  }
  return operator_norm_power_iteration(m);
}

}  // namespace

LinearMap::LinearMap(Matrix m)
    : m_(std::move(m)), mt_(m_.transpose()), norm_(compute_norm(m_)) {
  if (m_.rows() == 0 || m_.cols() == 0) {
    throw UsageError("LinearMap: empty matrix");
  }
  if (!m_.allFinite()) {
    throw UsageError("LinearMap: matrix has non-finite entries");
  }
}

Vector LinearMap::apply(const Vector& x) const {
  if (x.size() != m_.cols()) {
    throw UsageError("LinearMap::apply: expected dimension " + std::to_string(m_.cols()) +
                     ", got " + std::to_string(x.size()));
  }
  return m_ * x;
}

Vector LinearMap::apply_adjoint(const Vector& y) const {
  if (y.size() != m_.rows()) {
    throw UsageError("LinearMap::apply_adjoint: expected dimension " +
                     std::to_string(m_.rows()) + ", got " + std::to_string(y.size()));
  }
  return mt_ * y;
}

}  // namespace pensplit
