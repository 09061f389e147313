#include "pensplit/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pensplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double graph_tol(const Vector& a, const Vector& b) {
  return 1e-9 * (1.0 + a.norm() + b.norm());
}

void require_symmetric_psd(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) throw UsageError(std::string(who) + ": matrix must be square");
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw UsageError(std::string(who) + ": matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw UsageError(std::string(who) + ": matrix must be positive semidefinite");
  }
}

/// Eigendecomposition wrapper for symmetric PSD matrices: pseudoinverse
/// application and range-membership tests. Eigenvalues below
/// 1e-10 * (largest) count as zero.
struct PsdDecomposition {
  explicit PsdDecomposition(const Matrix& m) : es(m) {
    const auto& ev = es.eigenvalues();
    cutoff = 1e-10 * std::max(ev.size() > 0 ? ev.maxCoeff() : 0.0, 0.0);
  }

  Vector pinv_apply(const Vector& x) const {
    const auto& ev = es.eigenvalues();
    Vector coeffs = es.eigenvectors().transpose() * x;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      coeffs(i) = ev(i) > cutoff ? coeffs(i) / ev(i) : 0.0;
    }
    return es.eigenvectors() * coeffs;
  }

  bool in_range(const Vector& x, double tol) const {
    const auto& ev = es.eigenvalues();
    Vector coeffs = es.eigenvectors().transpose() * x;
    double off = 0.0;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      if (ev(i) <= cutoff) off += coeffs(i) * coeffs(i);
    }
    return std::sqrt(off) <= tol * (1.0 + x.norm());
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es;
  double cutoff;
};

Matrix null_space_projector(const LinearMap& l) {
  // Row space basis from the SVD of L; projector onto the orthogonal
  // complement of the row space.
  Eigen::JacobiSVD<Matrix> svd(l.matrix(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
  Matrix proj = Matrix::Identity(l.cols(), l.cols());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) {
      const Vector v = svd.matrixV().col(i);
      proj -= v * v.transpose();
    }
  }
  return proj;
}

}  // namespace

// ---------------------------------------------------------------------------
// ConvexSet

ConvexSet ConvexSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw UsageError("ConvexSet::box: lo/hi dimension mismatch");
  }
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo(i)) || std::isnan(hi(i)) || lo(i) > hi(i)) {
      throw UsageError("ConvexSet::box: requires lo <= hi coordinatewise");
    }
  }
  ConvexSet s;
  s.kind_ = Kind::Box;
  s.dim_ = static_cast<int>(lo.size());
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

ConvexSet ConvexSet::subspace(LinearMap l) {
  ConvexSet s;
  s.kind_ = Kind::Subspace;
  s.dim_ = l.cols();
  s.null_projector_ = null_space_projector(l);
  s.map_ = std::make_shared<LinearMap>(std::move(l));
  return s;
}

ConvexSet ConvexSet::singleton(Vector c) {
  if (c.size() == 0) throw UsageError("ConvexSet::singleton: empty point");
  ConvexSet s;
  s.kind_ = Kind::Singleton;
  s.dim_ = static_cast<int>(c.size());
  s.c_ = std::move(c);
  return s;
}

ConvexSet ConvexSet::ball(Vector center, double radius) {
  if (center.size() == 0) throw UsageError("ConvexSet::ball: empty center");
  if (!(radius >= 0.0)) throw UsageError("ConvexSet::ball: radius must be nonnegative");
  ConvexSet s;
  s.kind_ = Kind::Ball;
  s.dim_ = static_cast<int>(center.size());
  s.c_ = std::move(center);
  s.radius_ = radius;
  return s;
}

ConvexSet ConvexSet::whole_space(int dim) {
  if (dim < 1) throw UsageError("ConvexSet::whole_space: dim must be >= 1");
  ConvexSet s;
  s.kind_ = Kind::WholeSpace;
  s.dim_ = dim;
  return s;
}

Vector ConvexSet::project(const Vector& x) const {
  if (x.size() != dim_) throw UsageError("ConvexSet::project: dimension mismatch");
  switch (kind_) {
    case Kind::Box:
      return x.cwiseMax(lo_).cwiseMin(hi_);
    case Kind::Subspace:
      return null_projector_ * x;
    case Kind::Singleton:
      return c_;
    case Kind::Ball: {
      const Vector r = x - c_;
      const double n = r.norm();
      if (n <= radius_) return x;
      return c_ + (radius_ / n) * r;
    }
    case Kind::WholeSpace:
      return x;
  }
  throw UsageError("ConvexSet::project: unknown kind");
}

ExtendedReal ConvexSet::support(const Vector& u) const {
  if (u.size() != dim_) throw UsageError("ConvexSet::support: dimension mismatch");
  switch (kind_) {
    case Kind::Box: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (u(i) > 0.0) {
          if (std::isinf(hi_(i))) return ExtendedReal::infinity();
          s += u(i) * hi_(i);
        } else if (u(i) < 0.0) {
          if (std::isinf(lo_(i))) return ExtendedReal::infinity();
          s += u(i) * lo_(i);
        }
      }
      return ExtendedReal::finite(s);
    }
    case Kind::Subspace: {
      // 0 on the orthogonal complement of the subspace, +inf elsewhere.
      const Vector tangential = null_projector_ * u;
      if (tangential.norm() <= 1e-10 * (1.0 + u.norm())) return ExtendedReal::finite(0.0);
      return ExtendedReal::infinity();
    }
    case Kind::Singleton:
      return ExtendedReal::finite(c_.dot(u));
    case Kind::Ball:
      return ExtendedReal::finite(c_.dot(u) + radius_ * u.norm());
    case Kind::WholeSpace:
      if (u.norm() == 0.0) return ExtendedReal::finite(0.0);
      return ExtendedReal::infinity();
  }
  throw UsageError("ConvexSet::support: unknown kind");
}

bool ConvexSet::contains(const Vector& x, double tol) const {
  if (x.size() != dim_) return false;
  return (x - project(x)).norm() <= tol * (1.0 + x.norm());
}

bool ConvexSet::normal_cone_range_contains(const Vector& p, double tol) const {
  if (p.size() != dim_) return false;
  switch (kind_) {
    case Kind::Box:
      // Coordinate i can carry a negative normal only at a finite lower
      // bound and a positive one only at a finite upper bound.
      for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) < -tol && std::isinf(lo_(i))) return false;
        if (p(i) > tol && std::isinf(hi_(i))) return false;
      }
      return true;
    case Kind::Subspace:
      // ran N_C is the orthogonal complement of the subspace.
      return (null_projector_ * p).norm() <= tol * (1.0 + p.norm());
    case Kind::Singleton:
      return true;
    case Kind::Ball:
      return true;  // every direction is normal somewhere on the boundary
    case Kind::WholeSpace:
      return p.norm() <= tol;
  }
  return false;
}

std::vector<Vector> ConvexSet::sample_points() const {
  std::vector<Vector> pts;
  switch (kind_) {
    case Kind::Box: {
      Vector mid(dim_);
      for (int i = 0; i < dim_; ++i) {
        double lo = lo_(i), hi = hi_(i);
        if (std::isinf(lo)) lo = std::isinf(hi) ? -1.0 : hi - 1.0;
        if (std::isinf(hi)) hi = lo + 1.0;
        mid(i) = 0.5 * (lo + hi);
      }
      pts.push_back(project(Vector::Zero(dim_)));
      pts.push_back(mid);
      for (int i = 0; i < dim_; ++i) {
        pts.push_back(project(mid + Vector::Unit(dim_, i)));
        pts.push_back(project(mid - Vector::Unit(dim_, i)));
      }
      break;
    }
    case Kind::Subspace:
      pts.push_back(Vector::Zero(dim_));
      pts.push_back(project(Vector::Ones(dim_)));
      for (int i = 0; i < dim_; ++i) pts.push_back(project(Vector::Unit(dim_, i)));
      break;
    case Kind::Singleton:
      pts.push_back(c_);
      break;
    case Kind::Ball:
      pts.push_back(c_);
      for (int i = 0; i < dim_ && radius_ > 0.0; ++i) {
        pts.push_back(c_ + radius_ * Vector::Unit(dim_, i));
      }
      break;
    case Kind::WholeSpace:
      pts.push_back(Vector::Zero(dim_));
      for (int i = 0; i < dim_; ++i) {
        pts.push_back(Vector::Unit(dim_, i));
        pts.push_back(-Vector::Unit(dim_, i));
      }
      break;
  }
  return pts;
}

const Vector& ConvexSet::lower() const {
  if (kind_ != Kind::Box) throw UsageError("ConvexSet::lower: not a box");
  return lo_;
}
const Vector& ConvexSet::upper() const {
  if (kind_ != Kind::Box) throw UsageError("ConvexSet::upper: not a box");
  return hi_;
}
const LinearMap& ConvexSet::map() const {
  if (kind_ != Kind::Subspace) throw UsageError("ConvexSet::map: not a subspace");
  return *map_;
}
const Vector& ConvexSet::point() const {
  if (kind_ != Kind::Singleton) throw UsageError("ConvexSet::point: not a singleton");
  return c_;
}
const Vector& ConvexSet::center() const {
  if (kind_ != Kind::Ball) throw UsageError("ConvexSet::center: not a ball");
  return c_;
}
double ConvexSet::radius() const {
  if (kind_ != Kind::Ball) throw UsageError("ConvexSet::radius: not a ball");
  return radius_;
}

// ---------------------------------------------------------------------------
// MonotoneOperator factories

MonotoneOperator MonotoneOperator::zero(int dim) {
  if (dim < 1) throw UsageError("MonotoneOperator::zero: dim must be >= 1");
  MonotoneOperator m;
  m.kind_ = Kind::Zero;
  m.dim_ = dim;
  m.moduli_ = {kInf, 0.0, std::nullopt};
  return m;
}

MonotoneOperator MonotoneOperator::identity(int dim) {
  if (dim < 1) throw UsageError("MonotoneOperator::identity: dim must be >= 1");
  MonotoneOperator m;
  m.kind_ = Kind::Identity;
  m.dim_ = dim;
  m.moduli_ = {1.0, 1.0, 1.0};
  return m;
}

MonotoneOperator MonotoneOperator::scaled_identity(double gamma, int dim) {
  if (dim < 1) throw UsageError("MonotoneOperator::scaled_identity: dim must be >= 1");
  if (!(gamma > 0.0)) {
    throw UsageError("MonotoneOperator::scaled_identity: gamma must be positive");
  }
  MonotoneOperator m;
  m.kind_ = Kind::ScaledIdentity;
  m.dim_ = dim;
  m.scale_ = gamma;
  m.moduli_ = {1.0 / gamma, gamma, gamma};
  return m;
}

MonotoneOperator MonotoneOperator::subdifferential_abs(int dim) {
  if (dim < 1) throw UsageError("MonotoneOperator::subdifferential_abs: dim must be >= 1");
  MonotoneOperator m;
  m.kind_ = Kind::SubdifferentialAbsValue;
  m.dim_ = dim;
  return m;
}

MonotoneOperator MonotoneOperator::subdifferential_quadratic(Matrix q, Vector b) {
  require_symmetric_psd(q, "subdifferential_quadratic");
  if (b.size() != q.rows()) {
    throw UsageError("subdifferential_quadratic: b dimension mismatch");
  }
  MonotoneOperator m;
  m.kind_ = Kind::SubdifferentialQuadratic;
  m.dim_ = static_cast<int>(q.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(q);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  m.mat_ = std::move(q);
  m.vec_ = std::move(b);
  m.moduli_.lipschitz = std::max(lmax, 0.0);
  m.moduli_.cocoercivity = lmax > 0.0 ? 1.0 / lmax : kInf;
  if (lmin > 0.0) m.moduli_.strong_monotonicity = lmin;
  return m;
}

MonotoneOperator MonotoneOperator::normal_cone(ConvexSet set) {
  MonotoneOperator m;
  m.kind_ = Kind::NormalCone;
  m.dim_ = set.dim();
  m.set_ = std::make_shared<ConvexSet>(std::move(set));
  return m;
}

MonotoneOperator MonotoneOperator::skew_linear(Matrix s) {
  if (s.rows() != s.cols()) throw UsageError("skew_linear: matrix must be square");
  const double scale = 1.0 + s.cwiseAbs().maxCoeff();
  if ((s + s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw UsageError("skew_linear: matrix must satisfy S = -S^T");
  }
  MonotoneOperator m;
  m.kind_ = Kind::SkewLinear;
  m.dim_ = static_cast<int>(s.rows());
  const bool is_zero = s.norm() == 0.0;
  m.moduli_.lipschitz = is_zero ? 0.0 : Eigen::JacobiSVD<Matrix>(s).singularValues()(0);
  if (is_zero) m.moduli_.cocoercivity = kInf;
  m.mat_ = std::move(s);
  return m;
}

MonotoneOperator MonotoneOperator::affine_gradient(Matrix p, Vector d) {
  require_symmetric_psd(p, "affine_gradient");
  if (d.size() != p.rows()) throw UsageError("affine_gradient: d dimension mismatch");
  MonotoneOperator m;
  m.kind_ = Kind::AffineGradient;
  m.dim_ = static_cast<int>(p.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  m.mat_ = std::move(p);
  m.vec_ = std::move(d);
  m.moduli_.lipschitz = std::max(lmax, 0.0);
  m.moduli_.cocoercivity = lmax > 0.0 ? 1.0 / lmax : kInf;
  if (lmin > 0.0) m.moduli_.strong_monotonicity = lmin;
  return m;
}

MonotoneOperator MonotoneOperator::projection_residual(ConvexSet set) {
  MonotoneOperator m;
  m.kind_ = Kind::ProjectionResidual;
  m.dim_ = set.dim();
  m.set_ = std::make_shared<ConvexSet>(std::move(set));
  m.moduli_ = {1.0, 1.0, std::nullopt};
  return m;
}

MonotoneOperator MonotoneOperator::product_with_inverse(MonotoneOperator a1,
                                                        MonotoneOperator a2) {
  MonotoneOperator m;
  m.kind_ = Kind::Product;
  m.split_ = a1.dim();
  m.dim_ = a1.dim() + a2.dim();
  m.first_ = std::make_shared<MonotoneOperator>(std::move(a1));
  m.second_ = std::make_shared<MonotoneOperator>(std::move(a2));
  return m;
}

MonotoneOperator MonotoneOperator::user_resolvent(ResolventCallback cb, int dim) {
  if (!cb) throw UsageError("user_resolvent: null callback");
  if (dim < 1) throw UsageError("user_resolvent: dim must be >= 1");
  MonotoneOperator m;
  m.kind_ = Kind::UserResolvent;
  m.dim_ = dim;
  m.callback_ = std::move(cb);
  return m;
}

// ---------------------------------------------------------------------------
// MonotoneOperator payload accessors

const Matrix& MonotoneOperator::matrix() const {
  if (mat_.size() == 0) throw UsageError("MonotoneOperator::matrix: kind has no matrix");
  return mat_;
}
const Vector& MonotoneOperator::shift() const {
  if (kind_ != Kind::SubdifferentialQuadratic && kind_ != Kind::AffineGradient) {
    throw UsageError("MonotoneOperator::shift: kind has no shift vector");
  }
  return vec_;
}
const ConvexSet& MonotoneOperator::set() const {
  if (!set_) throw UsageError("MonotoneOperator::set: kind has no set");
  return *set_;
}
const MonotoneOperator& MonotoneOperator::first_factor() const {
  if (!first_) throw UsageError("MonotoneOperator::first_factor: not a product");
  return *first_;
}
const MonotoneOperator& MonotoneOperator::inverse_factor() const {
  if (!second_) throw UsageError("MonotoneOperator::inverse_factor: not a product");
  return *second_;
}

bool MonotoneOperator::is_single_valued() const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::Identity:
    case Kind::ScaledIdentity:
    case Kind::SubdifferentialQuadratic:
    case Kind::SkewLinear:
    case Kind::AffineGradient:
    case Kind::ProjectionResidual:
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Resolvent and evaluations

Vector MonotoneOperator::resolvent(double lambda, const Vector& x) const {
  if (!(lambda > 0.0)) throw UsageError("resolvent: lambda must be positive");
  if (x.size() != dim_) throw UsageError("resolvent: dimension mismatch");
  switch (kind_) {
    case Kind::Zero:
      return x;
    case Kind::Identity:
      return x / (1.0 + lambda);
    case Kind::ScaledIdentity:
      return x / (1.0 + lambda * scale_);
    case Kind::SubdifferentialAbsValue: {
      Vector y(dim_);
      for (int i = 0; i < dim_; ++i) {
        const double a = std::abs(x(i)) - lambda;
        y(i) = a > 0.0 ? (x(i) > 0.0 ? a : -a) : 0.0;
      }
      return y;
    }
    case Kind::SubdifferentialQuadratic: {
      // (Id + lambda Q) y = x - lambda b
      const Matrix lhs = Matrix::Identity(dim_, dim_) + lambda * mat_;
      return lhs.ldlt().solve(x - lambda * vec_);
    }
    case Kind::NormalCone:
      return set_->project(x);
    case Kind::SkewLinear: {
      const Matrix lhs = Matrix::Identity(dim_, dim_) + lambda * mat_;
      return lhs.partialPivLu().solve(x);
    }
    case Kind::AffineGradient: {
      // (Id + lambda P) y = x + lambda P d
      const Matrix lhs = Matrix::Identity(dim_, dim_) + lambda * mat_;
      return lhs.ldlt().solve(x + lambda * (mat_ * vec_));
    }
    case Kind::ProjectionResidual: {
      const double a = lambda / (1.0 + lambda);
      return x + a * (set_->project(x) - x);
    }
    case Kind::Product: {
      const Vector x1 = x.head(split_);
      const Vector x2 = x.tail(dim_ - split_);
      Vector y(dim_);
      y.head(split_) = first_->resolvent(lambda, x1);
      y.tail(dim_ - split_) = second_->inverse_resolvent(lambda, x2);
      return y;
    }
    case Kind::UserResolvent: {
      Vector y = callback_(lambda, x);
      if (y.size() != x.size()) {
        throw ContractViolation("user resolvent returned dimension " +
                                std::to_string(y.size()) + ", expected " +
                                std::to_string(x.size()));
      }
      return y;
    }
  }
  throw UsageError("resolvent: unknown kind");
}

Vector MonotoneOperator::inverse_resolvent(double gamma, const Vector& x) const {
  if (!(gamma > 0.0)) throw UsageError("inverse_resolvent: gamma must be positive");
  return x - gamma * resolvent(1.0 / gamma, x / gamma);
}

Vector MonotoneOperator::eval(const Vector& x) const {
  if (x.size() != dim_) throw UsageError("eval: dimension mismatch");
  switch (kind_) {
    case Kind::Zero:
      return Vector::Zero(dim_);
    case Kind::Identity:
      return x;
    case Kind::ScaledIdentity:
      return scale_ * x;
    case Kind::SubdifferentialQuadratic:
      return mat_ * x + vec_;
    case Kind::SkewLinear:
      return mat_ * x;
    case Kind::AffineGradient:
      return mat_ * (x - vec_);
    case Kind::ProjectionResidual:
      return x - set_->project(x);
    default:
      throw UsageError("eval: operator is not single-valued; use selection()");
  }
}

Vector MonotoneOperator::selection(const Vector& x) const {
  if (x.size() != dim_) throw UsageError("selection: dimension mismatch");
  switch (kind_) {
    case Kind::SubdifferentialAbsValue: {
      Vector g(dim_);
      for (int i = 0; i < dim_; ++i) {
        g(i) = x(i) > 0.0 ? 1.0 : (x(i) < 0.0 ? -1.0 : 0.0);
      }
      return g;
    }
    case Kind::NormalCone: {
      if (!set_->contains(x)) {
        throw DomainError("selection: point is outside dom N_C");
      }
      // 0 belongs to every normal cone; it is the minimal-norm element.
      return Vector::Zero(dim_);
    }
    case Kind::Product:
    case Kind::UserResolvent:
      throw UsageError("selection: no pointwise evaluation for this kind");
    default:
      return eval(x);
  }
}

// ---------------------------------------------------------------------------
// Fitzpatrick function

ExtendedReal MonotoneOperator::fitzpatrick(const Vector& x, const Vector& u) const {
  if (x.size() != dim_ || u.size() != dim_) {
    throw UsageError("fitzpatrick: dimension mismatch");
  }
  switch (kind_) {
    case Kind::Identity:
      return ExtendedReal::finite(0.25 * (x + u).squaredNorm());
    case Kind::ScaledIdentity:
      return ExtendedReal::finite((scale_ * x + u).squaredNorm() / (4.0 * scale_));
    case Kind::AffineGradient: {
      // sup_y <x, P(y-d)> + <y, u> - <y, P(y-d)>; with s = P(x-d) + u the
      // supremum is <d, u> + s^T P^+ s / 4 when s lies in ran P, +inf otherwise.
      PsdDecomposition dec(mat_);
      const Vector s = mat_ * (x - vec_) + u;
      if (!dec.in_range(s, 1e-9)) return ExtendedReal::infinity();
      return ExtendedReal::finite(vec_.dot(u) + 0.25 * s.dot(dec.pinv_apply(s)));
    }
    case Kind::SkewLinear: {
      const Vector sx = mat_ * x;
      if ((u - sx).norm() <= graph_tol(u, sx)) return ExtendedReal::finite(inner(x, u));
      return ExtendedReal::infinity();
    }
    case Kind::NormalCone: {
      if (set_->kind() != ConvexSet::Kind::Singleton) break;
      const Vector& c = set_->point();
      if ((x - c).norm() <= graph_tol(x, c)) return ExtendedReal::finite(inner(c, u));
      return ExtendedReal::infinity();
    }
    default:
      break;
  }
  throw UnsupportedError(
      "fitzpatrick: no closed form for this kind; use fitzpatrick_upper_bound");
}

// ---------------------------------------------------------------------------
// ConvexFunction

ConvexFunction ConvexFunction::squared_seminorm(LinearMap l) {
  ConvexFunction f;
  f.kind_ = Kind::SquaredSeminorm;
  f.dim_ = l.cols();
  f.map_ = std::make_shared<LinearMap>(std::move(l));
  return f;
}

ConvexFunction ConvexFunction::half_squared_norm(int dim) {
  if (dim < 1) throw UsageError("half_squared_norm: dim must be >= 1");
  ConvexFunction f;
  f.kind_ = Kind::HalfSquaredNorm;
  f.dim_ = dim;
  return f;
}

ConvexFunction ConvexFunction::absolute_value(int dim) {
  if (dim < 1) throw UsageError("absolute_value: dim must be >= 1");
  ConvexFunction f;
  f.kind_ = Kind::AbsoluteValue;
  f.dim_ = dim;
  return f;
}

double ConvexFunction::value(const Vector& x) const {
  if (x.size() != dim_) throw UsageError("ConvexFunction::value: dimension mismatch");
  switch (kind_) {
    case Kind::SquaredSeminorm:
      return map_->apply(x).squaredNorm();
    case Kind::HalfSquaredNorm:
      return 0.5 * x.squaredNorm();
    case Kind::AbsoluteValue:
      return x.lpNorm<1>();
  }
  throw UsageError("ConvexFunction::value: unknown kind");
}

ExtendedReal ConvexFunction::conjugate(const Vector& u) const {
  if (u.size() != dim_) throw UsageError("ConvexFunction::conjugate: dimension mismatch");
  switch (kind_) {
    case Kind::SquaredSeminorm: {
      // (|L.|^2)*(u) = u^T (L^T L)^+ u / 4 on ran L^T, +inf off it.
      const Matrix gram = map_->adjoint_matrix() * map_->matrix();
      PsdDecomposition dec(gram);
      if (!dec.in_range(u, 1e-9)) return ExtendedReal::infinity();
      return ExtendedReal::finite(0.25 * u.dot(dec.pinv_apply(u)));
    }
    case Kind::HalfSquaredNorm:
      return ExtendedReal::finite(0.5 * u.squaredNorm());
    case Kind::AbsoluteValue:
      if (u.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-12) return ExtendedReal::finite(0.0);
      return ExtendedReal::infinity();
  }
  throw UsageError("ConvexFunction::conjugate: unknown kind");
}

ExtendedReal fitzpatrick_upper_bound(const ConvexFunction& f, const Vector& x,
                                     const Vector& u) {
  const ExtendedReal conj = f.conjugate(u);
  if (!conj.is_finite()) return ExtendedReal::infinity();
  return ExtendedReal::finite(f.value(x) + conj.value());
}

// ---------------------------------------------------------------------------
// Penalty gap

namespace {

void check_zero_on_set(const MonotoneOperator& b, const ConvexSet& c) {
  for (const Vector& pt : c.sample_points()) {
    const Vector bx = b.is_single_valued() ? b.eval(pt) : b.selection(pt);
    if (bx.norm() > 1e-8 * (1.0 + pt.norm())) {
      throw DomainError("penalty_gap: C is not contained in zer B");
    }
  }
}

}  // namespace

PenaltyGap penalty_gap(const MonotoneOperator& b, const ConvexSet& c, const Vector& p,
                       double beta) {
  if (!(beta > 0.0)) throw UsageError("penalty_gap: beta must be positive");
  if (p.size() != b.dim() || c.dim() != b.dim()) {
    throw UsageError("penalty_gap: dimension mismatch");
  }
  if (!c.normal_cone_range_contains(p)) {
    throw DomainError("penalty_gap: p is not in ran N_C");
  }
  // p = 0: the supremum over C of phi_B(u, 0) is attained at graph points
  // (u, 0), u in zer B = C, where phi equals <u, 0> = 0; sigma_C(0) = 0.
  if (p.norm() == 0.0) return {ExtendedReal::finite(0.0), true};

  const Vector w = p / beta;
  const ExtendedReal sigma = c.support(w);
  if (!sigma.is_finite()) {
    // Unreachable for p in ran N_C: sigma_C(p) = <x, p> at any x with
    // p in N_C(x).
    throw DomainError("penalty_gap: sigma_C(p/beta) is not finite");
  }

  using Kind = MonotoneOperator::Kind;
  switch (b.kind()) {
    case Kind::Zero:
      return {ExtendedReal::finite(0.0), true};
    case Kind::Identity:
    case Kind::ScaledIdentity: {
      check_zero_on_set(b, c);
      const double gamma = b.kind() == Kind::Identity ? 1.0 : b.scale();
      // C = zer B = {0}: sup is phi_B(0, w) = |w|^2 / (4 gamma).
      return {ExtendedReal::finite(w.squaredNorm() / (4.0 * gamma) - sigma.value()), true};
    }
    case Kind::AffineGradient: {
      check_zero_on_set(b, c);
      // For u in zer B the Fitzpatrick value <d,w> + w^T P^+ w / 4 does not
      // depend on u, so it equals the supremum over C.
      PsdDecomposition dec(b.matrix());
      if (!dec.in_range(w, 1e-9)) return {ExtendedReal::infinity(), true};
      const double phi = b.shift().dot(w) + 0.25 * w.dot(dec.pinv_apply(w));
      return {ExtendedReal::finite(phi - sigma.value()), true};
    }
    case Kind::SkewLinear: {
      check_zero_on_set(b, c);
      // For u in ker S and w != 0: phi_B(u, w) = +inf.
      return {ExtendedReal::infinity(), true};
    }
    case Kind::NormalCone: {
      if (b.set().kind() != ConvexSet::Kind::Singleton) break;
      check_zero_on_set(b, c);
      // C = zer N_{{c}} = {c}: phi(c, w) = <c, w> = sigma_C(w).
      const double phi = b.set().point().dot(w);
      return {ExtendedReal::finite(phi - sigma.value()), true};
    }
    case Kind::SubdifferentialQuadratic: {
      check_zero_on_set(b, c);
      // B = subdiff Psi with Psi(x) = 0.5<x,Qx> + <b,x>; normalize Psi by
      // its minimum so that Psi = 0 on C, then bound by Psi* + min Psi.
      PsdDecomposition dec(b.matrix());
      const Vector& bvec = b.shift();
      if (!dec.in_range(w - bvec, 1e-9)) return {ExtendedReal::infinity(), false};
      const double conj = 0.5 * (w - bvec).dot(dec.pinv_apply(w - bvec));
      const double minimum = -0.5 * bvec.dot(dec.pinv_apply(bvec));
      return {ExtendedReal::finite(conj + minimum - sigma.value()), false};
    }
    case Kind::SubdifferentialAbsValue: {
      check_zero_on_set(b, c);
      // f = l1 norm, f = 0 on C = {0}; bound is f*(w) = indicator of the
      // max-norm unit ball.
      if (w.lpNorm<Eigen::Infinity>() <= 1.0 + 1e-12) {
        return {ExtendedReal::finite(0.0 - sigma.value()), false};
      }
      return {ExtendedReal::infinity(), false};
    }
    case Kind::ProjectionResidual: {
      check_zero_on_set(b, c);
      // B = grad(0.5 dist_C^2): f* = 0.5|.|^2 + sigma_C, and the supports
      // cancel in the gap.
      const ExtendedReal own = b.set().support(w);
      if (!own.is_finite()) return {ExtendedReal::infinity(), false};
      return {ExtendedReal::finite(0.5 * w.squaredNorm() + own.value() - sigma.value()),
              false};
    }
    default:
      break;
  }
  throw UnsupportedError("penalty_gap: no Fitzpatrick form or conjugate bound for this kind");
}

}  // namespace pensplit
