#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "pensplit/extended_real.hpp"
#include "pensplit/hilbert.hpp"

namespace pensplit {

/// Nonempty closed convex set from the catalog. Immutable after
/// construction; projections and support functions are closed-form.
class ConvexSet {
public:
  enum class Kind { Box, Subspace, Singleton, Ball, WholeSpace };

  /// [lo, hi] coordinatewise; entries of lo/hi may be -inf/+inf.
  static ConvexSet box(Vector lo, Vector hi);
  /// Null space of L.
  static ConvexSet subspace(LinearMap L);
  static ConvexSet singleton(Vector c);
  static ConvexSet ball(Vector center, double radius);
  static ConvexSet whole_space(int dim);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  /// Euclidean projection onto the set. Idempotent and nonexpansive.
  Vector project(const Vector& x) const;

  /// sigma_C(u) = sup_{y in C} <y, u>.
  ExtendedReal support(const Vector& u) const;

  bool contains(const Vector& x, double tol = 1e-9) const;

  /// Whether p lies in ran N_C (detectable exactly for every catalog kind).
  bool normal_cone_range_contains(const Vector& p, double tol = 1e-9) const;

  /// Small deterministic family of points of the set, used for
  /// consistency checks (e.g. that a penalty operator vanishes on C).
  std::vector<Vector> sample_points() const;

  const Vector& lower() const;
  const Vector& upper() const;
  const LinearMap& map() const;
  const Vector& point() const;
  const Vector& center() const;
  double radius() const;

private:
  ConvexSet() = default;

  Kind kind_ = Kind::WholeSpace;
  int dim_ = 0;
  Vector lo_, hi_;                    // Box
  std::shared_ptr<LinearMap> map_;    // Subspace
  Matrix null_projector_;             // Subspace: projector onto null(L)
  Vector c_;                          // Singleton / Ball center
  double radius_ = 0.0;               // Ball
};

/// Cocoercivity / Lipschitz / strong-monotonicity constants known for an
/// operator. Cocoercivity may be +inf (the zero operator is eta-cocoercive
/// for every eta).
struct OperatorModuli {
  std::optional<double> cocoercivity;
  std::optional<double> lipschitz;
  std::optional<double> strong_monotonicity;
};

/// Maximally monotone operator from the catalog, exposed through its
/// resolvent plus (where single-valued) pointwise evaluation. Immutable
/// and cheap to copy.
class MonotoneOperator {
public:
  enum class Kind {
    Zero,
    Identity,
    ScaledIdentity,
    SubdifferentialAbsValue,
    SubdifferentialQuadratic,
    NormalCone,
    SkewLinear,
    AffineGradient,
    ProjectionResidual,
    Product,
    UserResolvent,
  };

  using ResolventCallback = std::function<Vector(double, const Vector&)>;

  static MonotoneOperator zero(int dim);
  static MonotoneOperator identity(int dim);
  /// x -> gamma * x, gamma > 0.
  static MonotoneOperator scaled_identity(double gamma, int dim);
  /// Subdifferential of the l1 norm (of |x| for dim 1).
  static MonotoneOperator subdifferential_abs(int dim);
  /// Gradient of 0.5<x,Qx> + <b,x>, Q symmetric positive semidefinite.
  static MonotoneOperator subdifferential_quadratic(Matrix q, Vector b);
  /// N_C for a catalog set (box, subspace, singleton, ...).
  static MonotoneOperator normal_cone(ConvexSet set);
  /// x -> Sx with S = -S^T.
  static MonotoneOperator skew_linear(Matrix s);
  /// x -> P(x - d), P symmetric positive semidefinite.
  static MonotoneOperator affine_gradient(Matrix p, Vector d);
  /// x -> x - proj_C(x); the gradient of half the squared distance to C.
  static MonotoneOperator projection_residual(ConvexSet set);
  /// (x, v) -> A1 x  x  A2^{-1} v on R^{d1+d2}. The second factor is
  /// reached only through the resolvent of A2 (Moreau identity).
  static MonotoneOperator product_with_inverse(MonotoneOperator a1, MonotoneOperator a2);
  /// Operator defined by a user resolvent callback (lambda, x) -> J_{lambda M}(x).
  /// The callback must be reentrant and must preserve dimension.
  static MonotoneOperator user_resolvent(ResolventCallback cb, int dim);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_single_valued() const;
  const OperatorModuli& moduli() const { return moduli_; }

  /// J_{lambda M}(x) = (Id + lambda M)^{-1} x, lambda > 0.
  Vector resolvent(double lambda, const Vector& x) const;

  /// J_{gamma M^{-1}}(x), evaluated as x - gamma J_{M/gamma}(x/gamma).
  Vector inverse_resolvent(double gamma, const Vector& x) const;

  /// Mx for single-valued kinds; UsageError otherwise (use selection()).
  Vector eval(const Vector& x) const;

  /// Deterministic minimal-norm element of Mx. DomainError if x is not
  /// in dom M.
  Vector selection(const Vector& x) const;

  /// Closed-form Fitzpatrick function phi_M(x, u). Supported for
  /// Identity, ScaledIdentity, AffineGradient, SkewLinear and the normal
  /// cone of a singleton; UnsupportedError otherwise.
  ExtendedReal fitzpatrick(const Vector& x, const Vector& u) const;

  // Payload accessors (valid for the corresponding kinds only).
  double scale() const { return scale_; }
  const Matrix& matrix() const;
  const Vector& shift() const;
  const ConvexSet& set() const;
  const MonotoneOperator& first_factor() const;
  const MonotoneOperator& inverse_factor() const;
  int first_dim() const { return split_; }

private:
  MonotoneOperator() = default;

  Kind kind_ = Kind::Zero;
  int dim_ = 0;
  double scale_ = 1.0;
  Matrix mat_;
  Vector vec_;
  std::shared_ptr<ConvexSet> set_;
  std::shared_ptr<MonotoneOperator> first_, second_;
  int split_ = 0;
  ResolventCallback callback_;
  OperatorModuli moduli_;
};

/// Point (u, w) of gr(A + D + N_C) together with the decomposition
/// w = v + p + du, v in Au, p in N_C(u).
struct GraphPoint {
  Vector u;
  Vector w;
  Vector v;
  Vector p;
  Vector du;
};

/// Convex function with a computable conjugate, for the f + f* upper
/// bound on the Fitzpatrick function of a subdifferential.
class ConvexFunction {
public:
  enum class Kind { SquaredSeminorm, HalfSquaredNorm, AbsoluteValue };

  /// f(x) = |Lx|^2.
  static ConvexFunction squared_seminorm(LinearMap L);
  /// f(x) = 0.5 |x|^2.
  static ConvexFunction half_squared_norm(int dim);
  /// f(x) = sum_i |x_i|.
  static ConvexFunction absolute_value(int dim);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  double value(const Vector& x) const;
  /// f*(u); +inf off dom f*.
  ExtendedReal conjugate(const Vector& u) const;

private:
  ConvexFunction() = default;

  Kind kind_ = Kind::HalfSquaredNorm;
  int dim_ = 0;
  std::shared_ptr<LinearMap> map_;
};

/// f(x) + f*(u) >= phi_{subdiff f}(x, u): certified upper bound.
ExtendedReal fitzpatrick_upper_bound(const ConvexFunction& f, const Vector& x,
                                     const Vector& u);

/// sup_{u in C} phi_B(u, p/beta) - sigma_C(p/beta), the summand of the
/// penalty hypothesis. `exact` is false when the value is the certified
/// f + f* upper bound rather than the closed-form supremum.
struct PenaltyGap {
  ExtendedReal value;
  bool exact = true;
};

PenaltyGap penalty_gap(const MonotoneOperator& b, const ConvexSet& c,
                       const Vector& p, double beta);

}  // namespace pensplit
