#include "pensplit/problems.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace pensplit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_reciprocal(std::optional<double> v) {
  if (!v) throw UsageError("schedule_moduli: operator lacks a Lipschitz constant");
  return *v == 0.0 ? kInf : 1.0 / *v;
}

/// Mx + c representation of the affine single-valued catalog kinds.
struct AffineParts {
  Matrix m;
  Vector c;
};

AffineParts affine_parts(const MonotoneOperator& op) {
  using Kind = MonotoneOperator::Kind;
  const int n = op.dim();
  switch (op.kind()) {
    case Kind::Zero:
      return {Matrix::Zero(n, n), Vector::Zero(n)};
    case Kind::Identity:
      return {Matrix::Identity(n, n), Vector::Zero(n)};
    case Kind::ScaledIdentity:
      return {op.scale() * Matrix::Identity(n, n), Vector::Zero(n)};
    case Kind::SubdifferentialQuadratic:
      return {op.matrix(), op.shift()};
    case Kind::SkewLinear:
      return {op.matrix(), Vector::Zero(n)};
    case Kind::AffineGradient:
      return {op.matrix(), -op.matrix() * op.shift()};
    default:
      throw UsageError("expected an affine single-valued operator");
  }
}

}  // namespace

ScheduleModuli ProblemInstance::schedule_moduli(SolverKind kind) const {
  ScheduleModuli m;
  switch (kind) {
    case SolverKind::FbSetValued:
      break;
    case SolverKind::Fb:
      m.mu = b.moduli().cocoercivity;
      m.eta = d.moduli().cocoercivity;
      break;
    case SolverKind::Fbf:
      m.mu = b.moduli().lipschitz ? std::optional<double>(safe_reciprocal(b.moduli().lipschitz))
                                  : std::nullopt;
      m.eta = d.moduli().lipschitz ? std::optional<double>(safe_reciprocal(d.moduli().lipschitz))
                                   : std::nullopt;
      break;
    case SolverKind::FbfComposite:
      m.mu = b.moduli().lipschitz ? std::optional<double>(safe_reciprocal(b.moduli().lipschitz))
                                  : std::nullopt;
      m.eta = d.moduli().lipschitz ? std::optional<double>(safe_reciprocal(d.moduli().lipschitz))
                                   : std::nullopt;
      if (k) m.knorm = k->operator_norm();
      break;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Projection onto an intersection (Dykstra)

Vector project_intersection(const Vector& x, const ConvexSet& c1, const ConvexSet& c2) {
  Vector xk = x;
  Vector p = Vector::Zero(x.size());
  Vector q = Vector::Zero(x.size());
  for (long it = 0; it < 1000000; ++it) {
    const Vector y = c1.project(xk + p);
    p = xk + p - y;
    const Vector xn = c2.project(y + q);
    q = y + q - xn;
    if (it > 2 && (xn - xk).norm() <= 1e-13 * (1.0 + xn.norm())) return xn;
    xk = xn;
  }
  return xk;
}

// ---------------------------------------------------------------------------
// Constructors

ProblemInstance make_quadratic_over_nullspace(const Vector& d, const LinearMap& l,
                                              const std::optional<BoxBounds>& box) {
  if (d.size() != l.cols()) {
    throw UsageError("make_quadratic_over_nullspace: dim(d) must match cols(L)");
  }
  const int n = static_cast<int>(d.size());
  ProblemInstance pr;
  pr.name = "quadratic_over_nullspace";
  pr.d = MonotoneOperator::affine_gradient(2.0 * Matrix::Identity(n, n), d);
  pr.b = MonotoneOperator::subdifferential_quadratic(
      2.0 * l.adjoint_matrix() * l.matrix(), Vector::Zero(n));
  pr.c = ConvexSet::subspace(l);
  if (box) {
    const ConvexSet box_set = ConvexSet::box(box->lo, box->hi);
    pr.a = MonotoneOperator::normal_cone(box_set);
    pr.oracle = project_intersection(d, pr.c, box_set);
    pr.certificate = OracleCertificate::DykstraProjection;
  } else {
    pr.a = MonotoneOperator::zero(n);
    pr.oracle = pr.c.project(d);
    pr.certificate = OracleCertificate::AnalyticProjection;
  }
  return pr;
}

ProblemInstance make_strongly_monotone(double gamma, const Vector& target,
                                       MonotoneOperator b, ConvexSet c) {
  if (!(gamma > 0.0)) throw UsageError("make_strongly_monotone: gamma must be positive");
  const int n = static_cast<int>(target.size());
  if (b.dim() != n || c.dim() != n) {
    throw UsageError("make_strongly_monotone: dimension mismatch");
  }
  ProblemInstance pr;
  pr.name = "strongly_monotone";
  pr.a = MonotoneOperator::affine_gradient(gamma * Matrix::Identity(n, n), target);
  pr.d = MonotoneOperator::zero(n);
  pr.b = std::move(b);
  pr.c = std::move(c);

  // Unique zero of A + D + N_C by Banach iteration on the projected VI map
  // x -> P_C(x - t(Ax + Dx)); contraction factor sqrt(1 - gamma^2/L^2).
  const AffineParts fa = affine_parts(pr.a);
  const AffineParts fd = affine_parts(pr.d);
  const Matrix g = fa.m + fd.m;
  const Vector offset = fa.c + fd.c;
  const double lips = LinearMap(g).operator_norm();
  const double t = lips > 0.0 ? gamma / (lips * lips) : 1.0;
  Vector x = pr.c.project(target);
  for (int it = 0; it < 1000000; ++it) {
    const Vector xn = pr.c.project(x - t * (g * x + offset));
    const bool done = (xn - x).norm() <= 1e-14 * (1.0 + xn.norm());
    x = xn;
    if (done) break;
  }
  pr.oracle = x;
  pr.certificate = OracleCertificate::ContractionFixedPoint;
  return pr;
}

ProblemInstance make_saddle_composite(const Matrix& q1, const Vector& d1,
                                      const Matrix& q2, const LinearMap& k,
                                      const LinearMap& l,
                                      const std::optional<MonotoneOperator>& d_op) {
  const int n = static_cast<int>(q1.rows());
  if (d1.size() != n || k.cols() != n || l.cols() != n || q2.rows() != k.rows()) {
    throw UsageError("make_saddle_composite: dimension mismatch");
  }
  ProblemInstance pr;
  pr.name = "saddle_composite";
  pr.a = MonotoneOperator::subdifferential_quadratic(q1, -q1 * d1);
  pr.a2 = MonotoneOperator::subdifferential_quadratic(q2, Vector::Zero(q2.rows()));
  pr.k = k;
  pr.d = d_op ? *d_op : MonotoneOperator::zero(n);
  if (pr.d.dim() != n) throw UsageError("make_saddle_composite: D dimension mismatch");
  pr.b = MonotoneOperator::subdifferential_quadratic(
      2.0 * l.adjoint_matrix() * l.matrix(), Vector::Zero(n));
  pr.c = ConvexSet::subspace(l);

  const AffineParts fd = affine_parts(pr.d);
  const Matrix h = q1 + k.adjoint_matrix() * q2 * k.matrix() + fd.m;
  const Vector rhs_top = q1 * d1 - fd.c;

  // Uniqueness: H restricted to null(L) must be invertible. Build a null
  // space basis from the SVD of L.
  Eigen::JacobiSVD<Matrix> svd(l.matrix(), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
  int rank_l = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank_l;
  }
  const int nullity = n - rank_l;
  if (nullity > 0) {
    const Matrix nbasis = svd.matrixV().rightCols(nullity);
    Eigen::FullPivLU<Matrix> lu(nbasis.transpose() * h * nbasis);
    if (lu.rank() < nullity) {
      throw UsageError("make_saddle_composite: singular KKT system (reduced rank " +
                       std::to_string(lu.rank()) + " of " + std::to_string(nullity) + ")");
    }
  }

  const int m = l.rows();
  Matrix kkt = Matrix::Zero(n + m, n + m);
  kkt.topLeftCorner(n, n) = h;
  kkt.topRightCorner(n, m) = l.adjoint_matrix();
  kkt.bottomLeftCorner(m, n) = l.matrix();
  Vector rhs = Vector::Zero(n + m);
  rhs.head(n) = rhs_top;

  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kkt);
  const Vector sol = cod.solve(rhs);
  const double resid = (kkt * sol - rhs).norm();
  if (resid > 1e-8 * (1.0 + rhs.norm())) {
    throw UsageError("make_saddle_composite: singular KKT system (rank " +
                     std::to_string(cod.rank()) + " of " + std::to_string(n + m) +
                     ", residual " + std::to_string(resid) + ")");
  }
  pr.oracle = sol.head(n);
  pr.certificate = OracleCertificate::KktSolve;
  return pr;
}

// ---------------------------------------------------------------------------
// Graph sampling and oracle verification

namespace {

/// Random element of N_C(x) for catalog sets. `scale` controls the
/// magnitude of the cone coefficients.
Vector random_normal_cone_element(const ConvexSet& set, const Vector& x, std::mt19937& rng,
                                  double scale) {
  std::normal_distribution<double> gauss(0.0, scale);
  const int n = set.dim();
  Vector p = Vector::Zero(n);
  switch (set.kind()) {
    case ConvexSet::Kind::Box: {
      const Vector& lo = set.lower();
      const Vector& hi = set.upper();
      const double tol = 1e-9;
      for (int i = 0; i < n; ++i) {
        const bool at_lo = std::isfinite(lo(i)) && x(i) <= lo(i) + tol;
        const bool at_hi = std::isfinite(hi(i)) && x(i) >= hi(i) - tol;
        if (at_lo && at_hi) {
          p(i) = gauss(rng);
        } else if (at_lo) {
          p(i) = -std::abs(gauss(rng));
        } else if (at_hi) {
          p(i) = std::abs(gauss(rng));
        }
      }
      return p;
    }
    case ConvexSet::Kind::Subspace: {
      // ran N_C = row space of L.
      Vector g(set.map().rows());
      for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = gauss(rng);
      return set.map().apply_adjoint(g);
    }
    case ConvexSet::Kind::Singleton:
      for (int i = 0; i < n; ++i) p(i) = gauss(rng);
      return p;
    case ConvexSet::Kind::Ball: {
      const Vector r = x - set.center();
      if (set.radius() > 0.0 && std::abs(r.norm() - set.radius()) <= 1e-9 * (1.0 + set.radius())) {
        return std::abs(gauss(rng)) / set.radius() * r;
      }
      return p;  // interior: {0}
    }
    case ConvexSet::Kind::WholeSpace:
      return p;
  }
  return p;
}

/// Random element of Au for the operator kinds a problem constructor can
/// produce.
Vector random_graph_element(const MonotoneOperator& op, const Vector& u, std::mt19937& rng,
                            double scale) {
  using Kind = MonotoneOperator::Kind;
  if (op.is_single_valued()) return op.eval(u);
  switch (op.kind()) {
    case Kind::SubdifferentialAbsValue: {
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      Vector g(op.dim());
      for (int i = 0; i < op.dim(); ++i) {
        g(i) = u(i) > 0.0 ? 1.0 : (u(i) < 0.0 ? -1.0 : unit(rng));
      }
      return g;
    }
    case Kind::NormalCone:
      return random_normal_cone_element(op.set(), u, rng, scale);
    default:
      throw UnsupportedError("sample_graph_points: no graph sampler for this kind");
  }
}

/// A point of C that also lies in dom A.
Vector feasible_point(const ProblemInstance& pr, const Vector& seed_point) {
  if (pr.a.kind() == MonotoneOperator::Kind::NormalCone) {
    return project_intersection(seed_point, pr.c, pr.a.set());
  }
  return pr.c.project(seed_point);
}

}  // namespace

std::vector<GraphPoint> sample_graph_points(const ProblemInstance& pr, int count,
                                            unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<GraphPoint> pts;
  pts.reserve(count);
  const int n = pr.dim();
  const Vector anchor = pr.oracle ? *pr.oracle : Vector::Zero(n);
  for (int i = 0; i < count; ++i) {
    // Alternate unit-scale and large-scale samples; anchor every fourth
    // sample at the candidate solution so near-active directions appear.
    const double scale = (i % 2 == 0) ? 1.0 : 10.0;
    Vector y(n);
    for (int j = 0; j < n; ++j) y(j) = anchor(j) + gauss(rng) * scale;
    const Vector u = feasible_point(pr, i % 4 == 3 ? anchor : y);
    GraphPoint g;
    g.u = u;
    g.v = random_graph_element(pr.a, u, rng, scale);
    g.p = random_normal_cone_element(pr.c, u, rng, scale);
    g.du = pr.d.eval(u);
    g.w = g.v + g.p + g.du;
    pts.push_back(std::move(g));
  }
  return pts;
}

bool verify_oracle(const ProblemInstance& pr, const Vector& xstar, double tol, int count,
                   unsigned seed) {
  if (xstar.size() != pr.dim()) throw UsageError("verify_oracle: dimension mismatch");
  for (const GraphPoint& g : sample_graph_points(pr, count, seed)) {
    if (inner(g.w, g.u - xstar) < -tol) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Moduli audit

namespace {

struct AuditContext {
  std::mt19937 rng;
  int dim;

  Vector random_vector(double scale) {
    std::normal_distribution<double> gauss(0.0, scale);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = gauss(rng);
    return v;
  }
};

bool audit_operator(const MonotoneOperator& op, const char* label, int pairs,
                    AuditContext& ctx, std::string& detail) {
  const auto& mod = op.moduli();
  for (int i = 0; i < pairs; ++i) {
    const double scale = (i % 2 == 0) ? 1.0 : 10.0;
    Vector x = ctx.random_vector(scale);
    Vector y = ctx.random_vector(scale);
    Vector mx, my;
    if (op.is_single_valued()) {
      mx = op.eval(x);
      my = op.eval(y);
    } else {
      // Evaluate a selection at domain points.
      x = op.kind() == MonotoneOperator::Kind::NormalCone ? op.set().project(x) : x;
      y = op.kind() == MonotoneOperator::Kind::NormalCone ? op.set().project(y) : y;
      mx = op.selection(x);
      my = op.selection(y);
    }
    const double gap = inner(x - y, mx - my);
    const double tol = 1e-10 * (1.0 + x.norm() + y.norm() + mx.norm() + my.norm());
    if (gap < -tol) {
      detail = std::string(label) + ": monotonicity violated";
      return false;
    }
    if (mod.cocoercivity && std::isfinite(*mod.cocoercivity) &&
        gap < *mod.cocoercivity * (mx - my).squaredNorm() - tol) {
      detail = std::string(label) + ": cocoercivity modulus violated";
      return false;
    }
    if (mod.lipschitz && (mx - my).norm() > *mod.lipschitz * (x - y).norm() + tol) {
      detail = std::string(label) + ": Lipschitz modulus violated";
      return false;
    }
    if (mod.strong_monotonicity &&
        gap < *mod.strong_monotonicity * (x - y).squaredNorm() - tol) {
      detail = std::string(label) + ": strong monotonicity modulus violated";
      return false;
    }
  }
  return true;
}

}  // namespace

ModuliAudit audit_moduli(const ProblemInstance& pr, int pairs, unsigned seed) {
  ModuliAudit result;
  AuditContext ctx{std::mt19937(seed), pr.dim()};
  if (!audit_operator(pr.a, "A", pairs, ctx, result.detail) ||
      !audit_operator(pr.d, "D", pairs, ctx, result.detail) ||
      !audit_operator(pr.b, "B", pairs, ctx, result.detail)) {
    result.ok = false;
    return result;
  }
  if (pr.a2) {
    AuditContext dual_ctx{std::mt19937(seed + 1), pr.a2->dim()};
    if (!audit_operator(*pr.a2, "A2", pairs, dual_ctx, result.detail)) {
      result.ok = false;
      return result;
    }
  }
  // C = zer B consistency on sampled points of C.
  std::vector<Vector> pts = pr.c.sample_points();
  for (int i = 0; i < 8; ++i) pts.push_back(pr.c.project(ctx.random_vector(3.0)));
  for (const Vector& pt : pts) {
    const Vector bx = pr.b.is_single_valued() ? pr.b.eval(pt) : pr.b.selection(pt);
    if (bx.norm() > 1e-9 * (1.0 + pt.norm())) {
      result.ok = false;
      result.detail = "B does not vanish on C";
      return result;
    }
  }
  return result;
}

}  // namespace pensplit
