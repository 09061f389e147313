#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pensplit/operators.hpp"
#include "pensplit/schedules.hpp"

namespace pensplit {

/// How a problem's oracle solution was computed. Oracles are produced by
/// machinery independent of the solvers under test.
enum class OracleCertificate {
  AnalyticProjection,      // closed-form projection onto a subspace
  DykstraProjection,       // Dykstra alternating projections onto C ∩ box
  ContractionFixedPoint,   // Banach iteration on the projected VI map
  KktSolve,                // dense rank-revealing KKT factorization
};

/// Benchmark monotone inclusion 0 in Ax + Dx + N_C(x), optionally with a
/// composite term K* A2 K for the primal-dual solver, plus an oracle
/// solution where one is computable.
struct ProblemInstance {
  std::string name;
  MonotoneOperator a;  // A, or A1 for the composite problem
  MonotoneOperator d;
  MonotoneOperator b;
  ConvexSet c;
  std::optional<LinearMap> k;
  std::optional<MonotoneOperator> a2;
  std::optional<Vector> oracle;
  OracleCertificate certificate = OracleCertificate::AnalyticProjection;

  int dim() const { return a.dim(); }
  int dual_dim() const { return k ? k->rows() : 0; }
  bool is_composite() const { return k.has_value(); }

  /// Moduli for the schedule admissibility check of the given solver:
  /// cocoercivity of B for the forward-backward kernel, reciprocal
  /// Lipschitz constants for the Tseng-type kernels.
  ScheduleModuli schedule_moduli(SolverKind kind) const;
};

struct StoppingPolicy {
  long max_iter = 100000;
  double tol = 1e-8;
  long record_every = 100;
};

struct BoxBounds {
  Vector lo;
  Vector hi;
};

/// min |x - d|^2 over argmin |Lx|^2 (optionally intersected with a box):
/// D = 2(x - d), B = 2 L^T L, C = null L, A = N_box or 0. The oracle is
/// the projection of d onto C ∩ box.
ProblemInstance make_quadratic_over_nullspace(const Vector& d, const LinearMap& l,
                                              const std::optional<BoxBounds>& box = {});

/// A = gamma (x - target) (gamma-strongly monotone), D = 0, with
/// caller-supplied penalty operator B and constraint set C = zer B.
/// The unique zero of A + N_C is found by a projected contraction
/// iteration.
ProblemInstance make_strongly_monotone(double gamma, const Vector& target,
                                       MonotoneOperator b, ConvexSet c);

/// 0 in A1 x + K* A2 K x + D x + N_C(x) with A1 = Q1(. - d1),
/// A2 = Q2 ., B = 2 L^T L, C = null L. Oracle from the KKT system
/// [H, L^T; L, 0][x; nu] = [Q1 d1 - c_D; 0], H = Q1 + K^T Q2 K + G_D.
ProblemInstance make_saddle_composite(const Matrix& q1, const Vector& d1,
                                      const Matrix& q2, const LinearMap& k,
                                      const LinearMap& l,
                                      const std::optional<MonotoneOperator>& d_op = {});

/// Certifies a candidate zero via the maximal-monotonicity
/// characterization: <w, u - x*> >= -tol over `count` sampled graph
/// points of A + D + N_C.
bool verify_oracle(const ProblemInstance& pr, const Vector& xstar, double tol,
                   int count = 500, unsigned seed = 20240001);

/// Sampled points of gr(A + D + N_C) with their decomposition. Mixes unit-
/// and large-scale normal components so that near-active violations are
/// caught.
std::vector<GraphPoint> sample_graph_points(const ProblemInstance& pr, int count,
                                            unsigned seed);

struct ModuliAudit {
  bool ok = true;
  std::string detail;  // first violated inequality, when not ok
};

/// Randomized check of every declared modulus (cocoercivity, Lipschitz,
/// strong monotonicity, plain monotonicity) of A, D and B, plus the
/// C = zer B consistency samples.
ModuliAudit audit_moduli(const ProblemInstance& pr, int pairs = 200,
                         unsigned seed = 20240002);

/// Dykstra's alternating projections onto the intersection of two catalog
/// sets; exact projection in the limit, iterated to 1e-13 increments.
Vector project_intersection(const Vector& x, const ConvexSet& c1, const ConvexSet& c2);

}  // namespace pensplit
