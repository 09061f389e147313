#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pensplit/operators.hpp"
#include "pensplit/problems.hpp"
#include "pensplit/schedules.hpp"

namespace pensplit {

/// Mutable iterate bundle of a run. The ergodic accumulator and its
/// weight use compensated summation; 1e5+ additions of shrinking terms
/// lose digits otherwise.
struct SolverState {
  long n = 1;                     // index of the current iterate x_n
  Vector x;
  std::optional<Vector> v;        // dual iterate of the composite kernel
  Vector z_acc;                   // sum of lambda_k x_k
  Vector z_comp;                  // Kahan compensation for z_acc
  double tau = 0.0;               // sum of lambda_k
  double tau_comp = 0.0;
  std::optional<Vector> last_p;   // p_n of the Tseng-type kernels
  std::optional<Vector> last_w;   // w_n of the set-valued kernel

  /// z_n = z_acc / tau. UsageError before the first accumulation.
  Vector ergodic() const;
};

struct IterationRecord {
  long n = 0;
  double lambda = 0.0;
  double beta = 0.0;
  double step_displacement = 0.0;  // |x_{n+1} - x_n|
  double penalty_residual = 0.0;   // |B x_n| (or |w_n| for the set-valued kernel)
  std::optional<double> fbf_gap;   // |x_n - p_n|
  std::optional<double> oracle_error_x;
  std::optional<double> oracle_error_z;
};

// --- stepping kernels -------------------------------------------------------

struct FbSetValuedStep {
  Vector x_next;
  Vector w;
};

/// x_{n+1} = J_{lambda A}(x_n - lambda D x_n - lambda beta w_n),
/// w_n = selection(B, x_n).
FbSetValuedStep fb_setvalued_step(const MonotoneOperator& a, const MonotoneOperator& d,
                                  const MonotoneOperator& b, double lambda, double beta,
                                  const Vector& x);

/// x_{n+1} = J_{lambda A}(x_n - lambda D x_n - lambda beta B x_n).
Vector fb_step(const MonotoneOperator& a, const MonotoneOperator& d,
               const MonotoneOperator& b, double lambda, double beta, const Vector& x);

struct FbfStep {
  Vector p;
  Vector x_next;
};

/// p_n = J_{lambda A}(x_n - lambda D x_n - lambda beta B x_n),
/// x_{n+1} = lambda beta (B x_n - B p_n) + lambda (D x_n - D p_n) + p_n.
/// Exactly two evaluations each of B and D.
FbfStep fbf_step(const MonotoneOperator& a, const MonotoneOperator& d,
                 const MonotoneOperator& b, double lambda, double beta, const Vector& x);

struct FbfCompositeStep {
  Vector p;
  Vector q;
  Vector x_next;
  Vector v_next;
};

/// Primal-dual Tseng step; J_{lambda A2^{-1}} is always reached through
/// the Moreau identity, so only a resolvent of A2 is required.
FbfCompositeStep fbf_composite_step(const MonotoneOperator& a1, const MonotoneOperator& a2,
                                    const LinearMap& k, const MonotoneOperator& d,
                                    const MonotoneOperator& b, double lambda, double beta,
                                    const Vector& x, const Vector& v);

/// z_acc += lambda x; tau += lambda (compensated).
void ergodic_update(SolverState& state, double lambda, const Vector& x);

// --- run loop ----------------------------------------------------------------

enum class RunStatus {
  Completed,         // max_iter reached or tolerance stop
  Rejected,          // schedule failed the hypothesis checks, no override
  AbortedNonFinite,  // NaN/Inf appeared; state holds the last good iterate
};

struct RunOptions {
  std::optional<Vector> x0;  // defaults to the zero vector
  std::optional<Vector> v0;  // composite only; defaults to zero
  bool override_admissibility = false;
};

struct RunResult {
  RunStatus status = RunStatus::Completed;
  std::vector<std::string> reject_reasons;
  SolverState state;
  std::vector<IterationRecord> records;
  long iterations = 0;               // completed steps
  bool stopped_by_tolerance = false;
  /// Set-valued kernel only: the running sum of (lambda beta |w|)^2 kept
  /// growing superlinearly in log n, so the l2 hypothesis of the
  /// convergence theorem could not be confirmed.
  bool hypothesis_unverified = false;
};

RunResult run(const ProblemInstance& pr, const PolynomialSchedule& schedule,
              SolverKind kind, const StoppingPolicy& stop, const RunOptions& opts = {});

}  // namespace pensplit
