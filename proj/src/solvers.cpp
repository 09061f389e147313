#include "pensplit/solvers.hpp"

#include <cmath>
#include <string>

namespace pensplit {

Vector SolverState::ergodic() const {
  if (!(tau > 0.0)) throw UsageError("ergodic: no iterates accumulated yet");
  return z_acc / tau;
}

void ergodic_update(SolverState& state, double lambda, const Vector& x) {
  if (!(lambda > 0.0)) throw UsageError("ergodic_update: lambda must be positive");
  if (state.z_acc.size() == 0) {
    state.z_acc = Vector::Zero(x.size());
    state.z_comp = Vector::Zero(x.size());
  }
  if (state.z_acc.size() != x.size()) throw UsageError("ergodic_update: dimension mismatch");
  const Vector y = lambda * x - state.z_comp;
  const Vector t = state.z_acc + y;
  state.z_comp = (t - state.z_acc) - y;
  state.z_acc = t;

  const double ys = lambda - state.tau_comp;
  const double ts = state.tau + ys;
  state.tau_comp = (ts - state.tau) - ys;
  state.tau = ts;
}

// ---------------------------------------------------------------------------
// Kernels

namespace {
void check_step_args(double lambda, double beta) {
  if (!(lambda > 0.0)) throw UsageError("step: lambda must be positive");
  if (!(beta > 0.0)) throw UsageError("step: beta must be positive");
}
}  // namespace

FbSetValuedStep fb_setvalued_step(const MonotoneOperator& a, const MonotoneOperator& d,
                                  const MonotoneOperator& b, double lambda, double beta,
                                  const Vector& x) {
  check_step_args(lambda, beta);
  Vector w = b.selection(x);
  const Vector dx = d.eval(x);
  Vector x_next = a.resolvent(lambda, x - lambda * dx - lambda * beta * w);
  return {std::move(x_next), std::move(w)};
}

Vector fb_step(const MonotoneOperator& a, const MonotoneOperator& d,
               const MonotoneOperator& b, double lambda, double beta, const Vector& x) {
  check_step_args(lambda, beta);
  const Vector bx = b.eval(x);
  const Vector dx = d.eval(x);
  return a.resolvent(lambda, x - lambda * dx - lambda * beta * bx);
}

FbfStep fbf_step(const MonotoneOperator& a, const MonotoneOperator& d,
                 const MonotoneOperator& b, double lambda, double beta, const Vector& x) {
  check_step_args(lambda, beta);
  const Vector bx = b.eval(x);
  const Vector dx = d.eval(x);
  Vector p = a.resolvent(lambda, x - lambda * dx - lambda * beta * bx);
  Vector x_next = lambda * beta * (bx - b.eval(p)) + lambda * (dx - d.eval(p)) + p;
  return {std::move(p), std::move(x_next)};
}

FbfCompositeStep fbf_composite_step(const MonotoneOperator& a1, const MonotoneOperator& a2,
                                    const LinearMap& k, const MonotoneOperator& d,
                                    const MonotoneOperator& b, double lambda, double beta,
                                    const Vector& x, const Vector& v) {
  check_step_args(lambda, beta);
  if (x.size() != k.cols() || v.size() != k.rows()) {
    throw UsageError("fbf_composite_step: x/v dimensions do not conform with K");
  }
  if (a2.kind() == MonotoneOperator::Kind::Zero) {
    throw UsageError(
        "fbf_composite_step: A2 of kind Zero is unsupported (its inverse has no "
        "catalog resolvent)");
  }
  const Vector bx = b.eval(x);
  const Vector dx = d.eval(x);
  Vector p = a1.resolvent(lambda, x - lambda * (dx + k.apply_adjoint(v)) - lambda * beta * bx);
  Vector q = a2.inverse_resolvent(lambda, v + lambda * k.apply(x));
  Vector x_next =
      lambda * beta * (bx - b.eval(p)) + lambda * (dx - d.eval(p)) + lambda * k.apply_adjoint(v - q) + p;
  Vector v_next = lambda * k.apply(p - x) + q;
  return {std::move(p), std::move(q), std::move(x_next), std::move(v_next)};
}

// ---------------------------------------------------------------------------
// Run loop

namespace {

void validate_configuration(const ProblemInstance& pr, SolverKind kind) {
  if (pr.is_composite() != (kind == SolverKind::FbfComposite)) {
    throw UsageError(pr.is_composite()
                         ? "run: composite problem requires the fbf_composite solver"
                         : "run: fbf_composite requires a problem with K and A2");
  }
  switch (kind) {
    case SolverKind::Fb:
      if (!pr.b.is_single_valued()) {
        throw UsageError("run: fb requires single-valued B; use fb_setvalued");
      }
      [[fallthrough]];
    case SolverKind::FbSetValued:
      if (!pr.d.is_single_valued()) throw UsageError("run: D must be single-valued");
      break;
    case SolverKind::Fbf:
    case SolverKind::FbfComposite:
      if (!pr.b.is_single_valued() || !pr.d.is_single_valued()) {
        throw UsageError("run: Tseng-type kernels require single-valued B and D");
      }
      break;
  }
}

double penalty_residual_at(const ProblemInstance& pr, SolverKind kind, const Vector& x,
                           const std::optional<Vector>& w) {
  if (kind == SolverKind::FbSetValued) return w ? w->norm() : 0.0;
  return pr.b.eval(x).norm();
}

}  // namespace

RunResult run(const ProblemInstance& pr, const PolynomialSchedule& schedule,
              SolverKind kind, const StoppingPolicy& stop, const RunOptions& opts) {
  if (stop.max_iter < 0) throw UsageError("run: max_iter must be >= 0");
  if (!(stop.tol > 0.0)) throw UsageError("run: tol must be positive");
  if (stop.record_every < 1) throw UsageError("run: record_every must be >= 1");
  validate_configuration(pr, kind);

  RunResult result;
  SolverState& st = result.state;
  st.x = opts.x0 ? *opts.x0 : Vector::Zero(pr.dim());
  if (st.x.size() != pr.dim() || !all_finite(st.x)) {
    throw UsageError("run: initial point has wrong dimension or non-finite entries");
  }
  if (kind == SolverKind::FbfComposite) {
    st.v = opts.v0 ? *opts.v0 : Vector::Zero(pr.dual_dim());
    if (st.v->size() != pr.dual_dim() || !all_finite(*st.v)) {
      throw UsageError("run: initial dual point has wrong dimension or non-finite entries");
    }
  } else if (opts.v0) {
    throw UsageError("run: v0 is only meaningful for the composite solver");
  }

  const Admissibility adm = admissible_for(schedule, kind, pr.schedule_moduli(kind));
  if (!adm.ok && !opts.override_admissibility) {
    result.status = RunStatus::Rejected;
    result.reject_reasons = adm.reasons;
    return result;
  }

  // Tolerance stop bookkeeping: both |x_{n+1}-x_n|/lambda_n and |Bx_n|
  // must stay below tol for 100 consecutive recorded steps.
  constexpr int kConsecutiveRecords = 100;
  int quiet_records = 0;

  // Set-valued hypothesis monitor: partial sums of (lambda beta |w|)^2 at
  // each recorded step.
  double w_l2_sum = 0.0;
  std::vector<std::pair<long, double>> w_l2_history;

  for (long n = 1; n <= stop.max_iter; ++n) {
    const double lambda = schedule.lambda(n);
    const double beta = schedule.beta(n);
    ergodic_update(st, lambda, st.x);

    Vector x_next;
    std::optional<Vector> v_next;
    switch (kind) {
      case SolverKind::FbSetValued: {
        FbSetValuedStep s = fb_setvalued_step(pr.a, pr.d, pr.b, lambda, beta, st.x);
        x_next = std::move(s.x_next);
        st.last_w = std::move(s.w);
        w_l2_sum += std::pow(lambda * beta * st.last_w->norm(), 2);
        break;
      }
      case SolverKind::Fb:
        x_next = fb_step(pr.a, pr.d, pr.b, lambda, beta, st.x);
        break;
      case SolverKind::Fbf: {
        FbfStep s = fbf_step(pr.a, pr.d, pr.b, lambda, beta, st.x);
        x_next = std::move(s.x_next);
        st.last_p = std::move(s.p);
        break;
      }
      case SolverKind::FbfComposite: {
        FbfCompositeStep s =
            fbf_composite_step(pr.a, *pr.a2, *pr.k, pr.d, pr.b, lambda, beta, st.x, *st.v);
        x_next = std::move(s.x_next);
        v_next = std::move(s.v_next);
        st.last_p = std::move(s.p);
        break;
      }
    }

    if (!all_finite(x_next) || (v_next && !all_finite(*v_next))) {
      result.status = RunStatus::AbortedNonFinite;
      return result;  // st still holds the last good iterate x_n
    }

    const bool record_due = (n % stop.record_every) == 0;
    if (record_due) {
      IterationRecord rec;
      rec.n = n;
      rec.lambda = lambda;
      rec.beta = beta;
      rec.step_displacement = (x_next - st.x).norm();
      rec.penalty_residual = penalty_residual_at(pr, kind, st.x, st.last_w);
      if (st.last_p) rec.fbf_gap = (st.x - *st.last_p).norm();
      if (pr.oracle) {
        rec.oracle_error_x = (st.x - *pr.oracle).norm();
        rec.oracle_error_z = (st.ergodic() - *pr.oracle).norm();
      }
      result.records.push_back(rec);
      if (kind == SolverKind::FbSetValued) w_l2_history.emplace_back(n, w_l2_sum);

      if (rec.step_displacement / lambda < stop.tol && rec.penalty_residual < stop.tol) {
        ++quiet_records;
      } else {
        quiet_records = 0;
      }
    }

    st.x = std::move(x_next);
    if (v_next) st.v = std::move(v_next);
    st.n = n + 1;
    result.iterations = n;

    if (quiet_records >= kConsecutiveRecords) {
      result.stopped_by_tolerance = true;
      break;
    }
  }

  // Superlinear-in-log-n growth of the (lambda beta |w|)^2 partial sums:
  // compare the increments over [n/4, n/2] and [n/2, n].
  if (kind == SolverKind::FbSetValued && w_l2_history.size() >= 8) {
    const long n_final = w_l2_history.back().first;
    auto sum_at = [&](long target) {
      double s = w_l2_history.front().second;
      for (const auto& [n, v] : w_l2_history) {
        if (n <= target) s = v;
      }
      return s;
    };
    const double s_quarter = sum_at(n_final / 4);
    const double s_half = sum_at(n_final / 2);
    const double inc_early = s_half - s_quarter;
    const double inc_late = w_l2_sum - s_half;
    if (inc_late > 1.25 * inc_early + 1e-12 && inc_late > 1e-10) {
      result.hypothesis_unverified = true;
    }
  }

  return result;
}

}  // namespace pensplit
