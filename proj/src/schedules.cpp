#include "pensplit/schedules.hpp"

#include <cmath>
#include <limits>

#include "pensplit/errors.hpp"

namespace pensplit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// lim lambda_n = lambda0 * n^-p in [0, +inf].
double lambda_limit(double lambda0, double p) {
  if (p > 0.0) return 0.0;
  if (p == 0.0) return lambda0;
  return kInf;
}
}  // namespace

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::FbSetValued: return "fb_setvalued";
    case SolverKind::Fb: return "fb";
    case SolverKind::Fbf: return "fbf";
    case SolverKind::FbfComposite: return "fbf_composite";
  }
  return "?";
}

std::optional<SolverKind> solver_kind_from_string(const std::string& name) {
  if (name == "fb_setvalued") return SolverKind::FbSetValued;
  if (name == "fb") return SolverKind::Fb;
  if (name == "fbf") return SolverKind::Fbf;
  if (name == "fbf_composite") return SolverKind::FbfComposite;
  return std::nullopt;
}

PolynomialSchedule::PolynomialSchedule(double lambda0, double p, double beta0, double q)
    : lambda0_(lambda0), p_(p), beta0_(beta0), q_(q) {
  if (!(lambda0 > 0.0)) throw UsageError("schedule: lambda0 must be positive");
  if (!(beta0 > 0.0)) throw UsageError("schedule: beta0 must be positive");
  if (!std::isfinite(p) || !std::isfinite(q)) {
    throw UsageError("schedule: exponents must be finite");
  }
}

double PolynomialSchedule::lambda(long n) const {
  if (n < 1) throw UsageError("schedule: n must be >= 1");
  return lambda0_ * std::pow(static_cast<double>(n), -p_);
}

double PolynomialSchedule::beta(long n) const {
  if (n < 1) throw UsageError("schedule: n must be >= 1");
  return beta0_ * std::pow(static_cast<double>(n), q_);
}

ScheduleReport classify(const PolynomialSchedule& s) {
  ScheduleReport r;
  r.in_l2 = 2.0 * s.p() > 1.0;
  r.in_l1 = s.p() > 1.0;
  r.l2_not_l1 = r.in_l2 && !r.in_l1;
  // sum lambda_n / beta_n = (lambda0/beta0) sum n^-(p+q)
  r.penalty_ratio_summable = s.p() + s.q() > 1.0;
  const double ll = lambda_limit(s.lambda0(), s.p());
  r.lambda_limit = std::isinf(ll) ? ExtendedReal::infinity() : ExtendedReal::finite(ll);
  if (s.q() < s.p()) {
    r.lambda_beta_limit = ExtendedReal::finite(0.0);
  } else if (s.q() == s.p()) {
    r.lambda_beta_limit = ExtendedReal::finite(s.lambda0() * s.beta0());
  } else {
    r.lambda_beta_limit = ExtendedReal::infinity();
  }
  return r;
}

bool ScheduleReport::fb_bound_ok(double mu) const {
  if (!(mu > 0.0)) throw UsageError("fb_bound_ok: mu must be positive");
  return lambda_beta_limit < 2.0 * mu;
}

namespace {

// limsup(lambda_n beta_n * L_b + lambda_n * L_d) < 1, written with
// Lipschitz constants so that a zero operator (L = 0) kills its term
// pointwise even when the schedule factor diverges.
bool tseng_bound(const ScheduleReport& rep, double lambda_lim, double l_b, double l_d) {
  double total = 0.0;
  if (l_b > 0.0) {
    if (!rep.lambda_beta_limit.is_finite()) return false;
    total += rep.lambda_beta_limit.value() * l_b;
  }
  if (l_d > 0.0) {
    if (std::isinf(lambda_lim)) return false;
    total += lambda_lim * l_d;
  }
  return total < 1.0;
}

double reciprocal(double modulus, const char* who) {
  if (!(modulus > 0.0)) throw UsageError(std::string(who) + ": modulus must be positive");
  return std::isinf(modulus) ? 0.0 : 1.0 / modulus;
}

}  // namespace

bool ScheduleReport::fbf_bound_ok(double mu, double eta) const {
  const double l_b = reciprocal(mu, "fbf_bound_ok");
  const double l_d = reciprocal(eta, "fbf_bound_ok");
  return tseng_bound(*this, lambda_limit.as_double(), l_b, l_d);
}

bool ScheduleReport::composite_bound_ok(double mu, double eta, double knorm) const {
  if (knorm < 0.0) throw UsageError("composite_bound_ok: knorm must be nonnegative");
  const double l_b = reciprocal(mu, "composite_bound_ok");
  const double l_d = reciprocal(eta, "composite_bound_ok");
  // Lipschitz modulus of the product-space forward operator.
  const double eta_tilde = std::sqrt(2.0 * (l_d * l_d + knorm * knorm));
  return tseng_bound(*this, lambda_limit.as_double(), l_b, eta_tilde);
}

Admissibility admissible_for(const PolynomialSchedule& s, SolverKind kind,
                             const ScheduleModuli& moduli) {
  const ScheduleReport rep = classify(s);
  Admissibility a;
  if (!rep.l2_not_l1) {
    a.ok = false;
    a.reasons.push_back("(λ_n) ∈ ℓ²∖ℓ¹ violated");
  }
  if (!rep.penalty_ratio_summable) {
    a.ok = false;
    a.reasons.push_back("Σ λ_n/β_n < +∞ violated");
  }
  switch (kind) {
    case SolverKind::FbSetValued:
      // (lambda_n beta_n |w_n|) in l2 is not checkable a priori; the run
      // loop monitors it.
      break;
    case SolverKind::Fb: {
      if (!moduli.mu) throw UsageError("admissible_for: fb requires mu");
      if (!rep.fb_bound_ok(*moduli.mu)) {
        a.ok = false;
        a.reasons.push_back("limsup λ_nβ_n < 2μ violated");
      }
      break;
    }
    case SolverKind::Fbf: {
      if (!moduli.mu || !moduli.eta) throw UsageError("admissible_for: fbf requires mu and eta");
      if (!rep.fbf_bound_ok(*moduli.mu, *moduli.eta)) {
        a.ok = false;
        a.reasons.push_back("limsup(λ_nβ_n/μ + λ_n/η) < 1 violated");
      }
      break;
    }
    case SolverKind::FbfComposite: {
      if (!moduli.mu || !moduli.eta || !moduli.knorm) {
        throw UsageError("admissible_for: fbf_composite requires mu, eta and knorm");
      }
      if (!rep.composite_bound_ok(*moduli.mu, *moduli.eta, *moduli.knorm)) {
        a.ok = false;
        a.reasons.push_back("limsup(λ_nβ_n/μ + λ_n·η̃) < 1 violated");
      }
      break;
    }
  }
  return a;
}

}  // namespace pensplit
