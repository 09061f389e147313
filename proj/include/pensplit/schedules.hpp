#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pensplit/extended_real.hpp"

namespace pensplit {

enum class SolverKind { FbSetValued, Fb, Fbf, FbfComposite };

std::string to_string(SolverKind kind);
std::optional<SolverKind> solver_kind_from_string(const std::string& name);

/// Step sizes lambda_n = lambda0 * n^-p and penalties beta_n = beta0 * n^q,
/// n >= 1. The only built-in schedule family; all hypothesis checks are
/// exponent arithmetic, never truncated summation.
class PolynomialSchedule {
public:
  PolynomialSchedule(double lambda0, double p, double beta0, double q);

  double lambda(long n) const;
  double beta(long n) const;

  double lambda0() const { return lambda0_; }
  double p() const { return p_; }
  double beta0() const { return beta0_; }
  double q() const { return q_; }

private:
  double lambda0_, p_, beta0_, q_;
};

/// Analytic classification of a polynomial schedule against the
/// hypotheses the convergence theorems need.
struct ScheduleReport {
  bool in_l2 = false;                    // 2p > 1
  bool in_l1 = false;                    // p > 1
  bool l2_not_l1 = false;                // the step-size hypothesis (iii)
  bool penalty_ratio_summable = false;   // sum lambda_n / beta_n < inf  (p + q > 1)
  ExtendedReal lambda_limit;             // lim lambda_n (0, lambda0 or +inf)
  ExtendedReal lambda_beta_limit;        // lim lambda_n beta_n (0, lambda0*beta0 or +inf)

  /// limsup lambda_n beta_n < 2 mu, with mu the cocoercivity modulus of B.
  bool fb_bound_ok(double mu) const;
  /// limsup (lambda_n beta_n / mu + lambda_n / eta) < 1, with 1/mu and
  /// 1/eta the Lipschitz moduli of B and D.
  bool fbf_bound_ok(double mu, double eta) const;
  /// limsup (lambda_n beta_n / mu + lambda_n sqrt(2(1/eta^2 + |K|^2))) < 1.
  bool composite_bound_ok(double mu, double eta, double knorm) const;
};

ScheduleReport classify(const PolynomialSchedule& s);

/// Moduli a solver's schedule check needs; mu/eta follow the paper's
/// parameterization (cocoercivity for Fb, reciprocal Lipschitz constants
/// for the Tseng-type kernels). May be +inf for zero operators.
struct ScheduleModuli {
  std::optional<double> mu;
  std::optional<double> eta;
  std::optional<double> knorm;
};

struct Admissibility {
  bool ok = true;
  std::vector<std::string> reasons;  // each failed hypothesis, verbatim
};

Admissibility admissible_for(const PolynomialSchedule& s, SolverKind kind,
                             const ScheduleModuli& moduli);

}  // namespace pensplit
