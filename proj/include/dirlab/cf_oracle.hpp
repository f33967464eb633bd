#pragma once

#include <string>
#include <vector>

#include "dirlab/approx_functions.hpp"
#include "dirlab/dirichlet.hpp"
#include "dirlab/intervals.hpp"

namespace dirlab {

struct Convergent {
  long long p;
  long long q;
};

struct ContinuedFraction {
  double alpha = 0.0;
  std::vector<long long> partial_quotients;  // a_1, a_2, ...
  std::vector<Convergent> convergents;       // q strictly increasing
  /// Expansion stopped before K quotients (rational input, exhausted
  /// precision, or 64-bit overflow).
  bool truncated = false;
};

/// First K partial quotients of alpha ∈ (0,1) and the convergents with q_k
/// strictly increasing (the 0/1 convergent is dropped when a_1 = 1).
ContinuedFraction cf_expand(double alpha, int K);

/// |q alpha - p| with a single rounding.
double cf_residual(double alpha, const Convergent& c);

struct CfFailure {
  int k;            // index into convergents
  Interval t_range;  // t in (q_k, q_{k+1}] where the system fails
  bool boundary = false;
};

struct FiniteHorizonVerdict {
  bool pass = false;   // no failure beyond the burn-in
  double horizon = 0;  // q_K
  std::vector<CfFailure> failures;
  bool truncated = false;
};

/// m = n = 1 oracle: by the best-approximation property, for t ∈ (q_k, q_{k+1}]
/// the system is solvable iff |q_k α - p_k| < ψ(t).
FiniteHorizonVerdict cf_is_psi_dirichlet(double alpha, const PsiFunction& psi, int K, int burn_in = 0);

/// Failure t-set of the oracle on (t_start, T], merged.
IntervalSet cf_failure_set(const FiniteHorizonVerdict& v, double t_start, double T);

struct OracleAgreement {
  bool agree = false;
  std::size_t cf_parts = 0;    // after dropping tolerance-band slivers
  std::size_t scan_parts = 0;
  std::string detail;          // first mismatch, empty when agreeing
};

/// Interval-by-interval comparison of the two failure sets. Parts no longer
/// than 1e-9 max(1, hi) are ignored on both sides; endpoints must agree to
/// rel_tol max(1, |x|).
OracleAgreement compare_failure_sets(const IntervalSet& cf, const ScanReport& scan, double rel_tol = 1e-9);

}  // namespace dirlab
