#pragma once

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "dirlab/approx_functions.hpp"
#include "dirlab/intervals.hpp"
#include "dirlab/lattice.hpp"

namespace dirlab {

struct DirichletOptions {
  /// Non-strict first inequality with ψ(t) = 1/t (the psi argument is ignored).
  bool classic = false;
  /// Left end of the scanned range; defaults to t0 of ψ (1 in classic mode).
  std::optional<double> t_start;
  /// Largest admissible number of integer points in the q-box.
  double q_box_budget = 1e12;
};

/// ‖Aq - p‖_α < ψ(t), ‖q‖_β < t solvable with q ≠ 0.
bool dirichlet_solvable(const DyadicMatrix& A, const PsiFunction& psi, double t, const WeightPair& w,
                        const DirichletOptions& opts = {});

struct CoverPair {
  std::vector<mpz_class> p;  // nearest integers to Aq (ties to even)
  std::vector<mpz_class> q;
  double q_norm = 0.0;    // ‖q‖_β
  double residual = 0.0;  // ‖Aq - p‖_α
  Interval cover;         // t-range on which (p, q) solves the system
};

struct UncoveredInterval {
  Interval interval;
  bool boundary = false;  // length <= 1e-9 max(1, hi)
};

struct ScanReport {
  double t_start = 0.0;
  double T = 0.0;
  bool classic = false;
  std::vector<CoverPair> pairs;
  std::vector<UncoveredInterval> uncovered;

  /// No uncovered interval beyond the tolerance band.
  bool passes() const;
};

/// Exact cover of (t_start, T] by the solution intervals of all pairs.
ScanReport psi_dirichlet_scan(const DyadicMatrix& A, const PsiFunction& psi, double T, const WeightPair& w,
                              const DirichletOptions& opts = {});

/// sup{t ∈ [lo, 10 hi] : ψ(t) > e}, +inf beyond; shared by the scan and the
/// continued-fraction oracle.
double cover_end(const PsiFunction& psi, double e, double t_start, double T);

/// Nearest integer, ties to even.
mpz_class round_half_even(const mpz_class& num, int bits);

}  // namespace dirlab
