#include "dirlab/dirichlet.hpp"

#include <cmath>
#include <limits>

#include "dirlab/errors.hpp"

namespace dirlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double psi_value(const PsiFunction& psi, double t, bool classic) { return classic ? 1.0 / t : psi(t); }

void check_budget(const WeightPair& w, double t, const DirichletOptions& opts) {
  double count = 1.0;
  for (double b : w.beta()) count *= 2.0 * std::ceil(std::pow(t, b)) + 1.0;
  if (count > opts.q_box_budget) throw BudgetError("dirichlet: q-box at t exceeds the enumeration budget");
}

Box system_box(const WeightPair& w, double psi_t, double t, bool classic) {
  std::vector<BoxSide> sides;
  for (double a : w.alpha()) {
    const double h = std::pow(psi_t, a);
    sides.push_back(BoxSide{-h, h, classic, classic});
  }
  for (double b : w.beta()) {
    const double h = std::pow(t, b);
    sides.push_back(BoxSide{-h, h});
  }
  return Box(std::move(sides));
}

void check_shapes(const DyadicMatrix& A, const WeightPair& w) {
  if (A.rows() != w.m() || A.cols() != w.n()) throw ValidationError("dirichlet: A must be m x n matching the weights");
}

}  // namespace

mpz_class round_half_even(const mpz_class& num, int bits) {
  if (bits == 0) return num;
  mpz_class q, r;
  mpz_fdiv_q_2exp(q.get_mpz_t(), num.get_mpz_t(), bits);
  mpz_fdiv_r_2exp(r.get_mpz_t(), num.get_mpz_t(), bits);
  mpz_class half;
  mpz_ui_pow_ui(half.get_mpz_t(), 2, bits - 1);
  const int c = cmp(r, half);
  if (c > 0 || (c == 0 && mpz_odd_p(q.get_mpz_t()))) q += 1;
  return q;
}

bool dirichlet_solvable(const DyadicMatrix& A, const PsiFunction& psi, double t, const WeightPair& w,
                        const DirichletOptions& opts) {
  check_shapes(A, w);
  if (!(t > 1.0)) throw DomainError("dirichlet: t must exceed 1");
  check_budget(w, t, opts);
  const Box box = system_box(w, psi_value(psi, t, opts.classic), t, opts.classic);
  return box_has_point(lattice_from_matrix(A), box).found;
}

double cover_end(const PsiFunction& psi, double e, double t_start, double T) {
  return psi_inverse(psi, e, t_start, 10.0 * T);
}

bool ScanReport::passes() const {
  for (const auto& u : uncovered)
    if (!u.boundary) return false;
  return true;
}

ScanReport psi_dirichlet_scan(const DyadicMatrix& A, const PsiFunction& psi, double T, const WeightPair& w,
                              const DirichletOptions& opts) {
  check_shapes(A, w);
  ScanReport rep;
  rep.classic = opts.classic;
  rep.t_start = opts.t_start.value_or(opts.classic ? 1.0 : psi.t0());
  rep.T = T;
  if (!opts.classic && rep.t_start < psi.t0()) throw DomainError("dirichlet: t_start is below t0");
  if (!(rep.t_start >= 1.0) || !(T > rep.t_start)) throw ValidationError("dirichlet: need 1 <= t_start < T");
  check_budget(w, T, opts);

  const int m = A.rows(), n = A.cols();
  const UnimodularLattice L = lattice_from_matrix(A);
  std::vector<Interval> covers;
  // Shell k handles t in (tau_k, tau_{k+1}]: every pair solving there has
  // ‖q‖_β < tau_{k+1} and residual below ψ(tau_k). A pair whose residual is
  // not below the best residual of all earlier (smaller) q has its cover
  // inside that pair's cover, so the residual bound also drops to the record.
  double record = kInf;
  for (double tau = rep.t_start; tau < T; tau *= 2.0) {
    const double upper = std::min(2.0 * tau, T);
    const double bound = std::min(psi_value(psi, tau, opts.classic), record);
    if (!(bound > 0.0)) break;
    const Box box = system_box(w, bound, upper, opts.classic && bound < record);
    const EnumerationResult er = enumerate_in_box(L, box, 1000000);
    double shell_record = record;
    for (const auto& pt : er.points) {
      // one of each ±(p, q): first nonzero q coordinate positive
      int sgn = 0;
      for (int j = 0; j < n && sgn == 0; ++j) sgn = ::sgn(pt.coeffs[m + j]);
      if (sgn < 0) continue;
      CoverPair cp;
      std::vector<double> x(pt.coords.begin(), pt.coords.begin() + m);
      std::vector<double> q(pt.coords.begin() + m, pt.coords.end());
      cp.q.assign(pt.coeffs.begin() + m, pt.coeffs.end());
      // keep only the optimal p: the nearest integer to Aq
      bool optimal = true;
      for (int i = 0; i < m && optimal; ++i) {
        mpz_class aq = 0;
        for (int j = 0; j < n; ++j) aq += A.numerator(i, j) * cp.q[j];
        cp.p.push_back(-pt.coeffs[i]);
        optimal = round_half_even(aq, A.bits()) == cp.p.back();
      }
      if (!optimal) continue;
      cp.q_norm = weighted_quasi_norm(q, w.beta());
      cp.residual = weighted_quasi_norm(x, w.alpha());
      shell_record = std::min(shell_record, cp.residual);
      if (opts.classic) {
        cp.cover = Interval{cp.q_norm, cp.residual > 0.0 ? 1.0 / cp.residual : kInf, false, true};
      } else {
        cp.cover = Interval{cp.q_norm, cover_end(psi, cp.residual, rep.t_start, T)};
      }
      if (cp.cover.empty()) continue;
      covers.push_back(cp.cover);
      rep.pairs.push_back(std::move(cp));
    }
    record = shell_record;
  }
  const IntervalSet holes = IntervalSet::union_of(covers).complement_within(Interval{rep.t_start, T, false, true});
  for (const auto& iv : holes.parts())
    rep.uncovered.push_back(UncoveredInterval{iv, iv.hi - iv.lo <= 1e-9 * std::max(1.0, iv.hi)});
  return rep;
}

}  // namespace dirlab
