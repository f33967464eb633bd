#include "dirlab/cf_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dirlab/dirichlet.hpp"
#include "dirlab/errors.hpp"
#include "dirlab/lattice.hpp"

namespace dirlab {

double cf_residual(double alpha, const Convergent& c) {
  return std::abs(std::fma(static_cast<double>(c.q), alpha, -static_cast<double>(c.p)));
}

namespace {
double signed_residual(double alpha, long long p, long long q) {
  return std::fma(static_cast<double>(q), alpha, -static_cast<double>(p));
}
}  // namespace

ContinuedFraction cf_expand(double alpha, int K) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("cf_expand: alpha must lie in (0,1)");
  if (K < 1) throw ValidationError("cf_expand: K must be positive");
  ContinuedFraction cf;
  cf.alpha = alpha;
  long long pm = 1, qm = 0, p = 0, q = 1;  // (p_{k-1}, q_{k-1}), (p_k, q_k)
  double rm = 1.0, r = alpha;              // signed residuals q alpha - p
  std::vector<Convergent> conv{{0, 1}};
  constexpr long long kMaxQ = 1LL << 53;
  for (int k = 0; k < K; ++k) {
    // Gauss map iterate x_k = |r_k| / |r_{k-1}|; stop on exhaustion
    if (r == 0.0 || std::abs(r) < 1e-14 * std::abs(rm)) {
      cf.truncated = true;
      break;
    }
    long long a = static_cast<long long>(std::floor(std::abs(rm) / std::abs(r)));
    if (a < 1) a = 1;
    long long pn = 0, qn = 0;
    double rn = 0.0;
    bool overflow = false;
    for (int fix = 0; fix < 4; ++fix) {
      if (__builtin_mul_overflow(a, q, &qn) || __builtin_add_overflow(qn, qm, &qn) || __builtin_mul_overflow(a, p, &pn) ||
          __builtin_add_overflow(pn, pm, &pn) || qn > kMaxQ) {
        overflow = true;
        break;
      }
      rn = signed_residual(alpha, pn, qn);
      // a correct quotient keeps signs alternating and residuals shrinking
      if (rn != 0.0 && std::signbit(rn) == std::signbit(r)) {
        --a;
      } else if (std::abs(rn) >= std::abs(r)) {
        ++a;
      } else {
        break;
      }
    }
    if (overflow || a < 1) {
      cf.truncated = true;
      break;
    }
    cf.partial_quotients.push_back(a);
    pm = p;
    qm = q;
    rm = r;
    p = pn;
    q = qn;
    r = rn;
    conv.push_back({p, q});
  }
  if (cf.partial_quotients.size() >= 1 && cf.partial_quotients[0] == 1) conv.erase(conv.begin());
  cf.convergents = std::move(conv);
  return cf;
}

FiniteHorizonVerdict cf_is_psi_dirichlet(double alpha, const PsiFunction& psi, int K, int burn_in) {
  if (K < 3) throw ValidationError("cf_is_psi_dirichlet: K must be at least 3");
  const ContinuedFraction cf = cf_expand(alpha, K);
  FiniteHorizonVerdict out;
  out.truncated = cf.truncated;
  const auto& cv = cf.convergents;
  if (cv.size() < 2) throw ValidationError("cf_is_psi_dirichlet: expansion too short");
  out.horizon = static_cast<double>(cv.back().q);
  const double t0 = psi.t0();
  for (std::size_t k = 0; k + 1 < cv.size(); ++k) {
    const double qk = static_cast<double>(cv[k].q), qk1 = static_cast<double>(cv[k + 1].q);
    if (qk1 < t0) continue;
    const double e = cf_residual(alpha, cv[k]);
    const double bound = psi(qk1);
    const double tol = boundary_tolerance(bound);
    if (e < bound - tol) continue;
    CfFailure f;
    f.k = static_cast<int>(k);
    f.boundary = std::abs(e - bound) <= tol;
    const double lo = std::max(qk, t0);
    const double end = cover_end(psi, e, t0, out.horizon);
    if (end > lo)
      f.t_range = Interval{end, qk1, true, true};
    else
      f.t_range = Interval{lo, qk1, qk >= t0 ? false : true, true};
    out.failures.push_back(f);
  }
  out.pass = true;
  for (const auto& f : out.failures)
    if (f.k >= burn_in && !f.boundary) out.pass = false;
  return out;
}

IntervalSet cf_failure_set(const FiniteHorizonVerdict& v, double t_start, double T) {
  std::vector<Interval> parts;
  for (const auto& f : v.failures) parts.push_back(f.t_range);
  return IntervalSet::union_of(parts).intersect(Interval{t_start, T, false, true});
}

OracleAgreement compare_failure_sets(const IntervalSet& cf, const ScanReport& scan, double rel_tol) {
  auto sliver = [](const Interval& iv) { return iv.hi - iv.lo <= 1e-9 * std::max(1.0, iv.hi); };
  std::vector<Interval> a, b;
  for (const auto& iv : cf.parts())
    if (!sliver(iv)) a.push_back(iv);
  for (const auto& u : scan.uncovered)
    if (!u.boundary && !sliver(u.interval)) b.push_back(u.interval);
  OracleAgreement out;
  out.cf_parts = a.size();
  out.scan_parts = b.size();
  if (a.size() != b.size()) {
    out.detail = "part counts differ: cf " + std::to_string(a.size()) + ", scan " + std::to_string(b.size());
    return out;
  }
  auto close = [&](double x, double y) { return std::abs(x - y) <= rel_tol * std::max(1.0, std::abs(x)); };
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!close(a[i].lo, b[i].lo) || !close(a[i].hi, b[i].hi)) {
      out.detail = "part " + std::to_string(i) + ": cf " + a[i].to_string() + " vs scan " + b[i].to_string();
      return out;
    }
  }
  out.agree = true;
  return out;
}

}  // namespace dirlab
