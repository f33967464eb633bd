#pragma once

// Internal: progressive LLL on exact generators and Fincke-Pohst enumeration.

#include <gmpxx.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "dirlab/errors.hpp"
#include "dirlab/lattice.hpp"

namespace dirlab::detail {

/// Reduced generator Y = N U of a lattice, valid at the log-scales `ell`.
struct Reduction {
  int d = 0;
  int bits = 0;
  std::vector<mpz_class> Y;  // row-major
  std::vector<mpz_class> U;  // row-major
  std::vector<double> ell;
  std::vector<double> b;  // column-major doubles of Y at ell
};

/// Reduce L at scales L.log_scale() + extra, moving from L.reduced_at() in
/// steps of at most 1.5 per coordinate.
Reduction reduce_progressive(const UnimodularLattice& L, const std::vector<double>& extra);

/// Evaluate y (length d) at log-scales given by `scale` = e^{ell}.
double eval_coord(const mpz_class& y, double scale, int bits);

/// Depth-first enumeration of coefficient vectors x with B x in a box (given in
/// the scaled coordinates of `red`), pruned by a ball and per-level projection
/// bounds. The visitor receives x and returns false to stop. `shrink` may be
/// lowered by the visitor to shrink the box about its center.
class Enumerator {
 public:
  Enumerator(const Reduction& red, std::vector<double> center, std::vector<double> half, bool half_space);

  template <class Visitor>
  void run(Visitor&& visit);

  double shrink = 1.0;
  std::size_t node_budget = 200'000'000;

 private:
  template <class Visitor>
  bool level(int k, double used, Visitor& visit);

  int d_;
  bool half_space_;
  std::vector<double> T_;  // upper triangular, row-major
  std::vector<double> Q_;  // column k is the k-th Gram-Schmidt direction
  std::vector<double> z_;
  std::vector<double> c_;
  std::vector<double> h_;
  std::vector<double> proj_;  // per-level projection bound at shrink = 1
  std::vector<long long> x_;
  std::vector<double> partial_;
  std::size_t nodes_ = 0;
};

template <class Visitor>
void Enumerator::run(Visitor&& visit) {
  nodes_ = 0;
  std::fill(x_.begin(), x_.end(), 0);
  level(d_ - 1, 0.0, visit);
}

template <class Visitor>
bool Enumerator::level(int k, double used, Visitor& visit) {
  if (++nodes_ > node_budget) throw BudgetError("enumeration node budget exhausted (degenerate box?)");
  const double s = shrink;
  double r2 = 0.0;
  for (int i = 0; i < d_; ++i) r2 += h_[i] * h_[i];
  r2 *= s * s * (1.0 + 1e-8);
  const double rem = r2 - used;
  if (rem < 0.0) return true;
  double zc = z_[k];
  for (int j = k + 1; j < d_; ++j) zc -= T_[k * d_ + j] * static_cast<double>(x_[j]);
  const double tkk = T_[k * d_ + k];
  const double y = zc / tkk;
  double w = std::min(std::sqrt(rem), proj_[k] * s * (1.0 + 1e-8)) / tkk;
  w = w * (1.0 + 1e-9) + 1e-9;
  double lo = std::ceil(y - w), hi = std::floor(y + w);
  bool top_zero = true;
  if (half_space_)
    for (int j = k + 1; j < d_; ++j)
      if (x_[j] != 0) {
        top_zero = false;
        break;
      }
  if (half_space_ && top_zero) lo = std::max(lo, 0.0);
  if (lo > hi) return true;
  // wide ranges are fine for early-exit queries; the node budget bounds the rest
  if (!(std::abs(lo) < 4e18 && std::abs(hi) < 4e18)) throw BudgetError("enumeration range overflow");
  // visit in order of distance from y (zig-zag) so shrinking bites early
  const long long xc = std::llround(std::min(std::max(y, lo), hi));
  const long long L = static_cast<long long>(lo), H = static_cast<long long>(hi);
  for (long long step = 0;; ++step) {
    bool any = false;
    for (int sgn = 0; sgn < 2; ++sgn) {
      if (step == 0 && sgn == 1) break;
      const long long xv = sgn == 0 ? xc + step : xc - step;
      if (xv < L || xv > H) continue;
      any = true;
      x_[k] = xv;
      const double diff = tkk * (static_cast<double>(xv) - y);
      const double u = used + diff * diff;
      if (u > r2 * (1.0 + 1e-9) + 1e-300) continue;
      if (k == 0) {
        bool zero = true;
        for (int j = 0; j < d_; ++j)
          if (x_[j] != 0) {
            zero = false;
            break;
          }
        if (!zero && !visit(x_)) return false;
      } else if (!level(k - 1, u, visit)) {
        return false;
      }
      if (s != shrink) {
        // the box shrank: restart this level with the new bounds
        x_[k] = 0;
        return level(k, used, visit);
      }
    }
    if (!any) break;
  }
  x_[k] = 0;
  return true;
}

}  // namespace dirlab::detail
