#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace dirlab {

/// (m, n) and the two exponents of the critical series. kappa and lambda are
/// always recomputed from (m, n).
class DimensionParams {
 public:
  DimensionParams(int m, int n);

  int m() const { return m_; }
  int n() const { return n_; }
  int d() const { return m_ + n_; }
  /// (d^2 + d - 4) / 2
  double kappa() const { return (d() * d() + d() - 4) / 2.0; }
  /// d (d - 1) / 2
  double lambda() const { return d() * (d() - 1) / 2.0; }

  friend bool operator==(const DimensionParams&, const DimensionParams&) = default;

 private:
  int m_;
  int n_;
};

// ψ(t) = c / t
struct ConstantRatio {
  double c;
};
// ψ(t) = (1 - c (log t)^-a) / t
struct LogDrift {
  double c;
  double a;
};
// ψ(t) = (1 - c t^-a) / t
struct PowerDrift {
  double c;
  double a;
};
// Piecewise-linear interpolation through (t, ψ) knots, t strictly increasing.
struct Tabulated {
  std::vector<std::pair<double, double>> knots;
};

/// An approximating function ψ on [t0, ∞) (or [t0, last knot] when tabulated).
///
/// `half_floor` marks the pointwise maximum with 1/(2t); see reduce_lower_bound.
/// Immutable; copies are cheap except for large tabulations.
class PsiFunction {
 public:
  using Family = std::variant<ConstantRatio, LogDrift, PowerDrift, Tabulated>;

  PsiFunction(Family family, double t0, bool half_floor = false);

  static PsiFunction constant_ratio(double c, double t0);
  static PsiFunction log_drift(double c, double a, double t0);
  static PsiFunction power_drift(double c, double a, double t0);
  static PsiFunction tabulated(std::vector<std::pair<double, double>> knots);

  double operator()(double t) const;
  /// 1 - t ψ(t).
  double f(double t) const;

  double t0() const { return t0_; }
  /// Right end of the domain (+inf for closed-form families).
  double t_max() const;
  const Family& family() const { return family_; }
  bool half_floor() const { return half_floor_; }
  std::string family_name() const;
  std::string describe() const;

  friend bool operator==(const PsiFunction& a, const PsiFunction& b);

 private:
  double base(double t) const;

  Family family_;
  double t0_;
  bool half_floor_;
};

double f_psi(const PsiFunction& psi, double t);

/// sup{t in [lo, hi] : ψ(t) > value}, by bisection in log t. Returns lo when
/// ψ(lo) <= value and +inf when ψ(hi) > value.
double psi_inverse(const PsiFunction& psi, double value, double lo, double hi);

struct ValidationReport {
  std::vector<double> nonpositive;           // t with ψ(t) <= 0
  std::vector<double> monotonicity;          // t_{i+1} where ψ increased
  std::vector<double> upper_bound;           // t with ψ(t) >= 1/t
  std::vector<double> lower_bound;           // t with ψ(t) < 1/(2t)
  double c_psi_hat = 1.0;                    // max F(t2)/F(t1) over admissible windows
  double eta = 0.5;

  /// Positivity, monotonicity and ψ < 1/t all hold on the grid.
  bool basic_ok() const { return nonpositive.empty() && monotonicity.empty() && upper_bound.empty(); }
  /// basic_ok() and additionally ψ >= 1/(2t).
  bool ok() const { return basic_ok() && lower_bound.empty(); }
};

ValidationReport validate_psi(const PsiFunction& psi, const std::vector<double>& grid, double eta = 0.5);

std::vector<double> geometric_grid(double lo, double hi, int points);

/// One summand k^-1 F^κ log^λ(1 + 1/F) of the critical series.
double critical_summand(double f, double k, const DimensionParams& dims);
double critical_series_partial(const PsiFunction& psi, const DimensionParams& dims, long long k_max);

enum class Verdict { Convergent, Divergent, Inconclusive };
enum class SeriesMethod { ClosedFormIntegralTest, PartialSumHeuristic };

struct SeriesVerdict {
  Verdict verdict = Verdict::Inconclusive;
  std::vector<std::pair<long long, double>> partial_sums;
  SeriesMethod method = SeriesMethod::PartialSumHeuristic;
  std::string rationale;
};

std::string to_string(Verdict v);
std::string to_string(SeriesMethod m);

SeriesVerdict classify_series(const PsiFunction& psi, const DimensionParams& dims,
                              const std::vector<long long>& horizons);

/// s(t) = (m/d) log t - (n/d) log ψ(t).
double dani_s_of_t(const PsiFunction& psi, const DimensionParams& dims, double t);
/// t(s) found by bisection (relative tolerance 1e-12 in t).
double dani_solve_t(const PsiFunction& psi, const DimensionParams& dims, double s);
/// r(s) = -log(t ψ(t)) / d at the solved t.
double dani_rate(const PsiFunction& psi, const DimensionParams& dims, double s);
/// t(s) = exp(s - n r(s)).
double dani_time(const PsiFunction& psi, const DimensionParams& dims, double s);

/// Rate function r(s) on [s0, ∞), either derived from ψ through the Dani
/// correspondence or given explicitly. Immutable, cheap to copy.
class RateFunction {
 public:
  static RateFunction derived(const PsiFunction& psi, const DimensionParams& dims);
  static RateFunction constant(double r, const DimensionParams& dims, double s0 = 0.0);
  static RateFunction tabulated(std::vector<std::pair<double, double>> knots, const DimensionParams& dims);
  static RateFunction custom(std::function<double(double)> fn, const DimensionParams& dims, double s0,
                             std::string label = "custom");

  double operator()(double s) const;
  double s0() const { return s0_; }
  const DimensionParams& dims() const { return dims_; }
  const std::optional<PsiFunction>& psi() const { return psi_; }
  std::optional<std::pair<double, double>> clamps() const { return clamps_; }
  const std::string& label() const { return label_; }

  /// t(s) for derived rates; throws for explicit ones.
  double time(double s) const;

  RateFunction with_clamps(double gamma_d, double gamma_d_prime) const;

 private:
  RateFunction(std::function<double(double)> fn, DimensionParams dims, double s0, std::string label);

  std::shared_ptr<const std::function<double(double)>> fn_;
  DimensionParams dims_;
  double s0_;
  std::string label_;
  std::optional<PsiFunction> psi_;
  std::optional<std::pair<double, double>> clamps_;
};

/// ψ1(t) = max{ψ(t), 1/(2t)}; F of the result is min{F_ψ, 1/2}.
PsiFunction reduce_lower_bound(const PsiFunction& psi);

/// s ↦ min{max{r(s), s^-γ}, s^-γ'}, requiring γ > 1/κ_d and 0 < γ' < η/κ_d.
RateFunction clamp_rate(const RateFunction& rate, double gamma_d, double gamma_d_prime, double eta = 0.5);

/// ρ_k = a r(k+1) / 2.
double rho_schedule(const RateFunction& rate, double a, long long k);

/// b_k = min{a_k, k^-α}, with the sequence indexed from k = 1.
std::vector<double> min_with_power(const std::vector<double>& a_seq, double alpha);

}  // namespace dirlab
