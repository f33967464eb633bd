#include "dirlab/approx_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dirlab/errors.hpp"

namespace dirlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Linear interpolation through sorted knots; x must lie within them.
double interpolate(const std::vector<std::pair<double, double>>& knots, double x) {
  if (x <= knots.front().first) return knots.front().second;
  if (x >= knots.back().first) return knots.back().second;
  auto it = std::upper_bound(knots.begin(), knots.end(), x,
                             [](double v, const std::pair<double, double>& k) { return v < k.first; });
  const auto& [x1, y1] = *it;
  const auto& [x0, y0] = *(it - 1);
  const double w = (x - x0) / (x1 - x0);
  return y0 + w * (y1 - y0);
}

void check_knots(const std::vector<std::pair<double, double>>& knots, const char* what) {
  if (knots.size() < 2) throw ValidationError(std::string(what) + ": need at least 2 knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].first) || !std::isfinite(knots[i].second))
      throw ValidationError(std::string(what) + ": non-finite knot");
    if (i > 0 && !(knots[i].first > knots[i - 1].first))
      throw ValidationError(std::string(what) + ": knot abscissae must be strictly increasing");
  }
}

}  // namespace

DimensionParams::DimensionParams(int m, int n) : m_(m), n_(n) {
  if (m < 1 || n < 1) throw ValidationError("dimensions m and n must be positive");
}

PsiFunction::PsiFunction(Family family, double t0, bool half_floor)
    : family_(std::move(family)), t0_(t0), half_floor_(half_floor) {
  if (!(t0_ > 1.0) || !std::isfinite(t0_)) throw ValidationError("psi: t0 must be a finite real > 1");
  std::visit(overloaded{
                 [&](const ConstantRatio& f) {
                   if (!(f.c > 0.0 && f.c < 1.0)) throw ValidationError("psi: constant_ratio needs c in (0,1)");
                 },
                 [&](const LogDrift& f) {
                   if (!(f.c > 0.0) || !(f.a > 0.0)) throw ValidationError("psi: log_drift needs c > 0, a > 0");
                   if (!(f.c * std::pow(std::log(t0_), -f.a) < 1.0))
                     throw ValidationError("psi: log_drift is not positive at t0 (need c (log t0)^-a < 1)");
                   // ψ' <= 0 on [t0, ∞) iff c L^-a (1 + a/L) <= 1 at L = log t0
                   const double L = std::log(t0_);
                   if (!(f.c * std::pow(L, -f.a) * (1.0 + f.a / L) <= 1.0))
                     throw ValidationError("psi: log_drift is increasing near t0 (need c (log t0)^-a (1 + a/log t0) <= 1)");
                 },
                 [&](const PowerDrift& f) {
                   if (!(f.c > 0.0) || !(f.a > 0.0)) throw ValidationError("psi: power_drift needs c > 0, a > 0");
                   if (!(f.c * std::pow(t0_, -f.a) < 1.0))
                     throw ValidationError("psi: power_drift is not positive at t0 (need c t0^-a < 1)");
                   if (!(f.c * (1.0 + f.a) * std::pow(t0_, -f.a) <= 1.0))
                     throw ValidationError("psi: power_drift is increasing near t0 (need c (1 + a) t0^-a <= 1)");
                 },
                 [&](const Tabulated& f) {
                   check_knots(f.knots, "psi: tabulated");
                   if (f.knots.front().first != t0_) throw ValidationError("psi: tabulated t0 must equal the first knot");
                 },
             },
             family_);
}

PsiFunction PsiFunction::constant_ratio(double c, double t0) { return PsiFunction(ConstantRatio{c}, t0); }
PsiFunction PsiFunction::log_drift(double c, double a, double t0) { return PsiFunction(LogDrift{c, a}, t0); }
PsiFunction PsiFunction::power_drift(double c, double a, double t0) { return PsiFunction(PowerDrift{c, a}, t0); }
PsiFunction PsiFunction::tabulated(std::vector<std::pair<double, double>> knots) {
  check_knots(knots, "psi: tabulated");
  const double t0 = knots.front().first;
  return PsiFunction(Tabulated{std::move(knots)}, t0);
}

double PsiFunction::t_max() const {
  if (const auto* tab = std::get_if<Tabulated>(&family_)) return tab->knots.back().first;
  return std::numeric_limits<double>::infinity();
}

// F of the underlying family, in closed form where available so that tiny F
// does not suffer cancellation in 1 - t psi(t).
double PsiFunction::f(double t) const {
  if (!(t >= t0_)) throw DomainError("psi: t = " + fmt(t) + " is below t0 = " + fmt(t0_));
  if (t > t_max()) throw DomainError("psi: t = " + fmt(t) + " is beyond the last knot " + fmt(t_max()));
  const double f = std::visit(overloaded{
                                  [](const ConstantRatio& p) { return 1.0 - p.c; },
                                  [&](const LogDrift& p) { return p.c * std::pow(std::log(t), -p.a); },
                                  [&](const PowerDrift& p) { return p.c * std::pow(t, -p.a); },
                                  [&](const Tabulated& p) { return 1.0 - t * interpolate(p.knots, t); },
                              },
                              family_);
  return half_floor_ ? std::min(f, 0.5) : f;
}

double PsiFunction::operator()(double t) const {
  if (std::holds_alternative<Tabulated>(family_) && !half_floor_) {
    (void)f(t);  // domain check
    return interpolate(std::get<Tabulated>(family_).knots, t);
  }
  return (1.0 - f(t)) / t;
}

std::string PsiFunction::family_name() const {
  return std::visit(overloaded{
                        [](const ConstantRatio&) { return std::string("constant_ratio"); },
                        [](const LogDrift&) { return std::string("log_drift"); },
                        [](const PowerDrift&) { return std::string("power_drift"); },
                        [](const Tabulated&) { return std::string("tabulated"); },
                    },
                    family_);
}

std::string PsiFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const ConstantRatio& p) { os << "ConstantRatio(" << p.c << ")"; },
                 [&](const LogDrift& p) { os << "LogDrift(" << p.c << ", " << p.a << ")"; },
                 [&](const PowerDrift& p) { os << "PowerDrift(" << p.c << ", " << p.a << ")"; },
                 [&](const Tabulated& p) { os << "Tabulated(" << p.knots.size() << " knots)"; },
             },
             family_);
  os << " t0=" << t0_;
  if (half_floor_) os << " max 1/(2t)";
  return os.str();
}

bool operator==(const PsiFunction& a, const PsiFunction& b) {
  if (a.t0_ != b.t0_ || a.half_floor_ != b.half_floor_ || a.family_.index() != b.family_.index()) return false;
  return std::visit(overloaded{
                        [&](const ConstantRatio& p) { return p.c == std::get<ConstantRatio>(b.family_).c; },
                        [&](const LogDrift& p) {
                          const auto& q = std::get<LogDrift>(b.family_);
                          return p.c == q.c && p.a == q.a;
                        },
                        [&](const PowerDrift& p) {
                          const auto& q = std::get<PowerDrift>(b.family_);
                          return p.c == q.c && p.a == q.a;
                        },
                        [&](const Tabulated& p) { return p.knots == std::get<Tabulated>(b.family_).knots; },
                    },
                    a.family_);
}

double f_psi(const PsiFunction& psi, double t) { return psi.f(t); }

double psi_inverse(const PsiFunction& psi, double value, double lo, double hi) {
  if (!(psi(lo) > value)) return lo;
  hi = std::min(hi, psi.t_max());
  if (psi(hi) > value) return std::numeric_limits<double>::infinity();
  double a = std::log(lo), b = std::log(hi);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
    const double mid = 0.5 * (a + b);
    if (psi(std::exp(mid)) > value)
      a = mid;
    else
      b = mid;
  }
  return std::exp(a);
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (points < 2 || !(lo > 0.0) || !(hi > lo)) throw ValidationError("geometric_grid: need 0 < lo < hi and >= 2 points");
  std::vector<double> g(points);
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[i] = lo * std::exp(step * i);
  g.front() = lo;
  g.back() = hi;
  return g;
}

ValidationReport validate_psi(const PsiFunction& psi, const std::vector<double>& grid, double eta) {
  if (grid.size() < 2) throw ValidationError("validate_psi: grid needs at least 2 points");
  if (!std::is_sorted(grid.begin(), grid.end())) throw ValidationError("validate_psi: grid must be sorted");
  if (grid.front() < psi.t0() || grid.back() > psi.t_max())
    throw DomainError("validate_psi: grid leaves the domain of psi");
  if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("validate_psi: eta must lie in (0,1)");

  std::vector<double> pts = grid;
  // a tabulated psi is monotone iff it is monotone on its knots, so those are
  // where monotonicity is judged
  std::vector<double> mono_pts = grid;
  if (const auto* tab = std::get_if<Tabulated>(&psi.family())) {
    mono_pts = {grid.front()};
    for (const auto& k : tab->knots)
      if (k.first > grid.front() && k.first < grid.back()) {
        pts.push_back(k.first);
        mono_pts.push_back(k.first);
      }
    mono_pts.push_back(grid.back());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  }

  ValidationReport rep;
  rep.eta = eta;
  std::vector<double> fv(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double t = pts[i];
    fv[i] = psi.f(t);
    if (!(psi(t) > 0.0)) rep.nonpositive.push_back(t);
    if (!(fv[i] > 0.0)) rep.upper_bound.push_back(t);
    if (fv[i] > 0.5) rep.lower_bound.push_back(t);
  }
  for (std::size_t i = 1; i < mono_pts.size(); ++i)
    if (psi(mono_pts[i]) > psi(mono_pts[i - 1])) rep.monotonicity.push_back(mono_pts[i]);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(fv[i] > 0.0)) continue;
    const double reach = pts[i] * std::exp(std::pow(std::log(pts[i]), eta));
    for (std::size_t j = i + 1; j < pts.size() && pts[j] <= reach; ++j)
      rep.c_psi_hat = std::max(rep.c_psi_hat, fv[j] / fv[i]);
  }
  return rep;
}

double critical_summand(double f, double k, const DimensionParams& dims) {
  if (!(f > 0.0)) return 0.0;
  return std::pow(f, dims.kappa()) * std::pow(std::log1p(1.0 / f), dims.lambda()) / k;
}

double critical_series_partial(const PsiFunction& psi, const DimensionParams& dims, long long k_max) {
  const long long k0 = static_cast<long long>(std::ceil(psi.t0()));
  if (k_max < k0) throw DomainError("critical_series_partial: k_max is below ceil(t0)");
  double sum = 0.0;
  for (long long k = k0; k <= k_max; ++k) {
    const double kd = static_cast<double>(k);
    sum += critical_summand(psi.f(kd), kd, dims);
  }
  return sum;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Convergent: return "Convergent";
    case Verdict::Divergent: return "Divergent";
    default: return "Inconclusive";
  }
}

std::string to_string(SeriesMethod m) {
  return m == SeriesMethod::ClosedFormIntegralTest ? "ClosedFormIntegralTest" : "PartialSumHeuristic";
}

SeriesVerdict classify_series(const PsiFunction& psi, const DimensionParams& dims,
                              const std::vector<long long>& horizons) {
  if (horizons.size() < 2) throw ValidationError("classify_series: need at least 2 horizons");
  for (std::size_t i = 1; i < horizons.size(); ++i)
    if (horizons[i] <= horizons[i - 1]) throw ValidationError("classify_series: horizons must increase");
  const long long k0 = static_cast<long long>(std::ceil(psi.t0()));
  if (horizons.front() < k0) throw DomainError("classify_series: first horizon is below ceil(t0)");
  if (static_cast<double>(horizons.back()) > psi.t_max())
    throw DomainError("classify_series: horizon beyond the tabulated domain");

  SeriesVerdict out;
  double sum = 0.0;
  long long k = k0;
  for (long long h : horizons) {
    for (; k <= h; ++k) {
      const double kd = static_cast<double>(k);
      sum += critical_summand(psi.f(kd), kd, dims);
    }
    out.partial_sums.emplace_back(h, sum);
  }

  const double kappa = dims.kappa();
  std::ostringstream why;
  why.precision(6);
  std::visit(overloaded{
                 [&](const ConstantRatio& p) {
                   out.method = SeriesMethod::ClosedFormIntegralTest;
                   out.verdict = Verdict::Divergent;
                   why << "F is the constant " << std::min(1.0 - p.c, psi.half_floor() ? 0.5 : 1.0)
                       << ", so the summand is a constant multiple of 1/k";
                 },
                 [&](const LogDrift& p) {
                   out.method = SeriesMethod::ClosedFormIntegralTest;
                   // with u = log k the summand becomes u^{-a kappa} (a log u)^lambda du
                   out.verdict = p.a * kappa > 1.0 ? Verdict::Convergent : Verdict::Divergent;
                   why << "F = c (log t)^-a; integral test in u = log t: u^(-a*kappa) (log u)^lambda with a*kappa = "
                       << p.a * kappa << (p.a * kappa > 1.0 ? " > 1" : " <= 1");
                 },
                 [&](const PowerDrift& p) {
                   out.method = SeriesMethod::ClosedFormIntegralTest;
                   out.verdict = Verdict::Convergent;
                   why << "F = c t^-a; summand ~ k^(-1-a*kappa) (log k)^lambda with a*kappa = " << p.a * kappa << " > 0";
                 },
                 [&](const Tabulated&) {
                   out.method = SeriesMethod::PartialSumHeuristic;
                   // growth of the partial sum per unit of log k, first and last window
                   const auto& ps = out.partial_sums;
                   auto rate = [&](std::size_t i) {
                     const double span = std::log(static_cast<double>(ps[i].first) / ps[i - 1].first);
                     return (ps[i].second - ps[i - 1].second) / span;
                   };
                   if (ps.size() < 3) {
                     out.verdict = Verdict::Inconclusive;
                     why << "heuristic: fewer than 3 horizons";
                     return;
                   }
                   const double first = rate(1), last = rate(ps.size() - 1);
                   if (!(first > 0.0)) {
                     out.verdict = Verdict::Inconclusive;
                     why << "heuristic: no growth in the first window";
                     return;
                   }
                   const double ratio = last / first;
                   if (ratio < 0.1)
                     out.verdict = Verdict::Convergent;
                   else if (ratio > 0.8)
                     out.verdict = Verdict::Divergent;
                   else
                     out.verdict = Verdict::Inconclusive;
                   why << "heuristic: growth per unit log k fell from " << first << " to " << last << " (ratio " << ratio
                       << "; < 0.1 convergent, > 0.8 divergent)";
                 },
             },
             psi.family());
  if (psi.half_floor() && out.method == SeriesMethod::ClosedFormIntegralTest)
    why << "; the 1/(2t) floor only caps F at 1/2, which leaves the comparison unchanged";
  out.rationale = why.str();
  return out;
}

namespace {

// s as a function of u = log t: u - (n/d) log(1 - F(e^u)).
double s_of_u(const PsiFunction& psi, const DimensionParams& dims, double u) {
  const double f = psi.f(std::clamp(std::exp(u), psi.t0(), psi.t_max()));
  if (!(f < 1.0)) throw DomainError("dani: psi is not positive at t = " + fmt(std::exp(u)));
  return u - static_cast<double>(dims.n()) / dims.d() * std::log1p(-f);
}

}  // namespace

double dani_s_of_t(const PsiFunction& psi, const DimensionParams& dims, double t) {
  return s_of_u(psi, dims, std::log(t));
}

double dani_solve_t(const PsiFunction& psi, const DimensionParams& dims, double s) {
  double lo = std::log(psi.t0());
  const double s0 = s_of_u(psi, dims, lo);
  if (s < s0) throw DomainError("dani: s = " + fmt(s) + " is below s0 = " + fmt(s0));
  double hi = std::min(s, std::log(psi.t_max()));
  if (s_of_u(psi, dims, hi) < s) {
    if (std::isfinite(psi.t_max())) throw DomainError("dani: s = " + fmt(s) + " lies beyond the tabulated domain");
    throw NumericalError("dani: bisection bracket lost (psi not decreasing?)");
  }
  // s(u) >= u, and s(u) < u + n/d whenever F < 1 - e^{-1}; start close to s
  lo = std::max(lo, s - 1.0);
  if (s_of_u(psi, dims, lo) > s) lo = std::log(psi.t0());
  if (s_of_u(psi, dims, lo) > s) throw NumericalError("dani: bisection bracket lost (psi not decreasing?)");
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (s_of_u(psi, dims, mid) < s)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double dani_rate(const PsiFunction& psi, const DimensionParams& dims, double s) {
  const double t = std::clamp(dani_solve_t(psi, dims, s), psi.t0(), psi.t_max());
  return -std::log1p(-psi.f(t)) / dims.d();
}

double dani_time(const PsiFunction& psi, const DimensionParams& dims, double s) {
  return std::exp(s - dims.n() * dani_rate(psi, dims, s));
}

RateFunction::RateFunction(std::function<double(double)> fn, DimensionParams dims, double s0, std::string label)
    : fn_(std::make_shared<const std::function<double(double)>>(std::move(fn))),
      dims_(dims),
      s0_(s0),
      label_(std::move(label)) {}

RateFunction RateFunction::derived(const PsiFunction& psi, const DimensionParams& dims) {
  const double s0 = dani_s_of_t(psi, dims, psi.t0());
  RateFunction r([psi, dims](double s) { return dani_rate(psi, dims, s); }, dims, s0, "derived " + psi.describe());
  r.psi_ = psi;
  return r;
}

RateFunction RateFunction::constant(double value, const DimensionParams& dims, double s0) {
  if (!(value > 0.0 && value < 1.0 / dims.d())) throw ValidationError("rate: constant must lie in (0, 1/d)");
  std::ostringstream os;
  os.precision(17);
  os << "constant " << value;
  return RateFunction([value](double) { return value; }, dims, s0, os.str());
}

RateFunction RateFunction::tabulated(std::vector<std::pair<double, double>> knots, const DimensionParams& dims) {
  check_knots(knots, "rate: tabulated");
  for (const auto& k : knots)
    if (!(k.second > 0.0 && k.second < 1.0 / dims.d())) throw ValidationError("rate: tabulated values must lie in (0, 1/d)");
  const double s0 = knots.front().first, s1 = knots.back().first;
  return RateFunction(
      [knots = std::move(knots), s1](double s) {
        if (s > s1) throw DomainError("rate: s beyond the last knot");
        return interpolate(knots, s);
      },
      dims, s0, "tabulated");
}

RateFunction RateFunction::custom(std::function<double(double)> fn, const DimensionParams& dims, double s0,
                                  std::string label) {
  return RateFunction(std::move(fn), dims, s0, std::move(label));
}

double RateFunction::operator()(double s) const {
  if (s < s0_) throw DomainError("rate: s = " + fmt(s) + " is below s0 = " + fmt(s0_));
  double r = (*fn_)(s);
  if (clamps_) r = std::min(std::max(r, std::pow(s, -clamps_->first)), std::pow(s, -clamps_->second));
  return r;
}

double RateFunction::time(double s) const {
  if (!psi_) throw ValidationError("rate: t(s) is only defined for rates derived from psi");
  return dani_time(*psi_, dims_, s);
}

RateFunction RateFunction::with_clamps(double gamma_d, double gamma_d_prime) const {
  if (clamps_) throw ValidationError("rate: clamps already applied");
  RateFunction out = *this;
  out.clamps_ = std::make_pair(gamma_d, gamma_d_prime);
  if (!(out.s0_ > 0.0)) out.s0_ = std::nextafter(0.0, 1.0);
  return out;
}

PsiFunction reduce_lower_bound(const PsiFunction& psi) { return PsiFunction(psi.family(), psi.t0(), true); }

RateFunction clamp_rate(const RateFunction& rate, double gamma_d, double gamma_d_prime, double eta) {
  const double kappa = rate.dims().kappa();
  if (!(gamma_d > 1.0 / kappa)) throw ValidationError("clamp_rate: need gamma_d > 1/kappa_d");
  if (!(gamma_d_prime > 0.0 && gamma_d_prime < eta / kappa))
    throw ValidationError("clamp_rate: need 0 < gamma_d' < eta/kappa_d");
  return rate.with_clamps(gamma_d, gamma_d_prime);
}

double rho_schedule(const RateFunction& rate, double a, long long k) {
  if (!(a > 0.0 && a < 1.0)) throw ValidationError("rho_schedule: a must lie in (0,1)");
  return 0.5 * a * rate(static_cast<double>(k + 1));
}

std::vector<double> min_with_power(const std::vector<double>& a_seq, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("min_with_power: alpha must lie in (0,1)");
  std::vector<double> b(a_seq.size());
  for (std::size_t i = 0; i < a_seq.size(); ++i)
    b[i] = std::min(a_seq[i], std::pow(static_cast<double>(i + 1), -alpha));
  return b;
}

}  // namespace dirlab
