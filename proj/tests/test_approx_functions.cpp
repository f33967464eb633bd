#include "doctest.h"
#include "dirlab/approx_functions.hpp"
#include "dirlab/errors.hpp"

#include <cmath>

using namespace dirlab;

namespace {
const double kE = std::exp(1.0);

PsiFunction sampled_log_drift(double c, double a, double lo, double hi, int n) {
  std::vector<std::pair<double, double>> knots;
  for (int i = 0; i < n; ++i) {
    const double t = std::exp(lo + (hi - lo) * i / (n - 1));
    knots.emplace_back(t, (1.0 - c * std::pow(std::log(t), -a)) / t);
  }
  return PsiFunction::tabulated(knots);
}
}  // namespace

TEST_CASE("dimension parameters") {
  const DimensionParams d11(1, 1), d21(2, 1), d23(2, 3);
  CHECK(d11.kappa() == 1.0);
  CHECK(d11.lambda() == 1.0);
  CHECK(d21.kappa() == 4.0);
  CHECK(d21.lambda() == 3.0);
  CHECK(d23.kappa() == 13.0);
  CHECK(d23.lambda() == 10.0);
  for (int m = 1; m < 5; ++m)
    for (int n = 1; n < 5; ++n) CHECK(DimensionParams(m, n).kappa() >= DimensionParams(m, n).lambda());
  CHECK_THROWS_AS(DimensionParams(0, 1), ValidationError);
}

TEST_CASE("f_psi examples") {
  CHECK(f_psi(PsiFunction::constant_ratio(0.5, 2.0), 10.0) == doctest::Approx(0.5));
  CHECK(f_psi(PsiFunction::log_drift(1.0, 1.0, 7.0), kE * kE) == doctest::Approx(0.5));
  const PsiFunction tab = sampled_log_drift(1.0, 0.5, 2.0, 10.0, 8001);
  CHECK(std::abs(f_psi(tab, std::exp(4.0)) - 0.5) < 1e-6);
  CHECK_THROWS_AS(f_psi(PsiFunction::constant_ratio(0.5, 2.0), 1.5), DomainError);
  CHECK_THROWS_AS(f_psi(tab, std::exp(11.0)), DomainError);
}

TEST_CASE("psi invariants on a grid") {
  const auto grid = geometric_grid(10.0, 1e6, 400);
  const std::vector<PsiFunction> fams = {PsiFunction::constant_ratio(0.5, 2.0), PsiFunction::log_drift(1.0, 1.0, std::exp(2.0)),
                                         PsiFunction::log_drift(1.0, 0.5, std::exp(2.0)), PsiFunction::power_drift(2.0, 0.5, 10.0)};
  for (const auto& psi : fams) {
    double prev = psi(grid[0]);
    for (double t : grid) {
      const double v = psi(t);
      CHECK(v > 0.0);
      CHECK(v <= prev);
      CHECK(v < 1.0 / t);
      prev = v;
    }
  }
}

TEST_CASE("validate_psi") {
  const auto grid = geometric_grid(10.0, 1e6, 300);
  const auto r1 = validate_psi(PsiFunction::constant_ratio(0.5, 2.0), grid);
  CHECK(r1.ok());
  CHECK(r1.c_psi_hat == 1.0);

  const auto r2 = validate_psi(PsiFunction::log_drift(1.0, 1.0, std::exp(2.0)), grid);
  CHECK(r2.ok());
  CHECK(r2.c_psi_hat <= 1.0 + 1e-12);

  std::vector<std::pair<double, double>> knots;
  for (int i = 0; i <= 20; ++i) {
    const double t = 10.0 * std::pow(2.0, i);
    knots.emplace_back(t, 0.6 / t);
  }
  knots[7].second = 0.6 / knots[6].first * 1.01;  // bump above the previous knot
  const auto r3 = validate_psi(PsiFunction::tabulated(knots), geometric_grid(knots.front().first, knots.back().first, 50));
  REQUIRE(r3.monotonicity.size() == 1);
  CHECK(r3.monotonicity[0] == knots[7].first);

  // a constant ratio below 1/2 violates the lower bound until reduced
  const auto r4 = validate_psi(PsiFunction::constant_ratio(0.25, 2.0), grid);
  CHECK(r4.basic_ok());
  CHECK_FALSE(r4.ok());
  CHECK(validate_psi(reduce_lower_bound(PsiFunction::constant_ratio(0.25, 2.0)), grid).ok());

  CHECK_THROWS_AS(validate_psi(PsiFunction::constant_ratio(0.5, 2.0), {10.0}), ValidationError);
  CHECK_THROWS_AS(validate_psi(PsiFunction::constant_ratio(0.5, 20.0), grid), DomainError);
}

TEST_CASE("critical_series_partial") {
  const DimensionParams d2(1, 1);
  const PsiFunction half = PsiFunction::constant_ratio(0.5, 2.0);
  // nine explicit terms 0.5 log 3 / k, k = 2..10
  CHECK(critical_series_partial(half, d2, 10) == doctest::Approx(1.0595941141300955).epsilon(1e-14));

  const PsiFunction ld = PsiFunction::log_drift(1.0, 1.0, std::exp(2.0));
  const double f = f_psi(ld, 8.0);
  CHECK(critical_series_partial(ld, d2, 8) == doctest::Approx(std::pow(f, 1.0) * std::log1p(1.0 / f) / 8.0));
  CHECK_THROWS_AS(critical_series_partial(ld, d2, 7), DomainError);

  // non-decreasing in k_max; LogDrift(1,2) stays bounded as the horizon doubles
  const PsiFunction conv = PsiFunction::log_drift(1.0, 2.0, std::exp(2.0));
  double prev = 0.0;
  std::vector<double> incs;
  for (long long k = 1000; k <= 1024000; k *= 2) {
    const double s = critical_series_partial(conv, d2, k);
    CHECK(s >= prev);
    incs.push_back(s - prev);
    prev = s;
  }
  for (std::size_t i = 2; i < incs.size(); ++i) CHECK(incs[i] < incs[i - 1]);
  CHECK(prev < 5.0);
}

TEST_CASE("classify_series") {
  const std::vector<long long> hz = {100, 1000, 10000};
  const auto v1 = classify_series(PsiFunction::log_drift(1.0, 2.0, std::exp(2.0)), DimensionParams(1, 1), hz);
  CHECK(v1.verdict == Verdict::Convergent);
  CHECK(v1.method == SeriesMethod::ClosedFormIntegralTest);
  for (int m = 1; m <= 3; ++m)
    CHECK(classify_series(PsiFunction::constant_ratio(0.5, 2.0), DimensionParams(m, 1), hz).verdict ==
          Verdict::Divergent);
  CHECK(classify_series(PsiFunction::log_drift(1.0, 0.5, std::exp(2.0)), DimensionParams(1, 1), hz).verdict == Verdict::Divergent);
  // the critical exponent a = 1/kappa diverges
  CHECK(classify_series(PsiFunction::log_drift(1.0, 0.25, std::exp(2.0)), DimensionParams(2, 1), hz).verdict ==
        Verdict::Divergent);
  CHECK(classify_series(PsiFunction::log_drift(1.0, 0.26, std::exp(2.0)), DimensionParams(2, 1), hz).verdict ==
        Verdict::Convergent);
  CHECK(classify_series(PsiFunction::power_drift(1.0, 0.1, 3.0), DimensionParams(1, 1), hz).verdict ==
        Verdict::Convergent);
  CHECK(classify_series(reduce_lower_bound(PsiFunction::log_drift(1.0, 0.5, std::exp(2.0))), DimensionParams(1, 1), hz).verdict ==
        Verdict::Divergent);

  const auto ps = v1.partial_sums;
  REQUIRE(ps.size() == 3);
  CHECK(ps[0].second <= ps[1].second);
  CHECK(ps[1].second <= ps[2].second);

  // tabulated: heuristic, labeled as such
  std::vector<std::pair<double, double>> knots;
  for (int i = 0; i <= 60; ++i) {
    const double t = 2.0 * std::pow(1.3, i);
    knots.emplace_back(t, 0.5 / t);
  }
  const auto v2 = classify_series(PsiFunction::tabulated(knots), DimensionParams(1, 1), {10, 1000, 100000});
  CHECK(v2.method == SeriesMethod::PartialSumHeuristic);
  CHECK(v2.verdict == Verdict::Divergent);
  CHECK(v2.rationale.find("heuristic") != std::string::npos);
  CHECK_THROWS_AS(classify_series(PsiFunction::tabulated(knots), DimensionParams(1, 1), {10, 1000000000LL}), DomainError);
}

TEST_CASE("series over k and over e^j agree on boundedness") {
  const DimensionParams d2(1, 1);
  // F(e^j) in closed form so that j can run past the double range of e^j
  auto jsum = [&](const PsiFunction& psi, int J) {
    const auto& ld = std::get<LogDrift>(psi.family());
    double s = 0.0;
    for (int j = 2; j <= J; ++j) s += critical_summand(ld.c * std::pow(j, -ld.a), 1.0, d2);
    return s;
  };
  const PsiFunction conv = PsiFunction::log_drift(1.0, 2.0, std::exp(2.0));
  const PsiFunction div = PsiFunction::log_drift(1.0, 0.5, std::exp(2.0));
  for (const auto* psi : {&conv, &div}) {
    for (long long K : {1000LL, 100000LL, 10000000LL}) {
      const double ks = critical_series_partial(*psi, d2, K);
      const double js = jsum(*psi, static_cast<int>(std::log(static_cast<double>(K))));
      CHECK(ks / js > 0.2);
      CHECK(ks / js < 5.0);
    }
  }
  // doubling the j-horizon: the divergent sum passes any threshold, the convergent one does not
  CHECK(jsum(div, 1 << 20) > 100.0);
  double prev = 0.0, prev_inc = 1e300;
  for (int J = 1 << 10; J <= 1 << 20; J *= 2) {
    const double s = jsum(conv, J);
    CHECK(s - prev < prev_inc);
    prev_inc = s - prev;
    prev = s;
  }
  CHECK(prev < 10.0);
}

TEST_CASE("dani correspondence") {
  const DimensionParams d2(1, 1);
  const PsiFunction c5 = PsiFunction::constant_ratio(0.5, 2.0);
  for (double s : {3.0, 7.0, 15.0}) CHECK(dani_rate(c5, d2, s) == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-12));
  CHECK(dani_rate(PsiFunction::constant_ratio(0.3, 2.0), DimensionParams(2, 3), 9.0) ==
        doctest::Approx(-std::log(0.3) / 5.0).epsilon(1e-12));
  // e^{7 - log(2)/2}
  CHECK(dani_time(c5, d2, 7.0) == doctest::Approx(775.43674279878458).epsilon(1e-11));

  const PsiFunction ld = PsiFunction::log_drift(1.0, 1.0, kE * kE);
  double prev_t = 0.0;
  for (int i = 0; i <= 150; ++i) {
    const double s = 5.0 + 0.1 * i;
    const double r = dani_rate(ld, d2, s);
    const double t = dani_time(ld, d2, s);
    CHECK(std::abs(std::exp(-2.0 * r) - t * ld(t)) <= 1e-9);
    CHECK(t > prev_t);
    CHECK(t > std::exp(s - 1.0));
    CHECK(t < std::exp(s));
    CHECK(r > 0.0);
    CHECK(r < 0.5);
    prev_t = t;
  }
  for (const auto& dims : {DimensionParams(2, 1), DimensionParams(1, 3)}) {
    const PsiFunction p = PsiFunction::power_drift(3.0, 0.5, 25.0);
    for (double s = 4.0; s < 30.0; s += 1.7) {
      const double t = dani_time(p, dims, s);
      CHECK(std::abs(std::exp(-dims.d() * dani_rate(p, dims, s)) - t * p(t)) <= 1e-9);
      CHECK(t > std::exp(s - 1.0));
      CHECK(t < std::exp(s));
    }
  }
  const double s0 = dani_s_of_t(ld, d2, ld.t0());
  CHECK(dani_time(ld, d2, s0) == doctest::Approx(ld.t0()).epsilon(1e-10));
  CHECK_THROWS_AS(dani_rate(ld, d2, s0 - 0.1), DomainError);
}

TEST_CASE("reduce_lower_bound") {
  const auto grid = geometric_grid(10.0, 1e5, 200);
  const PsiFunction ld = PsiFunction::log_drift(1.0, 1.0, std::exp(2.0));
  const PsiFunction ld1 = reduce_lower_bound(ld);
  for (double t : grid) CHECK(ld1(t) == doctest::Approx(ld(t)).epsilon(1e-15));

  const PsiFunction q = reduce_lower_bound(PsiFunction::constant_ratio(0.25, 2.0));
  const PsiFunction h = PsiFunction::constant_ratio(0.5, 2.0);
  for (double t : grid) CHECK(q(t) == doctest::Approx(h(t)).epsilon(1e-15));

  // PowerDrift(2, 1/2): F = 2/√t crosses 1/2 at t* = 16
  const PsiFunction pd = PsiFunction::power_drift(2.0, 0.5, 9.0);
  const PsiFunction pd1 = reduce_lower_bound(pd);
  double lo = 9.0, hi = 100.0;  // independent bisection on F - 1/2
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (2.0 / std::sqrt(mid) > 0.5 ? lo : hi) = mid;
  }
  CHECK(lo == doctest::Approx(16.0).epsilon(1e-12));
  for (double t = 9.0; t < 60.0; t += 0.37) {
    CHECK(std::abs(f_psi(pd1, t) - std::min(f_psi(pd, t), 0.5)) <= 1e-12);
    if (t < lo) CHECK(f_psi(pd1, t) == 0.5);
    if (t > lo) CHECK(f_psi(pd1, t) < 0.5);
  }
}

TEST_CASE("clamp_rate and rho_schedule") {
  const DimensionParams d2(1, 1);
  const RateFunction c3 = RateFunction::constant(0.3, d2);
  const RateFunction cl = clamp_rate(c3, 2.0, 0.2);
  CHECK(cl(10.0) == doctest::Approx(0.3));
  CHECK(cl(1000.0) == doctest::Approx(std::pow(1000.0, -0.2)).epsilon(1e-14));
  const RateFunction ex = RateFunction::custom([](double s) { return std::exp(-s); }, d2, 0.0);
  CHECK(clamp_rate(ex, 2.0, 0.2)(10.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK_THROWS_AS(clamp_rate(c3, 1.0, 0.2), ValidationError);
  CHECK_THROWS_AS(clamp_rate(c3, 2.0, 0.5), ValidationError);
  CHECK_THROWS_AS(clamp_rate(c3, 2.0, 0.0), ValidationError);

  CHECK(rho_schedule(c3, 0.5, 17) == doctest::Approx(0.075));
  CHECK(rho_schedule(cl, 0.5, 999) == doctest::Approx(0.06279716078773950).epsilon(1e-13));
  const double lim = rho_schedule(c3, 1.0 - 1e-12, 5);
  CHECK(lim == doctest::Approx(0.15).epsilon(1e-10));
  CHECK_THROWS_AS(rho_schedule(c3, 1.0, 5), ValidationError);
  CHECK_THROWS_AS(RateFunction::constant(0.6, d2), ValidationError);

  const RateFunction der = RateFunction::derived(PsiFunction::constant_ratio(0.5, 2.0), d2);
  CHECK(der(9.0) == doctest::Approx(std::log(2.0) / 2.0));
  CHECK(der.time(7.0) == doctest::Approx(775.43674279878458));
}

TEST_CASE("min_with_power") {
  const auto b = min_with_power(std::vector<double>(10, 1.0), 0.5);
  CHECK(b[3] == doctest::Approx(0.5));
  std::vector<double> a(100);
  for (int k = 1; k <= 100; ++k) a[k - 1] = 1.0 / k;
  CHECK(min_with_power(a, 0.5)[99] == doctest::Approx(0.01));

  for (double c : {1.0, 0.5, 0.1, 0.02}) {
    const long long bound = static_cast<long long>(12100.0 / (c * c));
    const auto bc = min_with_power(std::vector<double>(bound, c), 0.5);
    double s = 0.0;
    long long cross = -1;
    for (long long k = 0; k < bound; ++k) {
      s += bc[k];
      if (s > 10.0) {
        cross = k + 1;
        break;
      }
    }
    CHECK(cross > 0);
  }
}

TEST_CASE("closed forms must be non-increasing from t0") {
  // LogDrift(1, 1): ψ' < 0 exactly for log t > golden ratio
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  CHECK_THROWS_AS(PsiFunction::log_drift(1.0, 1.0, 3.0), ValidationError);
  CHECK_THROWS_AS(PsiFunction::log_drift(1.0, 1.0, std::exp(phi) * 0.999), ValidationError);
  CHECK_NOTHROW(PsiFunction::log_drift(1.0, 1.0, std::exp(phi) * 1.001));
  // PowerDrift(c, a): ψ' <= 0 for t^a >= c (1 + a)
  CHECK_THROWS_AS(PsiFunction::power_drift(2.0, 0.5, 8.9), ValidationError);
  CHECK_NOTHROW(PsiFunction::power_drift(2.0, 0.5, 9.0));
  const auto ld = PsiFunction::log_drift(1.0, 1.0, std::exp(phi) * 1.001);
  const auto grid = geometric_grid(ld.t0(), 1e6, 400);
  CHECK(validate_psi(ld, grid).monotonicity.empty());
}
