#include "doctest.h"
#include "dirlab/errors.hpp"
#include "dirlab/lattice.hpp"
#include "dirlab/rng.hpp"
#include "test_util.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace dirlab;

namespace {
Eigen::MatrixXd diag2(double a, double b) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2, 2);
  B(0, 0) = a;
  B(1, 1) = b;
  return B;
}
}  // namespace

TEST_CASE("weights") {
  const WeightPair w({0.25, 0.75}, {1.0});
  CHECK(w.omega1() == doctest::Approx(1.5));
  CHECK(w.omega2() == doctest::Approx(0.5));
  CHECK(w.omega2() <= w.omega1());
  CHECK(w.alpha_min() == 0.25);
  CHECK(w.beta_max() == 1.0);
  CHECK_THROWS_AS(WeightPair({0.5, 0.4}, {1.0}), ValidationError);
  CHECK_THROWS_AS(WeightPair({1.5, -0.5}, {1.0}), ValidationError);
  const WeightPair u = WeightPair::uniform(DimensionParams(3, 2));
  CHECK(u.omega1() == doctest::Approx(1.0));
  CHECK(u.omega2() == doctest::Approx(1.0));
}

TEST_CASE("weighted_quasi_norm") {
  CHECK(weighted_quasi_norm({0.5}, {1.0}) == 0.5);
  CHECK(weighted_quasi_norm({0.25, 0.5}, {0.5, 0.5}) == doctest::Approx(0.25));
  Substream rng(5, "wqn", 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + trial % 4;
    std::vector<double> x(m);
    double sup = 0.0;
    for (auto& v : x) {
      v = rng.uniform(-2.0, 2.0);
      sup = std::max(sup, std::abs(v));
    }
    CHECK(weighted_quasi_norm(x, std::vector<double>(m, 1.0 / m)) == doctest::Approx(std::pow(sup, m)).epsilon(1e-12));
  }
}

TEST_CASE("lattice_from_matrix") {
  const auto L0 = lattice_from_matrix(Eigen::MatrixXd(Eigen::MatrixXd::Zero(2, 3)));
  CHECK(L0.basis() == Eigen::MatrixXd::Identity(5, 5));
  Eigen::MatrixXd A(1, 1);
  A << 0.5;
  const auto L = lattice_from_matrix(A);
  Eigen::MatrixXd expect(2, 2);
  expect << 1, 0.5, 0, 1;
  CHECK(L.basis() == expect);
  const auto p = L.point({0, 1});
  CHECK(p[0] == 0.5);
  CHECK(p[1] == 1.0);
  Substream rng(1, "det", 0);
  for (int t = 0; t < 50; ++t) {
    Eigen::MatrixXd R(2, 2);
    for (int i = 0; i < 4; ++i) R(i / 2, i % 2) = rng.uniform(-3.0, 3.0);
    CHECK(lattice_from_matrix(R).det() == 1.0);
  }
}

TEST_CASE("apply_flow") {
  const DimensionParams d11(1, 1);
  const WeightPair w = WeightPair::uniform(d11);
  const auto Z = UnimodularLattice::identity(d11);
  CHECK(apply_flow(Z, 0.0, w).basis() == Z.basis());
  const auto B = apply_flow(Z, std::log(2.0), w).basis();
  CHECK(B(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(B(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(B(0, 1) == 0.0);
  CHECK_THROWS_AS(apply_flow(Z, 501.0, w), DomainError);

  Substream rng(2, "flow", 0);
  const WeightPair w21({0.3, 0.7}, {1.0});
  for (int t = 0; t < 100; ++t) {
    const auto L = UnimodularLattice::from_basis(testutil::random_unimodular_basis(rng, 3), DimensionParams(2, 1));
    const double s1 = rng.uniform(-5, 5), s2 = rng.uniform(-5, 5);
    const auto a = apply_flow(apply_flow(L, s1, w21), s2, w21).basis();
    const auto b = apply_flow(L, s1 + s2, w21).basis();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(std::abs(a(i, j) - b(i, j)) <= 1e-12 * std::max(1.0, std::abs(b(i, j))));
    CHECK(std::abs(apply_flow(L, s1, w21).det() - L.det()) < 1e-9 * std::abs(L.det()));
  }
}

TEST_CASE("box membership policy") {
  const Box open = Box::cube(1, 1.0);
  CHECK(open.classify({0.5}).inside);
  CHECK_FALSE(open.classify({0.5}).boundary);
  CHECK_FALSE(open.classify({1.0}).inside);
  CHECK(open.classify({1.0}).boundary);
  CHECK_FALSE(open.classify({1.0 - 1e-13}).inside);
  CHECK(open.classify({1.0 - 1e-11}).inside);
  const Box closed(std::vector<BoxSide>{{-1.0, 1.0, true, true}});
  CHECK(closed.classify({1.0}).inside);
  CHECK(closed.classify({1.0}).boundary);
  CHECK_FALSE(closed.classify({1.0 + 1e-11}).inside);
  CHECK_THROWS_AS(Box(std::vector<BoxSide>{{1.0, 1.0}}), ValidationError);
}

TEST_CASE("enumerate_in_box examples") {
  const auto Z = UnimodularLattice::identity(DimensionParams(1, 1));
  const auto r = enumerate_in_box(Z, Box::cube(2, 1.5), 100);
  CHECK(r.points.size() == 8);
  std::set<std::pair<double, double>> pts;
  for (const auto& p : r.points) pts.insert({p.coords[0], p.coords[1]});
  CHECK(pts.size() == 8);
  CHECK(pts.count({0.0, 0.0}) == 0);
  CHECK(enumerate_in_box(Z, Box({{0.4, 0.6}, {-0.1, 0.1}}), 100).points.empty());
  CHECK_THROWS_AS(enumerate_in_box(Z, Box::cube(2, 10.0), 20), CapExceeded);
  CHECK_THROWS_AS(enumerate_in_box(UnimodularLattice::identity(DimensionParams(4, 3)), Box::cube(7, 0.5), 10),
                  DimensionTooLarge);
  // coefficients are reported in the lattice's own basis
  Eigen::MatrixXd A(1, 1);
  A << 0.3;
  const auto L = lattice_from_matrix(A);
  for (const auto& p : enumerate_in_box(L, Box({{-0.5, 0.5}, {-4.5, 4.5}}), 100).points) {
    const double x = p.coeffs[0].get_d() + 0.3 * p.coeffs[1].get_d();
    CHECK(x == doctest::Approx(p.coords[0]));
    CHECK(p.coeffs[1].get_d() == p.coords[1]);
  }
}

TEST_CASE("enumerate_in_box matches a brute-force coefficient scan") {
  Substream rng(3, "enum", 0);
  for (int t = 0; t < 300; ++t) {
    const int d = 2 + t % 3;
    const Eigen::MatrixXd B = testutil::random_unimodular_basis(rng, d);
    const auto L = UnimodularLattice::from_basis(B, DimensionParams(1, d - 1));
    std::vector<BoxSide> sides(d);
    std::vector<double> c(d), h(d);
    for (int i = 0; i < d; ++i) {
      c[i] = rng.uniform(-1.0, 1.0);
      h[i] = rng.uniform(0.1, 1.5);
      sides[i] = {c[i] - h[i], c[i] + h[i], rng.uniform() < 0.5, rng.uniform() < 0.5};
    }
    const Box box(sides);
    std::multiset<std::vector<long long>> expect;
    testutil::brute_force_box(B, c, h, [&](const Eigen::VectorXd& v, const std::vector<long long>& k) {
      bool zero = true;
      for (auto x : k) zero = zero && x == 0;
      if (zero) return;
      std::vector<double> vv(v.data(), v.data() + d);
      if (box.classify(vv).inside) expect.insert(k);
    });
    std::multiset<std::vector<long long>> got;
    for (const auto& p : enumerate_in_box(L, box, 100000).points) {
      std::vector<long long> k(d);
      for (int i = 0; i < d; ++i) k[i] = p.coeffs[i].get_si();
      got.insert(k);
    }
    CHECK(got == expect);
  }
}

TEST_CASE("shortest_sup_norm and delta") {
  for (int d = 2; d <= 6; ++d) {
    const auto Z = UnimodularLattice::identity(DimensionParams(1, d - 1));
    CHECK(shortest_sup_norm(Z) == 1.0);
    CHECK(delta(Z) == 0.0);
  }
  const auto D = UnimodularLattice::from_basis(diag2(2.0, 0.5), DimensionParams(1, 1));
  CHECK(shortest_sup_norm(D) == 0.5);
  CHECK(std::abs(delta(D) - std::log(2.0)) <= 1e-12);
  const WeightPair w = WeightPair::uniform(DimensionParams(1, 1));
  CHECK(delta(apply_flow(lattice_from_matrix(Eigen::MatrixXd(Eigen::MatrixXd::Zero(1, 1))), 1.0, w)) == doctest::Approx(1.0).epsilon(1e-14));

  // g_3 Λ_A against a scan over |p|, |q| <= 100
  Substream rng(4, "short", 0);
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd A(1, 1);
    A << rng.uniform();
    const double e3 = std::exp(3.0);
    double best = 1e300;
    for (int q = -100; q <= 100; ++q)
      for (int p = -100; p <= 100; ++p) {
        if (p == 0 && q == 0) continue;
        best = std::min(best, std::max(std::abs(e3 * (p + A(0, 0) * q)), std::abs(q / e3)));
      }
    CHECK(shortest_sup_norm(apply_flow(lattice_from_matrix(A), 3.0, w)) == doctest::Approx(best).epsilon(1e-12));
  }
  CHECK_THROWS_AS(delta(UnimodularLattice::identity(DimensionParams(4, 3))), DimensionTooLarge);
}

TEST_CASE("delta is nonnegative and matches brute force on random lattices") {
  Substream rng(6, "delta", 0);
  for (int t = 0; t < 10000; ++t) {
    const int d = 2 + t % 4;
    const Eigen::MatrixXd B = testutil::random_unimodular_basis(rng, d, 1.0, 1.5);
    const auto L = UnimodularLattice::from_basis(B, DimensionParams(1, d - 1));
    const double dl = delta(L);
    CHECK(dl >= -1e-9);
    if (t % 10 == 0 && d <= 3) CHECK(std::abs(dl + std::log(testutil::brute_force_shortest(B))) <= 1e-9);
  }
}

TEST_CASE("flow Lipschitz bound for delta") {
  Substream rng(7, "lip", 0);
  const WeightPair w({0.2, 0.8}, {0.6, 0.4});
  for (int t = 0; t < 500; ++t) {
    const auto L = UnimodularLattice::from_basis(testutil::random_unimodular_basis(rng, 4), DimensionParams(2, 2));
    const double s = rng.uniform(-2.0, 2.0);
    const double lip = std::max(w.alpha_max(), w.beta_max());
    CHECK(std::abs(delta(apply_flow(L, s, w)) - delta(L)) <= lip * std::abs(s) + 1e-12);
  }
}

TEST_CASE("deep flows stay exact") {
  // A = p/2^60 exactly; g_s Λ_A for s up to 40 against exact integer reasoning
  const WeightPair w = WeightPair::uniform(DimensionParams(1, 1));
  Eigen::MatrixXd A(1, 1);
  A << std::ldexp(1.0, -30);
  const auto L = lattice_from_matrix(A);
  // the vector (0 - A * 2^30 + 1, ...) : q = 2^30, p = -1 gives x = 0 exactly
  // so for large s the shortest vector is (0, 2^30 e^{-s})
  const double s = 40.0;
  CHECK(shortest_sup_norm(apply_flow(L, s, w)) == doctest::Approx(std::ldexp(1.0, 30) * std::exp(-s)).epsilon(1e-12));
  auto Lk = L;
  for (int k = 0; k < 40; ++k) Lk = reduced(apply_flow(Lk, 1.0, w));
  CHECK(shortest_sup_norm(Lk) == doctest::Approx(std::ldexp(1.0, 30) * std::exp(-s)).epsilon(1e-12));
}
