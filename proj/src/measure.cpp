#include "dirlab/measure.hpp"

#include <cmath>
#include <sstream>

#include "dirlab/digest.hpp"
#include "dirlab/errors.hpp"
#include "dirlab/parallel.hpp"

namespace dirlab {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::string weights_key(const WeightPair& w) {
  std::string s = "alpha=";
  for (double a : w.alpha()) s += format_double(a) + ",";
  s += "beta=";
  for (double b : w.beta()) s += format_double(b) + ",";
  return s;
}

void check_sampling(double s_push, std::int64_t N) {
  if (!(s_push >= 5.0)) throw ValidationError("measure: s_push must be at least 5");
  if (N < 1000) throw ValidationError("measure: N must be at least 1000");
}

// Flowed and reduced lattice of the i-th torus sample.
UnimodularLattice pushed_sample(std::uint64_t seed, std::string_view label, std::int64_t i, const WeightPair& w,
                                double s_push) {
  Substream rng(seed, label, static_cast<std::uint64_t>(i));
  const DyadicMatrix A = sample_torus(rng, w.dims(), torus_bits(s_push));
  return reduced(apply_flow(lattice_from_matrix(A), s_push, w));
}

double factorial(int d) {
  double f = 1.0;
  for (int k = 2; k <= d; ++k) f *= k;
  return f;
}

struct Range {
  double lo, hi;
};

// Sampling box of one coordinate group; see CoordinateRegion.
Range lower_range(const CoordinateRegion& g, int col) {
  if (g.extra && col == 0) return {-std::sqrt(g.r), 0.0};
  return {-g.c0, 0.0};
}

}  // namespace

DyadicMatrix sample_torus(Substream& rng, const DimensionParams& dims, int bits) {
  if (bits < 1) throw ValidationError("sample_torus: bits must be positive");
  DyadicMatrix A(dims.m(), dims.n(), bits);
  const int words = (bits + 63) / 64;
  for (int i = 0; i < dims.m(); ++i) {
    for (int j = 0; j < dims.n(); ++j) {
      mpz_class v = 0;
      for (int k = 0; k < words; ++k) {
        const std::uint64_t u = rng.next_u64();
        v <<= 64;
        v += mpz_class(static_cast<unsigned long>(u));
      }
      v >>= 64 * words - bits;
      A.set_numerator(i, j, std::move(v));
    }
  }
  return A;
}

int torus_bits(double s_max) {
  const double need = 2.0 * std::abs(s_max) / std::log(2.0) + 64.0;
  return 64 * static_cast<int>(std::ceil(need / 64.0));
}

WilsonInterval wilson_ci95(std::int64_t hits, std::int64_t n) {
  if (n <= 0 || hits < 0 || hits > n) throw ValidationError("wilson: need 0 <= hits <= n, n > 0");
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  const double z2 = kZ95 * kZ95;
  const double nn = static_cast<double>(n);
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  // keep the point estimate inside despite rounding
  ci.low = std::min(ci.low, p);
  ci.high = std::max(ci.high, p);
  return ci;
}

McEstimate make_estimate(std::int64_t hits, std::int64_t count, double scale, std::string params_hash) {
  McEstimate e;
  e.hits = hits;
  e.count = count;
  e.scale = scale;
  const WilsonInterval ci = wilson_ci95(hits, count);
  e.mean = scale * static_cast<double>(hits) / static_cast<double>(count);
  e.ci95 = {scale * ci.low, scale * ci.high};
  e.params_hash = std::move(params_hash);
  return e;
}

McEstimate estimate_measure_equidist(const TargetSpec& spec, const WeightPair& w, double s_push, std::int64_t N,
                                     std::uint64_t seed, int threads) {
  return estimate_measure_grid(spec.kind(), {spec.r()}, w, s_push, N, seed, threads).front();
}

std::vector<McEstimate> estimate_measure_grid(TargetKind kind, const std::vector<double>& r_values,
                                              const WeightPair& w, double s_push, std::int64_t N, std::uint64_t seed,
                                              int threads) {
  check_sampling(s_push, N);
  if (r_values.empty()) throw ValidationError("measure: empty r grid");
  std::vector<TargetSpec> specs;
  for (double r : r_values) specs.emplace_back(r, kind, w);
  const std::size_t R = specs.size();
  std::vector<unsigned char> hit(static_cast<std::size_t>(N) * R, 0);
  parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t i) {
    const UnimodularLattice L = pushed_sample(seed, "measure", static_cast<std::int64_t>(i), w, s_push);
    for (std::size_t k = 0; k < R; ++k) hit[i * R + k] = in_target(L, specs[k]) ? 1 : 0;
  });
  std::vector<McEstimate> out;
  for (std::size_t k = 0; k < R; ++k) {
    std::int64_t h = 0;
    for (std::int64_t i = 0; i < N; ++i) h += hit[static_cast<std::size_t>(i) * R + k];
    std::ostringstream key;
    key << "estimate_measure_equidist|kind=" << to_string(kind) << "|r=" << format_double(r_values[k]) << "|"
        << weights_key(w) << "|s_push=" << format_double(s_push) << "|N=" << N << "|seed=" << seed;
    out.push_back(make_estimate(h, N, 1.0, sha256_hex(key.str())));
  }
  return out;
}

double CoordinateRegion::r_cap() const {
  const double dd = d;
  if (extra) return std::min((c0 / dd) * (c0 / dd), c0 * c0 / std::pow(dd, 2.0 * dd - 2.0));
  return c0 / dd;
}

void CoordinateRegion::validate() const {
  if (d < 2 || d > kMaxEnumDim) throw ValidationError("region: d must be in [2, 6]");
  if (!(c0 > 0.0 && c0 < 1.0)) throw ValidationError("region: c0 must lie in (0, 1)");
  if (!box_conditions) throw ValidationError("region: degenerate region (no bounded sampling box)");
  if (!(r > 0.0) || !(r < r_cap())) throw ValidationError("region: r must lie in (0, " + format_double(r_cap()) + ")");
}

bool CoordinateRegion::contains(const RegionPoint& p) const {
  const auto& b = p.b;
  for (int j = 0; j < d - 1; ++j)
    if (!(p.x(j) > 0.0 && p.x(j) < c0 / d)) return false;
  if (box_conditions) {
    for (int l = 0; l < d - 1; ++l)
      if (!(b(l, l) > 1.0 - r / (2.0 * d) && b(l, l) < 1.0)) return false;
    for (int j = 0; j < d - 1; ++j)
      for (int i = j + 1; i < d; ++i) {
        if (!(b(i, j) > -c0 && b(i, j) < 0.0)) return false;
        if (i < d - 1 && !(b(j, i) > 0.0 && b(j, i) < c0)) return false;
      }
  }
  if (extra)
    for (int i = 1; i < d; ++i)
      if (!(b(i, 0) > -std::sqrt(r) && b(i, 0) < 0.0)) return false;
  if (growth)
    for (int j = 1; j < d - 1; ++j)
      for (int i = j + 1; i < d; ++i)
        if (!(std::abs(b(i, j)) > d * std::abs(b(i, j - 1)))) return false;
  if (ordering)
    for (int j = 0; j < d - 1; ++j)
      for (int k = j + 1; k < d; ++k)
        for (int i = k + 1; i < d; ++i)
          if (!(std::abs(b(k, j)) < std::abs(b(i, j)))) return false;
  if (products) {
    const double cap = r / factorial(d);
    for (int j = 0; j < d - 1; ++j)
      for (int i = j + 1; i < d - 1; ++i)
        if (!(std::abs(b(i, j) * b(j, i)) < cap)) return false;
    double s = 0.0;
    for (int j = 0; j < d - 1; ++j) s += std::abs(b(d - 1, j)) * p.x(j);
    if (!(s < r / 2.0)) return false;
  }
  return true;
}

double haar_normalizer(int d) {
  double z = 1.0;
  for (int k = 2; k <= d; ++k) z *= std::riemann_zeta(static_cast<double>(k));
  return 1.0 / z;
}

McEstimate lower_bound_region_volume(const CoordinateRegion& region, std::int64_t N, std::uint64_t seed,
                                     int threads) {
  region.validate();
  if (N < 1) throw ValidationError("region: N must be positive");
  const int d = region.d;
  // The diagonal and lower entries are drawn from their box; the upper
  // entries and x are integrated conditionally (exact length for the upper
  // entries, one uniform draw from the shrunk x-box).
  double vol = 1.0;
  for (int l = 0; l < d - 1; ++l) vol *= region.r / (2.0 * d);
  for (int j = 0; j < d - 1; ++j)
    for (int i = j + 1; i < d; ++i) {
      const Range rg = lower_range(region, j);
      vol *= rg.hi - rg.lo;
    }
  const double cap = region.r / factorial(d);

  std::vector<double> weight(static_cast<std::size_t>(N), 0.0);
  parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t idx) {
    Substream rng(seed, "region", idx);
    RegionPoint p{Eigen::MatrixXd::Zero(d, d - 1), Eigen::VectorXd::Zero(d - 1)};
    for (int l = 0; l < d - 1; ++l) p.b(l, l) = rng.uniform(1.0 - region.r / (2.0 * d), 1.0);
    for (int j = 0; j < d - 1; ++j)
      for (int i = j + 1; i < d; ++i) {
        const Range rg = lower_range(region, j);
        p.b(i, j) = rng.uniform(rg.lo, rg.hi);
      }
    double w = 1.0;
    for (int j = 0; j < d - 1; ++j)
      for (int i = j + 1; i < d - 1; ++i) {
        const double hi = region.products ? std::min(region.c0, cap / std::abs(p.b(i, j))) : region.c0;
        w *= hi;
        p.b(j, i) = 0.5 * hi;
      }
    for (int j = 0; j < d - 1; ++j) {
      double hi = region.c0 / d;
      if (region.products) hi = std::min(hi, region.r / (2.0 * std::abs(p.b(d - 1, j))));
      w *= hi;
      p.x(j) = rng.uniform(0.0, hi);
    }
    weight[idx] = region.contains(p) ? w : 0.0;
  });
  std::int64_t h = 0;
  double sum = 0.0, sum2 = 0.0;
  for (double w : weight) {
    h += w > 0.0;
    sum += w;
    sum2 += w * w;
  }
  const double nn = static_cast<double>(N);
  const double scale = vol * haar_normalizer(d);
  const double mean = sum / nn;
  const double var = N > 1 ? std::max(0.0, (sum2 - nn * mean * mean) / (nn - 1.0)) : 0.0;
  const double half = kZ95 * std::sqrt(var / nn);
  std::ostringstream key;
  key << "lower_bound_region_volume|r=" << format_double(region.r) << "|c0=" << format_double(region.c0)
      << "|d=" << d << "|flags=" << region.box_conditions << region.growth << region.products << region.ordering
      << region.extra << "|N=" << N << "|seed=" << seed;
  McEstimate e;
  e.hits = h;
  e.count = N;
  e.scale = scale;
  e.mean = scale * mean;
  e.ci95 = {scale * std::max(0.0, mean - half), scale * (mean + half)};
  e.params_hash = sha256_hex(key.str());
  return e;
}

RegionPoint sample_region_point(const CoordinateRegion& region, Substream& rng) {
  region.validate();
  const int d = region.d;
  constexpr int kTries = 1000000;
  RegionPoint p{Eigen::MatrixXd::Zero(d, d - 1), Eigen::VectorXd::Zero(d - 1)};
  // diagonal and lower entries, rejecting on the ordering constraints
  bool ok = false;
  for (int attempt = 0; attempt < kTries && !ok; ++attempt) {
    for (int l = 0; l < d - 1; ++l) p.b(l, l) = rng.uniform(1.0 - region.r / (2.0 * d), 1.0);
    for (int j = 0; j < d - 1; ++j)
      for (int i = j + 1; i < d; ++i) {
        const Range rg = lower_range(region, j);
        p.b(i, j) = rng.uniform(rg.lo, rg.hi);
      }
    ok = true;
    if (region.growth)
      for (int j = 1; j < d - 1; ++j)
        for (int i = j + 1; i < d; ++i) ok = ok && std::abs(p.b(i, j)) > d * std::abs(p.b(i, j - 1));
    if (region.ordering)
      for (int j = 0; j < d - 1; ++j)
        for (int k = j + 1; k < d; ++k)
          for (int i = k + 1; i < d; ++i) ok = ok && std::abs(p.b(k, j)) < std::abs(p.b(i, j));
    for (int j = 0; j < d - 1; ++j)
      for (int i = j + 1; i < d; ++i) ok = ok && p.b(i, j) < 0.0;
  }
  if (!ok) throw NumericalError("region: could not satisfy the ordering constraints");
  // upper entries, conditional on their lower partners
  const double cap = region.r / factorial(d);
  for (int j = 0; j < d - 1; ++j)
    for (int i = j + 1; i < d - 1; ++i) {
      double hi = region.c0;
      if (region.products) hi = std::min(hi, cap / std::abs(p.b(i, j)));
      do p.b(j, i) = rng.uniform(0.0, hi);
      while (!(p.b(j, i) > 0.0));
    }
  // x inside the product cap
  std::vector<double> xmax(d - 1, region.c0 / d);
  if (region.products)
    for (int j = 0; j < d - 1; ++j) xmax[j] = std::min(xmax[j], region.r / (2.0 * std::abs(p.b(d - 1, j))));
  for (int attempt = 0; attempt < kTries; ++attempt) {
    for (int j = 0; j < d - 1; ++j) p.x(j) = rng.uniform(0.0, xmax[j]);
    if (region.contains(p)) return p;
  }
  throw NumericalError("region: sampling did not converge");
}

Eigen::MatrixXd region_basis(const RegionPoint& p) {
  const int d = static_cast<int>(p.b.rows());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
  g.leftCols(d - 1) = p.b;
  const double top = p.b.topRows(d - 1).determinant();
  if (!(std::abs(top) > 0.0)) throw NumericalError("region: singular coordinate block");
  g.col(d - 1) = p.b * p.x;
  g(d - 1, d - 1) += 1.0 / top;
  return g;
}

FitReport fit_scaling(const std::vector<double>& r_values, const std::vector<McEstimate>& estimates,
                      const DimensionParams& dims, std::optional<double> lambda_frozen, bool thickened) {
  const std::size_t n = r_values.size();
  if (n != estimates.size()) throw ValidationError("fit: r values and estimates differ in length");
  if (n < 4) throw ValidationError("fit: need at least 4 radii");
  double rmin = r_values.front(), rmax = r_values.front();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = r_values[i];
    if (!(r > 0.0 && r < 1.0)) throw ValidationError("fit: radii must lie in (0, 1)");
    if (!(estimates[i].mean > 0.0)) throw ValidationError("fit: estimates must be positive");
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
  }
  if (rmax < 10.0 * rmin * (1.0 - 1e-9)) throw ValidationError("fit: radii must span a decade");
  const int p = lambda_frozen ? 2 : 3;
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lr = std::log(r_values[i]);
    const double llr = std::log(std::log(1.0 / r_values[i]));
    y(i) = std::log(estimates[i].mean) - (lambda_frozen ? *lambda_frozen * llr : 0.0);
    X(i, 0) = lr;
    if (lambda_frozen) {
      X(i, 1) = 1.0;
    } else {
      X(i, 1) = llr;
      X(i, 2) = 1.0;
    }
  }
  const Eigen::MatrixXd XtX = X.transpose() * X;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0))) throw NumericalError("fit: ill-conditioned design matrix");
  const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd res = y - X * coef;
  const double s2 = n > static_cast<std::size_t>(p) ? res.squaredNorm() / static_cast<double>(n - p) : 0.0;
  const Eigen::MatrixXd cov = s2 * XtX.inverse();
  FitReport f;
  f.kappa_hat = coef(0);
  f.se = std::sqrt(std::max(0.0, cov(0, 0)));
  f.lambda_frozen = lambda_frozen.has_value();
  f.lambda_hat = lambda_frozen ? *lambda_frozen : coef(1);
  f.intercept = coef(p - 1);
  f.reference_exponent = thickened ? dims.kappa() : dims.kappa() + 1.0;
  f.points = n;
  return f;
}

PairCorrelation pair_correlation(int i, int j, const RateFunction& rate, double a, const WeightPair& w,
                                 std::int64_t N, std::uint64_t seed, int threads, bool independent) {
  if (!(j > i && i >= 1)) throw ValidationError("pair_correlation: need j > i >= 1");
  if (N < 1) throw ValidationError("pair_correlation: N must be positive");
  const TargetSpec ti(a * rate(static_cast<double>(i + 1)), TargetKind::ThickPrimed, w);
  const TargetSpec tj(a * rate(static_cast<double>(j + 1)), TargetKind::ThickPrimed, w);
  const int bits = torus_bits(j + 1.0);
  std::vector<unsigned char> hi(static_cast<std::size_t>(N)), hj(static_cast<std::size_t>(N));
  parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t idx) {
    Substream rng(seed, "pair", idx);
    const UnimodularLattice L = lattice_from_matrix(sample_torus(rng, w.dims(), bits));
    const UnimodularLattice Li = reduced(apply_flow(L, i, w));
    hi[idx] = in_target(Li, ti);
    if (independent) {
      Substream other(seed, "pair-independent", idx);
      const UnimodularLattice L2 = lattice_from_matrix(sample_torus(other, w.dims(), bits));
      hj[idx] = in_target(apply_flow(L2, j, w), tj);
    } else {
      hj[idx] = in_target(apply_flow(Li, j - i, w), tj);
    }
  });
  std::int64_t ci = 0, cj = 0, cij = 0;
  for (std::int64_t k = 0; k < N; ++k) {
    ci += hi[k];
    cj += hj[k];
    cij += hi[k] & hj[k];
  }
  PairCorrelation pc;
  pc.i = i;
  pc.j = j;
  pc.count = N;
  const double nn = static_cast<double>(N);
  pc.b_i = ci / nn;
  pc.b_j = cj / nn;
  pc.b_ij = cij / nn - pc.b_i * pc.b_j;
  pc.degenerate = ci == 0 || cj == 0;
  pc.ratio = pc.degenerate ? std::nan("") : std::abs(pc.b_ij) / (pc.b_i * pc.b_j);
  std::ostringstream key;
  key << "pair_correlation|i=" << i << "|j=" << j << "|rate=" << rate.label() << "|a=" << format_double(a) << "|"
      << weights_key(w) << "|N=" << N << "|seed=" << seed << "|independent=" << independent;
  pc.params_hash = sha256_hex(key.str());
  return pc;
}

}  // namespace dirlab
