#include "dirlab/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "dirlab/digest.hpp"
#include "dirlab/errors.hpp"
#include "dirlab/parallel.hpp"

namespace dirlab {

namespace {

std::string weights_key(const WeightPair& w) {
  std::string s = "alpha=";
  for (double a : w.alpha()) s += format_double(a) + ",";
  s += "beta=";
  for (double b : w.beta()) s += format_double(b) + ",";
  return s;
}

}  // namespace

std::string to_string(HitVariant v) {
  switch (v) {
    case HitVariant::Upper:
      return "upper";
    case HitVariant::Lower:
      return "lower";
    case HitVariant::Ndi:
      return "ndi";
  }
  return "?";
}

HitVariant hit_variant_from_string(const std::string& s) {
  if (s == "upper") return HitVariant::Upper;
  if (s == "lower") return HitVariant::Lower;
  if (s == "ndi") return HitVariant::Ndi;
  throw ValidationError("unknown hit variant '" + s + "' (expected upper, lower or ndi)");
}

TargetSpec variant_target(HitVariant v, const RateFunction& rate, long long k, const WeightPair& w,
                          const HitConstants& c) {
  const double kk = static_cast<double>(k);
  switch (v) {
    case HitVariant::Upper:
      return TargetSpec(w.omega1() * c.c_r * rate(kk), TargetKind::Thick, w);
    case HitVariant::Lower:
      return TargetSpec(w.omega2() * rate(kk + 1.0) / c.c_r, TargetKind::Thick, w);
    case HitVariant::Ndi:
      return TargetSpec(c.a * rate(kk + 1.0), TargetKind::ThickPrimed, w);
  }
  throw ValidationError("bad hit variant");
}

int HitSeries::count() const {
  int c = 0;
  for (bool h : hits) c += h;
  return c;
}

HitSeries orbit_hit_series(const DyadicMatrix& A, const RateFunction& rate, HitVariant v, long long k_lo,
                           long long k_hi, const WeightPair& w, const HitConstants& c) {
  if (k_hi < k_lo) throw ValidationError("orbit: empty k range");
  if (!(c.c_r >= 1.0)) throw ValidationError("orbit: C_r must be at least 1");
  HitSeries hs;
  hs.A = A.to_double();
  hs.k_lo = k_lo;
  hs.k_hi = k_hi;
  hs.variant = v;
  hs.constants = c;
  hs.omega1 = w.omega1();
  hs.omega2 = w.omega2();
  UnimodularLattice L = reduced(apply_flow(lattice_from_matrix(A), static_cast<double>(k_lo), w));
  for (long long k = k_lo; k <= k_hi; ++k) {
    if (k > k_lo) L = reduced(apply_flow(L, 1.0, w));
    const TargetSpec spec = variant_target(v, rate, k, w, c);
    const TargetAnswer ans = in_target_ex(L, spec);
    hs.hits.push_back(ans.value);
    hs.boundary.push_back(ans.boundary);
    hs.radii.push_back(spec.r());
  }
  return hs;
}

double default_c_r(const PsiFunction& psi, double t_max, double eta) {
  const double hi = std::min(t_max, psi.t_max());
  const ValidationReport rep = validate_psi(psi, geometric_grid(psi.t0(), hi, 2000), eta);
  return 4.0 * rep.c_psi_hat * rep.c_psi_hat;
}

ContrastReport empirical_zero_one(const RateFunction& rate, const WeightPair& w, int ensemble, long long k_lo,
                                  long long k_hi, double a, std::uint64_t seed, int threads) {
  if (ensemble < 50) throw ValidationError("zero-one: ensemble must be at least 50");
  if (!(a > 0.0)) throw ValidationError("zero-one: a must be positive");
  if (k_hi <= k_lo) throw ValidationError("zero-one: need k_lo < k_hi");
  ContrastReport rep;
  rep.ensemble = ensemble;
  rep.k_lo = k_lo;
  rep.k_hi = k_hi;
  rep.a = a;
  rep.tail_from = (k_lo + k_hi + 1) / 2;
  rep.members.resize(static_cast<std::size_t>(ensemble));
  const int bits = torus_bits(static_cast<double>(k_hi) + 1.0);
  HitConstants c;
  c.a = a;
  parallel_for(static_cast<std::size_t>(ensemble), threads, [&](std::size_t i) {
    Substream rng(seed, "zero-one", i);
    const DyadicMatrix A = sample_torus(rng, w.dims(), bits);
    rep.members[i] = orbit_hit_series(A, rate, HitVariant::Ndi, k_lo, k_hi, w, c);
  });
  for (const auto& m : rep.members) {
    bool tail = false;
    for (long long k = rep.tail_from; k <= k_hi; ++k) tail = tail || m.hit(k);
    rep.tail_members += tail;
    ++rep.hit_histogram[m.count()];
  }
  rep.tail_frequency = static_cast<double>(rep.tail_members) / ensemble;
  rep.tail_ci95 = wilson_ci95(rep.tail_members, ensemble);
  std::ostringstream key;
  key << "empirical_zero_one|rate=" << rate.label() << "|" << weights_key(w) << "|ensemble=" << ensemble
      << "|k=" << k_lo << ".." << k_hi << "|a=" << format_double(a) << "|seed=" << seed;
  rep.params_hash = sha256_hex(key.str());
  return rep;
}

UnimodularLattice construct_primed_lattice(double r, const DimensionParams& dims, double c0, Substream& rng) {
  const CoordinateRegion region{1.0 - std::exp(-r), c0, dims.d()};
  region.validate();
  const TargetSpec spec(r, TargetKind::Primed);
  constexpr int kResampleCap = 1000;
  for (int attempt = 0; attempt < kResampleCap; ++attempt) {
    const RegionPoint p = sample_region_point(region, rng);
    const UnimodularLattice L = UnimodularLattice::from_basis(region_basis(p), dims);
    if (in_target(L, spec)) return L;
  }
  throw NumericalError("construct_primed_lattice: resample cap reached; region sampling is inconsistent");
}

int disjointness_span(double r) {
  if (!(r > 0.0 && r < 1.0)) throw ValidationError("disjointness: r must lie in (0, 1)");
  return static_cast<int>(std::floor(0.25 * std::log(1.0 / r)));
}

DisjointnessReport verify_disjointness(double r, const WeightPair& w, int samples, std::uint64_t seed, int threads,
                                       double c0) {
  const DimensionParams dims = w.dims();
  const double d = dims.d();
  const double cap = std::min({d * w.alpha_min() / (2.0 * d + 1.0), w.beta_min() / 2.0, std::exp(-4.0)});
  if (!(r > 0.0 && r < cap))
    throw ValidationError("disjointness: r must lie in (0, " + format_double(cap) + ")");
  if (samples < 1) throw ValidationError("disjointness: samples must be positive");
  DisjointnessReport rep;
  rep.r = r;
  rep.J = disjointness_span(r);
  rep.samples = samples;
  const TargetSpec target(r, TargetKind::ThickPrimed, w);
  std::vector<std::vector<DisjointnessViolation>> found(static_cast<std::size_t>(samples));
  std::vector<unsigned char> outside(static_cast<std::size_t>(samples), 0);
  parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
    Substream rng(seed, "disjoint", i);
    const UnimodularLattice base = construct_primed_lattice(r, dims, c0, rng);
    const double u = rng.uniform(0.0, 0.5);
    const UnimodularLattice L = reduced(apply_flow(base, -u, w));
    if (!in_target(L, target)) outside[i] = 1;
    for (int k = 1; k <= rep.J; ++k)
      for (int sign : {1, -1})
        if (in_target(apply_flow(L, sign * k, w), target))
          found[i].push_back(DisjointnessViolation{static_cast<int>(i), sign * k, u});
  });
  for (std::size_t i = 0; i < found.size(); ++i) {
    rep.not_in_target += outside[i];
    rep.violations.insert(rep.violations.end(), found[i].begin(), found[i].end());
  }
  std::ostringstream key;
  key << "verify_disjointness|r=" << format_double(r) << "|" << weights_key(w) << "|samples=" << samples
      << "|c0=" << format_double(c0) << "|seed=" << seed;
  rep.params_hash = sha256_hex(key.str());
  return rep;
}

CrossvalReport cross_validate_dani(const DyadicMatrix& A, const PsiFunction& psi, const WeightPair& w, double S,
                                   double step) {
  if (!(step > 0.0)) throw ValidationError("crossval: step must be positive");
  const DimensionParams dims = w.dims();
  const RateFunction rate = RateFunction::derived(psi, dims);
  CrossvalReport rep;
  rep.s0 = rate.s0();
  rep.S = S;
  rep.step = step;
  if (!(S > rep.s0 + step)) throw ValidationError("crossval: S must exceed s0 by at least one step");
  DirichletOptions opts;
  opts.t_start = psi.t0();
  rep.scan = psi_dirichlet_scan(A, psi, rate.time(S), w, opts);

  std::vector<double> s, r, dl;
  UnimodularLattice L = reduced(apply_flow(lattice_from_matrix(A), rep.s0, w));
  for (int k = 0;; ++k) {
    const double sk = rep.s0 + k * step;
    if (sk > S + 1e-12) break;
    if (k > 0) L = reduced(apply_flow(L, step, w));
    s.push_back(sk);
    r.push_back(rate(std::min(sk, S)));
    dl.push_back(delta(L));
  }
  rep.grid_points = static_cast<int>(s.size());
  const double w1 = w.omega1(), w2 = w.omega2();

  // (i) with a band of one Lipschitz step and the largest neighbouring rate
  rep.premise_i = true;
  for (std::size_t k = 0; k < s.size() && rep.premise_i; ++k) {
    double rmax = r[k];
    if (k > 0) rmax = std::max(rmax, r[k - 1]);
    if (k + 1 < s.size()) rmax = std::max(rmax, r[k + 1]);
    rep.premise_i = dl[k] > w1 * rmax + step;
  }
  if (rep.premise_i && !rep.scan.uncovered.empty()) {
    const Interval& iv = rep.scan.uncovered.front().interval;
    rep.counterexamples.push_back(
        DaniCounterexample{"i", rep.s0, psi.t0(), dl.front(), w1 * r.front(), "uncovered " + iv.to_string()});
  }

  // (ii) at each grid point below ω2 r(s), some uncovered t near t(s)
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!(dl[k] <= w2 * r[k])) continue;
    ++rep.premise_ii_points;
    const double t = rate.time(s[k]);
    const double lo = t * std::exp(-step), hi = t * std::exp(step);
    bool meets = false;
    for (const auto& u : rep.scan.uncovered) meets = meets || (u.interval.lo < hi && u.interval.hi > lo);
    if (!meets) {
      std::ostringstream os;
      os << "no uncovered t in [" << format_double(lo) << ", " << format_double(hi) << "]";
      rep.counterexamples.push_back(DaniCounterexample{"ii", s[k], t, dl[k], w2 * r[k], os.str()});
    }
  }
  return rep;
}

}  // namespace dirlab
