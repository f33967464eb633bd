#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dirlab/approx_functions.hpp"
#include "dirlab/dirichlet.hpp"
#include "dirlab/lattice.hpp"
#include "dirlab/measure.hpp"
#include "dirlab/targets.hpp"

namespace dirlab {

enum class HitVariant { Upper, Lower, Ndi };

std::string to_string(HitVariant v);
HitVariant hit_variant_from_string(const std::string& s);

struct HitConstants {
  double c_r = 1.0;
  double a = 1.0;  // Ndi only
};

/// Target at step k: Upper → Thick(ω1 C_r r(k)), Lower → Thick(ω2 r(k+1)/C_r),
/// Ndi → ThickPrimed(a r(k+1)).
TargetSpec variant_target(HitVariant v, const RateFunction& rate, long long k, const WeightPair& w,
                          const HitConstants& c);

struct HitSeries {
  Eigen::MatrixXd A;
  long long k_lo = 0, k_hi = 0;
  std::vector<bool> hits;      // hits[k - k_lo]
  std::vector<bool> boundary;  // answer within the tolerance band
  std::vector<double> radii;
  HitVariant variant = HitVariant::Ndi;
  HitConstants constants;
  double omega1 = 1.0, omega2 = 1.0;

  bool hit(long long k) const { return hits.at(static_cast<std::size_t>(k - k_lo)); }
  int count() const;
};

/// hits[k] = g_k Λ_A in the variant target, for k_lo <= k <= k_hi.
HitSeries orbit_hit_series(const DyadicMatrix& A, const RateFunction& rate, HitVariant v, long long k_lo,
                           long long k_hi, const WeightPair& w, const HitConstants& c = {});

/// C_r = (2 Ĉ_ψ)² from a grid estimate of the quasi-decreasing constant.
double default_c_r(const PsiFunction& psi, double t_max, double eta = 0.5);

struct ContrastReport {
  int ensemble = 0;
  long long k_lo = 0, k_hi = 0, tail_from = 0;
  double a = 0.0;
  int tail_members = 0;  // members with at least one hit at k >= tail_from
  double tail_frequency = 0.0;
  WilsonInterval tail_ci95;
  std::map<int, int> hit_histogram;  // hit count -> members
  std::vector<HitSeries> members;    // sorted by member index
  std::string params_hash;
};

/// Ndi(a) hit series over an ensemble of torus samples.
ContrastReport empirical_zero_one(const RateFunction& rate, const WeightPair& w, int ensemble, long long k_lo,
                                  long long k_hi, double a, std::uint64_t seed, int threads = 1);

/// A lattice in Δ'_r built from the coordinate region at radius 1 - e^{-r}
/// and verified by in_target; resamples a bounded number of times.
UnimodularLattice construct_primed_lattice(double r, const DimensionParams& dims, double c0, Substream& rng);

struct DisjointnessViolation {
  int sample = 0;
  int k = 0;  // g_k Λ (k > 0) or g_{-|k|} Λ (k < 0) is back in the target
  double u = 0.0;
};

struct DisjointnessReport {
  double r = 0.0;
  int J = 0;
  int samples = 0;
  int not_in_target = 0;  // constructed samples that failed membership (should be 0)
  std::vector<DisjointnessViolation> violations;
  std::string params_hash;
};

/// floor(log(1/r) / 4)
int disjointness_span(double r);

/// Checks g_{±k} Λ ∉ Δ̃'_r for k = 1..J on constructed members Λ of Δ̃'_r.
DisjointnessReport verify_disjointness(double r, const WeightPair& w, int samples, std::uint64_t seed,
                                       int threads = 1, double c0 = 0.1);

struct DaniCounterexample {
  std::string implication;  // "i" or "ii"
  double s = 0.0;
  double t = 0.0;
  double delta = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct CrossvalReport {
  double s0 = 0.0, S = 0.0, step = 0.05;
  int grid_points = 0;
  bool premise_i = false;        // Δ above ω1 r (with one-step band) at every grid point
  int premise_ii_points = 0;     // grid points with Δ <= ω2 r
  ScanReport scan;
  std::vector<DaniCounterexample> counterexamples;
};

/// Finite-horizon check of the two implications of the Dani correspondence.
CrossvalReport cross_validate_dani(const DyadicMatrix& A, const PsiFunction& psi, const WeightPair& w, double S,
                                   double step = 0.05);

}  // namespace dirlab
