#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dirlab/lattice.hpp"
#include "dirlab/rng.hpp"
#include "dirlab/targets.hpp"

namespace dirlab {

/// Uniform A in [0,1)^{m×n} with `bits` random bits per entry; entries are
/// filled row by row, each from consecutive 64-bit draws (first draw on top).
DyadicMatrix sample_torus(Substream& rng, const DimensionParams& dims, int bits);

/// Bits that keep Λ_A free of artificial short vectors along g_s for |s| <= s_max.
int torus_bits(double s_max);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};

/// Wilson score interval at 95%.
WilsonInterval wilson_ci95(std::int64_t hits, std::int64_t n);

struct McEstimate {
  double mean = 0.0;
  std::int64_t hits = 0;
  std::int64_t count = 0;
  WilsonInterval ci95;
  /// Indicator targets: mean = scale · hits / count with scale 1.
  double scale = 1.0;
  std::string params_hash;

  double half_width() const { return 0.5 * (ci95.high - ci95.low); }
};

McEstimate make_estimate(std::int64_t hits, std::int64_t count, double scale, std::string params_hash);

/// Fraction of A_i with g_{s_push} Λ_{A_i} in the target.
McEstimate estimate_measure_equidist(const TargetSpec& spec, const WeightPair& w, double s_push, std::int64_t N,
                                     std::uint64_t seed, int threads = 1);

/// Same estimator at several radii on one shared set of samples.
std::vector<McEstimate> estimate_measure_grid(TargetKind kind, const std::vector<double>& r_values,
                                              const WeightPair& w, double s_push, std::int64_t N, std::uint64_t seed,
                                              int threads = 1);

/// Coordinates g = p_{b_1..b_{d-1}} u_x of an element of G.
struct RegionPoint {
  Eigen::MatrixXd b;  // d × (d-1), column j is b_{j+1}
  Eigen::VectorXd x;  // d-1
};

struct CoordinateRegion {
  double r = 0.0;
  double c0 = 0.1;
  int d = 2;
  bool box_conditions = true;  // sign/size ranges of the b_ij and b_ll
  bool growth = true;          // |b_ij| > d |b_i,j-1|
  bool products = true;        // |b_ij b_ji| < r/d! and sum |b_dj| x_j < r/2
  bool ordering = true;        // |b_kj| < |b_ij| for j < k < i
  bool extra = true;           // b_i1 in (-√r, 0)

  /// Largest admissible r for the current c0, d and flags.
  double r_cap() const;
  /// Throws ValidationError when r, c0 or d are out of range or the region
  /// has no bounded sampling box.
  void validate() const;
  bool contains(const RegionPoint& p) const;
};

/// 1/(ζ(2)···ζ(d)).
double haar_normalizer(int d);

/// Monte Carlo Haar volume of the coordinate region. The interval is a
/// normal 95% interval of the weighted estimator.
McEstimate lower_bound_region_volume(const CoordinateRegion& region, std::int64_t N, std::uint64_t seed,
                                     int threads = 1);

/// A point of the region, drawn coordinate by coordinate so that every draw is
/// accepted after few tries. Not Haar-uniform inside the region.
RegionPoint sample_region_point(const CoordinateRegion& region, Substream& rng);

/// Columns of p_{b} u_x: b_1, ..., b_{d-1}, sum x_j b_j + t e_d with det = 1.
Eigen::MatrixXd region_basis(const RegionPoint& p);

struct FitReport {
  double kappa_hat = 0.0;
  double se = 0.0;
  double lambda_hat = 0.0;
  bool lambda_frozen = false;
  double intercept = 0.0;
  double reference_exponent = 0.0;
  std::size_t points = 0;
};

/// Least squares for log μ = κ log r + λ log log(1/r) + c, λ optionally fixed.
/// The reference exponent is κ_d for thickened targets, κ_d + 1 otherwise.
FitReport fit_scaling(const std::vector<double>& r_values, const std::vector<McEstimate>& estimates,
                      const DimensionParams& dims, std::optional<double> lambda_frozen, bool thickened = false);

struct PairCorrelation {
  int i = 0, j = 0;
  double b_i = 0.0, b_j = 0.0, b_ij = 0.0;
  /// |b_ij| / (b_i b_j), NaN when degenerate.
  double ratio = 0.0;
  bool degenerate = false;  // b_i or b_j has no hits
  std::int64_t count = 0;
  std::string params_hash;
};

/// Shared-sample estimates for h_k = χ[g_k Λ_A ∈ ThickPrimed(2ρ_k)],
/// ρ_k = a r(k+1)/2. With `independent` the j-indicator uses fresh samples.
PairCorrelation pair_correlation(int i, int j, const RateFunction& rate, double a, const WeightPair& w,
                                 std::int64_t N, std::uint64_t seed, int threads = 1, bool independent = false);

}  // namespace dirlab
