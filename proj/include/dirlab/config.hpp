#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dirlab/approx_functions.hpp"
#include "dirlab/lattice.hpp"

namespace dirlab {

/// Everything an experiment run depends on. Thread count is deliberately not
/// part of it: it never changes a result.
struct ExperimentConfig {
  std::string subcommand = "classify";
  std::int64_t m = 1;
  std::int64_t n = 1;
  std::vector<double> alpha;  // empty: uniform 1/m
  std::vector<double> beta;   // empty: uniform 1/n

  std::string psi_family = "log_drift";
  std::vector<double> psi_params{1.0, 0.5};  // tabulated: t1, psi1, t2, psi2, ...
  double psi_t0 = std::exp(4.0);

  std::string rate_source = "derived";  // derived | constant
  double rate_value = 0.1;

  std::vector<double> matrix;  // A row-major; empty: zero matrix

  std::vector<std::int64_t> classify_horizons{1000, 10000, 100000};

  double dani_s_max = 20.0;
  double dani_step = 0.5;

  double check_horizon = 1000.0;
  std::string check_oracle = "lattice";  // cf | lattice | both
  std::int64_t check_cf_depth = 40;
  bool check_classic = false;

  std::string measure_kind = "sub";
  std::vector<double> measure_r = geometric_grid(0.02, 0.2, 8);
  std::int64_t measure_n = 20000;
  double measure_s_push = 10.0;
  bool measure_freeze_lambda = true;

  std::string orbit_mode = "contrast";  // contrast | series
  std::string orbit_variant = "ndi";
  std::int64_t orbit_ensemble = 500;
  std::int64_t orbit_k_lo = 10;
  std::int64_t orbit_k_hi = 100;
  double orbit_a = 0.9;
  double orbit_c_r = 1.0;

  double disjoint_r = std::exp(-8.0);
  std::int64_t disjoint_samples = 1000;
  double disjoint_c0 = 0.1;

  std::int64_t crossval_members = 100;
  double crossval_s_max = 20.0;
  double crossval_step = 0.05;

  std::uint64_t seed = 1;
  std::string out = "dirlab-out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  DimensionParams dims() const;
  WeightPair weights() const;
  PsiFunction psi() const;
  RateFunction rate() const;
  DyadicMatrix matrix_a() const;

  /// Applies one key=value assignment; ValidationError on unknown keys or
  /// malformed values.
  void set(const std::string& key, const std::string& value);
  /// Every key with its current value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  /// Cross-field checks (shapes, weights, known names).
  void validate() const;
};

const std::vector<std::string>& config_keys();

/// `key = value` lines; '#' starts a comment.
ExperimentConfig parse_config(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});
std::string print_config(const ExperimentConfig& c);

}  // namespace dirlab
