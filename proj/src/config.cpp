#include "dirlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "dirlab/digest.hpp"
#include "dirlab/dynamics.hpp"
#include "dirlab/errors.hpp"

namespace dirlab {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw ValidationError("config: " + key + ": cannot parse '" + value + "' as " + what);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) bad_value(key, s, "a number");
  return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) bad_value(key, s, "an integer");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string s = trim(text);
  if (s == "true") return true;
  if (s == "false") return false;
  bad_value(key, s, "true/false");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  const std::string s = trim(text);
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    out.push_back(trim(s.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T, class Fmt>
std::string join(const std::vector<T>& xs, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += fmt(xs[i]);
  }
  return out;
}

struct Field {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

Field text_field(std::string key, std::string ExperimentConfig::*p) {
  return {key, [p](const ExperimentConfig& c) { return c.*p; },
          [p, key](ExperimentConfig& c, const std::string& v) {
            const std::string t = trim(v);
            if (t.find_first_of("#\n") != std::string::npos)
              throw ValidationError("config: " + key + ": value may not contain '#' or a newline");
            c.*p = t;
          }};
}

Field double_field(std::string key, double ExperimentConfig::*p) {
  return {key, [p](const ExperimentConfig& c) { return format_double(c.*p); },
          [p, key](ExperimentConfig& c, const std::string& v) { c.*p = parse_double(key, v); }};
}

Field int_field(std::string key, std::int64_t ExperimentConfig::*p) {
  return {key, [p](const ExperimentConfig& c) { return std::to_string(c.*p); },
          [p, key](ExperimentConfig& c, const std::string& v) { c.*p = parse_int<std::int64_t>(key, v); }};
}

Field bool_field(std::string key, bool ExperimentConfig::*p) {
  return {key, [p](const ExperimentConfig& c) { return std::string(c.*p ? "true" : "false"); },
          [p, key](ExperimentConfig& c, const std::string& v) { c.*p = parse_bool(key, v); }};
}

Field doubles_field(std::string key, std::vector<double> ExperimentConfig::*p) {
  return {key, [p](const ExperimentConfig& c) { return join(c.*p, [](double x) { return format_double(x); }); },
          [p, key](ExperimentConfig& c, const std::string& v) {
            std::vector<double> xs;
            for (const auto& item : split_list(v)) xs.push_back(parse_double(key, item));
            c.*p = std::move(xs);
          }};
}

Field ints_field(std::string key, std::vector<std::int64_t> ExperimentConfig::*p) {
  return {key, [p](const ExperimentConfig& c) { return join(c.*p, [](std::int64_t x) { return std::to_string(x); }); },
          [p, key](ExperimentConfig& c, const std::string& v) {
            std::vector<std::int64_t> xs;
            for (const auto& item : split_list(v)) xs.push_back(parse_int<std::int64_t>(key, item));
            c.*p = std::move(xs);
          }};
}

const std::vector<Field>& fields() {
  using C = ExperimentConfig;
  static const std::vector<Field> table = {
      text_field("subcommand", &C::subcommand),
      int_field("dims.m", &C::m),
      int_field("dims.n", &C::n),
      doubles_field("weights.alpha", &C::alpha),
      doubles_field("weights.beta", &C::beta),
      text_field("psi.family", &C::psi_family),
      doubles_field("psi.params", &C::psi_params),
      double_field("psi.t0", &C::psi_t0),
      text_field("rate.source", &C::rate_source),
      double_field("rate.value", &C::rate_value),
      doubles_field("matrix", &C::matrix),
      ints_field("classify.horizons", &C::classify_horizons),
      double_field("dani.s_max", &C::dani_s_max),
      double_field("dani.step", &C::dani_step),
      double_field("check.horizon", &C::check_horizon),
      text_field("check.oracle", &C::check_oracle),
      int_field("check.cf_depth", &C::check_cf_depth),
      bool_field("check.classic", &C::check_classic),
      text_field("measure.kind", &C::measure_kind),
      doubles_field("measure.r", &C::measure_r),
      int_field("measure.n", &C::measure_n),
      double_field("measure.s_push", &C::measure_s_push),
      bool_field("measure.freeze_lambda", &C::measure_freeze_lambda),
      text_field("orbit.mode", &C::orbit_mode),
      text_field("orbit.variant", &C::orbit_variant),
      int_field("orbit.ensemble", &C::orbit_ensemble),
      int_field("orbit.k_lo", &C::orbit_k_lo),
      int_field("orbit.k_hi", &C::orbit_k_hi),
      double_field("orbit.a", &C::orbit_a),
      double_field("orbit.c_r", &C::orbit_c_r),
      double_field("disjoint.r", &C::disjoint_r),
      int_field("disjoint.samples", &C::disjoint_samples),
      double_field("disjoint.c0", &C::disjoint_c0),
      int_field("crossval.members", &C::crossval_members),
      double_field("crossval.s_max", &C::crossval_s_max),
      double_field("crossval.step", &C::crossval_step),
      {"seed", [](const C& c) { return std::to_string(c.seed); },
       [](C& c, const std::string& v) { c.seed = parse_int<std::uint64_t>("seed", v); }},
      text_field("out", &C::out),
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  for (const auto& f : fields()) {
    if (f.key == k) {
      f.set(*this, value);
      return;
    }
  }
  throw ValidationError("config: unknown key '" + k + "'");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

DimensionParams ExperimentConfig::dims() const {
  if (m < 1 || n < 1 || m + n > 8) throw ValidationError("config: dims.m, dims.n must be >= 1 with m + n <= 8");
  return DimensionParams(static_cast<int>(m), static_cast<int>(n));
}

WeightPair ExperimentConfig::weights() const {
  const DimensionParams d = dims();
  const WeightPair u = WeightPair::uniform(d);
  std::vector<double> a = alpha.empty() ? u.alpha() : alpha;
  std::vector<double> b = beta.empty() ? u.beta() : beta;
  if (static_cast<std::int64_t>(a.size()) != m || static_cast<std::int64_t>(b.size()) != n)
    throw ValidationError("config: weights.alpha/beta must have m and n entries");
  return WeightPair(std::move(a), std::move(b));
}

PsiFunction ExperimentConfig::psi() const {
  auto need = [&](std::size_t k) {
    if (psi_params.size() != k)
      throw ValidationError("config: psi.params for " + psi_family + " needs " + std::to_string(k) + " values");
  };
  if (psi_family == "constant_ratio") {
    need(1);
    return PsiFunction::constant_ratio(psi_params[0], psi_t0);
  }
  if (psi_family == "log_drift") {
    need(2);
    return PsiFunction::log_drift(psi_params[0], psi_params[1], psi_t0);
  }
  if (psi_family == "power_drift") {
    need(2);
    return PsiFunction::power_drift(psi_params[0], psi_params[1], psi_t0);
  }
  if (psi_family == "tabulated") {
    if (psi_params.size() < 4 || psi_params.size() % 2)
      throw ValidationError("config: tabulated psi.params must be t,psi pairs (at least two)");
    std::vector<std::pair<double, double>> knots;
    for (std::size_t i = 0; i < psi_params.size(); i += 2) knots.emplace_back(psi_params[i], psi_params[i + 1]);
    return PsiFunction::tabulated(std::move(knots));
  }
  throw ValidationError("config: unknown psi.family '" + psi_family + "'");
}

RateFunction ExperimentConfig::rate() const {
  if (rate_source == "derived") return RateFunction::derived(psi(), dims());
  if (rate_source == "constant") return RateFunction::constant(rate_value, dims());
  throw ValidationError("config: rate.source must be derived or constant");
}

DyadicMatrix ExperimentConfig::matrix_a() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  if (!matrix.empty()) {
    if (static_cast<std::int64_t>(matrix.size()) != m * n)
      throw ValidationError("config: matrix needs m*n entries (row-major)");
    for (std::int64_t i = 0; i < m; ++i)
      for (std::int64_t j = 0; j < n; ++j) a(i, j) = matrix[static_cast<std::size_t>(i * n + j)];
  }
  return DyadicMatrix(a);
}

void ExperimentConfig::validate() const {
  static const std::vector<std::string> subs = {"classify", "dani", "check", "measure", "orbit", "disjoint",
                                                "crossval"};
  if (std::find(subs.begin(), subs.end(), subcommand) == subs.end())
    throw ValidationError("config: unknown subcommand '" + subcommand + "'");
  weights();
  psi();
  if (rate_source != "derived" && rate_source != "constant")
    throw ValidationError("config: rate.source must be derived or constant");
  matrix_a();
  if (check_oracle != "cf" && check_oracle != "lattice" && check_oracle != "both")
    throw ValidationError("config: check.oracle must be cf, lattice or both");
  target_kind_from_string(measure_kind);
  hit_variant_from_string(orbit_variant);
  if (orbit_mode != "contrast" && orbit_mode != "series")
    throw ValidationError("config: orbit.mode must be contrast or series");
  if (out.empty()) throw ValidationError("config: out must not be empty");
}

ExperimentConfig parse_config(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    base.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

std::string print_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [k, v] : c.entries()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace dirlab
