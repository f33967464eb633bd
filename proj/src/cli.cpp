#include "dirlab/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <thread>

#include "dirlab/cf_oracle.hpp"
#include "dirlab/digest.hpp"
#include "dirlab/dirichlet.hpp"
#include "dirlab/dynamics.hpp"
#include "dirlab/errors.hpp"
#include "dirlab/measure.hpp"
#include "dirlab/parallel.hpp"
#include "dirlab/reports.hpp"

namespace dirlab {
namespace {

using json = nlohmann::ordered_json;

std::string fmt(double x) { return format_double(x); }

json interval_json(const Interval& iv) {
  return {{"lo", iv.lo}, {"hi", iv.hi}, {"lo_closed", iv.lo_closed}, {"hi_closed", iv.hi_closed}};
}

json dims_json(const ExperimentConfig& c) {
  const WeightPair w = c.weights();
  return {{"m", c.m}, {"n", c.n}, {"alpha", w.alpha()}, {"beta", w.beta()}};
}

void run_classify(const ExperimentConfig& c, ReportWriter& rw, std::ostream& out) {
  const PsiFunction psi = c.psi();
  std::vector<long long> horizons(c.classify_horizons.begin(), c.classify_horizons.end());
  const SeriesVerdict v = classify_series(psi, c.dims(), horizons);
  json sums = json::array();
  for (const auto& [k, s] : v.partial_sums) sums.push_back({{"k", k}, {"partial_sum", s}});
  rw.write_json("classify.json", {{"psi", psi.describe()},
                                  {"dims", dims_json(c)},
                                  {"kappa", c.dims().kappa()},
                                  {"lambda", c.dims().lambda()},
                                  {"verdict", to_string(v.verdict)},
                                  {"method", to_string(v.method)},
                                  {"rationale", v.rationale},
                                  {"partial_sums", sums}});
  out << to_string(v.verdict) << "\n";
}

void run_dani(const ExperimentConfig& c, ReportWriter& rw, std::ostream& out) {
  if (c.rate_source != "derived") throw ValidationError("dani: needs rate.source = derived");
  if (!(c.dani_step > 0.0)) throw ValidationError("dani: step must be positive");
  const PsiFunction psi = c.psi();
  const DimensionParams dims = c.dims();
  const RateFunction rate = c.rate();
  const double s0 = rate.s0();
  if (!(c.dani_s_max > s0)) throw ValidationError("dani: s_max must exceed s0 = " + fmt(s0));
  std::vector<std::vector<std::string>> rows;
  std::vector<double> xs, ys;
  const auto count = static_cast<long long>(std::floor((c.dani_s_max - s0) / c.dani_step + 1e-9));
  for (long long i = 0; i <= count; ++i) {
    const double s = s0 + static_cast<double>(i) * c.dani_step;
    const double t = dani_time(psi, dims, s);
    const double r = dani_rate(psi, dims, s);
    rows.push_back({fmt(s), fmt(r), fmt(t), fmt(psi(t))});
    xs.push_back(s);
    ys.push_back(r);
  }
  rw.write_csv("dani.csv", {"s", "r", "t", "psi_t"}, rows);
  rw.write_plot("dani_rate.dat", "s", "r(s)", "-log(1 - F(t(s)))/d, F = 1 - t psi(t)", xs, ys);
  out << "s0 " << fmt(s0) << ", " << rows.size() << " rows\n";
}

void run_check(const ExperimentConfig& c, ReportWriter& rw, std::ostream& out) {
  const PsiFunction psi = c.psi();
  const WeightPair w = c.weights();
  const DyadicMatrix A = c.matrix_a();
  const bool want_cf = c.check_oracle != "lattice";
  const bool want_lattice = c.check_oracle != "cf";
  json doc{{"psi", psi.describe()}, {"dims", dims_json(c)}, {"matrix", c.matrix}, {"oracle", c.check_oracle},
           {"classic", c.check_classic}};
  std::vector<std::vector<std::string>> rows;
  bool pass = true;

  std::optional<FiniteHorizonVerdict> cfv;
  double T = c.check_horizon;
  if (want_cf) {
    if (c.m != 1 || c.n != 1) throw ValidationError("check: the cf oracle needs m = n = 1");
    if (c.check_classic) throw ValidationError("check: the cf oracle has no classic mode");
    const double alpha = A(0, 0);
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("check: the cf oracle needs A in (0, 1)");
    cfv = cf_is_psi_dirichlet(alpha, psi, static_cast<int>(c.check_cf_depth));
    T = std::min(T, cfv->horizon);
  }
  const double t_start = c.check_classic ? 1.0 : psi.t0();
  if (!(T > t_start)) throw ValidationError("check: horizon must exceed " + fmt(t_start));
  doc["t_start"] = t_start;
  doc["horizon"] = T;

  IntervalSet cfset;
  if (cfv) {
    cfset = cf_failure_set(*cfv, t_start, T);
    json parts = json::array();
    for (const auto& iv : cfset.parts()) {
      parts.push_back(interval_json(iv));
      const bool sliver = iv.hi - iv.lo <= 1e-9 * std::max(1.0, iv.hi);
      rows.push_back({"cf", fmt(iv.lo), fmt(iv.hi), sliver ? "true" : "false"});
      if (!sliver) pass = false;
    }
    doc["cf"] = {{"depth", c.check_cf_depth}, {"truncated", cfv->truncated}, {"q_K", cfv->horizon},
                 {"failures", parts}};
  }
  if (want_lattice) {
    DirichletOptions opts;
    opts.classic = c.check_classic;
    const ScanReport rep = psi_dirichlet_scan(A, psi, T, w, opts);
    json parts = json::array();
    for (const auto& u : rep.uncovered) {
      json p = interval_json(u.interval);
      p["boundary"] = u.boundary;
      parts.push_back(p);
      rows.push_back({"lattice", fmt(u.interval.lo), fmt(u.interval.hi), u.boundary ? "true" : "false"});
    }
    if (!rep.passes()) pass = false;
    doc["lattice"] = {{"pairs", rep.pairs.size()}, {"uncovered", parts}};
    if (cfv) {
      const OracleAgreement ag = compare_failure_sets(cfset, rep);
      doc["agreement"] = {{"agree", ag.agree}, {"cf_parts", ag.cf_parts}, {"scan_parts", ag.scan_parts},
                          {"detail", ag.detail}};
      out << (ag.agree ? "oracles agree" : "oracles disagree: " + ag.detail) << "\n";
    }
  }
  doc["verdict"] = pass ? "PASS" : "FAIL";
  rw.write_json("check.json", doc);
  rw.write_csv("uncovered.csv", {"oracle", "lo", "hi", "boundary"}, rows);
  out << (pass ? "PASS" : "FAIL") << " uncovered " << rows.size() << "\n";
}

void run_measure(const ExperimentConfig& c, ReportWriter& rw, std::ostream& out, int threads) {
  const TargetKind kind = target_kind_from_string(c.measure_kind);
  const WeightPair w = c.weights();
  const DimensionParams dims = c.dims();
  const auto est = estimate_measure_grid(kind, c.measure_r, w, c.measure_s_push, c.measure_n, c.seed, threads);
  std::vector<std::vector<std::string>> rows;
  std::vector<double> means;
  for (std::size_t i = 0; i < est.size(); ++i) {
    rows.push_back({fmt(c.measure_r[i]), c.measure_kind, std::to_string(dims.d()), std::to_string(est[i].count),
                    fmt(c.measure_s_push), fmt(est[i].mean), fmt(est[i].ci95.low), fmt(est[i].ci95.high),
                    std::to_string(c.seed)});
    means.push_back(est[i].mean);
  }
  rw.write_csv("measure.csv", {"r", "kind", "d", "N", "s_push", "mean", "ci_low", "ci_high", "seed"}, rows);
  const bool thick = kind == TargetKind::Thick || kind == TargetKind::ThickPrimed;
  const double ref = thick ? dims.kappa() : dims.kappa() + 1.0;
  json doc{{"kind", c.measure_kind}, {"dims", dims_json(c)}, {"params_hash", est.empty() ? "" : est[0].params_hash}};
  std::optional<FitReport> fit;
  try {
    fit = fit_scaling(c.measure_r, est, dims,
                      c.measure_freeze_lambda ? std::optional<double>(dims.lambda()) : std::nullopt, thick);
  } catch (const ValidationError& e) {
    doc["fit_error"] = e.what();
  }
  if (fit) {
    doc["kappa_hat"] = fit->kappa_hat;
    doc["se"] = fit->se;
    doc["lambda_hat"] = fit->lambda_hat;
    doc["lambda_frozen"] = fit->lambda_frozen;
    doc["intercept"] = fit->intercept;
    doc["points"] = fit->points;
  }
  doc["reference_exponent"] = ref;
  rw.write_json("fit.json", doc);
  rw.write_plot("measure_plot.dat", "r", "mu_hat",
                "r^" + fmt(ref) + " log^" + fmt(dims.lambda()) + "(1/r)", c.measure_r, means);
  if (fit)
    out << "kappa_hat " << fmt(fit->kappa_hat) << " se " << fmt(fit->se) << " reference " << fmt(ref) << "\n";
  else
    out << "fit skipped: " << doc["fit_error"].get<std::string>() << "\n";
}

void hit_rows(const HitSeries& s, int member, std::vector<std::vector<std::string>>& rows) {
  for (long long k = s.k_lo; k <= s.k_hi; ++k)
    rows.push_back({std::to_string(member), std::to_string(k), s.hit(k) ? "1" : "0"});
}

void run_orbit(const ExperimentConfig& c, ReportWriter& rw, std::ostream& out, int threads) {
  const RateFunction rate = c.rate();
  const WeightPair w = c.weights();
  std::vector<std::vector<std::string>> rows;
  if (c.orbit_mode == "series") {
    const HitVariant v = hit_variant_from_string(c.orbit_variant);
    const HitSeries s = orbit_hit_series(c.matrix_a(), rate, v, c.orbit_k_lo, c.orbit_k_hi, w,
                                         HitConstants{c.orbit_c_r, c.orbit_a});
    hit_rows(s, 0, rows);
    json ks = json::array();
    for (long long k = s.k_lo; k <= s.k_hi; ++k)
      if (s.hit(k)) ks.push_back(k);
    rw.write_json("orbit.json", {{"mode", "series"}, {"variant", to_string(v)}, {"rate", rate.label()},
                                 {"dims", dims_json(c)}, {"matrix", c.matrix}, {"k_lo", s.k_lo},
                                 {"k_hi", s.k_hi}, {"hits", s.count()}, {"hit_steps", ks}});
    rw.write_csv("hits.csv", {"member", "k", "hit"}, rows);
    out << "hits " << s.count() << " of " << (s.k_hi - s.k_lo + 1) << "\n";
    return;
  }
  const ContrastReport rep = empirical_zero_one(rate, w, static_cast<int>(c.orbit_ensemble), c.orbit_k_lo,
                                                c.orbit_k_hi, c.orbit_a, c.seed, threads);
  std::vector<double> ks, freq;
  for (long long k = rep.k_lo; k <= rep.k_hi; ++k) {
    int hits = 0;
    for (const auto& m : rep.members) hits += m.hit(k) ? 1 : 0;
    ks.push_back(static_cast<double>(k));
    freq.push_back(static_cast<double>(hits) / rep.ensemble);
  }
  for (std::size_t i = 0; i < rep.members.size(); ++i) hit_rows(rep.members[i], static_cast<int>(i), rows);
  json hist = json::array();
  for (const auto& [h, n] : rep.hit_histogram) hist.push_back({{"hits", h}, {"members", n}});
  rw.write_json("orbit.json", {{"mode", "contrast"},
                               {"rate", rate.label()},
                               {"dims", dims_json(c)},
                               {"ensemble", rep.ensemble},
                               {"k_lo", rep.k_lo},
                               {"k_hi", rep.k_hi},
                               {"tail_from", rep.tail_from},
                               {"a", rep.a},
                               {"tail_members", rep.tail_members},
                               {"tail_frequency", rep.tail_frequency},
                               {"tail_ci95", {rep.tail_ci95.low, rep.tail_ci95.high}},
                               {"hit_histogram", hist},
                               {"params_hash", rep.params_hash}});
  rw.write_csv("hits.csv", {"member", "k", "hit"}, rows);
  rw.write_plot("orbit_plot.dat", "k", "hit_fraction", "mu(ThickPrimed(a r(k+1))), order r^kappa log^lambda(1/r)",
                ks, freq);
  out << "tail frequency " << fmt(rep.tail_frequency) << " (" << rep.tail_members << "/" << rep.ensemble << ")\n";
}

void run_disjoint(const ExperimentConfig& c, ReportWriter& rw, std::ostream& out, int threads) {
  const DisjointnessReport rep = verify_disjointness(c.disjoint_r, c.weights(), static_cast<int>(c.disjoint_samples),
                                                     c.seed, threads, c.disjoint_c0);
  json viol = json::array();
  for (const auto& v : rep.violations) viol.push_back({{"sample", v.sample}, {"k", v.k}, {"u", v.u}});
  rw.write_json("disjoint.json", {{"r", rep.r},
                                  {"J", rep.J},
                                  {"c0", c.disjoint_c0},
                                  {"dims", dims_json(c)},
                                  {"samples", rep.samples},
                                  {"not_in_target", rep.not_in_target},
                                  {"violations", viol},
                                  {"params_hash", rep.params_hash}});
  out << "J " << rep.J << ", violations " << rep.violations.size() << " of " << rep.samples << "\n";
}

void run_crossval(const ExperimentConfig& c, ReportWriter& rw, std::ostream& out, int threads) {
  if (c.crossval_members < 1) throw ValidationError("crossval: members must be positive");
  const PsiFunction psi = c.psi();
  const WeightPair w = c.weights();
  const DimensionParams dims = c.dims();
  const int bits = torus_bits(c.crossval_s_max + 1.0);
  const auto members = static_cast<std::size_t>(c.crossval_members);
  std::vector<std::optional<CrossvalReport>> reps(members);
  std::vector<Eigen::MatrixXd> mats(members);
  parallel_for(members, threads, [&](std::size_t i) {
    Substream rng(c.seed, "crossval", i);
    const DyadicMatrix A = sample_torus(rng, dims, bits);
    mats[i] = A.to_double();
    reps[i] = cross_validate_dani(A, psi, w, c.crossval_s_max, c.crossval_step);
  });
  json list = json::array();
  std::size_t total = 0;
  for (std::size_t i = 0; i < members; ++i) {
    const CrossvalReport& r = *reps[i];
    json ce = json::array();
    for (const auto& x : r.counterexamples)
      ce.push_back({{"implication", x.implication}, {"s", x.s}, {"t", x.t}, {"delta", x.delta},
                    {"bound", x.bound}, {"detail", x.detail}});
    total += r.counterexamples.size();
    std::vector<double> a(mats[i].data(), mats[i].data() + mats[i].size());
    list.push_back({{"member", i},
                    {"matrix", a},
                    {"grid_points", r.grid_points},
                    {"premise_i", r.premise_i},
                    {"premise_ii_points", r.premise_ii_points},
                    {"dirichlet", r.scan.passes()},
                    {"counterexamples", ce}});
  }
  rw.write_json("crossval.json", {{"psi", psi.describe()},
                                  {"dims", dims_json(c)},
                                  {"S", c.crossval_s_max},
                                  {"step", c.crossval_step},
                                  {"counterexamples", total},
                                  {"members", list}});
  out << "counterexamples " << total << " over " << members << " members\n";
}

}  // namespace

int run_experiment(const ExperimentConfig& config, int threads, std::ostream& out) {
  config.validate();
  if (threads < 1) throw ValidationError("threads must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  ReportWriter rw(config.out);
  const std::string& sub = config.subcommand;
  if (sub == "classify")
    run_classify(config, rw, out);
  else if (sub == "dani")
    run_dani(config, rw, out);
  else if (sub == "check")
    run_check(config, rw, out);
  else if (sub == "measure")
    run_measure(config, rw, out, threads);
  else if (sub == "orbit")
    run_orbit(config, rw, out, threads);
  else if (sub == "disjoint")
    run_disjoint(config, rw, out, threads);
  else
    run_crossval(config, rw, out, threads);
  rw.write_text("config.txt", print_config(config));
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  rw.write_manifest(config, wall);
  return 0;
}

namespace {

const std::map<std::string, std::vector<std::pair<std::string, std::string>>>& subcommand_flags() {
  // flag -> config key, per subcommand
  static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> table = {
      {"classify", {{"--horizons", "classify.horizons"}}},
      {"dani", {{"--s-max", "dani.s_max"}, {"--step", "dani.step"}}},
      {"check",
       {{"--oracle", "check.oracle"},
        {"--horizon", "check.horizon"},
        {"--cf-depth", "check.cf_depth"},
        {"--classic", "check.classic"}}},
      {"measure",
       {{"--kind", "measure.kind"},
        {"--r", "measure.r"},
        {"--samples", "measure.n"},
        {"--s-push", "measure.s_push"},
        {"--freeze-lambda", "measure.freeze_lambda"}}},
      {"orbit",
       {{"--mode", "orbit.mode"},
        {"--variant", "orbit.variant"},
        {"--ensemble", "orbit.ensemble"},
        {"--k-lo", "orbit.k_lo"},
        {"--k-hi", "orbit.k_hi"},
        {"--a", "orbit.a"},
        {"--c-r", "orbit.c_r"}}},
      {"disjoint", {{"--r", "disjoint.r"}, {"--samples", "disjoint.samples"}, {"--c0", "disjoint.c0"}}},
      {"crossval", {{"--members", "crossval.members"}, {"--s-max", "crossval.s_max"}, {"--step", "crossval.step"}}},
  };
  return table;
}

const char* subcommand_help(const std::string& name) {
  if (name == "classify") return "Classify the critical series of psi";
  if (name == "dani") return "Tabulate r(s) and t(s)";
  if (name == "check") return "psi-Dirichlet scan for one matrix A";
  if (name == "measure") return "Monte Carlo target measures and scaling fit";
  if (name == "orbit") return "Hit series or zero-one contrast along g_k";
  if (name == "disjoint") return "Disjointness of returns to the thickened primed target";
  return "Cross-validation of the Dani correspondence";
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dirichlet improvability experiments"};
  app.name(args.empty() ? "dirlab" : args[0]);
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string out_dir, config_path;
  std::vector<std::string> sets;
  app.add_option("--seed", seed, "64-bit seed");
  app.add_option("--threads", threads, "Worker threads (never changes results)")->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "Output directory (created if missing)");
  app.add_option("--config", config_path, "Config file of key = value lines")->check(CLI::ExistingFile);
  app.add_option("--set", sets, "Override one config key: key=value (repeatable)");
  // every config key is also a flag, e.g. --psi.family log_drift
  std::map<std::string, std::string> key_values;
  for (const auto& key : config_keys()) {
    if (key == "seed" || key == "out" || key == "subcommand") continue;
    app.add_option("--" + key, key_values[key], "config key " + key);
  }

  std::map<std::string, std::map<std::string, std::string>> sub_values;
  std::vector<CLI::App*> subs;
  for (const auto& [name, flags] : subcommand_flags()) {
    CLI::App* sc = app.add_subcommand(name, subcommand_help(name));
    for (const auto& [flag, key] : flags) sc->add_option(flag, sub_values[name][key], "same as --" + key);
    subs.push_back(sc);
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path, cfg);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + s + "'");
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& key : config_keys()) {
      auto it = key_values.find(key);
      if (it != key_values.end() && app.count("--" + key) > 0) cfg.set(key, it->second);
    }
    for (CLI::App* sc : subs) {
      if (!sc->parsed()) continue;
      cfg.subcommand = sc->get_name();
      for (const auto& [flag, key] : subcommand_flags().at(sc->get_name()))
        if (sc->count(flag) > 0) cfg.set(key, sub_values[sc->get_name()][key]);
    }
    if (seed) cfg.seed = *seed;
    if (!out_dir.empty()) cfg.out = out_dir;
    return run_experiment(cfg, threads, out);
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace dirlab
