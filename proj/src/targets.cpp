#include "dirlab/targets.hpp"

#include <cmath>
#include <limits>

#include "dirlab/errors.hpp"

namespace dirlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;
constexpr std::size_t kCandidateCap = 100000;
}  // namespace

std::string to_string(TargetKind k) {
  switch (k) {
    case TargetKind::Sub: return "sub";
    case TargetKind::Primed: return "primed";
    case TargetKind::Thick: return "thick";
    default: return "thick_primed";
  }
}

TargetKind target_kind_from_string(const std::string& s) {
  if (s == "sub") return TargetKind::Sub;
  if (s == "primed") return TargetKind::Primed;
  if (s == "thick") return TargetKind::Thick;
  if (s == "thick_primed") return TargetKind::ThickPrimed;
  throw ValidationError("unknown target kind '" + s + "' (sub, primed, thick, thick_primed)");
}

TargetSpec::TargetSpec(double r, TargetKind kind, std::optional<WeightPair> weights)
    : r_(r), kind_(kind), weights_(std::move(weights)) {
  if (!(r_ > 0.0 && r_ < 1.0)) throw ValidationError("target: r must lie in (0,1)");
  if (thickened() && !weights_) throw ValidationError("target: thickened kinds need weights");
}

double TargetSpec::window() const {
  switch (kind_) {
    case TargetKind::Thick: return 1.0;
    case TargetKind::ThickPrimed: return 0.5;
    default: return 0.0;
  }
}

Box primed_box(int d, double r) {
  std::vector<BoxSide> sides(d, BoxSide{-std::sqrt(r), std::sqrt(r)});
  sides[0] = BoxSide{1.0 - r / (2.0 * d), 1.0 + r / (2.0 * d)};
  return Box(std::move(sides));
}

namespace {

struct ThickData {
  std::vector<Interval> bad;   // open s-intervals where some short vector sits in the cube
  std::vector<Interval> good;  // open s-intervals where some vector sits in R_r
};

ThickData thick_data(const UnimodularLattice& L, const TargetSpec& spec) {
  const int d = L.dim(), m = L.dims().m();
  const WeightPair& w = *spec.weights();
  if (w.m() != m || w.n() != L.dims().n()) throw ValidationError("target: weights do not match (m, n)");
  const double r = spec.r(), W = spec.window();
  const double pad = 1.0 + 1e-6;  // admit vectors that only touch after perturbation
  ThickData out;

  // cube avoidance: g_s v has |coordinate| < e^{-r} for s in (lo, hi)
  std::vector<BoxSide> cube(d);
  for (int i = 0; i < d; ++i) {
    const double h = (i < m ? std::exp(-r) : std::exp(w.beta()[i - m] * W - r)) * pad;
    cube[i] = BoxSide{-h, h};
  }
  for (const auto& v : box_points(L, Box(cube), kCandidateCap, true)) {
    double lo = -kInf, hi = kInf;
    for (int i = 0; i < d; ++i) {
      if (v[i] == 0.0) continue;
      const double lv = std::log(std::abs(v[i]));
      if (i < m)
        hi = std::min(hi, (-r - lv) / w.alpha()[i]);
      else
        lo = std::max(lo, (lv + r) / w.beta()[i - m]);
    }
    if (lo < hi) out.bad.push_back(Interval{lo, hi});
  }
  if (!spec.primed()) return out;

  // R_r hitting: first coordinate in (1 - r/2d, 1 + r/2d), others below √r
  const double a1 = w.alpha()[0], sr = std::sqrt(r), lo1 = 1.0 - r / (2.0 * d), hi1 = 1.0 + r / (2.0 * d);
  std::vector<BoxSide> rb(d);
  rb[0] = BoxSide{std::exp(-a1 * W) * lo1 / pad, hi1 * pad};
  for (int i = 1; i < d; ++i) {
    const double h = (i < m ? sr : sr * std::exp(w.beta()[i - m] * W)) * pad;
    rb[i] = BoxSide{-h, h};
  }
  for (const auto& v : box_points(L, Box(rb), kCandidateCap, false)) {
    if (!(v[0] > 0.0)) continue;
    const double l0 = std::log(v[0]);
    double lo = (std::log(lo1) - l0) / a1, hi = (std::log(hi1) - l0) / a1;
    const double lsr = std::log(sr);
    for (int i = 1; i < d; ++i) {
      if (v[i] == 0.0) continue;
      const double lv = std::log(std::abs(v[i]));
      if (i < m)
        hi = std::min(hi, (lsr - lv) / w.alpha()[i]);
      else
        lo = std::max(lo, (lv - lsr) / w.beta()[i - m]);
    }
    if (lo < hi) out.good.push_back(Interval{lo, hi});
  }
  return out;
}

// A nonzero vector that stays in the cube over the whole (perturbed) window
// rules the target out; this also bounds the candidate counts below.
bool short_throughout(const UnimodularLattice& L, const TargetSpec& spec) {
  const WeightPair& w = *spec.weights();
  const int d = L.dim(), m = L.dims().m();
  if (w.m() != m || w.n() != L.dims().n()) throw ValidationError("target: weights do not match (m, n)");
  const double shrink = std::exp(-3.0 * kEps);
  std::vector<BoxSide> sides(d);
  for (int i = 0; i < d; ++i) {
    const double h = (i < m ? std::exp(-spec.r() - w.alpha()[i] * spec.window()) : std::exp(-spec.r())) * shrink;
    sides[i] = BoxSide{-h, h};
  }
  return box_has_point(L, Box(std::move(sides))).found;
}

// eps > 0 favors membership (bad shrinks, good grows), eps < 0 disfavors.
IntervalSet good_set(const ThickData& td, const TargetSpec& spec, double eps) {
  std::vector<Interval> bad;
  for (const auto& iv : td.bad) bad.push_back(Interval{iv.lo + eps, iv.hi - eps});
  const Interval window{-eps, spec.window() + eps, true, false};
  IntervalSet good = IntervalSet::union_of(bad).complement_within(window);
  if (spec.primed()) {
    std::vector<Interval> hit;
    for (const auto& iv : td.good) hit.push_back(Interval{iv.lo - eps, iv.hi + eps});
    good = good.intersect(IntervalSet::union_of(hit));
  }
  return good;
}

}  // namespace

IntervalSet thick_good_set(const UnimodularLattice& L, const TargetSpec& spec) {
  if (!spec.thickened()) throw ValidationError("thick_good_set: target is not thickened");
  if (short_throughout(L, spec)) return IntervalSet{};
  return good_set(thick_data(L, spec), spec, 0.0);
}

TargetAnswer in_target_ex(const UnimodularLattice& L, const TargetSpec& spec) {
  const int d = L.dim();
  if (d > kMaxEnumDim) throw DimensionTooLarge("in_target is exact only for d <= 6");
  TargetAnswer ans;
  if (!spec.thickened()) {
    const BoxQuery cube = box_has_point(L, Box::cube(d, std::exp(-spec.r())));
    ans.value = !cube.found;
    ans.boundary = cube.boundary;
    if (ans.value && spec.primed()) {
      const BoxQuery hit = box_has_point(L, primed_box(d, spec.r()));
      ans.value = hit.found;
      ans.boundary = ans.boundary || hit.boundary;
    }
    return ans;
  }
  if (short_throughout(L, spec)) return ans;
  const ThickData td = thick_data(L, spec);
  ans.value = !good_set(td, spec, 0.0).empty();
  const bool lenient = !good_set(td, spec, kEps).empty();
  const bool strict = !good_set(td, spec, -kEps).empty();
  ans.boundary = lenient != strict;
  return ans;
}

bool in_target(const UnimodularLattice& L, const TargetSpec& spec) { return in_target_ex(L, spec).value; }

}  // namespace dirlab
