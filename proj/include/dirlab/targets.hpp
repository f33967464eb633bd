#pragma once

#include <optional>
#include <string>

#include "dirlab/intervals.hpp"
#include "dirlab/lattice.hpp"

namespace dirlab {

enum class TargetKind {
  Sub,         // Δ ≤ r: no nonzero point in (-e^{-r}, e^{-r})^d
  Primed,      // Sub and a point in R_r
  Thick,       // g_s Λ ∈ Sub for some s in [0, 1)
  ThickPrimed  // g_s Λ ∈ Primed for some s in [0, 1/2)
};

std::string to_string(TargetKind k);
TargetKind target_kind_from_string(const std::string& s);

class TargetSpec {
 public:
  TargetSpec(double r, TargetKind kind, std::optional<WeightPair> weights = std::nullopt);

  double r() const { return r_; }
  TargetKind kind() const { return kind_; }
  const std::optional<WeightPair>& weights() const { return weights_; }
  bool thickened() const { return kind_ == TargetKind::Thick || kind_ == TargetKind::ThickPrimed; }
  bool primed() const { return kind_ == TargetKind::Primed || kind_ == TargetKind::ThickPrimed; }
  /// Right end W of the half-open window [0, W) (0 for unthickened kinds).
  double window() const;
  TargetSpec with_r(double r) const { return TargetSpec(r, kind_, weights_); }

 private:
  double r_;
  TargetKind kind_;
  std::optional<WeightPair> weights_;
};

/// R_r = (1 - r/2d, 1 + r/2d) × (-√r, √r)^{d-1}.
Box primed_box(int d, double r);

struct TargetAnswer {
  bool value = false;
  /// The answer flips under a 1e-9 perturbation of the comparisons.
  bool boundary = false;
};

TargetAnswer in_target_ex(const UnimodularLattice& L, const TargetSpec& spec);
bool in_target(const UnimodularLattice& L, const TargetSpec& spec);

/// For thickened kinds: the set of s in the window at which g_s Λ lies in the
/// unthickened base target.
IntervalSet thick_good_set(const UnimodularLattice& L, const TargetSpec& spec);

}  // namespace dirlab
