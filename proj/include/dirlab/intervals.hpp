#pragma once

#include <string>
#include <vector>

namespace dirlab {

struct Interval {
  double lo;
  double hi;
  bool lo_closed = false;
  bool hi_closed = false;

  bool empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
  double length() const { return empty() ? 0.0 : hi - lo; }
  bool contains(double x) const {
    return (x > lo || (lo_closed && x == lo)) && (x < hi || (hi_closed && x == hi));
  }
  std::string to_string() const;
};

/// Finite union of disjoint intervals kept sorted and merged.
class IntervalSet {
 public:
  IntervalSet() = default;
  static IntervalSet union_of(std::vector<Interval> parts);

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  bool contains(double x) const;
  double measure() const;

  /// domain minus this set.
  IntervalSet complement_within(const Interval& domain) const;
  IntervalSet intersect(const IntervalSet& other) const;
  IntervalSet intersect(const Interval& iv) const;

 private:
  std::vector<Interval> parts_;
};

}  // namespace dirlab
