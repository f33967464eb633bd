#include "dirlab/intervals.hpp"

#include <algorithm>
#include <sstream>

namespace dirlab {

std::string Interval::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << (lo_closed ? '[' : '(') << lo << ", " << hi << (hi_closed ? ']' : ')');
  return os.str();
}

IntervalSet IntervalSet::union_of(std::vector<Interval> parts) {
  parts.erase(std::remove_if(parts.begin(), parts.end(), [](const Interval& iv) { return iv.empty(); }), parts.end());
  std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return a.lo_closed && !b.lo_closed;
  });
  IntervalSet out;
  for (const Interval& iv : parts) {
    if (!out.parts_.empty()) {
      Interval& last = out.parts_.back();
      const bool overlaps = iv.lo < last.hi || (iv.lo == last.hi && (iv.lo_closed || last.hi_closed));
      if (overlaps) {
        if (iv.hi > last.hi) {
          last.hi = iv.hi;
          last.hi_closed = iv.hi_closed;
        } else if (iv.hi == last.hi) {
          last.hi_closed = last.hi_closed || iv.hi_closed;
        }
        continue;
      }
    }
    out.parts_.push_back(iv);
  }
  return out;
}

bool IntervalSet::contains(double x) const {
  for (const auto& iv : parts_)
    if (iv.contains(x)) return true;
  return false;
}

double IntervalSet::measure() const {
  double m = 0.0;
  for (const auto& iv : parts_) m += iv.length();
  return m;
}

namespace {

Interval meet(const Interval& a, const Interval& b) {
  Interval c;
  if (a.lo > b.lo || (a.lo == b.lo && !a.lo_closed)) {
    c.lo = a.lo;
    c.lo_closed = a.lo_closed;
  } else {
    c.lo = b.lo;
    c.lo_closed = b.lo_closed;
  }
  if (a.hi < b.hi || (a.hi == b.hi && !a.hi_closed)) {
    c.hi = a.hi;
    c.hi_closed = a.hi_closed;
  } else {
    c.hi = b.hi;
    c.hi_closed = b.hi_closed;
  }
  return c;
}

}  // namespace

IntervalSet IntervalSet::complement_within(const Interval& domain) const {
  std::vector<Interval> gaps;
  double cur = domain.lo;
  bool cur_closed = domain.lo_closed;
  for (const auto& iv : parts_) {
    const Interval c = meet(iv, domain);
    if (c.empty()) continue;
    gaps.push_back(Interval{cur, c.lo, cur_closed, !c.lo_closed});
    cur = c.hi;
    cur_closed = !c.hi_closed;
  }
  gaps.push_back(Interval{cur, domain.hi, cur_closed, domain.hi_closed});
  return union_of(std::move(gaps));
}

IntervalSet IntervalSet::intersect(const Interval& b) const {
  std::vector<Interval> out;
  for (const auto& a : parts_) out.push_back(meet(a, b));
  return union_of(std::move(out));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  for (const auto& b : other.parts_) {
    const IntervalSet part = intersect(b);
    out.insert(out.end(), part.parts_.begin(), part.parts_.end());
  }
  return union_of(std::move(out));
}

}  // namespace dirlab
