#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace care {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }

inline double distance(Point2 a, Point2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// One matched pair: (u,v) in the source frame, (x,y) in the target frame.
struct Correspondence {
  Point2 src;
  Point2 tgt;

  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

struct CorrespondenceSet {
  std::vector<Correspondence> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }

  // Pairs whose mask entry is true; mask must have size() entries.
  CorrespondenceSet select(const std::vector<bool>& mask) const;

  friend bool operator==(const CorrespondenceSet&, const CorrespondenceSet&) = default;
};

}  // namespace care
