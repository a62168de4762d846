#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "allab/errors.hpp"

namespace allab {

// A point of the unit cube [0,1]^d, d <= 3. Only the first `dim` coordinates
// are meaningful.
struct Point {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  int dim = 1;

  static Point scalar(double x) {
    Point p;
    p.c[0] = x;
    return p;
  }

  static Point of(std::initializer_list<double> coords) {
    Point p;
    p.dim = static_cast<int>(coords.size());
    int i = 0;
    for (double v : coords) p.c[i++] = v;
    return p;
  }

  double x() const { return c[0]; }
};

inline double sq_dist(const Point& a, const Point& b) {
  double s = 0;
  for (int i = 0; i < a.dim; ++i) {
    const double d = a.c[i] - b.c[i];
    s += d * d;
  }
  return s;
}

enum class Source : std::uint8_t { Random, Active };

// One queried example. y == -1 marks a position-only placeholder in a
// decision set (the label was routed to the prediction set instead).
struct LabeledEntry {
  Point x;
  std::int8_t y = 0;
  Source source = Source::Active;
  std::int64_t step = 0;
  std::int8_t z = 0;
  std::int64_t pool_index = -1;
};

struct LabeledSet {
  std::vector<LabeledEntry> entries;

  std::int64_t size() const { return static_cast<std::int64_t>(entries.size()); }
  bool empty() const { return entries.empty(); }
  const LabeledEntry& operator[](std::int64_t i) const { return entries[i]; }

  std::int64_t labeled_count() const {
    std::int64_t c = 0;
    for (const auto& e : entries) c += (e.y >= 0);
    return c;
  }

  void add(Point x, int y, Source source, std::int64_t step, int z,
           std::int64_t pool_index = -1) {
    entries.push_back(LabeledEntry{x, static_cast<std::int8_t>(y), source, step,
                                   static_cast<std::int8_t>(z), pool_index});
  }
};

// d = 1 view of a labeled set, ordered by coordinate.
struct SortedLabeled {
  Eigen::VectorXd xs;
  Eigen::VectorXi ys;

  std::int64_t size() const { return xs.size(); }
};

// Sorts by coordinate and checks for duplicates (which break 1D partitions).
SortedLabeled sort_by_coordinate(const LabeledSet& s);

}  // namespace allab
