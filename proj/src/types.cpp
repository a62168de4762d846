#include "allab/types.hpp"

#include <algorithm>
#include <numeric>

namespace allab {

SortedLabeled sort_by_coordinate(const LabeledSet& s) {
  const std::int64_t n = s.size();
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return s[a].x.c[0] < s[b].x.c[0];
  });

  SortedLabeled out;
  out.xs.resize(n);
  out.ys.resize(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& e = s[order[i]];
    if (e.y < 0) throw DegenerateInputError("labeled set contains placeholder entries");
    out.xs[i] = e.x.c[0];
    out.ys[i] = e.y;
  }
  return out;
}

}  // namespace allab
