#include "seqbirds/physics.hpp"

#include "seqbirds/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace seqbirds {

namespace {

struct Box {
  Interval span;
  double bottom = 0.0;
  double top = 0.0;
  const CatalogEntry* entry = nullptr;
};

}  // namespace

StabilityReport check_stability(const ObjectCatalog& catalog, const Level& level, const PhysicsParams& params) {
  const auto n = level.objects.size();
  std::vector<Box> boxes(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = level.objects[i];
    const auto& e = catalog.at(o.type_id);
    boxes[i] = {{o.x - e.width / 2.0, o.x + e.width / 2.0}, o.y - e.height / 2.0, o.y + e.height / 2.0, &e};
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& oa = level.objects[a];
    const auto& ob = level.objects[b];
    if (oa.y != ob.y) return oa.y < ob.y;
    if (oa.x != ob.x) return oa.x < ob.x;
    return a < b;
  });

  std::vector<std::optional<Instability>> verdict(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (boxes[i].entry->category == Category::platform) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (boxes[j].entry->category == Category::platform) continue;
      const double dx = overlap_length(boxes[i].span, boxes[j].span);
      const double dy = std::min(boxes[i].top, boxes[j].top) - std::max(boxes[i].bottom, boxes[j].bottom);
      if (dx > params.overlap_tol && dy > params.overlap_tol) {
        verdict[i] = Instability::interpenetration;
        verdict[j] = Instability::interpenetration;
      }
    }
  }

  for (std::size_t i : order) {
    const Box& b = boxes[i];
    if (b.entry->category == Category::platform || verdict[i]) continue;
    const double com = level.objects[i].x;
    double lo = 1e300;
    double hi = -1e300;
    int supports = 0;
    bool grounded = std::abs(b.bottom - params.ground_y) <= params.contact_tol;
    if (grounded) {
      lo = b.span.lo;
      hi = b.span.hi;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Box& s = boxes[j];
      if (!overlaps(s.span, b.span) || std::abs(s.top - b.bottom) > params.contact_tol) continue;
      ++supports;
      lo = std::min(lo, std::max(s.span.lo, b.span.lo));
      hi = std::max(hi, std::min(s.span.hi, b.span.hi));
    }
    if (!grounded && supports == 0) {
      verdict[i] = Instability::unsupported;
      continue;
    }
    const double slack = 1e-9;
    bool balanced = com >= lo - slack && com <= hi + slack;
    if (b.entry->rolls) balanced = supports >= 2 && com > lo + slack && com < hi - slack;
    if (!balanced) verdict[i] = Instability::com_outside_support;
  }

  StabilityReport report;
  for (std::size_t i = 0; i < n; ++i)
    if (verdict[i]) report.offenders.push_back({static_cast<int>(i), *verdict[i]});
  report.stable = report.offenders.empty();
  return report;
}

Level settle(const ObjectCatalog& catalog, const std::vector<std::pair<int, int>>& drops, const GridSpec& spec) {
  DropPlacer placer(catalog, spec);
  Level level;
  for (const auto& [type, col] : drops) level.objects.push_back(placer.drop(type, ind2float(spec, col)));
  level.n_birds = compute_n_birds(catalog, level);
  return level;
}

}  // namespace seqbirds
