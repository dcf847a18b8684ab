#include "seqbirds/objectives.hpp"

#include <algorithm>
#include <cmath>

namespace seqbirds {

int count_blocks(const ObjectCatalog& catalog, const Level& level) {
  return count_category(catalog, level, Category::block) + count_category(catalog, level, Category::tnt);
}

int compute_n_birds(int n_pigs, int n_blocks) {
  return std::clamp(1 + n_pigs / 2 + n_blocks / 30, 1, 10);
}

int compute_n_birds(const ObjectCatalog& catalog, const Level& level) {
  return compute_n_birds(count_category(catalog, level, Category::pig), count_blocks(catalog, level));
}

double objective_pigs(const ObjectCatalog& catalog, const Level& level) {
  return -static_cast<double>(count_category(catalog, level, Category::pig));
}

double objective_tnt(const ObjectCatalog& catalog, const Level& level) {
  return -static_cast<double>(count_category(catalog, level, Category::tnt));
}

AgentOutcome heuristic_play(const ObjectCatalog& catalog, const Level& level, double blast_radius,
                            const PhysicsParams& physics) {
  AgentOutcome out;
  out.n_pigs = count_category(catalog, level, Category::pig);
  out.n_blocks = count_blocks(catalog, level);
  out.n_birds = compute_n_birds(out.n_pigs, out.n_blocks);
  out.n_rem_birds = out.n_birds;

  if (!check_stability(catalog, level, physics).stable) {
    out.pigs_destroyed = out.n_pigs;
    out.n_rem_blocks = 0;
    return out;
  }

  // Surviving objects, as indices into level.objects.
  std::vector<int> alive(level.objects.size());
  for (std::size_t i = 0; i < alive.size(); ++i) alive[i] = static_cast<int>(i);
  auto category = [&](int i) { return catalog.at(level.objects[static_cast<std::size_t>(i)].type_id).category; };
  auto pigs_alive = [&] {
    return std::count_if(alive.begin(), alive.end(), [&](int i) { return category(i) == Category::pig; });
  };

  while (out.n_rem_birds > 0 && pigs_alive() > 0) {
    int target = -1;
    for (int i : alive) {
      if (category(i) != Category::pig) continue;
      const auto& o = level.objects[static_cast<std::size_t>(i)];
      if (target < 0) {
        target = i;
        continue;
      }
      const auto& t = level.objects[static_cast<std::size_t>(target)];
      if (o.x < t.x || (o.x == t.x && o.y < t.y)) target = i;
    }
    --out.n_rem_birds;
    const auto& hit = level.objects[static_cast<std::size_t>(target)];
    std::erase_if(alive, [&](int i) {
      if (category(i) == Category::platform) return false;
      const auto& o = level.objects[static_cast<std::size_t>(i)];
      return i == target || std::hypot(o.x - hit.x, o.y - hit.y) <= blast_radius;
    });
    // Collapse whatever lost its support.
    while (true) {
      Level rest;
      for (int i : alive) rest.objects.push_back(level.objects[static_cast<std::size_t>(i)]);
      auto report = check_stability(catalog, rest, physics);
      if (report.stable) break;
      std::vector<int> survivors;
      std::size_t k = 0;
      for (std::size_t j = 0; j < alive.size(); ++j) {
        if (k < report.offenders.size() && report.offenders[k].index == static_cast<int>(j)) {
          ++k;
          continue;
        }
        survivors.push_back(alive[j]);
      }
      alive = std::move(survivors);
    }
  }

  for (int i : alive) {
    const auto c = category(i);
    if (c == Category::block || c == Category::tnt) ++out.n_rem_blocks;
  }
  out.pigs_destroyed = out.n_pigs - static_cast<int>(pigs_alive());
  return out;
}

double difficulty_score(const AgentOutcome& o) {
  return std::max(5 - o.n_birds, o.n_rem_birds) * 10.0 + o.n_blocks;
}

double aesthetics_score(const AgentOutcome& o) {
  return std::max(60 - o.n_blocks, o.n_blocks - o.n_rem_blocks) * 10.0 - o.n_pigs;
}

double objective_difficulty(const ObjectCatalog& catalog, const Level& level) {
  return difficulty_score(heuristic_play(catalog, level));
}

double objective_aesthetics(const ObjectCatalog& catalog, const Level& level) {
  return aesthetics_score(heuristic_play(catalog, level));
}

}  // namespace seqbirds
