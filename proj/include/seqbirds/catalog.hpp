#pragma once

#include "seqbirds/types.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace seqbirds {

enum class Material { wood, stone, ice, none };
enum class Category { block, pig, tnt, platform };

std::string_view to_string(Material m);
std::string_view to_string(Category c);
std::optional<Material> parse_material(std::string_view s);
std::optional<Category> parse_category(std::string_view s);

// Boxes closer than this are treated as touching rather than interpenetrating.
inline constexpr double kOverlapTol = 0.01;

/// One object type: a block shape in a material at a fixed rotation, or a
/// pig, TNT or platform. `width`/`height` are the extents of the axis-aligned
/// bounding box after rotation.
struct CatalogEntry {
  int type_id = 0;
  std::string kind_name;
  Material material = Material::none;
  int rotation = 0;
  double width = 0.0;
  double height = 0.0;
  Category category = Category::block;
  bool rolls = false;
};

/// Ordered set of object types, ids contiguous from 1. Id 0 is Space.
class ObjectCatalog {
 public:
  ObjectCatalog() = default;
  explicit ObjectCatalog(std::vector<CatalogEntry> entries);

  int n_types() const { return static_cast<int>(entries_.size()); }
  const std::vector<CatalogEntry>& entries() const { return entries_; }

  bool contains(int type_id) const { return type_id >= 1 && type_id <= n_types(); }
  /// Throws DataError for ids outside [1, n_types].
  const CatalogEntry& at(int type_id) const;
  const CatalogEntry* find(std::string_view kind, Material material, int rotation) const;
  /// Rotations available for a (kind, material) pair, ascending.
  std::vector<int> rotations(std::string_view kind, Material material) const;

 private:
  std::vector<CatalogEntry> entries_;
  std::map<std::tuple<std::string, Material, int>, int, std::less<>> by_key_;
};

/// Built-in 61-type catalog modelled on the Science Birds object set.
ObjectCatalog default_catalog();

/// Reads `type_id;kind_name;material;rotation;width;height;category[;rolls]`
/// lines. `#` starts a comment.
ObjectCatalog parse_catalog(std::string_view text);
ObjectCatalog load_catalog(const std::string& path);
std::string format_catalog(const ObjectCatalog& catalog);

struct GameObject {
  int type_id = 0;
  double x = 0.0;
  double y = 0.0;  // center of the bounding box
  double rotation = 0.0;

  friend bool operator==(const GameObject&, const GameObject&) = default;
};

struct Level {
  std::vector<GameObject> objects;
  int n_birds = 0;
  // Unrecognised top-level XML elements, kept verbatim for round trips.
  std::vector<std::string> passthrough;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

struct Footprint {
  Interval span;
  double height = 0.0;
};

Footprint footprint(const ObjectCatalog& catalog, const GameObject& obj);

/// Length of the intersection of two intervals (zero when disjoint).
inline double overlap_length(const Interval& a, const Interval& b) {
  const double len = std::min(a.hi, b.hi) - std::max(a.lo, b.lo);
  return len > 0.0 ? len : 0.0;
}

/// Positive-length overlap; touching endpoints do not count.
inline bool overlaps(const Interval& a, const Interval& b) {
  return overlap_length(a, b) > 1e-9;
}

int count_category(const ObjectCatalog& catalog, const Level& level, Category category);

}  // namespace seqbirds
