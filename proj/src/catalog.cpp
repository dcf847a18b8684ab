#include "seqbirds/catalog.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <iomanip>
#include <sstream>

namespace seqbirds {

std::string_view to_string(Material m) {
  switch (m) {
    case Material::wood: return "wood";
    case Material::stone: return "stone";
    case Material::ice: return "ice";
    case Material::none: return "none";
  }
  return "none";
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::block: return "Block";
    case Category::pig: return "Pig";
    case Category::tnt: return "TNT";
    case Category::platform: return "Platform";
  }
  return "Block";
}

std::optional<Material> parse_material(std::string_view s) {
  if (s == "wood") return Material::wood;
  if (s == "stone") return Material::stone;
  if (s == "ice") return Material::ice;
  if (s == "none" || s.empty()) return Material::none;
  return std::nullopt;
}

std::optional<Category> parse_category(std::string_view s) {
  if (s == "Block") return Category::block;
  if (s == "Pig") return Category::pig;
  if (s == "TNT") return Category::tnt;
  if (s == "Platform") return Category::platform;
  return std::nullopt;
}

ObjectCatalog::ObjectCatalog(std::vector<CatalogEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) throw DataError("catalog must contain at least one entry");
  std::sort(entries_.begin(), entries_.end(),
            [](const CatalogEntry& a, const CatalogEntry& b) { return a.type_id < b.type_id; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (i > 0 && entries_[i - 1].type_id == e.type_id)
      throw DataError("duplicate type_id " + std::to_string(e.type_id));
    if (e.type_id != static_cast<int>(i) + 1)
      throw DataError("type_id values must be contiguous from 1; missing " + std::to_string(i + 1));
    if (!(e.width > 0.0) || !(e.height > 0.0))
      throw DataError("entry " + std::to_string(e.type_id) + " must have positive extents");
    auto [it, inserted] = by_key_.emplace(std::tuple{e.kind_name, e.material, e.rotation}, e.type_id);
    if (!inserted)
      throw DataError("duplicate (kind, material, rotation) for type_id " + std::to_string(e.type_id));
  }
}

const CatalogEntry& ObjectCatalog::at(int type_id) const {
  if (!contains(type_id)) throw DataError("unknown type_id " + std::to_string(type_id));
  return entries_[static_cast<std::size_t>(type_id - 1)];
}

const CatalogEntry* ObjectCatalog::find(std::string_view kind, Material material, int rotation) const {
  auto it = by_key_.find(std::tuple{std::string(kind), material, rotation});
  if (it == by_key_.end()) return nullptr;
  return &entries_[static_cast<std::size_t>(it->second - 1)];
}

std::vector<int> ObjectCatalog::rotations(std::string_view kind, Material material) const {
  std::vector<int> out;
  for (const auto& e : entries_)
    if (e.kind_name == kind && e.material == material) out.push_back(e.rotation);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct Shape {
  const char* name;
  double width;
  double height;
  std::vector<int> rotations;
  bool rolls;
};

// Axis-aligned extents of a w x h box rotated by `deg`.
std::pair<double, double> rotated_extents(double w, double h, int deg) {
  const double r = deg * 3.14159265358979323846 / 180.0;
  const double c = std::abs(std::cos(r));
  const double s = std::abs(std::sin(r));
  auto tidy = [](double v) { return std::round(v * 1e6) / 1e6; };
  return {tidy(w * c + h * s), tidy(w * s + h * c)};
}

}  // namespace

ObjectCatalog default_catalog() {
  // 11 shapes; symmetric shapes keep a single orientation.
  const std::vector<Shape> shapes = {
      {"SquareHole", 0.84, 0.84, {0}, false},
      {"RectFat", 0.85, 0.43, {0, 45, 90}, false},
      {"SquareSmall", 0.43, 0.43, {0}, false},
      {"SquareTiny", 0.22, 0.22, {0}, false},
      {"RectTiny", 0.43, 0.22, {0, 90}, false},
      {"RectSmall", 0.85, 0.22, {0, 90}, false},
      {"RectMedium", 1.68, 0.22, {0, 90}, false},
      {"RectBig", 2.06, 0.22, {0, 90}, false},
      {"Triangle", 0.82, 0.82, {0, 45, 90}, false},
      {"Circle", 0.8, 0.8, {0}, true},
      {"CircleSmall", 0.45, 0.45, {0}, true},
  };
  const Material materials[] = {Material::wood, Material::stone, Material::ice};

  std::vector<CatalogEntry> entries;
  int id = 1;
  for (const auto& shape : shapes) {
    for (Material m : materials) {
      for (int rot : shape.rotations) {
        auto [w, h] = rotated_extents(shape.width, shape.height, rot);
        entries.push_back({id++, shape.name, m, rot, w, h, Category::block, shape.rolls});
      }
    }
  }
  entries.push_back({id++, "BasicSmall", Material::none, 0, 0.47, 0.45, Category::pig, false});
  entries.push_back({id++, "TNT", Material::none, 0, 0.55, 0.55, Category::tnt, false});
  entries.push_back({id++, "PlatformNarrow", Material::none, 0, 1.0, 0.3, Category::platform, false});
  entries.push_back({id++, "PlatformWide", Material::none, 0, 2.0, 0.3, Category::platform, false});
  return ObjectCatalog(std::move(entries));
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for doubles does not accept a leading '+'.
    std::string buf(s);
    std::istringstream in(buf);
    in.imbue(std::locale::classic());
    in >> out;
    return in && in.peek() == std::char_traits<char>::eof() && std::isfinite(out);
  } else {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
  }
}

}  // namespace

ObjectCatalog parse_catalog(std::string_view text) {
  std::vector<CatalogEntry> entries;
  std::set<int> seen;
  int line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& what) {
      throw DataError("catalog line " + std::to_string(line_no) + ": " + what);
    };
    auto fields = split(line, ';');
    if (fields.size() != 7 && fields.size() != 8) fail("expected 7 or 8 ';'-separated fields");
    CatalogEntry e;
    if (!parse_number(fields[0], e.type_id) || e.type_id < 1) fail("bad type_id");
    e.kind_name = std::string(trim(fields[1]));
    if (e.kind_name.empty()) fail("empty kind_name");
    auto mat = parse_material(trim(fields[2]));
    if (!mat) fail("bad material '" + std::string(trim(fields[2])) + "'");
    e.material = *mat;
    if (!parse_number(fields[3], e.rotation)) fail("bad rotation");
    if (!parse_number(fields[4], e.width) || e.width <= 0.0) fail("bad width");
    if (!parse_number(fields[5], e.height) || e.height <= 0.0) fail("bad height");
    auto cat = parse_category(trim(fields[6]));
    if (!cat) fail("bad category '" + std::string(trim(fields[6])) + "'");
    e.category = *cat;
    if (fields.size() == 8) {
      int rolls = 0;
      if (!parse_number(fields[7], rolls) || (rolls != 0 && rolls != 1)) fail("rolls must be 0 or 1");
      e.rolls = rolls == 1;
    } else {
      e.rolls = e.kind_name.find("Circle") != std::string::npos;
    }
    if (!seen.insert(e.type_id).second) fail("duplicate type_id " + std::to_string(e.type_id));
    entries.push_back(std::move(e));
  }
  if (entries.empty()) throw DataError("catalog must contain at least one entry");
  return ObjectCatalog(std::move(entries));
}

ObjectCatalog load_catalog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open catalog file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_catalog(ss.str());
}

std::string format_catalog(const ObjectCatalog& catalog) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::setprecision(12);
  out << "# type_id;kind_name;material;rotation;width;height;category;rolls\n";
  for (const auto& e : catalog.entries()) {
    out << e.type_id << ';' << e.kind_name << ';' << to_string(e.material) << ';' << e.rotation << ';'
        << e.width << ';' << e.height << ';' << to_string(e.category) << ';' << (e.rolls ? 1 : 0) << '\n';
  }
  return out.str();
}

Footprint footprint(const ObjectCatalog& catalog, const GameObject& obj) {
  const auto& e = catalog.at(obj.type_id);
  return {{obj.x - e.width / 2.0, obj.x + e.width / 2.0}, e.height};
}

int count_category(const ObjectCatalog& catalog, const Level& level, Category category) {
  int n = 0;
  for (const auto& o : level.objects)
    if (catalog.at(o.type_id).category == category) ++n;
  return n;
}

}  // namespace seqbirds
