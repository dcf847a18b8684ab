#include "seqbirds/synth.hpp"

#include "seqbirds/objectives.hpp"
#include "seqbirds/physics.hpp"
#include "seqbirds/rng.hpp"
#include "seqbirds/xml_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace seqbirds {

namespace fs = std::filesystem;

void validate(const SynthConfig& c) {
  if (c.n_levels < 0) throw std::invalid_argument("n_levels must be non-negative");
  if (c.towers_min < 1 || c.towers_max > 6 || c.towers_min > c.towers_max)
    throw std::invalid_argument("towers range must lie within [1,6] and be nonempty");
  if (c.height_min < 1 || c.height_min > c.height_max) throw std::invalid_argument("tower height range is empty");
  for (double p : {c.pig_prob, c.tnt_prob, c.platform_prob})
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probabilities must lie in [0,1]");
  if (c.max_retries < 1) throw std::invalid_argument("max_retries must be positive");
}

namespace {

// Tower axes, 1.5 units apart.
constexpr int kSlotCols[] = {10, 25, 40, 55, 70, 85};
constexpr int kSlots = 6;

// One layer of a tower: a single centered block, or two identical upright
// pillars at +-offset.
struct Element {
  const CatalogEntry* entry = nullptr;
  bool pillars = false;
  double offset = 0.0;  // multiple of the cell width
  double width() const { return pillars ? 2.0 * offset + entry->width : entry->width; }
};

struct Shape {
  const char* kind;
  int rotation;
  bool pillar;
};

// Layer height classes and the shapes of that height.
const std::vector<std::vector<Shape>>& height_classes() {
  static const std::vector<std::vector<Shape>> classes = {
      {{"SquareTiny", 0, false}, {"RectTiny", 0, false}, {"RectSmall", 0, false}, {"RectMedium", 0, false},
       {"RectBig", 0, false}},
      {{"SquareSmall", 0, false}, {"RectFat", 0, false}, {"RectTiny", 90, true}},
      {{"SquareHole", 0, false}, {"RectFat", 90, false}, {"RectSmall", 90, true}, {"RectFat", 90, true}},
  };
  return classes;
}

constexpr double kContactSlack = 0.02;

bool fits(const Element& e, const Element* below, double max_width) {
  if (e.width() > max_width + 1e-9) return false;
  if (!below) return true;
  if (e.pillars && below->pillars)
    return e.entry == below->entry && e.offset == below->offset;
  if (e.pillars) return below->entry->width / 2.0 >= e.offset + e.entry->width / 2.0 - 1e-9;
  if (below->pillars) return e.entry->width / 2.0 >= below->offset;
  return e.entry->width <= below->entry->width + 1e-9;
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

Material random_material(Rng& rng) {
  static const std::vector<Material> m = {Material::wood, Material::stone, Material::ice};
  return pick(m, rng);
}

struct Drop {
  int type_id;
  int col;
};

std::vector<Element> options(const ObjectCatalog& catalog, int height_class, Material material) {
  std::vector<Element> out;
  for (const auto& s : height_classes()[static_cast<std::size_t>(height_class)]) {
    const auto* e = catalog.find(s.kind, material, s.rotation);
    if (!e) continue;
    if (!s.pillar) {
      out.push_back({e, false, 0.0});
      continue;
    }
    for (int k = 2; k <= 6; ++k) {
      const double offset = 0.1 * k;
      if (2.0 * offset - e->width > 0.05) out.push_back({e, true, offset});
    }
  }
  return out;
}

int first_of(const ObjectCatalog& catalog, Category category) {
  for (int id = 1; id <= catalog.n_types(); ++id)
    if (catalog.at(id).category == category) return id;
  return 0;
}

Level attempt(const ObjectCatalog& catalog, const SynthConfig& c, const GridSpec& spec, Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int n_towers = std::uniform_int_distribution<int>(c.towers_min, c.towers_max)(rng);
  std::vector<int> slots(kSlots);
  for (int i = 0; i < kSlots; ++i) slots[static_cast<std::size_t>(i)] = i;
  std::shuffle(slots.begin(), slots.end(), rng);
  slots.resize(static_cast<std::size_t>(n_towers));
  std::sort(slots.begin(), slots.end());
  std::vector<bool> used(kSlots, false);
  for (int s : slots) used[static_cast<std::size_t>(s)] = true;

  std::vector<int> heights;
  for (int i = 0; i < n_towers; ++i) heights.push_back(std::uniform_int_distribution<int>(c.height_min, c.height_max)(rng));
  const int max_height = *std::max_element(heights.begin(), heights.end());
  std::vector<int> layer_class;
  for (int k = 0; k < max_height; ++k) layer_class.push_back(std::uniform_int_distribution<int>(0, 2)(rng));

  const int pig = first_of(catalog, Category::pig);
  const int tnt = first_of(catalog, Category::tnt);
  std::vector<std::vector<Drop>> layers(static_cast<std::size_t>(max_height + 1));
  std::vector<Drop> extras;

  for (int t = 0; t < n_towers; ++t) {
    const int slot = slots[static_cast<std::size_t>(t)];
    const int axis = kSlotCols[slot];
    const bool crowded = (slot > 0 && used[static_cast<std::size_t>(slot - 1)]) ||
                         (slot + 1 < kSlots && used[static_cast<std::size_t>(slot + 1)]);
    const double max_width = crowded ? 1.45 : 2.1;
    std::optional<Element> below;
    int k = 0;
    for (; k < heights[static_cast<std::size_t>(t)]; ++k) {
      std::vector<Element> ok;
      for (const auto& e : options(catalog, layer_class[static_cast<std::size_t>(k)], random_material(rng)))
        if (fits(e, below ? &*below : nullptr, max_width)) ok.push_back(e);
      if (ok.empty()) break;
      const Element e = pick(ok, rng);
      auto& layer = layers[static_cast<std::size_t>(k)];
      if (e.pillars) {
        const int d = static_cast<int>(std::lround(e.offset * 10.0));
        layer.push_back({e.entry->type_id, axis - d});
        layer.push_back({e.entry->type_id, axis + d});
        // A pig sheltered between tall pillars.
        const double inner = e.offset - e.entry->width / 2.0;
        if (pig && e.entry->height > 0.8 && inner > catalog.at(pig).width / 2.0 + kContactSlack && u01(rng) < c.pig_prob)
          layer.push_back({pig, axis});
      } else {
        layer.push_back({e.entry->type_id, axis});
      }
      below = e;
    }
    if (below && !below->pillars && below->entry->width >= 0.43) {
      const double r = u01(rng);
      if (pig && r < c.pig_prob)
        layers[static_cast<std::size_t>(k)].push_back({pig, axis});
      else if (tnt && r < c.pig_prob + c.tnt_prob)
        layers[static_cast<std::size_t>(k)].push_back({tnt, axis});
    }
  }
  for (int s = 0; s < kSlots; ++s)
    if (!used[static_cast<std::size_t>(s)] && pig && u01(rng) < c.pig_prob / 3.0)
      layers[0].push_back({pig, kSlotCols[s]});

  DropPlacer placer(catalog, spec);
  for (const auto& layer : layers)
    for (const auto& d : layer) placer.drop(d.type_id, ind2float(spec, d.col));

  std::vector<int> free_slots;
  for (int s = 0; s < kSlots; ++s)
    if (!used[static_cast<std::size_t>(s)]) free_slots.push_back(s);
  if (!free_slots.empty() && u01(rng) < c.platform_prob) {
    std::vector<int> platforms;
    for (int id = 1; id <= catalog.n_types(); ++id)
      if (catalog.at(id).category == Category::platform && catalog.at(id).width <= 1.45) platforms.push_back(id);
    if (!platforms.empty()) {
      const double x = ind2float(spec, kSlotCols[pick(free_slots, rng)]);
      placer.drop(pick(platforms, rng), x);
      if (pig) placer.drop(pig, x);
    }
  }

  Level level;
  level.objects = placer.placed();
  level.n_birds = compute_n_birds(catalog, level);
  return level;
}

}  // namespace

Level synth_level(const ObjectCatalog& catalog, const SynthConfig& config, int index, const GridSpec& spec) {
  validate(config);
  for (int r = 0; r < config.max_retries; ++r) {
    Rng rng = make_rng(config.seed, "synth", static_cast<std::uint64_t>(index) * 1000 + static_cast<std::uint64_t>(r));
    Level level = attempt(catalog, config, spec, rng);
    if (level.objects.empty() || !check_stability(catalog, level).stable) continue;
    try {
      encode(catalog, spec, level);
    } catch (const DataError&) {
      continue;
    }
    return level;
  }
  throw DataError("synthetic level " + std::to_string(index) + ": no stable encodable level after " +
                  std::to_string(config.max_retries) + " attempts");
}

std::vector<Level> synth_dataset(const ObjectCatalog& catalog, const SynthConfig& config, const GridSpec& spec) {
  validate(config);
  std::vector<Level> levels;
  levels.reserve(static_cast<std::size_t>(config.n_levels));
  for (int i = 0; i < config.n_levels; ++i) levels.push_back(synth_level(catalog, config, i, spec));
  return levels;
}

void write_dataset(const std::vector<Level>& levels, const ObjectCatalog& catalog, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());
  std::ofstream manifest(fs::path(dir) / "manifest.txt");
  if (!manifest) throw DataError("cannot write manifest in '" + dir + "'");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    std::ostringstream name;
    name << "level_" << std::setw(5) << std::setfill('0') << i << ".xml";
    write_level_file(catalog, levels[i], (fs::path(dir) / name.str()).string());
    manifest << name.str() << '\n';
  }
}

std::vector<std::string> dataset_files(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw DataError("'" + dir + "' is not a directory");
  std::vector<std::string> files;
  std::ifstream manifest(root / "manifest.txt");
  if (manifest) {
    std::string line;
    while (std::getline(manifest, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) files.push_back((root / line).string());
    }
    return files;
  }
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_regular_file() && entry.path().extension() == ".xml") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace seqbirds
