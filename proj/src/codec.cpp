#include "seqbirds/codec.hpp"

#include "seqbirds/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace seqbirds {

int float2ind(const GridSpec& spec, double x) {
  const double pos = std::nearbyint((x - spec.x_min) / spec.cell_width);
  if (!(pos > 0.0)) return 0;
  if (pos > kMaxCol - 1) return kMaxCol - 1;
  return static_cast<int>(pos);
}

double ind2float(const GridSpec& spec, int col) {
  if (col < 0 || col >= kMaxCol) throw DataError("column " + std::to_string(col) + " outside the grid");
  return spec.x_min + col * spec.cell_width;
}

LevelMatrix encode(const ObjectCatalog& catalog, const GridSpec& spec, const Level& level, EncodeOptions options) {
  std::vector<GameObject> objects = level.objects;
  for (const auto& o : objects) catalog.at(o.type_id);
  std::sort(objects.begin(), objects.end(), [](const GameObject& a, const GameObject& b) {
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.type_id < b.type_id;
  });

  LevelMatrix m = empty_matrix();
  int row = 0;
  double y = spec.ground_y;
  bool first = true;
  for (const auto& obj : objects) {
    // The lowest object always opens row 0.
    if (!first && obj.y - y >= spec.eps) ++row;
    first = false;
    y = obj.y;
    if (row >= kMaxRow) throw RowOverflow("level needs more than " + std::to_string(kMaxRow) + " rows");
    const int col = float2ind(spec, obj.x);
    if (m(row, col) != 0 && !options.overwrite)
      throw CellCollision("cell (" + std::to_string(row) + ", " + std::to_string(col) + ") already holds type " +
                          std::to_string(m(row, col)));
    m(row, col) = obj.type_id;
  }
  return m;
}

bool is_under(const ObjectCatalog& catalog, const GameObject& placed, const CatalogEntry& candidate, double x) {
  if (candidate.category == Category::platform) return true;
  const Interval cand{x - candidate.width / 2.0, x + candidate.width / 2.0};
  return overlaps(footprint(catalog, placed).span, cand);
}

double calc_y(const ObjectCatalog& catalog, const GameObject& placed, const CatalogEntry& candidate) {
  const double top = placed.y + catalog.at(placed.type_id).height / 2.0;
  return top + candidate.height / 2.0;
}

DropPlacer::DropPlacer(const ObjectCatalog& catalog, const GridSpec& spec)
    : catalog_(&catalog), spec_(spec), platform_y_(spec.ground_y) {}

const GameObject& DropPlacer::drop(int type_id, double x) {
  const auto& entry = catalog_->at(type_id);
  double y = spec_.ground_y + entry.height / 2.0;
  for (const auto& other : placed_)
    if (is_under(*catalog_, other, entry, x)) y = std::max(y, calc_y(*catalog_, other, entry));
  if (entry.category == Category::platform) platform_y_ = update_platform_y(y, platform_y_);
  GameObject obj{type_id, x, y, static_cast<double>(entry.rotation)};
  auto pos = std::upper_bound(placed_.begin(), placed_.end(), obj,
                              [](const GameObject& a, const GameObject& b) { return a.y < b.y; });
  return *placed_.insert(pos, obj);
}

DecodedLevel decode_with_trace(const ObjectCatalog& catalog, const GridSpec& spec, const LevelMatrix& matrix) {
  DropPlacer placer(catalog, spec);
  DecodedLevel out;
  for (int row = 0; row < kMaxRow; ++row) {
    for (int col = 0; col < kMaxCol; ++col) {
      const int type = matrix(row, col);
      if (type == 0) continue;
      const auto& obj = placer.drop(type, ind2float(spec, col));
      out.level.objects.push_back(obj);
    }
  }
  out.platform_y = placer.platform_y();
  out.level.n_birds = compute_n_birds(catalog, out.level);
  return out;
}

Level decode(const ObjectCatalog& catalog, const GridSpec& spec, const LevelMatrix& matrix) {
  return decode_with_trace(catalog, spec, matrix).level;
}

std::vector<int> to_char_dense(const ObjectCatalog& catalog, const GridSpec& spec, const LevelMatrix& matrix,
                               int* clipped) {
  std::vector<int> out(static_cast<std::size_t>(kMaxRow * kMaxCol), 0);
  int n_clipped = 0;
  for (int row = 0; row < kMaxRow; ++row) {
    for (int col = 0; col < kMaxCol; ++col) {
      const int type = matrix(row, col);
      if (type == 0) continue;
      const auto& e = catalog.at(type);
      const double x = ind2float(spec, col);
      const Interval span{x - e.width / 2.0, x + e.width / 2.0};
      const int reach = static_cast<int>(std::ceil(e.width / spec.cell_width)) + 1;
      for (int c = col - reach; c <= col + reach; ++c) {
        const double cx = spec.x_min + c * spec.cell_width;
        const Interval cell{cx - spec.cell_width / 2.0, cx + spec.cell_width / 2.0};
        if (!overlaps(span, cell)) continue;
        if (c < 0 || c >= kMaxCol) {
          ++n_clipped;
          continue;
        }
        out[static_cast<std::size_t>(row * kMaxCol + c)] = type;
      }
    }
  }
  if (clipped) *clipped = n_clipped;
  return out;
}

std::vector<int> to_char_sparse(const ObjectCatalog& catalog, const GridSpec& spec, const Level& level) {
  const LevelMatrix m = encode(catalog, spec, level, {.overwrite = true});
  return {m.data(), m.data() + m.size()};
}

std::string format_matrix(const LevelMatrix& matrix) {
  std::ostringstream out;
  for (int r = 0; r < kMaxRow; ++r) {
    for (int c = 0; c < kMaxCol; ++c) {
      if (c) out << ',';
      out << matrix(r, c);
    }
    out << '\n';
  }
  return out.str();
}

LevelMatrix parse_matrix(std::string_view text, int n_types) {
  LevelMatrix m = empty_matrix();
  std::istringstream in{std::string(text)};
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row >= kMaxRow) {
      if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
      throw DataError("matrix has more than " + std::to_string(kMaxRow) + " lines");
    }
    std::istringstream cells(line);
    std::string cell;
    int col = 0;
    while (std::getline(cells, cell, ',')) {
      if (col >= kMaxCol) throw DataError("matrix line " + std::to_string(row + 1) + " has too many columns");
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cell.size())
        throw DataError("matrix line " + std::to_string(row + 1) + ": bad integer '" + cell + "'");
      if (v < 0 || v > n_types)
        throw DataError("matrix line " + std::to_string(row + 1) + ": type id " + std::to_string(v) + " out of range");
      m(row, col++) = v;
    }
    if (col != kMaxCol)
      throw DataError("matrix line " + std::to_string(row + 1) + " has " + std::to_string(col) + " columns");
    ++row;
  }
  if (row != kMaxRow) throw DataError("matrix has " + std::to_string(row) + " lines, expected 30");
  return m;
}

LevelMatrix read_matrix_file(const std::string& path, int n_types) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open matrix file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str(), n_types);
}

void write_matrix_file(const LevelMatrix& matrix, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << format_matrix(matrix);
}

}  // namespace seqbirds
