#pragma once

#include "seqbirds/catalog.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace seqbirds {

inline constexpr int kMaxRow = 30;
inline constexpr int kMaxCol = 94;

/// Drop-order encoding of a level: row t lists the object types dropped at
/// step t, one column per horizontal grid position. 0 is Space.
using LevelMatrix = Eigen::Matrix<int, kMaxRow, kMaxCol, Eigen::RowMajor>;

inline LevelMatrix empty_matrix() { return LevelMatrix::Zero(); }

struct GridSpec {
  double x_min = -4.7;
  double cell_width = 0.1;
  double ground_y = -3.5;
  double eps = 0.1;
};

class RowOverflow : public DataError {
 public:
  using DataError::DataError;
};

class CellCollision : public DataError {
 public:
  using DataError::DataError;
};

/// Column index of a world x, rounded half-to-even and clamped to the grid.
int float2ind(const GridSpec& spec, double x);
/// World x of a column. Throws DataError outside [0, kMaxCol).
double ind2float(const GridSpec& spec, int col);

struct EncodeOptions {
  // Let a later object replace an occupied cell instead of failing.
  bool overwrite = false;
};

LevelMatrix encode(const ObjectCatalog& catalog, const GridSpec& spec, const Level& level,
                   EncodeOptions options = {});

// Drop placement shared by decode and the physics settle routine.
bool is_under(const ObjectCatalog& catalog, const GameObject& placed, const CatalogEntry& candidate, double x);
double calc_y(const ObjectCatalog& catalog, const GameObject& placed, const CatalogEntry& candidate);
inline double update_platform_y(double platform_top, double current) { return std::max(platform_top, current); }

/// Drops objects one at a time onto the ground and previously dropped
/// objects; each lands on the highest support under it.
class DropPlacer {
 public:
  DropPlacer(const ObjectCatalog& catalog, const GridSpec& spec);

  const GameObject& drop(int type_id, double x);
  const std::vector<GameObject>& placed() const { return placed_; }
  double platform_y() const { return platform_y_; }

 private:
  const ObjectCatalog* catalog_;
  GridSpec spec_;
  std::vector<GameObject> placed_;  // ascending y
  double platform_y_;
};

struct DecodedLevel {
  Level level;
  double platform_y = 0.0;  // y of the highest platform, ground_y if none
};

DecodedLevel decode_with_trace(const ObjectCatalog& catalog, const GridSpec& spec, const LevelMatrix& matrix);
/// Level rebuilt by dropping every nonzero cell, rows bottom-up and columns
/// left to right. Bird count follows compute_n_birds.
Level decode(const ObjectCatalog& catalog, const GridSpec& spec, const LevelMatrix& matrix);

/// Row-major character sequences for the char-level baselines. Dense paints
/// every cell an object's footprint covers; sparse only its center cell.
std::vector<int> to_char_dense(const ObjectCatalog& catalog, const GridSpec& spec, const LevelMatrix& matrix,
                               int* clipped = nullptr);
std::vector<int> to_char_sparse(const ObjectCatalog& catalog, const GridSpec& spec, const Level& level);

std::string format_matrix(const LevelMatrix& matrix);
LevelMatrix parse_matrix(std::string_view text, int n_types);
LevelMatrix read_matrix_file(const std::string& path, int n_types);
void write_matrix_file(const LevelMatrix& matrix, const std::string& path);

}  // namespace seqbirds
