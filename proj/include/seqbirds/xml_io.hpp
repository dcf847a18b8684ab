#pragma once

#include "seqbirds/catalog.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace seqbirds {

struct ParsedLevel {
  Level level;
  std::vector<std::string> warnings;
};

/// Parses a Science-Birds-style `<Level>` document. Object rotations are
/// snapped to the nearest rotation the catalog offers for the object's
/// (kind, material); every snap is reported in `warnings`. All failures are
/// reported as DataError.
ParsedLevel parse_level(const ObjectCatalog& catalog, std::string_view bytes);

std::string write_level(const ObjectCatalog& catalog, const Level& level);

/// Nearest of `available` to `degrees`, measured modulo 180. Ties go to the
/// smaller angle.
int snap_rotation(double degrees, const std::vector<int>& available);

Level read_level_file(const ObjectCatalog& catalog, const std::string& path);
void write_level_file(const ObjectCatalog& catalog, const Level& level, const std::string& path);

}  // namespace seqbirds
