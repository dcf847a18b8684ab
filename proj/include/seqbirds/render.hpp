#pragma once

#include "seqbirds/catalog.hpp"

#include <string>

namespace seqbirds {

struct RenderOptions {
  double px_per_unit = 100.0;
  double x_min = -5.0;
  double x_max = 5.0;
  double ground_y = -3.5;
};

/// SVG drawing, y axis pointing up. One rect or circle per object.
std::string render_svg(const ObjectCatalog& catalog, const Level& level, const RenderOptions& options = {});
void render_svg_file(const ObjectCatalog& catalog, const Level& level, const std::string& path,
                     const RenderOptions& options = {});

}  // namespace seqbirds
