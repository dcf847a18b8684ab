#include "seqbirds/render.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace seqbirds {

namespace {

const char* fill_for(const CatalogEntry& e) {
  switch (e.category) {
    case Category::pig:
      return "#6abf4b";
    case Category::tnt:
      return "#d9342b";
    case Category::platform:
      return "url(#hatch)";
    case Category::block:
      break;
  }
  switch (e.material) {
    case Material::wood:
      return "#c8a165";
    case Material::stone:
      return "#8c8c8c";
    case Material::ice:
      return "#a8d8f0";
    case Material::none:
      break;
  }
  return "#cccccc";
}

}  // namespace

std::string render_svg(const ObjectCatalog& catalog, const Level& level, const RenderOptions& opt) {
  double top = opt.ground_y + 7.0;
  for (const auto& o : level.objects) top = std::max(top, o.y + catalog.at(o.type_id).height / 2.0 + 0.5);
  const double bottom = opt.ground_y - 0.5;
  const double s = opt.px_per_unit;
  auto px = [&](double x) { return (x - opt.x_min) * s; };
  auto py = [&](double y) { return (top - y) * s; };

  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (opt.x_max - opt.x_min) * s << "\" height=\""
      << (top - bottom) * s << "\">\n";
  out << "  <defs><pattern id=\"hatch\" width=\"8\" height=\"8\" patternUnits=\"userSpaceOnUse\" "
         "patternTransform=\"rotate(45)\"><rect width=\"8\" height=\"8\" fill=\"#6b4f2a\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"8\" stroke=\"#2e2010\" stroke-width=\"3\"/></pattern></defs>\n";
  out << "  <rect width=\"100%\" height=\"100%\" fill=\"#eef6fb\"/>\n";
  out << "  <line x1=\"0\" y1=\"" << py(opt.ground_y) << "\" x2=\"" << px(opt.x_max) << "\" y2=\"" << py(opt.ground_y)
      << "\" stroke=\"#3b6b22\" stroke-width=\"3\"/>\n";
  for (const auto& o : level.objects) {
    const auto& e = catalog.at(o.type_id);
    const bool round = e.category == Category::pig || e.rolls;
    if (round) {
      out << "  <circle cx=\"" << px(o.x) << "\" cy=\"" << py(o.y) << "\" r=\"" << std::min(e.width, e.height) / 2.0 * s
          << "\" fill=\"" << fill_for(e) << "\" stroke=\"#222\" stroke-width=\"1\"/>\n";
    } else {
      out << "  <rect x=\"" << px(o.x - e.width / 2.0) << "\" y=\"" << py(o.y + e.height / 2.0) << "\" width=\""
          << e.width * s << "\" height=\"" << e.height * s << "\" fill=\"" << fill_for(e)
          << "\" stroke=\"#222\" stroke-width=\"1\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

void render_svg_file(const ObjectCatalog& catalog, const Level& level, const std::string& path,
                     const RenderOptions& options) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << render_svg(catalog, level, options);
}

}  // namespace seqbirds
