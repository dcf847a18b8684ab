#include "seqbirds/xml_io.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace seqbirds {

namespace pt = boost::property_tree;

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void serialize_node(std::ostream& out, const std::string& name, const pt::ptree& node, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  out << pad << '<' << name;
  if (auto attrs = node.get_child_optional("<xmlattr>")) {
    for (const auto& [key, value] : *attrs) out << ' ' << key << "=\"" << escape(value.data()) << '"';
  }
  bool has_children = false;
  for (const auto& [key, child] : node)
    if (key != "<xmlattr>" && key != "<xmlcomment>") has_children = true;
  const std::string& text = node.data();
  if (!has_children && text.empty()) {
    out << "/>\n";
    return;
  }
  out << '>';
  if (!text.empty()) out << escape(text);
  if (has_children) {
    out << '\n';
    for (const auto& [key, child] : node)
      if (key != "<xmlattr>" && key != "<xmlcomment>") serialize_node(out, key, child, indent + 1);
    out << pad;
  }
  out << "</" << name << ">\n";
}

double parse_real(const pt::ptree& attrs, const char* key, const std::string& where) {
  auto raw = attrs.get_optional<std::string>(key);
  if (!raw) throw DataError(where + ": missing attribute '" + key + "'");
  std::istringstream in(*raw);
  in.imbue(std::locale::classic());
  double v = 0.0;
  in >> v;
  if (!in || !(in >> std::ws).eof()) throw DataError(where + ": attribute '" + key + "' is not a number");
  if (!std::isfinite(v)) throw DataError(where + ": attribute '" + key + "' is not finite");
  return v;
}

std::string format_coord(double v) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << std::fixed << std::setprecision(4) << v;
  std::string s = out.str();
  if (s == "-0.0000") s = "0.0000";
  return s;
}

}  // namespace

int snap_rotation(double degrees, const std::vector<int>& available) {
  if (available.empty()) throw DataError("no rotations available");
  double norm = std::fmod(degrees, 180.0);
  if (norm < 0.0) norm += 180.0;
  int best = available.front();
  double best_dist = 1e300;
  for (int r : available) {
    double d = std::abs(norm - std::fmod(static_cast<double>(r), 180.0));
    d = std::min(d, 180.0 - d);
    if (d < best_dist - 1e-9) {
      best_dist = d;
      best = r;
    }
  }
  return best;
}

ParsedLevel parse_level(const ObjectCatalog& catalog, std::string_view bytes) {
  pt::ptree doc;
  try {
    std::string buf(bytes);
    std::istringstream in(buf);
    pt::read_xml(in, doc, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw DataError("malformed XML at line " + std::to_string(e.line()) + ": " + e.message());
  } catch (const std::exception& e) {
    throw DataError(std::string("malformed XML: ") + e.what());
  }

  try {
    auto root = doc.get_child_optional("Level");
    if (!root) throw DataError("missing <Level> root element");
    std::size_t roots = 0;
    for (const auto& [key, child] : doc)
      if (key != "<xmlcomment>") ++roots;
    if (roots != 1) throw DataError("document must have exactly one root element");

    ParsedLevel out;
    bool saw_birds = false;
    bool saw_objects = false;
    for (const auto& [key, node] : *root) {
      if (key == "<xmlattr>" || key == "<xmlcomment>") continue;
      if (key == "Birds") {
        saw_birds = true;
        for (const auto& [bkey, bird] : node)
          if (bkey == "Bird") ++out.level.n_birds;
      } else if (key == "GameObjects") {
        saw_objects = true;
        int index = 0;
        for (const auto& [kind, obj] : node) {
          if (kind == "<xmlattr>" || kind == "<xmlcomment>") continue;
          const std::string where = "GameObjects child " + std::to_string(index++) + " <" + kind + ">";
          auto category = parse_category(kind);
          if (!category) throw DataError(where + ": unknown element kind");
          const pt::ptree empty;
          const auto& attrs = obj.get_child("<xmlattr>", empty);
          std::string type = attrs.get<std::string>("type", "");
          std::string mat_raw = attrs.get<std::string>("material", "");
          auto material = parse_material(mat_raw);
          if (!material) throw DataError(where + ": unknown material '" + mat_raw + "'");
          if (*category == Category::block && *material == Material::none)
            throw DataError(where + ": Block requires a material");
          if (*category != Category::block) material = Material::none;
          if (type.empty() && *category != Category::block) {
            for (const auto& e : catalog.entries())
              if (e.category == *category) {
                type = e.kind_name;
                break;
              }
          }
          GameObject g;
          g.x = parse_real(attrs, "x", where);
          g.y = parse_real(attrs, "y", where);
          double rotation = attrs.get_optional<std::string>("rotation") ? parse_real(attrs, "rotation", where) : 0.0;
          auto available = catalog.rotations(type, *material);
          if (available.empty())
            throw DataError(where + ": unknown (kind, material) pair (" + type + ", " +
                            std::string(to_string(*material)) + ")");
          int snapped = snap_rotation(rotation, available);
          if (std::abs(rotation - snapped) > 1e-6) {
            std::ostringstream w;
            w << where << ": rotation " << rotation << " snapped to " << snapped;
            out.warnings.push_back(w.str());
          }
          const CatalogEntry* entry = catalog.find(type, *material, snapped);
          if (entry->category != *category)
            throw DataError(where + ": type '" + type + "' is not a " + std::string(to_string(*category)));
          g.type_id = entry->type_id;
          g.rotation = snapped;
          out.level.objects.push_back(g);
        }
      } else {
        std::ostringstream s;
        serialize_node(s, key, node, 1);
        out.level.passthrough.push_back(s.str());
      }
    }
    if (!saw_birds) throw DataError("missing <Birds> element");
    if (!saw_objects) throw DataError("missing <GameObjects> element");
    return out;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception& e) {
    throw DataError(std::string("invalid level document: ") + e.what());
  }
}

std::string write_level(const ObjectCatalog& catalog, const Level& level) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  out << "<Level>\n";
  for (const auto& frag : level.passthrough) out << frag;
  if (level.n_birds == 0) {
    out << "  <Birds/>\n";
  } else {
    out << "  <Birds>\n";
    for (int i = 0; i < level.n_birds; ++i) out << "    <Bird type=\"BirdRed\"/>\n";
    out << "  </Birds>\n";
  }
  if (level.objects.empty()) {
    out << "  <GameObjects/>\n";
  } else {
    out << "  <GameObjects>\n";
    for (const auto& o : level.objects) {
      const auto& e = catalog.at(o.type_id);
      const std::string material = e.category == Category::block ? std::string(to_string(e.material)) : "";
      out << "    <" << to_string(e.category) << " type=\"" << escape(e.kind_name) << "\" material=\"" << material
          << "\" x=\"" << format_coord(o.x) << "\" y=\"" << format_coord(o.y) << "\" rotation=\"" << e.rotation
          << "\"/>\n";
    }
    out << "  </GameObjects>\n";
  }
  out << "</Level>\n";
  return out.str();
}

Level read_level_file(const ObjectCatalog& catalog, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open level file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_level(catalog, ss.str()).level;
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_level_file(const ObjectCatalog& catalog, const Level& level, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << write_level(catalog, level);
}

}  // namespace seqbirds
