#pragma once

#include "seqbirds/catalog.hpp"
#include "seqbirds/codec.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

namespace testutil {

// Three plain boxes, a rolling ball, a pig, TNT and a platform.
inline seqbirds::ObjectCatalog toy_catalog() {
  using namespace seqbirds;
  return ObjectCatalog({
      {1, "Box", Material::wood, 0, 1.0, 0.5, Category::block, false},
      {2, "Thin", Material::stone, 0, 0.2, 0.4, Category::block, false},
      {3, "Wide", Material::ice, 0, 2.0, 0.25, Category::block, false},
      {4, "Ball", Material::stone, 0, 0.4, 0.4, Category::block, true},
      {5, "Pig", Material::none, 0, 0.5, 0.5, Category::pig, false},
      {6, "TNT", Material::none, 0, 0.5, 0.5, Category::tnt, false},
      {7, "Plat", Material::none, 0, 1.0, 0.3, Category::platform, false},
  });
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("seqbirds_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
