#pragma once

#include "seqbirds/catalog.hpp"
#include "seqbirds/codec.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace seqbirds {

struct SynthConfig {
  int n_levels = 200;
  std::uint64_t seed = 0;
  int towers_min = 1;
  int towers_max = 6;
  int height_min = 2;
  int height_max = 8;
  double pig_prob = 0.5;
  double tnt_prob = 0.15;
  double platform_prob = 0.2;
  int max_retries = 100;
};

void validate(const SynthConfig& config);

/// Column-aligned tower levels, each checked stable and encodable.
std::vector<Level> synth_dataset(const ObjectCatalog& catalog, const SynthConfig& config, const GridSpec& spec = {});

/// Level `index` of the corpus for `config`; independent of the other levels.
Level synth_level(const ObjectCatalog& catalog, const SynthConfig& config, int index, const GridSpec& spec = {});

/// Writes level_NNNNN.xml files and manifest.txt (one file name per line).
void write_dataset(const std::vector<Level>& levels, const ObjectCatalog& catalog, const std::string& dir);

/// Levels listed in DIR/manifest.txt, or every *.xml file in name order.
std::vector<std::string> dataset_files(const std::string& dir);

}  // namespace seqbirds
