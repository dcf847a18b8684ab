#include "seqbirds/synth.hpp"

#include "seqbirds/physics.hpp"
#include "seqbirds/xml_io.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace seqbirds;

TEST(Synth, ZeroLevels) {
  SynthConfig cfg;
  cfg.n_levels = 0;
  EXPECT_TRUE(synth_dataset(default_catalog(), cfg).empty());
}

TEST(Synth, CorpusIsStableAndEncodable) {
  const auto catalog = default_catalog();
  SynthConfig cfg;
  cfg.seed = 7;
  const auto levels = synth_dataset(catalog, cfg);
  ASSERT_EQ(levels.size(), 200u);
  int pigs = 0, platforms = 0;
  for (const auto& l : levels) {
    EXPECT_FALSE(l.objects.empty());
    EXPECT_TRUE(check_stability(catalog, l).stable);
    EXPECT_NO_THROW(encode(catalog, GridSpec{}, l));
    pigs += count_category(catalog, l, Category::pig);
    platforms += count_category(catalog, l, Category::platform);
  }
  EXPECT_GT(pigs, 200);
  EXPECT_GT(platforms, 0);
}

TEST(Synth, LevelsAreDeterministicAndIndependent) {
  const auto catalog = default_catalog();
  SynthConfig cfg;
  cfg.n_levels = 10;
  cfg.seed = 5;
  const auto a = synth_dataset(catalog, cfg);
  const auto b = synth_dataset(catalog, cfg);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].objects, b[i].objects);
    EXPECT_EQ(synth_level(catalog, cfg, static_cast<int>(i)).objects, a[i].objects);
  }
  cfg.seed = 6;
  const auto c = synth_dataset(catalog, cfg);
  int same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i].objects == c[i].objects;
  EXPECT_LT(same, 10);
}

TEST(Synth, ConfigValidation) {
  SynthConfig cfg;
  cfg.n_levels = -1;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.towers_min = 4;
  cfg.towers_max = 2;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.pig_prob = 1.5;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  cfg = {};
  cfg.height_min = 0;
  EXPECT_THROW(validate(cfg), std::invalid_argument);
  EXPECT_NO_THROW(validate(SynthConfig{}));
}

TEST(Synth, DatasetDirectoryRoundTrip) {
  const auto catalog = default_catalog();
  const auto dir = testutil::temp_dir("synth");
  SynthConfig cfg;
  cfg.n_levels = 5;
  const auto levels = synth_dataset(catalog, cfg);
  write_dataset(levels, catalog, dir.string());
  const auto files = dataset_files(dir.string());
  ASSERT_EQ(files.size(), 5u);
  for (std::size_t i = 0; i < files.size(); ++i)
    EXPECT_EQ(encode(catalog, GridSpec{}, read_level_file(catalog, files[i])),
              encode(catalog, GridSpec{}, levels[i]));
  std::filesystem::remove(dir / "manifest.txt");
  EXPECT_EQ(dataset_files(dir.string()).size(), 5u);
  EXPECT_THROW(dataset_files((dir / "nope").string()), DataError);
}
