#include "seqbirds/catalog.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace seqbirds;

TEST(Catalog, DefaultHasSixtyOneTypes) {
  const auto c = default_catalog();
  EXPECT_EQ(c.n_types(), 61);
  Level all;
  for (int id = 1; id <= c.n_types(); ++id) all.objects.push_back({id, 0, 0, 0});
  EXPECT_EQ(count_category(c, all, Category::block), 57);
  EXPECT_EQ(count_category(c, all, Category::pig), 1);
  EXPECT_EQ(count_category(c, all, Category::tnt), 1);
  EXPECT_EQ(count_category(c, all, Category::platform), 2);
}

TEST(Catalog, DefaultIsDeterministic) { EXPECT_EQ(format_catalog(default_catalog()), format_catalog(default_catalog())); }

TEST(Catalog, IdZeroIsSpace) {
  const auto c = default_catalog();
  EXPECT_FALSE(c.contains(0));
  EXPECT_THROW(c.at(0), DataError);
  EXPECT_THROW(c.at(62), DataError);
}

TEST(Catalog, LookupsAreMutuallyInverse) {
  const auto c = default_catalog();
  const auto& e7 = c.at(7);
  const auto* found = c.find(e7.kind_name, e7.material, e7.rotation);
  ASSERT_NE(found, nullptr);
  EXPECT_EQ(found->type_id, 7);
  for (const auto& e : c.entries()) {
    const auto* f = c.find(e.kind_name, e.material, e.rotation);
    ASSERT_NE(f, nullptr);
    EXPECT_EQ(&c.at(f->type_id), f);
    EXPECT_EQ(f->type_id, e.type_id);
  }
}

TEST(Catalog, RotatedExtentsSwapForRightAngles) {
  const auto c = default_catalog();
  const auto* flat = c.find("RectSmall", Material::wood, 0);
  const auto* upright = c.find("RectSmall", Material::wood, 90);
  ASSERT_TRUE(flat && upright);
  EXPECT_NEAR(flat->width, upright->height, 1e-9);
  EXPECT_NEAR(flat->height, upright->width, 1e-9);
}

TEST(Catalog, ParseThreeEntries) {
  const auto c = parse_catalog(
      "# a comment\n"
      "1;Box;wood;0;1.0;0.5;Block\n"
      "2;Pig;none;0;0.5;0.5;Pig\n"
      "\n"
      "3;Ball;stone;0;0.4;0.4;Block;1\n");
  EXPECT_EQ(c.n_types(), 3);
  EXPECT_TRUE(c.at(3).rolls);
  EXPECT_FALSE(c.at(1).rolls);
  EXPECT_EQ(c.at(2).category, Category::pig);
}

TEST(Catalog, DuplicateIdIsRejected) {
  try {
    parse_catalog("5;A;wood;0;1;1;Block\n5;B;wood;0;1;1;Block\n");
    FAIL() << "expected a duplicate-id error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(Catalog, EmptyFileIsRejected) {
  try {
    parse_catalog("# nothing\n\n");
    FAIL() << "expected an error";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("catalog must contain at least one entry"), std::string::npos);
  }
}

TEST(Catalog, ParseErrorsCarryLineNumbers) {
  try {
    parse_catalog("1;Box;wood;0;1.0;0.5;Block\n2;Box;wood;zero;1.0;0.5;Block\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_catalog("1;Box;gold;0;1;1;Block\n"), DataError);
  EXPECT_THROW(parse_catalog("1;Box;wood;0;-1;1;Block\n"), DataError);
  EXPECT_THROW(parse_catalog("1;Box;wood;0;1;1\n"), DataError);
  EXPECT_THROW(parse_catalog("2;Box;wood;0;1;1;Block\n"), DataError);
}

TEST(Catalog, FormatParseRoundTrip) {
  const auto c = default_catalog();
  const auto back = parse_catalog(format_catalog(c));
  ASSERT_EQ(back.n_types(), c.n_types());
  for (int id = 1; id <= c.n_types(); ++id) {
    EXPECT_EQ(back.at(id).kind_name, c.at(id).kind_name);
    EXPECT_EQ(back.at(id).rotation, c.at(id).rotation);
    EXPECT_NEAR(back.at(id).width, c.at(id).width, 1e-9);
    EXPECT_EQ(back.at(id).rolls, c.at(id).rolls);
  }
}

TEST(Catalog, LoadFromFile) {
  const auto dir = testutil::temp_dir("catalog");
  const auto path = (dir / "cat.txt").string();
  { std::ofstream(path) << "1;Box;wood;0;1.0;0.5;Block\n"; }
  EXPECT_EQ(load_catalog(path).n_types(), 1);
  EXPECT_THROW(load_catalog((dir / "missing.txt").string()), DataError);
}

TEST(Footprint, Examples) {
  const ObjectCatalog c({{1, "Box", Material::wood, 0, 1.0, 0.5, Category::block, false},
                         {2, "Thin", Material::wood, 0, 0.2, 0.1, Category::block, false}});
  auto f = footprint(c, {1, 2.0, 0.0, 0});
  EXPECT_DOUBLE_EQ(f.span.lo, 1.5);
  EXPECT_DOUBLE_EQ(f.span.hi, 2.5);
  EXPECT_DOUBLE_EQ(f.height, 0.5);
  f = footprint(c, {2, 0.0, 0.0, 0});
  EXPECT_DOUBLE_EQ(f.span.lo, -0.1);
  EXPECT_DOUBLE_EQ(f.span.hi, 0.1);
  EXPECT_THROW(footprint(c, {9, 0, 0, 0}), DataError);
}

TEST(Footprint, TouchingIntervalsDoNotOverlap) {
  EXPECT_FALSE(overlaps({0, 1}, {1, 2}));
  EXPECT_FALSE(overlaps({0, 1}, {2, 3}));
  EXPECT_TRUE(overlaps({0, 1}, {0.5, 2}));
}
