#include <gtest/gtest.h>

#include <fractal_hodge/errors.hpp>
#include <fractal_hodge/gasket.hpp>

#include <cmath>
#include <set>

#include "oracles.hpp"

using namespace fractal_hodge;

TEST(CellMaps, CountMatchesBinomialOverGrid) {
  for (int n = 2; n <= 6; ++n)
    for (int level = 2; level <= 6; ++level)
      EXPECT_EQ(enumerate_cell_maps(n, level).size(), binomial(n + level - 1, n)) << n << "," << level;
}

TEST(CellMaps, AgreesWithBruteForceAndIsSorted) {
  for (int n = 1; n <= 4; ++n)
    for (int level = 1; level <= 4; ++level) {
      auto maps = enumerate_cell_maps(n, level);
      auto expected = oracle::offsets(n, level);
      ASSERT_EQ(maps.size(), expected.size());
      for (std::size_t i = 0; i < maps.size(); ++i) EXPECT_EQ(maps[i].offsets, expected[i]);
    }
}

TEST(CellMaps, PascalRecurrence) {
  for (int n = 2; n <= 6; ++n)
    for (int level = 2; level <= 6; ++level)
      EXPECT_EQ(enumerate_cell_maps(n, level).size(),
                enumerate_cell_maps(n - 1, level).size() + enumerate_cell_maps(n, level - 1).size());
}

TEST(CellMaps, SmallCases) {
  auto maps = enumerate_cell_maps(2, 2);
  ASSERT_EQ(maps.size(), 3u);
  EXPECT_EQ(maps[0].offsets, (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(maps[2].offsets, (std::vector<int>{1, 0, 0}));
  EXPECT_EQ(enumerate_cell_maps(3, 3).size(), 10u);
}

TEST(VertexCount, RecursionValues) {
  EXPECT_EQ(count_vertices(2, 2, 1), 6u);
  EXPECT_EQ(count_vertices(2, 3, 2), 52u);
  for (int n = 2; n <= 5; ++n) EXPECT_EQ(count_vertices(n, 3, 0), static_cast<std::uint64_t>(n + 1));
  for (int n = 2; n <= 6; ++n)
    for (int level = 2; level <= 6; ++level)
      EXPECT_EQ(count_vertices(n, level, 1), count_vertices_level_one(n, level));
}

TEST(VertexCount, BuiltGraphMatchesRecursionAndBruteForce) {
  for (int n = 2; n <= 4; ++n)
    for (int level = 2; level <= 4; ++level)
      for (int m = 0; m <= 2; ++m) {
        if (estimated_simplex_count(n, level, m) > 200000) continue;
        auto g = GasketGraph::build(n, level, m);
        EXPECT_EQ(g.num_vertices(), count_vertices(n, level, m)) << n << level << m;
        if (m == 1) EXPECT_EQ(g.num_vertices(), binomial(n + level, n));
        if (std::pow(binomial(n + level - 1, n), m) <= 400)
          EXPECT_EQ(g.num_vertices(), oracle::vertex_multiplicities(n, level, m).size());
      }
}

TEST(Build, SmallGraphs) {
  auto g = GasketGraph::build(2, 2, 1);
  EXPECT_EQ(g.num_vertices(), 6u);
  EXPECT_EQ(g.num_simplices(1), 9u);
  EXPECT_EQ(g.num_simplices(2), 3u);
  auto h = GasketGraph::build(2, 3, 1);
  EXPECT_EQ(h.num_vertices(), 10u);
  EXPECT_EQ(h.num_simplices(1), 18u);
  for (int n = 2; n <= 4; ++n) {
    auto g0 = GasketGraph::build(n, 3, 0);
    EXPECT_EQ(g0.num_vertices(), static_cast<std::size_t>(n + 1));
    EXPECT_EQ(g0.num_simplices(1), binomial(n + 1, 2));
    EXPECT_EQ(g0.num_simplices(2), binomial(n + 1, 3));
    for (std::size_t v = 0; v < g0.num_vertices(); ++v) EXPECT_EQ(g0.degree(v), static_cast<std::size_t>(n));
  }
}

TEST(Build, CornersAndSimplexOrientation) {
  auto g = GasketGraph::build(3, 3, 2);
  auto maps = oracle::offsets(3, 3);
  for (std::size_t id = 0; id < g.num_simplices(2); id += 7) {
    Simplex s = g.simplex(2, id);
    for (std::size_t j = 0; j < s.vertex_ids.size(); ++j) {
      auto p = oracle::apply_word(maps, 3, s.word.letters, oracle::corner(3, s.local_face[j]));
      auto coords = g.vertex_coords(s.vertex_ids[j]);
      for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i] * 9, Rational(coords[i]));
    }
  }
}

TEST(Build, SimplexVertexSetsAreUnique) {
  for (auto [n, level] : {std::pair{2, 3}, std::pair{3, 2}, std::pair{2, 4}}) {
    auto g = GasketGraph::build(n, level, 2);
    for (int k = 1; k <= n; ++k) {
      std::set<std::vector<std::size_t>> seen;
      for (std::size_t id = 0; id < g.num_simplices(k); ++id) {
        auto v = g.simplex_vertices(k, id);
        std::sort(v.begin(), v.end());
        EXPECT_TRUE(seen.insert(v).second);
      }
    }
  }
}

TEST(Build, WordsRoundTrip) {
  auto g = GasketGraph::build(2, 3, 2);
  for (std::size_t c = 0; c < g.num_cells(); ++c) EXPECT_EQ(g.cell_of_word(g.word_of_cell(c)), c);
  EXPECT_EQ(g.word_of_cell(7).letters, (std::vector<int>{1, 1}));
}

TEST(Build, CapRefusesLargeGraphs) {
  EXPECT_THROW(GasketGraph::build(3, 4, 4, 1000), ResourceError);
  EXPECT_NO_THROW(GasketGraph::build(2, 2, 1, 100));
}

TEST(Build, FindVertex) {
  auto g = GasketGraph::build(2, 3, 1);
  std::vector<Coord> center{1, 1, 1};
  auto v = g.find_vertex(center);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(g.multiplicity(*v), 3);
  std::vector<Coord> bogus{1, 1, 2};
  EXPECT_FALSE(g.find_vertex(bogus).has_value());
}

TEST(Classes, TripleJunctionCounts) {
  auto c31 = classify_vertices(GasketGraph::build(2, 3, 1));
  ASSERT_GT(c31.size(), 3u);
  EXPECT_EQ(c31[3].size(), 1u);
  auto c32 = classify_vertices(GasketGraph::build(2, 3, 2));
  EXPECT_EQ(c32[3].size(), 7u);
  auto c41 = classify_vertices(GasketGraph::build(2, 4, 1));
  EXPECT_EQ(c41[3].size(), 3u);
  auto c42 = classify_vertices(GasketGraph::build(2, 4, 2));
  EXPECT_EQ(c42[3].size(), 33u);
  auto c51 = classify_vertices(GasketGraph::build(2, 5, 1));
  EXPECT_EQ(c51[3].size(), 6u);
  auto c52 = classify_vertices(GasketGraph::build(2, 5, 2));
  EXPECT_EQ(c52[3].size(), 96u);
}

TEST(Classes, PartitionAndBounds) {
  for (int n = 2; n <= 4; ++n)
    for (int level = 2; level <= 4; ++level)
      for (int m = 1; m <= 2; ++m) {
        if (estimated_simplex_count(n, level, m) > 200000) continue;
        auto g = GasketGraph::build(n, level, m);
        auto classes = classify_vertices(g);
        std::size_t total = 0;
        for (const auto& c : classes) total += c.size();
        EXPECT_EQ(total, g.num_vertices());
        EXPECT_TRUE(classes[0].empty());
        EXPECT_LE(classes.size() - 1, static_cast<std::size_t>(std::min(level, n + 1)));
      }
}

TEST(Classes, MultiplicityMatchesBruteForce) {
  auto g = GasketGraph::build(2, 4, 2);
  for (const auto& [p, count] : oracle::vertex_multiplicities(2, 4, 2)) {
    std::vector<Coord> coords;
    for (const auto& x : p) coords.push_back(Rational(x * 16).get_num().get_si());
    auto v = g.find_vertex(coords);
    ASSERT_TRUE(v.has_value());
    EXPECT_EQ(g.multiplicity(*v), count);
  }
}

TEST(Degree, CornersAndJunctions) {
  for (int n = 2; n <= 3; ++n) {
    auto g = GasketGraph::build(n, 2, 2);
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
      if (g.is_boundary_vertex(v)) EXPECT_EQ(g.degree(v), static_cast<std::size_t>(n));
      if (g.multiplicity(v) == 2) EXPECT_EQ(g.degree(v), static_cast<std::size_t>(2 * n));
    }
  }
  auto g = GasketGraph::build(2, 2, 1);
  EXPECT_THROW(g.degree(99), DomainError);
}

TEST(Tables, FromTablesReproducesBuild) {
  auto g = GasketGraph::build(3, 2, 2);
  std::vector<Coord> coords;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    auto c = g.vertex_coords(v);
    coords.insert(coords.end(), c.begin(), c.end());
  }
  std::vector<std::size_t> corners;
  for (std::size_t c = 0; c < g.num_cells(); ++c)
    for (int j = 0; j <= 3; ++j) corners.push_back(g.cell_corner(c, j));
  EXPECT_EQ(GasketGraph::from_tables(3, 2, 2, coords, corners), g);
  corners[5] = corners[6];
  EXPECT_THROW(GasketGraph::from_tables(3, 2, 2, coords, corners), FormatError);
}
