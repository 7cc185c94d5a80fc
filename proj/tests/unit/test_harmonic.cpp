#include <gtest/gtest.h>

#include <fractal_hodge/derham.hpp>
#include <fractal_hodge/exact_linalg.hpp>
#include <fractal_hodge/harmonic.hpp>

#include "oracles.hpp"

using namespace fractal_hodge;

namespace {

std::vector<Rational> q(std::initializer_list<std::pair<long, long>> xs) {
  std::vector<Rational> out;
  for (auto [p, d] : xs) out.emplace_back(p, d);
  for (auto& r : out) r.canonicalize();
  return out;
}

bool is_harmonic(const ExactForm& h, const GasketGraph& g) {
  auto mu = unit_weights(g);
  for (const auto& v : assemble_d(g, 1).apply(h).values)
    if (sgn(v) != 0) return false;
  for (const auto& v : assemble_delta(g, mu, 1).apply(h).values)
    if (sgn(v) != 0) return false;
  return true;
}

}  // namespace

TEST(ExtensionRule, KnownRules) {
  EXPECT_EQ(extension_rule(2, 2).at({1, 1, 0}), q({{2, 5}, {2, 5}, {1, 5}}));
  EXPECT_EQ(extension_rule(2, 3).at({2, 1, 0}), q({{8, 15}, {4, 15}, {3, 15}}));
  EXPECT_EQ(extension_rule(3, 3).at({2, 1, 0, 0}), q({{28, 64}, {14, 64}, {11, 64}, {11, 64}}));
}

TEST(ExtensionRule, CentralPointAveragesCorners) {
  for (int n = 2; n <= 4; ++n) {
    auto rule = extension_rule(n, n + 1);
    for (const auto& w : rule.at(std::vector<Coord>(n + 1, 1))) EXPECT_EQ(w, Rational(1, n + 1));
  }
}

TEST(ExtensionRule, RowsAreOrderedProbabilityVectors) {
  for (int n = 2; n <= 4; ++n)
    for (int level = 2; level <= 4; ++level) {
      auto rule = extension_rule(n, level);
      for (const auto& [point, w] : rule.coefficients) {
        Rational sum = 0;
        for (const auto& x : w) {
          EXPECT_GE(sgn(x), 0);
          sum += x;
        }
        EXPECT_EQ(sum, 1);
        for (int i = 0; i <= n; ++i)
          for (int j = 0; j <= n; ++j) {
            if (point[i] > point[j]) EXPECT_GT(w[i], w[j]);
            if (point[i] == point[j]) EXPECT_EQ(w[i], w[j]);
          }
      }
    }
}

TEST(ExtensionRule, MeanValueAtInteriorPoints) {
  for (auto [n, level] : {std::pair{2, 3}, std::pair{3, 3}, std::pair{2, 4}}) {
    auto g = GasketGraph::build(n, level, 1);
    auto rule = extension_rule(n, level);
    auto value = [&](std::size_t v, int i) {
      auto c = g.vertex_coords(v);
      return rule.at(std::vector<Coord>(c.begin(), c.end()))[i];
    };
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
      if (g.is_boundary_vertex(v)) continue;
      for (int i = 0; i <= n; ++i) {
        Rational sum = 0;
        for (std::size_t y : g.neighbors(v)) sum += value(y, i);
        EXPECT_EQ(sum / long(g.degree(v)), value(v, i));
      }
    }
  }
}

TEST(ExtendZeroForm, ConstantsAndMeanValue) {
  auto coarse = GasketGraph::build(2, 3, 1);
  auto fine = GasketGraph::build(2, 3, 2);
  auto rule = extension_rule(2, 3);
  ExactForm one{0, 1, std::vector<Rational>(coarse.num_vertices(), Rational(1))};
  for (const auto& v : extend_zero_form(one, coarse, fine, rule).values) EXPECT_EQ(v, 1);

  oracle::RandomRationals rng(41);
  auto f = oracle::random_form(coarse, 0, rng);
  auto ext = extend_zero_form(f, coarse, fine, rule);
  for (std::size_t v = 0; v < coarse.num_vertices(); ++v) {
    auto c = coarse.vertex_coords(v);
    std::vector<Coord> scaled;
    for (auto x : c) scaled.push_back(3 * x);
    EXPECT_EQ(ext.values[*fine.find_vertex(scaled)], f.values[v]);
  }
  // New vertices are junctions inside a single coarse cell: mean value over neighbours.
  for (std::size_t v = 0; v < fine.num_vertices(); ++v) {
    auto c = fine.vertex_coords(v);
    bool retained = std::all_of(c.begin(), c.end(), [](Coord x) { return x % 3 == 0; });
    if (retained) continue;
    Rational sum = 0;
    for (std::size_t y : fine.neighbors(v)) sum += ext.values[y];
    EXPECT_EQ(sum / long(fine.degree(v)), ext.values[v]);
  }
}

TEST(ExtendZeroForm, MidpointRule) {
  auto coarse = GasketGraph::build(2, 2, 0);
  auto fine = GasketGraph::build(2, 2, 1);
  ExactForm f = zero_form<Rational>(coarse, 0);
  f.values[coarse.cell_corner(0, 0)] = 1;
  auto ext = extend_zero_form(f, coarse, fine, extension_rule(2, 2));
  EXPECT_EQ(ext.values[*fine.find_vertex(std::vector<Coord>{1, 1, 0})], Rational(2, 5));
  EXPECT_EQ(ext.values[*fine.find_vertex(std::vector<Coord>{1, 0, 1})], Rational(2, 5));
  EXPECT_EQ(ext.values[*fine.find_vertex(std::vector<Coord>{0, 1, 1})], Rational(1, 5));
}

TEST(Cycles, CountsAndIndependence) {
  const std::pair<std::tuple<int, int, int>, std::size_t> cases[] = {
      {{2, 2, 1}, 1}, {{2, 3, 1}, 3}, {{2, 2, 2}, 4}, {{2, 3, 2}, 21}, {{3, 2, 1}, 3}, {{3, 2, 2}, 15}};
  for (const auto& [params, expected] : cases) {
    auto [n, level, m] = params;
    auto g = GasketGraph::build(n, level, m);
    auto basis = cycle_basis(g);
    ASSERT_EQ(basis.cycles.size(), expected);
    // Homology rank oracle: dim ker boundary_1 - rank boundary_2.
    auto d0 = assemble_d(g, 0), d1 = assemble_d(g, 1);
    std::size_t h1 = (g.num_simplices(1) - rank(d0)) - rank(d1);
    EXPECT_EQ(basis.cycles.size(), h1);
    EchelonBasis span(g.num_simplices(1));
    for (std::size_t t = 0; t < g.num_simplices(2); ++t) {
      SparseRow row;
      for (const auto& [e, s] : facets(g, 2, t)) row.emplace(e, Rational(s));
      span.insert(row);
    }
    for (const auto& c : basis.cycles) {
      EXPECT_TRUE(boundary(g, c).empty());
      EXPECT_TRUE(span.insert(SparseRow(c.coefficients.begin(), c.coefficients.end())));
    }
  }
}

TEST(Cycles, PeriodNormalization) {
  for (auto [n, level] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}}) {
    auto g = GasketGraph::build(n, level, 1);
    auto basis = normalized_level_one_basis(g);
    auto p = cycle_integral_matrix(basis, level_one_cycles(g));
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j) EXPECT_EQ(p[i][j], i == j ? 1 : 0);
    for (const auto& h : basis) EXPECT_TRUE(is_harmonic(h, g));
  }
}

TEST(Cycles, ExactFormsHaveZeroPeriods) {
  auto g = GasketGraph::build(2, 3, 2);
  oracle::RandomRationals rng(43);
  auto df = assemble_d(g, 0).apply(oracle::random_form(g, 0, rng));
  for (const auto& row : cycle_integral_matrix({df}, cycle_basis(g).cycles)) EXPECT_EQ(row[0], 0);
}

TEST(ExtendOneForm, OneFormGrid) {
  for (auto [n, level] : {std::pair{2, 2}, std::pair{2, 3}, std::pair{3, 2}}) {
    auto g1 = GasketGraph::build(n, level, 1);
    auto g2 = GasketGraph::build(n, level, 2);
    auto rule = extension_rule(n, level);
    for (const auto& h : harmonic_space(g1, unit_weights(g1), 1).exact_basis) {
      auto ext = extend_one_form(h, g1, g2, rule, unit_weights(g1));
      EXPECT_TRUE(is_harmonic(ext, g2));
      EXPECT_TRUE(telescoping_violations(h, ext, g1, g2).empty());
    }
  }
}

TEST(ExtendOneForm, ZeroAndNonHarmonicInput) {
  auto g1 = GasketGraph::build(2, 2, 1);
  auto g2 = GasketGraph::build(2, 2, 2);
  auto rule = extension_rule(2, 2);
  auto zero = extend_one_form(zero_form<Rational>(g1, 1), g1, g2, rule, unit_weights(g1));
  for (const auto& v : zero.values) EXPECT_EQ(v, 0);
  ExactForm bad = zero_form<Rational>(g1, 1);
  bad.values[0] = 1;
  EXPECT_THROW(extend_one_form(bad, g1, g2, rule, unit_weights(g1)), VerificationFailure);
}

TEST(ExtendOneForm, TwoGenerationsStayHarmonic) {
  auto g1 = GasketGraph::build(2, 2, 1);
  auto g2 = GasketGraph::build(2, 2, 2);
  auto g3 = GasketGraph::build(2, 2, 3);
  auto rule = extension_rule(2, 2);
  auto h = normalized_level_one_basis(g1)[0];
  auto h2 = extend_one_form(h, g1, g2, rule, unit_weights(g1));
  auto h3 = extend_one_form(h2, g2, g3, rule, unit_weights(g2));
  EXPECT_TRUE(is_harmonic(h3, g3));
  EXPECT_TRUE(telescoping_violations(h, h3, g1, g3).empty());
}

TEST(Localize, HarmonicAndPeriods) {
  auto g1 = GasketGraph::build(2, 3, 1);
  auto g2 = GasketGraph::build(2, 3, 2);
  auto base = normalized_level_one_basis(g1);
  EXPECT_EQ(localize(base[0], Word{}, g1), base[0]);
  auto cycles = cycle_basis(g2);
  for (int letter = 0; letter < 6; ++letter)
    for (std::size_t j = 0; j < base.size(); ++j) {
      auto h = localize(base[j], Word{{letter}}, g2);
      EXPECT_TRUE(is_harmonic(h, g2));
      for (std::size_t i = 0; i < cycles.cycles.size(); ++i)
        if (cycles.words[i] == Word{{letter}}) EXPECT_EQ(integrate(h, cycles.cycles[i]), cycles.indices[i] == int(j) ? 1 : 0);
    }
  EXPECT_THROW(localize(base[0], Word{{0, 0}}, g2), DomainError);
}

TEST(Basis, DimensionsAndOrthogonality) {
  const std::tuple<int, int, int, std::size_t> cases[] = {
      {2, 2, 1, 1}, {2, 2, 2, 4}, {2, 3, 1, 3}, {2, 3, 2, 21}, {3, 2, 1, 3}, {3, 2, 2, 15}};
  for (auto [n, level, m, expected] : cases) {
    auto basis = harmonic_one_basis(n, level, m);
    EXPECT_EQ(basis.forms.size(), expected);
    EXPECT_EQ(basis.kernel_dimension, expected);
    auto g = GasketGraph::build(n, level, m);
    auto mu = unit_weights(g);
    for (std::size_t a = 0; a < basis.forms.size(); ++a)
      for (std::size_t b = a + 1; b < basis.forms.size(); ++b)
        if (basis.forms[a].word != basis.forms[b].word)
          EXPECT_EQ(inner_product(basis.forms[a].form, basis.forms[b].form, mu), 0);
  }
}

TEST(Basis, CycleSumsInsideCoarseCellsVanish) {
  // Downward triangles inside one coarse cell sum to its outer boundary, which
  // telescopes to the boundary of a coarse 2-simplex.
  for (int level = 2; level <= 4; ++level) {
    auto g1 = GasketGraph::build(2, level, 1);
    auto g2 = GasketGraph::build(2, level, 2);
    auto rule = extension_rule(2, level);
    auto cycles = cycle_basis(g2);
    for (const auto& h : normalized_level_one_basis(g1)) {
      auto h2 = extend_one_form(h, g1, g2, rule, unit_weights(g1));
      for (int letter = 0; letter < int(g1.num_maps()); ++letter) {
        Rational sum = 0;
        for (std::size_t i = 0; i < cycles.cycles.size(); ++i)
          if (cycles.words[i] == Word{{letter}}) sum += integrate(h2, cycles.cycles[i]);
        EXPECT_EQ(sum, 0);
      }
    }
  }
}
