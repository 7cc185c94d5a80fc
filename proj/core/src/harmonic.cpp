#include "fractal_hodge/harmonic.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "fractal_hodge/derham.hpp"
#include "fractal_hodge/errors.hpp"
#include "fractal_hodge/exact_linalg.hpp"

namespace fractal_hodge {

namespace {

std::vector<Coord> local_point(const CellOffset& offset, int j) {
  std::vector<Coord> p(offset.offsets.begin(), offset.offsets.end());
  p[j] += 1;
  return p;
}

std::size_t edge_rank(const GasketGraph& g, int a, int b) {
  const int face[2] = {std::min(a, b), std::max(a, b)};
  return g.face_rank(face);
}

Word word_from_index(std::size_t index, std::size_t alphabet, int length) {
  Word w;
  w.letters.assign(length, 0);
  for (int i = length - 1; i >= 0; --i) {
    w.letters[i] = static_cast<int>(index % alphabet);
    index /= alphabet;
  }
  return w;
}

std::uint64_t power(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

/// Letters k whose offset vanishes outside {a, b}: the cells along edge [q_a, q_b].
std::vector<std::size_t> letters_along_edge(const std::vector<CellOffset>& maps, int a, int b) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < maps.size(); ++k) {
    bool along = true;
    for (std::size_t i = 0; i < maps[k].offsets.size(); ++i)
      if (static_cast<int>(i) != a && static_cast<int>(i) != b && maps[k].offsets[i] != 0) along = false;
    if (along) out.push_back(k);
  }
  return out;
}

std::vector<Chain> downward_triangles(const GasketGraph& g) {
  const int level = g.level();
  std::vector<Chain> out;
  if (level < 2) return out;
  std::map<std::vector<int>, std::size_t> letter;
  for (std::size_t k = 0; k < g.num_maps(); ++k) letter[g.maps()[k].offsets] = k;
  for (const auto& o : enumerate_cell_maps(2, level - 1)) {
    Chain gamma{1, 1, {}};
    for (int a = 0; a < 3; ++a) {
      const int b = (a + 1) % 3;
      const int c = 3 - a - b;
      auto base = o.offsets;
      base[c] += 1;
      const std::size_t cell = letter.at(base);
      // u_a = base + e_b is corner b of that cell, u_b is corner a.
      gamma.add(g.simplex_id(1, cell, edge_rank(g, a, b)), b < a ? 1 : -1);
    }
    out.push_back(std::move(gamma));
  }
  return out;
}

std::vector<Chain> fundamental_cycles(const GasketGraph& g) {
  const std::size_t nv = g.num_vertices();
  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, int>> edge_between;
  for (std::size_t e = 0; e < g.num_simplices(1); ++e) {
    auto v = g.simplex_vertices(1, e);
    edge_between[{v[0], v[1]}] = {e, 1};
    edge_between[{v[1], v[0]}] = {e, -1};
  }
  std::vector<std::size_t> parent(nv, nv), depth(nv, 0);
  std::vector<bool> seen(nv, false), tree_edge(g.num_simplices(1), false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  while (!frontier.empty()) {
    std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t v : g.neighbors(u)) {
      if (seen[v]) continue;
      seen[v] = true;
      parent[v] = u;
      depth[v] = depth[u] + 1;
      tree_edge[edge_between.at({u, v}).first] = true;
      frontier.push(v);
    }
  }

  EchelonBasis relations(g.num_simplices(1));
  if (g.dimension() >= 2)
    for (std::size_t t = 0; t < g.num_simplices(2); ++t) {
      SparseRow row;
      for (const auto& [e, sign] : facets(g, 2, t)) row.emplace(e, Rational(sign));
      relations.insert(std::move(row));
    }

  std::vector<Chain> out;
  for (std::size_t e = 0; e < g.num_simplices(1); ++e) {
    if (tree_edge[e]) continue;
    auto v = g.simplex_vertices(1, e);
    Chain gamma{1, g.generation(), {}};
    gamma.add(e, 1);
    // Walk from the head back to the tail through the tree.
    std::size_t x = v[1], y = v[0];
    std::vector<std::size_t> down;
    while (x != y) {
      if (depth[x] >= depth[y]) {
        auto [id, sign] = edge_between.at({x, parent[x]});
        gamma.add(id, sign);
        x = parent[x];
      } else {
        down.push_back(y);
        y = parent[y];
      }
    }
    for (auto it = down.rbegin(); it != down.rend(); ++it) {
      auto [id, sign] = edge_between.at({parent[*it], *it});
      gamma.add(id, sign);
    }
    SparseRow row(gamma.coefficients.begin(), gamma.coefficients.end());
    if (relations.insert(std::move(row))) out.push_back(std::move(gamma));
  }
  return out;
}

}  // namespace

const std::vector<Rational>& ExtensionRule::at(const std::vector<Coord>& point) const {
  auto it = coefficients.find(point);
  if (it == coefficients.end()) throw DomainError("no extension weights for the requested level-1 point");
  return it->second;
}

ExtensionRule extension_rule(int n, int level) {
  if (n < 1 || level < 1) throw DomainError("extension_rule requires n >= 1 and level >= 1");
  const auto g = GasketGraph::build(n, level, 1);
  std::vector<std::size_t> interior;
  std::map<std::size_t, std::size_t> slot;
  std::vector<int> corner_of(g.num_vertices(), -1);
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    if (g.is_boundary_vertex(v)) {
      auto c = g.vertex_coords(v);
      corner_of[v] = static_cast<int>(std::find(c.begin(), c.end(), Coord(level)) - c.begin());
    } else {
      slot[v] = interior.size();
      interior.push_back(v);
    }
  }
  DenseRational a(interior.size(), std::vector<Rational>(interior.size(), Rational(0)));
  DenseRational b(interior.size(), std::vector<Rational>(n + 1, Rational(0)));
  for (std::size_t i = 0; i < interior.size(); ++i) {
    a[i][i] = static_cast<long>(g.degree(interior[i]));
    for (std::size_t y : g.neighbors(interior[i])) {
      if (corner_of[y] >= 0)
        b[i][corner_of[y]] += 1;
      else
        a[i][slot.at(y)] -= 1;
    }
  }
  auto x = solve(std::move(a), std::move(b));

  ExtensionRule rule;
  rule.n = n;
  rule.level = level;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    auto c = g.vertex_coords(v);
    std::vector<Coord> key(c.begin(), c.end());
    if (corner_of[v] >= 0) {
      std::vector<Rational> unit(n + 1, Rational(0));
      unit[corner_of[v]] = 1;
      rule.coefficients[key] = std::move(unit);
    } else {
      rule.coefficients[key] = x[slot.at(v)];
    }
  }
  return rule;
}

ExactForm extend_zero_form(const ExactForm& f, const GasketGraph& coarse, const GasketGraph& fine,
                           const ExtensionRule& rule) {
  if (f.degree != 0 || f.generation != coarse.generation() || f.size() != coarse.num_vertices())
    throw DomainError("extend_zero_form: input is not a 0-form on the coarse graph");
  if (fine.generation() != coarse.generation() + 1 || fine.dimension() != coarse.dimension() ||
      fine.level() != coarse.level() || rule.n != coarse.dimension() || rule.level != coarse.level())
    throw DomainError("extend_zero_form: graphs or rule do not match");
  const int n = fine.dimension();
  const std::size_t maps = fine.num_maps();
  ExactForm out = zero_form<Rational>(fine, 0);
  std::vector<bool> done(fine.num_vertices(), false);
  for (std::size_t cell = 0; cell < fine.num_cells(); ++cell) {
    const std::size_t parent = cell / maps;
    const auto& offset = fine.maps()[cell % maps];
    for (int j = 0; j <= n; ++j) {
      const std::size_t v = fine.cell_corner(cell, j);
      if (done[v]) continue;
      const auto& weights = rule.at(local_point(offset, j));
      Rational value = 0;
      for (int i = 0; i <= n; ++i) value += weights[i] * f.values[coarse.cell_corner(parent, i)];
      out.values[v] = value;
      done[v] = true;
    }
  }
  return out;
}

void require_harmonic_one_form(const ExactForm& h, const GasketGraph& graph, const SimplexWeights& weights) {
  if (h.degree != 1 || h.generation != graph.generation() || h.size() != graph.num_simplices(1))
    throw DomainError("expected a 1-form on the given graph");
  for (const auto& v : assemble_d(graph, 1).apply(h).values)
    if (sgn(v) != 0) throw VerificationFailure("1-form is not closed (d_1 h != 0)");
  for (const auto& v : assemble_delta(graph, weights, 1).apply(h).values)
    if (sgn(v) != 0) throw VerificationFailure("1-form is not co-closed (delta_1 h != 0)");
}

ExactForm extend_one_form(const ExactForm& h, const GasketGraph& coarse, const GasketGraph& fine,
                          const ExtensionRule& rule, const SimplexWeights& coarse_weights) {
  require_harmonic_one_form(h, coarse, coarse_weights);
  if (fine.generation() != coarse.generation() + 1 || fine.dimension() != coarse.dimension() ||
      fine.level() != coarse.level() || rule.n != coarse.dimension() || rule.level != coarse.level())
    throw DomainError("extend_one_form: graphs or rule do not match");
  const int n = coarse.dimension();
  const std::size_t maps = fine.num_maps();

  std::vector<std::vector<Rational>> potentials(coarse.num_cells(), std::vector<Rational>(n + 1, Rational(0)));
  for (std::size_t c = 0; c < coarse.num_cells(); ++c) {
    auto& u = potentials[c];
    for (int j = 1; j <= n; ++j) u[j] = h.values[coarse.simplex_id(1, c, edge_rank(coarse, 0, j))];
    for (int a = 1; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b)
        if (h.values[coarse.simplex_id(1, c, edge_rank(coarse, a, b))] != u[b] - u[a])
          throw VerificationFailure("inconsistent local potential in cell " + std::to_string(c));
  }

  ExactForm out = zero_form<Rational>(fine, 1);
  std::vector<Rational> phi(n + 1);
  for (std::size_t cell = 0; cell < fine.num_cells(); ++cell) {
    const auto& u = potentials[cell / maps];
    const auto& offset = fine.maps()[cell % maps];
    for (int j = 0; j <= n; ++j) {
      const auto& weights = rule.at(local_point(offset, j));
      phi[j] = 0;
      for (int i = 0; i <= n; ++i) phi[j] += weights[i] * u[i];
    }
    for (int a = 0; a <= n; ++a)
      for (int b = a + 1; b <= n; ++b) out.values[fine.simplex_id(1, cell, edge_rank(fine, a, b))] = phi[b] - phi[a];
  }
  return out;
}

std::vector<std::size_t> refine_edge(const GasketGraph& fine, std::size_t coarse_cell, int depth, int a, int b) {
  if (depth < 0 || depth > fine.generation()) throw DomainError("refine_edge: invalid depth");
  const auto along = letters_along_edge(fine.maps(), a, b);
  std::vector<std::size_t> cells{coarse_cell};
  for (int step = 0; step < depth; ++step) {
    std::vector<std::size_t> next;
    next.reserve(cells.size() * along.size());
    for (std::size_t c : cells)
      for (std::size_t k : along) next.push_back(c * fine.num_maps() + k);
    cells = std::move(next);
  }
  std::vector<std::size_t> edges;
  const std::size_t rank = edge_rank(fine, a, b);
  for (std::size_t c : cells) edges.push_back(fine.simplex_id(1, c, rank));
  return edges;
}

std::vector<std::size_t> telescoping_violations(const ExactForm& coarse_form, const ExactForm& fine_form,
                                                const GasketGraph& coarse, const GasketGraph& fine) {
  const int depth = fine.generation() - coarse.generation();
  if (depth < 0 || coarse_form.degree != 1 || fine_form.degree != 1 || coarse_form.size() != coarse.num_simplices(1) ||
      fine_form.size() != fine.num_simplices(1))
    throw DomainError("telescoping check: forms do not match the graphs");
  std::vector<std::size_t> bad;
  for (std::size_t e = 0; e < coarse.num_simplices(1); ++e) {
    const auto& face = coarse.face_of_simplex(1, e);
    Rational sum = 0;
    for (std::size_t sub : refine_edge(fine, coarse.cell_of_simplex(1, e), depth, face[0], face[1]))
      sum += fine_form.values[sub];
    if (sum != coarse_form.values[e]) bad.push_back(e);
  }
  return bad;
}

ExactForm localize(const ExactForm& h, const Word& word, const GasketGraph& target) {
  if (h.degree != 1 || h.generation != 1) throw DomainError("localize expects a generation-1 1-form");
  if (static_cast<int>(word.length()) + 1 != target.generation())
    throw DomainError("localize: target generation must be |word| + 1");
  const std::size_t per_cell = target.num_maps() * target.local_faces(1).size();
  if (h.size() != per_cell) throw DomainError("localize: form does not live on G^{n,1}");
  ExactForm out = zero_form<Rational>(target, 1);
  std::size_t cell = 0;
  for (int letter : word.letters) cell = cell * target.num_maps() + letter;
  std::copy(h.values.begin(), h.values.end(), out.values.begin() + cell * per_cell);
  return out;
}

std::vector<Chain> level_one_cycles(const GasketGraph& level_one) {
  if (level_one.generation() != 1) throw DomainError("level_one_cycles expects a generation-1 graph");
  if (level_one.dimension() == 2) return downward_triangles(level_one);
  return fundamental_cycles(level_one);
}

CycleBasis cycle_basis(const GasketGraph& graph) {
  CycleBasis basis;
  basis.generation = graph.generation();
  const int m = graph.generation();
  if (m == 0) return basis;
  const auto g1 = GasketGraph::build(graph.dimension(), graph.level(), 1);
  const auto templates = level_one_cycles(g1);
  basis.per_cell = templates.size();
  const std::size_t maps = graph.num_maps();
  for (int length = 0; length < m; ++length) {
    const std::uint64_t words = power(maps, length);
    for (std::size_t w = 0; w < words; ++w)
      for (std::size_t i = 0; i < templates.size(); ++i) {
        Chain gamma{1, m, {}};
        for (const auto& [edge, a] : templates[i].coefficients) {
          const auto& face = g1.face_of_simplex(1, edge);
          const std::size_t cell = w * maps + g1.cell_of_simplex(1, edge);
          for (std::size_t sub : refine_edge(graph, cell, m - length - 1, face[0], face[1])) gamma.add(sub, a);
        }
        basis.cycles.push_back(std::move(gamma));
        basis.words.push_back(word_from_index(w, maps, length));
        basis.indices.push_back(static_cast<int>(i));
      }
  }
  return basis;
}

std::vector<std::vector<Rational>> cycle_integral_matrix(const std::vector<ExactForm>& forms,
                                                         const std::vector<Chain>& cycles) {
  std::vector<std::vector<Rational>> p(cycles.size(), std::vector<Rational>(forms.size()));
  for (std::size_t i = 0; i < cycles.size(); ++i)
    for (std::size_t j = 0; j < forms.size(); ++j) p[i][j] = integrate(forms[j], cycles[i]);
  return p;
}

std::vector<ExactForm> normalized_level_one_basis(const GasketGraph& level_one) {
  const auto weights = unit_weights(level_one);
  auto kernel = harmonic_space(level_one, weights, 1).exact_basis;
  const auto cycles = level_one_cycles(level_one);
  if (kernel.size() != cycles.size())
    throw VerificationFailure("harmonic 1-forms and level-1 cycles differ in number: " + std::to_string(kernel.size()) +
                              " vs " + std::to_string(cycles.size()));
  const auto c = inverse(cycle_integral_matrix(kernel, cycles));
  std::vector<ExactForm> out;
  for (std::size_t j = 0; j < kernel.size(); ++j) {
    ExactForm h = zero_form<Rational>(level_one, 1);
    for (std::size_t l = 0; l < kernel.size(); ++l)
      if (sgn(c[l][j]) != 0)
        for (std::size_t e = 0; e < h.size(); ++e) h.values[e] += c[l][j] * kernel[l].values[e];
    out.push_back(std::move(h));
  }
  return out;
}

HarmonicOneBasis harmonic_one_basis(int n, int level, int generation, std::uint64_t simplex_cap) {
  if (generation < 1) throw DomainError("harmonic_one_basis requires generation >= 1");
  std::vector<GasketGraph> graphs;
  std::vector<SimplexWeights> weights;
  for (int g = 0; g <= generation; ++g) {
    graphs.push_back(GasketGraph::build(n, level, g, simplex_cap));
    weights.push_back(unit_weights(graphs.back()));
  }
  const auto rule = extension_rule(n, level);
  const auto base = normalized_level_one_basis(graphs[1]);
  const std::size_t maps = graphs[1].num_maps();

  HarmonicOneBasis result;
  result.per_cell = base.size();
  result.expected_dimension = base.size() * (power(maps, generation) - 1) / (maps - 1);
  for (int length = 0; length < generation; ++length) {
    const std::uint64_t words = power(maps, length);
    for (std::size_t w = 0; w < words; ++w) {
      const Word word = word_from_index(w, maps, length);
      for (std::size_t j = 0; j < base.size(); ++j) {
        ExactForm f = localize(base[j], word, graphs[length + 1]);
        for (int g = length + 1; g < generation; ++g) f = extend_one_form(f, graphs[g], graphs[g + 1], rule, weights[g]);
        result.forms.push_back({word, static_cast<int>(j), std::move(f)});
      }
    }
  }

  const auto& top = graphs[generation];
  result.kernel_dimension = harmonic_space(top, weights[generation], 1).dimension;
  EchelonBasis span(top.num_simplices(1));
  for (const auto& t : result.forms) span.insert(to_sparse_row(t.form.values));
  if (result.forms.size() != result.expected_dimension || span.rank() != result.forms.size() ||
      result.kernel_dimension != result.forms.size())
    throw VerificationFailure("harmonic 1-form basis: " + std::to_string(result.forms.size()) + " forms of rank " +
                              std::to_string(span.rank()) + ", formula " + std::to_string(result.expected_dimension) +
                              ", kernel " + std::to_string(result.kernel_dimension));
  return result;
}

}  // namespace fractal_hodge
