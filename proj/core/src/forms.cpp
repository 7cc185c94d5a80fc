#include "fractal_hodge/forms.hpp"

#include <algorithm>
#include <string>

namespace fractal_hodge {

RealForm to_real(const ExactForm& f) {
  RealForm out{f.degree, f.generation, {}};
  out.values.reserve(f.size());
  for (const auto& v : f.values) out.values.push_back(v.get_d());
  return out;
}

WeightSystem WeightSystem::uniform(int n, std::size_t num_maps) {
  WeightSystem w;
  for (int k = 0; k <= n; ++k) {
    w.base.emplace_back(binomial(n + 1, k + 1), Rational(1));
    w.multipliers.emplace_back(num_maps, Rational(1));
  }
  return w;
}

void WeightSystem::validate(int n, std::size_t num_maps) const {
  if (base.size() != static_cast<std::size_t>(n + 1) || multipliers.size() != static_cast<std::size_t>(n + 1))
    throw DomainError("weight system must cover degrees 0.." + std::to_string(n));
  for (int k = 0; k <= n; ++k) {
    if (base[k].size() != binomial(n + 1, k + 1))
      throw DomainError("base weights for degree " + std::to_string(k) + " have wrong length");
    if (multipliers[k].size() != num_maps)
      throw DomainError("multipliers for degree " + std::to_string(k) + " have wrong length");
    for (const auto& v : base[k])
      if (sgn(v) <= 0) throw DomainError("non-positive base weight");
    for (const auto& v : multipliers[k])
      if (sgn(v) <= 0) throw DomainError("non-positive weight multiplier");
  }
}

SimplexWeights::SimplexWeights(std::vector<std::vector<Rational>> per_degree) : mu_(std::move(per_degree)) {
  for (const auto& table : mu_) {
    std::vector<double> d;
    d.reserve(table.size());
    for (const auto& v : table) d.push_back(v.get_d());
    mu_double_.push_back(std::move(d));
  }
}

const std::vector<Rational>& SimplexWeights::of(int k) const {
  static const std::vector<Rational> empty;
  if (k < 0 || k >= static_cast<int>(mu_.size())) return empty;
  return mu_[k];
}

const std::vector<double>& SimplexWeights::of_double(int k) const {
  static const std::vector<double> empty;
  if (k < 0 || k >= static_cast<int>(mu_double_.size())) return empty;
  return mu_double_[k];
}

SimplexWeights assemble_weights(const GasketGraph& graph, const WeightSystem& weights) {
  const int n = graph.dimension();
  const std::size_t maps = graph.num_maps();
  weights.validate(n, maps);

  std::vector<std::vector<Rational>> out(n + 1);
  for (int k = 0; k <= n; ++k) {
    std::vector<Rational> prod(1, Rational(1));
    for (int gen = 0; gen < graph.generation(); ++gen) {
      std::vector<Rational> next(prod.size() * maps);
      for (std::size_t c = 0; c < prod.size(); ++c)
        for (std::size_t j = 0; j < maps; ++j) next[c * maps + j] = prod[c] * weights.multipliers[k][j];
      prod = std::move(next);
    }
    if (k == 0) {
      out[0].assign(graph.num_vertices(), Rational(0));
      for (std::size_t c = 0; c < graph.num_cells(); ++c)
        for (int j = 0; j <= n; ++j) out[0][graph.cell_corner(c, j)] += prod[c] * weights.base[0][j];
    } else {
      const std::size_t faces = graph.local_faces(k).size();
      out[k].resize(graph.num_simplices(k));
      for (std::size_t c = 0; c < graph.num_cells(); ++c)
        for (std::size_t r = 0; r < faces; ++r) out[k][c * faces + r] = prod[c] * weights.base[k][r];
    }
  }
  return SimplexWeights(std::move(out));
}

SimplexWeights unit_weights(const GasketGraph& graph) {
  return assemble_weights(graph, WeightSystem::uniform(graph.dimension(), graph.num_maps()));
}

std::vector<std::pair<std::size_t, int>> facets(const GasketGraph& graph, int upper_degree, std::size_t upper_id) {
  if (upper_degree < 1 || upper_degree > graph.dimension())
    throw DomainError("facets: degree must lie in [1, n]");
  const std::size_t cell = graph.cell_of_simplex(upper_degree, upper_id);
  const auto& face = graph.face_of_simplex(upper_degree, upper_id);
  std::vector<std::pair<std::size_t, int>> out;
  out.reserve(face.size());
  std::vector<int> sub;
  for (std::size_t p = 0; p < face.size(); ++p) {
    const int sign = p % 2 == 0 ? 1 : -1;
    if (upper_degree == 1) {
      out.emplace_back(graph.cell_corner(cell, face[1 - p]), sign);
      continue;
    }
    sub.clear();
    for (std::size_t i = 0; i < face.size(); ++i)
      if (i != p) sub.push_back(face[i]);
    out.emplace_back(graph.simplex_id(upper_degree - 1, cell, graph.face_rank(sub)), sign);
  }
  return out;
}

int sign_incidence(const GasketGraph& graph, SimplexRef lower, SimplexRef upper) {
  if (lower.generation != upper.generation || lower.generation != graph.generation())
    throw DomainError("sign_incidence: simplices from different generations");
  if (upper.degree != lower.degree + 1) return 0;
  if (upper.degree < 1 || upper.degree > graph.dimension()) return 0;
  for (const auto& [id, sign] : facets(graph, upper.degree, upper.id))
    if (id == lower.id) return sign;
  return 0;
}

void Chain::add(std::size_t id, const Rational& a) {
  if (sgn(a) == 0) return;
  auto [it, inserted] = coefficients.try_emplace(id, a);
  if (!inserted) {
    it->second += a;
    if (sgn(it->second) == 0) coefficients.erase(it);
  }
}

Chain boundary(const GasketGraph& graph, const Chain& chain) {
  if (chain.degree < 1) throw DomainError("boundary of a 0-chain is undefined");
  if (chain.generation != graph.generation()) throw DomainError("chain generation differs from graph");
  Chain out{chain.degree - 1, chain.generation, {}};
  for (const auto& [id, a] : chain.coefficients)
    for (const auto& [lower, sign] : facets(graph, chain.degree, id)) out.add(lower, sign * a);
  return out;
}

}  // namespace fractal_hodge
