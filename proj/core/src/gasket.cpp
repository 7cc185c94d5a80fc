#include "fractal_hodge/gasket.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "fractal_hodge/errors.hpp"

namespace fractal_hodge {

namespace {

__extension__ using u128 = unsigned __int128;

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw ResourceError("integer overflow in gasket size computation");
  return a * b;
}

std::uint64_t checked_pow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

void compositions(int parts, int total, std::vector<int>& prefix, std::vector<CellOffset>& out) {
  if (parts == 1) {
    prefix.push_back(total);
    out.push_back({prefix});
    prefix.pop_back();
    return;
  }
  for (int first = 0; first <= total; ++first) {
    prefix.push_back(first);
    compositions(parts - 1, total - first, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<int>> combinations(int universe, int size) {
  std::vector<std::vector<int>> out;
  std::vector<int> pick(size);
  std::iota(pick.begin(), pick.end(), 0);
  if (size > universe) return out;
  while (true) {
    out.push_back(pick);
    int i = size - 1;
    while (i >= 0 && pick[i] == universe - size + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

std::uint64_t count_vertices_memo(int n, int level, int generation,
                                  std::map<std::tuple<int, int, int>, std::uint64_t>& memo) {
  if (generation == 0) return static_cast<std::uint64_t>(n) + 1;
  if (generation == 1) {
    if (level == 0) return 1;
    if (level == 1) return static_cast<std::uint64_t>(n) + 1;
    if (n == 1) return static_cast<std::uint64_t>(level) + 1;
  }
  auto key = std::make_tuple(n, level, generation);
  if (auto it = memo.find(key); it != memo.end()) return it->second;

  std::uint64_t maps = binomial(n + level - 1, n);
  std::uint64_t total = checked_mul(maps, count_vertices_memo(n, level, generation - 1, memo));
  for (int k = 2; k <= std::min(n + 1, level); ++k) {
    std::uint64_t junctions = count_vertices_memo(k - 1, level - k, 1, memo);
    total -= checked_mul(checked_mul(binomial(n + 1, k), k - 1), junctions);
  }
  memo[key] = total;
  return total;
}

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  u128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max())
      throw ResourceError("binomial coefficient overflows 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

std::vector<CellOffset> enumerate_cell_maps(int n, int level) {
  require(n >= 1 && level >= 1, "enumerate_cell_maps requires n >= 1 and level >= 1");
  std::vector<CellOffset> out;
  std::vector<int> prefix;
  compositions(n + 1, level - 1, prefix, out);
  return out;
}

std::uint64_t count_vertices(int n, int level, int generation) {
  require(n >= 1 && level >= 0 && generation >= 0, "count_vertices: invalid parameters");
  std::map<std::tuple<int, int, int>, std::uint64_t> memo;
  return count_vertices_memo(n, level, generation, memo);
}

std::uint64_t count_vertices_level_one(int n, int level) { return binomial(n + level, n); }

std::uint64_t estimated_simplex_count(int n, int level, int generation) {
  require(n >= 1 && level >= 1 && generation >= 0, "estimated_simplex_count: invalid parameters");
  std::uint64_t cells = checked_pow(binomial(n + level - 1, n), generation);
  std::uint64_t per_cell = n + 1;
  for (int k = 1; k <= n; ++k) per_cell += binomial(n + 1, k + 1);
  return checked_mul(cells, per_cell);
}

void GasketGraph::init_shape(int n, int level, int generation) {
  n_ = n;
  level_ = level;
  generation_ = generation;
  maps_ = enumerate_cell_maps(n, level);
  num_cells_ = checked_pow(maps_.size(), generation);
  faces_.clear();
  face_rank_by_mask_.assign(std::size_t{1} << (n + 1), -1);
  for (int k = 0; k <= n; ++k) {
    faces_.push_back(combinations(n + 1, k + 1));
    for (std::size_t r = 0; r < faces_.back().size(); ++r) {
      unsigned mask = 0;
      for (int v : faces_.back()[r]) mask |= 1u << v;
      face_rank_by_mask_[mask] = static_cast<int>(r);
    }
  }
}

GasketGraph GasketGraph::build(int n, int level, int generation, std::uint64_t simplex_cap) {
  require(n >= 1 && n <= 20, "build_graph requires 1 <= n <= 20");
  require(level >= 1, "build_graph requires level >= 1");
  require(generation >= 0, "build_graph requires generation >= 0");
  std::uint64_t estimate = estimated_simplex_count(n, level, generation);
  if (estimate > simplex_cap)
    throw ResourceError("G_" + std::to_string(level) + "^{" + std::to_string(n) + "," +
                        std::to_string(generation) + "} needs about " + std::to_string(estimate) +
                        " simplices, above the cap of " + std::to_string(simplex_cap));

  GasketGraph g;
  g.init_shape(n, level, generation);
  const std::size_t width = n + 1;
  const std::size_t maps = g.maps_.size();

  std::vector<Coord> bases(width, 0);
  for (int gen = 1; gen <= generation; ++gen) {
    std::vector<Coord> next(bases.size() * maps);
    std::size_t cells = bases.size() / width;
    for (std::size_t c = 0; c < cells; ++c)
      for (std::size_t k = 0; k < maps; ++k)
        for (std::size_t i = 0; i < width; ++i)
          next[(c * maps + k) * width + i] = level * bases[c * width + i] + g.maps_[k].offsets[i];
    bases = std::move(next);
  }
  g.cell_bases_ = std::move(bases);

  std::vector<Coord> corners(g.num_cells_ * width * width);
  for (std::size_t c = 0; c < g.num_cells_; ++c)
    for (std::size_t j = 0; j < width; ++j) {
      Coord* dst = &corners[(c * width + j) * width];
      std::copy_n(&g.cell_bases_[c * width], width, dst);
      dst[j] += 1;
    }
  std::vector<std::size_t> order(g.num_cells_ * width);
  std::iota(order.begin(), order.end(), 0);
  auto point_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(&corners[a * width], &corners[a * width] + width,
                                        &corners[b * width], &corners[b * width] + width);
  };
  auto point_eq = [&](std::size_t a, std::size_t b) {
    return std::equal(&corners[a * width], &corners[a * width] + width, &corners[b * width]);
  };
  std::sort(order.begin(), order.end(), point_less);

  g.cell_corners_.assign(order.size(), 0);
  std::size_t next_id = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && !point_eq(order[i - 1], order[i])) ++next_id;
    if (i == 0 || !point_eq(order[i - 1], order[i]))
      g.vertex_coords_.insert(g.vertex_coords_.end(), &corners[order[i] * width],
                              &corners[order[i] * width] + width);
    g.cell_corners_[order[i]] = next_id;
  }
  g.finish_tables();
  return g;
}

GasketGraph GasketGraph::from_tables(int n, int level, int generation, std::vector<Coord> vertex_coords,
                                     std::vector<std::size_t> cell_corners) {
  if (n < 1 || n > 20 || level < 1 || generation < 0)
    throw FormatError("graph tables: invalid (n, level, generation)");
  GasketGraph g;
  g.init_shape(n, level, generation);
  const std::size_t width = n + 1;
  if (vertex_coords.size() % width != 0) throw FormatError("graph tables: vertex coordinate table has wrong shape");
  if (cell_corners.size() != g.num_cells_ * width) throw FormatError("graph tables: cell corner table has wrong shape");
  const std::size_t nv = vertex_coords.size() / width;
  const Coord scale = static_cast<Coord>(checked_pow(level, generation));
  for (std::size_t v = 0; v < nv; ++v) {
    auto first = vertex_coords.begin() + v * width;
    if (std::accumulate(first, first + width, Coord{0}) != scale || std::any_of(first, first + width, [](Coord x) { return x < 0; }))
      throw FormatError("graph tables: vertex " + std::to_string(v) + " is not a barycentric point");
    if (v > 0 && !std::lexicographical_compare(first - width, first, first, first + width))
      throw FormatError("graph tables: vertices are not strictly sorted");
  }
  g.vertex_coords_ = std::move(vertex_coords);
  g.cell_bases_.assign(g.num_cells_ * width, 0);
  for (std::size_t c = 0; c < g.num_cells_; ++c) {
    for (std::size_t j = 0; j < width; ++j)
      if (cell_corners[c * width + j] >= nv) throw FormatError("graph tables: corner references unknown vertex");
    auto q0 = g.vertex_coords(cell_corners[c * width]);
    for (std::size_t i = 0; i < width; ++i) g.cell_bases_[c * width + i] = q0[i] - (i == 0 ? 1 : 0);
    for (std::size_t j = 0; j < width; ++j) {
      auto q = g.vertex_coords(cell_corners[c * width + j]);
      for (std::size_t i = 0; i < width; ++i)
        if (q[i] != g.cell_bases_[c * width + i] + (i == j ? 1 : 0))
          throw FormatError("graph tables: cell " + std::to_string(c) + " is not a scaled simplex");
    }
  }
  g.cell_corners_ = std::move(cell_corners);
  g.finish_tables();
  return g;
}

void GasketGraph::finish_tables() {
  const std::size_t width = n_ + 1;
  const std::size_t nv = vertex_coords_.size() / width;
  multiplicity_.assign(nv, 0);
  for (std::size_t v : cell_corners_) ++multiplicity_[v];

  std::vector<std::vector<std::size_t>> adj(nv);
  for (std::size_t c = 0; c < num_cells_; ++c)
    for (std::size_t a = 0; a < width; ++a)
      for (std::size_t b = 0; b < width; ++b)
        if (a != b) adj[cell_corners_[c * width + a]].push_back(cell_corners_[c * width + b]);
  adjacency_offsets_.assign(1, 0);
  adjacency_.clear();
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    adjacency_.insert(adjacency_.end(), list.begin(), list.end());
    adjacency_offsets_.push_back(adjacency_.size());
  }
}

std::size_t GasketGraph::num_simplices(int k) const {
  if (k == 0) return num_vertices();
  if (k < 0 || k > n_) return 0;
  return num_cells_ * faces_[k].size();
}

std::span<const Coord> GasketGraph::vertex_coords(std::size_t vertex) const {
  require(vertex < num_vertices(), "unknown vertex id " + std::to_string(vertex));
  return {vertex_coords_.data() + vertex * (n_ + 1), static_cast<std::size_t>(n_ + 1)};
}

std::optional<std::size_t> GasketGraph::find_vertex(std::span<const Coord> coords) const {
  const std::size_t width = n_ + 1;
  if (coords.size() != width) return std::nullopt;
  std::size_t lo = 0, hi = num_vertices();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    const Coord* p = vertex_coords_.data() + mid * width;
    if (std::lexicographical_compare(p, p + width, coords.begin(), coords.end()))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < num_vertices() && std::equal(coords.begin(), coords.end(), vertex_coords_.data() + lo * width))
    return lo;
  return std::nullopt;
}

std::span<const Coord> GasketGraph::cell_base(std::size_t cell) const {
  require(cell < num_cells_, "unknown cell " + std::to_string(cell));
  return {cell_bases_.data() + cell * (n_ + 1), static_cast<std::size_t>(n_ + 1)};
}

std::size_t GasketGraph::cell_corner(std::size_t cell, int j) const {
  require(cell < num_cells_ && j >= 0 && j <= n_, "cell corner out of range");
  return cell_corners_[cell * (n_ + 1) + j];
}

Word GasketGraph::word_of_cell(std::size_t cell) const {
  require(cell < num_cells_, "unknown cell " + std::to_string(cell));
  Word w;
  w.letters.assign(generation_, 0);
  for (int i = generation_ - 1; i >= 0; --i) {
    w.letters[i] = static_cast<int>(cell % maps_.size());
    cell /= maps_.size();
  }
  return w;
}

std::size_t GasketGraph::cell_of_word(const Word& word) const {
  require(static_cast<int>(word.length()) == generation_, "word length differs from generation");
  std::size_t cell = 0;
  for (int letter : word.letters) {
    require(letter >= 0 && static_cast<std::size_t>(letter) < maps_.size(), "word letter out of range");
    cell = cell * maps_.size() + letter;
  }
  return cell;
}

const std::vector<std::vector<int>>& GasketGraph::local_faces(int k) const {
  require(k >= 0 && k <= n_, "face degree out of range");
  return faces_[k];
}

std::size_t GasketGraph::face_rank(std::span<const int> face) const {
  unsigned mask = 0;
  for (std::size_t i = 0; i < face.size(); ++i) {
    require(face[i] >= 0 && face[i] <= n_ && (i == 0 || face[i - 1] < face[i]), "local face must be increasing in [0, n]");
    mask |= 1u << face[i];
  }
  require(!face.empty(), "empty local face");
  return static_cast<std::size_t>(face_rank_by_mask_[mask]);
}

std::size_t GasketGraph::simplex_id(int k, std::size_t cell, std::size_t rank) const {
  require(k >= 1 && k <= n_, "simplex_id is defined for 1 <= k <= n");
  require(cell < num_cells_ && rank < faces_[k].size(), "simplex_id out of range");
  return cell * faces_[k].size() + rank;
}

std::size_t GasketGraph::cell_of_simplex(int k, std::size_t id) const {
  require(k >= 1 && k <= n_ && id < num_simplices(k), "simplex id out of range");
  return id / faces_[k].size();
}

const std::vector<int>& GasketGraph::face_of_simplex(int k, std::size_t id) const {
  require(k >= 1 && k <= n_ && id < num_simplices(k), "simplex id out of range");
  return faces_[k][id % faces_[k].size()];
}

std::vector<std::size_t> GasketGraph::simplex_vertices(int k, std::size_t id) const {
  if (k == 0) {
    require(id < num_vertices(), "unknown vertex id " + std::to_string(id));
    return {id};
  }
  std::size_t cell = cell_of_simplex(k, id);
  std::vector<std::size_t> out;
  for (int j : face_of_simplex(k, id)) out.push_back(cell_corners_[cell * (n_ + 1) + j]);
  return out;
}

Simplex GasketGraph::simplex(int k, std::size_t id) const {
  Simplex s;
  s.degree = k;
  s.vertex_ids = simplex_vertices(k, id);
  if (k >= 1) {
    s.word = word_of_cell(cell_of_simplex(k, id));
    s.local_face = face_of_simplex(k, id);
  }
  return s;
}

int GasketGraph::multiplicity(std::size_t vertex) const {
  require(vertex < num_vertices(), "unknown vertex id " + std::to_string(vertex));
  return multiplicity_[vertex];
}

bool GasketGraph::is_boundary_vertex(std::size_t vertex) const {
  auto c = vertex_coords(vertex);
  return std::count(c.begin(), c.end(), Coord{0}) == n_;
}

std::span<const std::size_t> GasketGraph::neighbors(std::size_t vertex) const {
  require(vertex < num_vertices(), "unknown vertex id " + std::to_string(vertex));
  return {adjacency_.data() + adjacency_offsets_[vertex], adjacency_offsets_[vertex + 1] - adjacency_offsets_[vertex]};
}

std::size_t GasketGraph::degree(std::size_t vertex) const { return neighbors(vertex).size(); }

std::vector<std::vector<std::size_t>> classify_vertices(const GasketGraph& graph) {
  std::vector<std::vector<std::size_t>> classes(2);
  for (std::size_t v = 0; v < graph.num_vertices(); ++v) {
    std::size_t k = graph.is_boundary_vertex(v) ? 1 : static_cast<std::size_t>(graph.multiplicity(v));
    if (classes.size() <= k) classes.resize(k + 1);
    classes[k].push_back(v);
  }
  return classes;
}

}  // namespace fractal_hodge
