#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace fractal_hodge {

using Coord = std::int64_t;

/// Default refusal threshold for the total number of stored simplices.
inline constexpr std::uint64_t kDefaultSimplexCap = 10'000'000;

/// Translation part of one contraction F_i(x) = (x + offsets) / level, in
/// barycentric coordinates. Entries are non-negative and sum to level - 1.
struct CellOffset {
  std::vector<int> offsets;

  auto operator<=>(const CellOffset&) const = default;
};

/// A sequence of map indices addressing a cell; letters are 0-based indices into
/// the lexicographic map enumeration.
struct Word {
  std::vector<int> letters;

  std::size_t length() const { return letters.size(); }
  auto operator<=>(const Word&) const = default;
};

/// Identifies a k-simplex inside one generation's simplex table.
struct SimplexRef {
  int degree = 0;
  int generation = 0;
  std::size_t id = 0;
};

/// Materialized view of one oriented k-simplex. vertex_ids[j] is the id of
/// F_word(q_{local_face[j]}), so the tuple order is the orientation.
struct Simplex {
  int degree = 0;
  std::vector<std::size_t> vertex_ids;
  Word word;
  std::vector<int> local_face;
};

/// Exact binomial coefficient. Throws ResourceError on 64-bit overflow.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// All contractions of the level-`level` gasket in dimension n, sorted
/// lexicographically by offset vector. Count is C(n + level - 1, n).
std::vector<CellOffset> enumerate_cell_maps(int n, int level);

/// Vertex count M_level^{n,m} from the gluing recursion over the level-1
/// junction points, with the base cases M^{n,0} = n+1, M^{1,1} = level+1,
/// M_0^{n,1} = 1 and M_1^{n,1} = n+1.
std::uint64_t count_vertices(int n, int level, int generation);

/// Closed form for generation one: C(n + level, n).
std::uint64_t count_vertices_level_one(int n, int level);

/// Upper bound of simplices (vertices plus all k >= 1 faces) that
/// GasketGraph::build would store.
std::uint64_t estimated_simplex_count(int n, int level, int generation);

/// One generation G_level^{n,m} of the gasket approximation.
///
/// Vertices are stored as exact barycentric numerators over level^m and sorted
/// lexicographically; the vertex id is the position in that order. Cells are
/// indexed by their word read as a base-N number (most significant letter
/// first), so cell order equals lexicographic word order. For k >= 1 every
/// k-simplex is the image of exactly one local face of exactly one cell, and its
/// id is cell * C(n+1, k+1) + rank(local_face).
///
/// Instances are immutable once built and safe to share read-only.
class GasketGraph {
 public:
  static GasketGraph build(int n, int level, int generation,
                           std::uint64_t simplex_cap = kDefaultSimplexCap);
  /// Rebuilds a graph from its vertex coordinate table and cell corner table,
  /// as stored in a graph document. Throws FormatError on inconsistent tables.
  static GasketGraph from_tables(int n, int level, int generation, std::vector<Coord> vertex_coords,
                                 std::vector<std::size_t> cell_corners);

  int dimension() const { return n_; }
  int level() const { return level_; }
  int generation() const { return generation_; }

  const std::vector<CellOffset>& maps() const { return maps_; }
  std::size_t num_maps() const { return maps_.size(); }
  std::size_t num_cells() const { return num_cells_; }
  std::size_t num_vertices() const { return vertex_coords_.size() / (n_ + 1); }
  /// Size of the degree-k table; k = -1 and k = n+1 are empty tables.
  std::size_t num_simplices(int k) const;

  std::span<const Coord> vertex_coords(std::size_t vertex) const;
  std::optional<std::size_t> find_vertex(std::span<const Coord> coords) const;

  /// Barycentric numerators of F_word(q_0) - e_0, shared by all corners.
  std::span<const Coord> cell_base(std::size_t cell) const;
  std::size_t cell_corner(std::size_t cell, int j) const;
  Word word_of_cell(std::size_t cell) const;
  std::size_t cell_of_word(const Word& word) const;

  /// Local faces of size k+1 drawn from {0..n}, lexicographic.
  const std::vector<std::vector<int>>& local_faces(int k) const;
  std::size_t face_rank(std::span<const int> face) const;

  std::size_t simplex_id(int k, std::size_t cell, std::size_t face_rank) const;
  std::size_t cell_of_simplex(int k, std::size_t id) const;
  const std::vector<int>& face_of_simplex(int k, std::size_t id) const;
  std::vector<std::size_t> simplex_vertices(int k, std::size_t id) const;
  Simplex simplex(int k, std::size_t id) const;
  SimplexRef ref(int k, std::size_t id) const { return {k, generation_, id}; }

  /// Number of (cell, corner) pairs mapping onto the vertex.
  int multiplicity(std::size_t vertex) const;
  bool is_boundary_vertex(std::size_t vertex) const;
  std::span<const std::size_t> neighbors(std::size_t vertex) const;
  /// Throws DomainError for an unknown vertex id.
  std::size_t degree(std::size_t vertex) const;

  bool operator==(const GasketGraph&) const = default;

 private:
  GasketGraph() = default;
  void init_shape(int n, int level, int generation);
  void finish_tables();

  int n_ = 0;
  int level_ = 0;
  int generation_ = 0;
  std::size_t num_cells_ = 0;
  std::vector<CellOffset> maps_;
  std::vector<std::vector<std::vector<int>>> faces_;  // faces_[k]
  std::vector<int> face_rank_by_mask_;
  std::vector<Coord> vertex_coords_;                  // num_vertices * (n+1)
  std::vector<Coord> cell_bases_;                     // num_cells * (n+1)
  std::vector<std::size_t> cell_corners_;             // num_cells * (n+1)
  std::vector<int> multiplicity_;
  std::vector<std::size_t> adjacency_offsets_;
  std::vector<std::size_t> adjacency_;
};

/// Partition of the vertex set by junction multiplicity. Index k holds the
/// vertices lying in exactly k cells; the corners q_i are placed in class 1.
/// Index 0 is always empty.
std::vector<std::vector<std::size_t>> classify_vertices(const GasketGraph& graph);

}  // namespace fractal_hodge
