#pragma once

#include <Eigen/Sparse>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fractal_hodge/forms.hpp"
#include "fractal_hodge/gasket.hpp"
#include "fractal_hodge/harmonic.hpp"
#include "fractal_hodge/sparse_operator.hpp"

namespace fractal_hodge {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kCapEnvironmentVariable = "FRACTAL_HODGE_CAP";

/// Explicit flag value, else FRACTAL_HODGE_CAP, else kDefaultSimplexCap.
/// Throws FormatError when the variable is not a positive integer.
std::uint64_t resolve_simplex_cap(std::optional<std::uint64_t> flag);

/// JSON graph document: vertices with coordinates and multiplicity class,
/// cells with words and corners, every simplex table of degree >= 1, and the
/// per-simplex weights as "p/q" strings. Output is byte-deterministic.
std::string graph_document(const GasketGraph& graph, const SimplexWeights& weights);

struct LoadedGraph {
  GasketGraph graph;
  SimplexWeights weights;
};

/// Rebuilds the graph from the vertex and cell tables and checks the stored
/// simplex tables against it. Throws FormatError on any inconsistency.
LoadedGraph parse_graph_document(std::string_view text);

/// Coordinate-format "real general" Matrix Market with 1-based indices.
void write_matrix_market(std::ostream& out, const SparseOperator& op, std::string_view comment = {});
/// Reads a coordinate real/integer general Matrix Market stream.
Eigen::SparseMatrix<double> read_matrix_market(std::istream& in);

/// Exact entries and table identities of an operator as JSON.
std::string exact_sidecar(const SparseOperator& op);
SparseOperator parse_exact_sidecar(std::string_view text);

std::string form_document(const ExactForm& form);
ExactForm parse_form_document(std::string_view text);

/// Word-tagged harmonic 1-form basis.
std::string basis_document(int n, int level, int generation, const HarmonicOneBasis& basis);

/// Period matrix rows as CSV with exact "p/q" cells.
std::string periods_csv(const std::vector<std::vector<Rational>>& periods);

}  // namespace fractal_hodge
