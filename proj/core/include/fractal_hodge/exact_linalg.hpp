#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "fractal_hodge/rational.hpp"
#include "fractal_hodge/sparse_operator.hpp"

namespace fractal_hodge {

using SparseRow = std::map<std::size_t, Rational>;

/// Row echelon basis over the rationals, grown one row at a time. Each stored
/// row has a distinct leading column.
class EchelonBasis {
 public:
  explicit EchelonBasis(std::size_t columns) : columns_(columns) {}

  /// Reduces the row against the basis; returns true (and keeps the residue)
  /// when it was independent.
  bool insert(SparseRow row);
  bool contains(SparseRow row) const;
  std::size_t rank() const { return pivots_.size(); }
  std::size_t columns() const { return columns_; }

  /// Basis of {x : row . x = 0 for every stored row}, one vector per free
  /// column, with a 1 at that column and 0 at the other free columns.
  std::vector<std::vector<Rational>> nullspace() const;

 private:
  void reduce(SparseRow& row) const;

  std::size_t columns_;
  std::map<std::size_t, SparseRow> pivots_;
};

SparseRow to_sparse_row(const std::vector<Rational>& dense);

using DenseRational = std::vector<std::vector<Rational>>;

/// Solves A X = B for square non-singular A by Gauss-Jordan elimination.
/// Throws VerificationFailure when A is singular.
DenseRational solve(DenseRational a, DenseRational b);
DenseRational inverse(const DenseRational& a);

std::size_t rank(const SparseOperator& op);
/// Kernel of the operators stacked vertically (all must share the column table).
std::vector<std::vector<Rational>> nullspace(const std::vector<const SparseOperator*>& stacked);

}  // namespace fractal_hodge
