#pragma once

#include <Eigen/Sparse>

#include <complex>
#include <cstddef>
#include <vector>

#include "fractal_hodge/errors.hpp"
#include "fractal_hodge/forms.hpp"
#include "fractal_hodge/rational.hpp"

namespace fractal_hodge {

/// Which simplex table a row or column index refers to.
struct TableId {
  int degree = 0;
  int generation = 0;
  std::size_t size = 0;

  bool operator==(const TableId&) const = default;
};

struct SparseEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  Rational value;
};

/// Exact sparse matrix between two simplex tables, stored row-compressed.
/// Duplicate (row, col) triples are summed on construction and zeros dropped.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(TableId rows, TableId cols, std::vector<SparseEntry> entries);

  const TableId& row_table() const { return rows_; }
  const TableId& col_table() const { return cols_; }
  std::size_t rows() const { return rows_.size; }
  std::size_t cols() const { return cols_.size; }
  std::size_t nonzeros() const { return values_.size(); }

  std::vector<SparseEntry> entries() const;
  Rational coeff(std::size_t row, std::size_t col) const;
  bool is_zero() const { return values_.empty(); }

  template <class Scalar>
  KForm<Scalar> apply(const KForm<Scalar>& f) const;

  SparseOperator transpose() const;
  /// this * rhs; the rhs row table must equal this column table in size.
  SparseOperator compose(const SparseOperator& rhs) const;
  SparseOperator operator+(const SparseOperator& rhs) const;
  /// Left and right multiplication by diagonal matrices.
  SparseOperator scaled(const std::vector<Rational>& left, const std::vector<Rational>& right) const;

  Eigen::SparseMatrix<double> to_eigen() const;

  bool operator==(const SparseOperator&) const = default;

 private:
  TableId rows_;
  TableId cols_;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_index_;
  std::vector<Rational> values_;
  std::vector<double> values_double_;

  const Rational& value_as(std::size_t i, const Rational*) const { return values_[i]; }
  double value_as(std::size_t i, const double*) const { return values_double_[i]; }
  double value_as(std::size_t i, const std::complex<double>*) const { return values_double_[i]; }
};

template <class Scalar>
KForm<Scalar> SparseOperator::apply(const KForm<Scalar>& f) const {
  if (f.degree != cols_.degree || f.size() != cols_.size)
    throw DomainError("operator input has the wrong degree or length");
  KForm<Scalar> out{rows_.degree, rows_.generation, std::vector<Scalar>(rows_.size, Scalar(0))};
  for (std::size_t r = 0; r < rows_.size; ++r) {
    Scalar acc(0);
    for (std::size_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i)
      acc += value_as(i, static_cast<const Scalar*>(nullptr)) * f.values[col_index_[i]];
    out.values[r] = acc;
  }
  return out;
}

}  // namespace fractal_hodge
