#include "fractal_hodge/sparse_operator.hpp"

#include <algorithm>
#include <map>

namespace fractal_hodge {

SparseOperator::SparseOperator(TableId rows, TableId cols, std::vector<SparseEntry> entries)
    : rows_(rows), cols_(cols) {
  for (const auto& e : entries)
    if (e.row >= rows.size || e.col >= cols.size) throw DomainError("sparse entry outside the operator shape");
  std::sort(entries.begin(), entries.end(), [](const SparseEntry& a, const SparseEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_offsets_.assign(rows.size + 1, 0);
  for (std::size_t i = 0; i < entries.size();) {
    std::size_t j = i;
    Rational sum(0);
    while (j < entries.size() && entries[j].row == entries[i].row && entries[j].col == entries[i].col)
      sum += entries[j++].value;
    if (sgn(sum) != 0) {
      col_index_.push_back(entries[i].col);
      values_double_.push_back(sum.get_d());
      values_.push_back(std::move(sum));
      ++row_offsets_[entries[i].row + 1];
    }
    i = j;
  }
  for (std::size_t r = 0; r < rows.size; ++r) row_offsets_[r + 1] += row_offsets_[r];
}

std::vector<SparseEntry> SparseOperator::entries() const {
  std::vector<SparseEntry> out;
  out.reserve(values_.size());
  for (std::size_t r = 0; r < rows_.size; ++r)
    for (std::size_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i) out.push_back({r, col_index_[i], values_[i]});
  return out;
}

Rational SparseOperator::coeff(std::size_t row, std::size_t col) const {
  if (row >= rows_.size || col >= cols_.size) throw DomainError("coefficient index outside the operator shape");
  auto first = col_index_.begin() + row_offsets_[row];
  auto last = col_index_.begin() + row_offsets_[row + 1];
  auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return Rational(0);
  return values_[it - col_index_.begin()];
}

SparseOperator SparseOperator::transpose() const {
  auto e = entries();
  for (auto& x : e) std::swap(x.row, x.col);
  return SparseOperator(cols_, rows_, std::move(e));
}

SparseOperator SparseOperator::compose(const SparseOperator& rhs) const {
  if (cols_.size != rhs.rows_.size) throw DomainError("operator composition with incompatible shapes");
  std::vector<SparseEntry> out;
  std::map<std::size_t, Rational> acc;
  for (std::size_t r = 0; r < rows_.size; ++r) {
    acc.clear();
    for (std::size_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i) {
      const std::size_t mid = col_index_[i];
      for (std::size_t j = rhs.row_offsets_[mid]; j < rhs.row_offsets_[mid + 1]; ++j)
        acc[rhs.col_index_[j]] += values_[i] * rhs.values_[j];
    }
    for (auto& [c, v] : acc)
      if (sgn(v) != 0) out.push_back({r, c, v});
  }
  return SparseOperator(rows_, rhs.cols_, std::move(out));
}

SparseOperator SparseOperator::operator+(const SparseOperator& rhs) const {
  if (rows_.size != rhs.rows_.size || cols_.size != rhs.cols_.size)
    throw DomainError("operator sum with incompatible shapes");
  auto e = entries();
  auto f = rhs.entries();
  e.insert(e.end(), f.begin(), f.end());
  return SparseOperator(rows_, cols_, std::move(e));
}

SparseOperator SparseOperator::scaled(const std::vector<Rational>& left, const std::vector<Rational>& right) const {
  if (left.size() != rows_.size || right.size() != cols_.size) throw DomainError("diagonal scaling has wrong length");
  auto e = entries();
  for (auto& x : e) x.value = left[x.row] * x.value * right[x.col];
  return SparseOperator(rows_, cols_, std::move(e));
}

Eigen::SparseMatrix<double> SparseOperator::to_eigen() const {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(values_.size());
  for (std::size_t r = 0; r < rows_.size; ++r)
    for (std::size_t i = row_offsets_[r]; i < row_offsets_[r + 1]; ++i)
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(col_index_[i]), values_double_[i]);
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(rows_.size), static_cast<Eigen::Index>(cols_.size));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace fractal_hodge
