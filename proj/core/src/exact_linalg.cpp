#include "fractal_hodge/exact_linalg.hpp"

#include "fractal_hodge/errors.hpp"

namespace fractal_hodge {

void EchelonBasis::reduce(SparseRow& row) const {
  auto it = row.begin();
  while (it != row.end()) {
    auto pivot = pivots_.find(it->first);
    if (pivot == pivots_.end()) {
      ++it;
      continue;
    }
    const std::size_t col = it->first;
    const Rational factor = it->second / pivot->second.begin()->second;
    for (const auto& [c, v] : pivot->second) {
      auto [slot, inserted] = row.try_emplace(c, 0);
      slot->second -= factor * v;
      if (sgn(slot->second) == 0) row.erase(slot);
    }
    it = row.upper_bound(col);
  }
}

bool EchelonBasis::insert(SparseRow row) {
  for (auto it = row.begin(); it != row.end();) {
    if (it->first >= columns_) throw DomainError("row entry beyond the column count");
    it = sgn(it->second) == 0 ? row.erase(it) : std::next(it);
  }
  reduce(row);
  if (row.empty()) return false;
  const std::size_t lead = row.begin()->first;
  pivots_.emplace(lead, std::move(row));
  return true;
}

bool EchelonBasis::contains(SparseRow row) const {
  for (auto it = row.begin(); it != row.end();) it = sgn(it->second) == 0 ? row.erase(it) : std::next(it);
  reduce(row);
  return row.empty();
}

std::vector<std::vector<Rational>> EchelonBasis::nullspace() const {
  std::vector<std::vector<Rational>> basis;
  for (std::size_t free = 0; free < columns_; ++free) {
    if (pivots_.count(free)) continue;
    std::vector<Rational> x(columns_, Rational(0));
    x[free] = 1;
    for (auto it = pivots_.rbegin(); it != pivots_.rend(); ++it) {
      const auto& [lead, row] = *it;
      Rational acc(0);
      for (auto e = std::next(row.begin()); e != row.end(); ++e)
        if (sgn(x[e->first]) != 0) acc += e->second * x[e->first];
      x[lead] = -acc / row.begin()->second;
    }
    basis.push_back(std::move(x));
  }
  return basis;
}

SparseRow to_sparse_row(const std::vector<Rational>& dense) {
  SparseRow row;
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (sgn(dense[i]) != 0) row.emplace(i, dense[i]);
  return row;
}

DenseRational solve(DenseRational a, DenseRational b) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DomainError("solve: right-hand side has the wrong row count");
  for (const auto& row : a)
    if (row.size() != n) throw DomainError("solve: matrix is not square");
  const std::size_t rhs = n == 0 ? 0 : b.front().size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(a[pivot][col]) == 0) ++pivot;
    if (pivot == n) throw VerificationFailure("solve: singular matrix");
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    const Rational inv = 1 / a[col][col];
    for (auto& x : a[col]) x *= inv;
    for (auto& x : b[col]) x *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      const Rational factor = a[r][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      for (std::size_t c = 0; c < rhs; ++c) b[r][c] -= factor * b[col][c];
    }
  }
  return b;
}

DenseRational inverse(const DenseRational& a) {
  DenseRational id(a.size(), std::vector<Rational>(a.size(), Rational(0)));
  for (std::size_t i = 0; i < a.size(); ++i) id[i][i] = 1;
  return solve(a, std::move(id));
}

namespace {

void insert_rows(EchelonBasis& basis, const SparseOperator& op) {
  std::vector<SparseRow> rows(op.rows());
  for (const auto& e : op.entries()) rows[e.row].emplace(e.col, e.value);
  for (auto& row : rows)
    if (!row.empty()) basis.insert(std::move(row));
}

}  // namespace

std::size_t rank(const SparseOperator& op) {
  EchelonBasis basis(op.cols());
  insert_rows(basis, op);
  return basis.rank();
}

std::vector<std::vector<Rational>> nullspace(const std::vector<const SparseOperator*>& stacked) {
  if (stacked.empty()) throw DomainError("nullspace of an empty operator stack");
  EchelonBasis basis(stacked.front()->cols());
  for (const auto* op : stacked) {
    if (op->cols() != basis.columns()) throw DomainError("stacked operators differ in column count");
    insert_rows(basis, *op);
  }
  return basis.nullspace();
}

}  // namespace fractal_hodge
