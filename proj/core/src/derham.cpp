#include "fractal_hodge/derham.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

#include "fractal_hodge/exact_linalg.hpp"

namespace fractal_hodge {

TableId simplex_table(const GasketGraph& graph, int k) {
  return {k, graph.generation(), graph.num_simplices(k)};
}

SparseOperator assemble_d(const GasketGraph& graph, int k) {
  const int n = graph.dimension();
  if (k < -1 || k > n) throw DomainError("d_k requires -1 <= k <= n, got k = " + std::to_string(k));
  std::vector<SparseEntry> entries;
  if (k >= 0 && k < n) {
    for (std::size_t id = 0; id < graph.num_simplices(k + 1); ++id)
      for (const auto& [lower, sign] : facets(graph, k + 1, id)) entries.push_back({id, lower, Rational(sign)});
  }
  return SparseOperator(simplex_table(graph, k + 1), simplex_table(graph, k), std::move(entries));
}

SparseOperator assemble_delta(const GasketGraph& graph, const SimplexWeights& weights, int k) {
  const int n = graph.dimension();
  if (k < 0 || k > n + 1) throw DomainError("delta_k requires 0 <= k <= n+1, got k = " + std::to_string(k));
  std::vector<SparseEntry> entries;
  if (k >= 1 && k <= n) {
    const auto& upper = weights.of(k);
    const auto& lower = weights.of(k - 1);
    if (upper.size() != graph.num_simplices(k) || lower.size() != graph.num_simplices(k - 1))
      throw DomainError("weights do not match the graph");
    for (std::size_t id = 0; id < graph.num_simplices(k); ++id)
      for (const auto& [low, sign] : facets(graph, k, id))
        entries.push_back({low, id, Rational(sign) * upper[id] / lower[low]});
  }
  return SparseOperator(simplex_table(graph, k - 1), simplex_table(graph, k), std::move(entries));
}

SparseOperator laplacian(const GasketGraph& graph, const SimplexWeights& weights, int k) {
  if (k < 0 || k > graph.dimension()) throw DomainError("Laplacian degree must lie in [0, n]");
  auto up = assemble_delta(graph, weights, k + 1).compose(assemble_d(graph, k));
  auto down = assemble_d(graph, k - 1).compose(assemble_delta(graph, weights, k));
  return up + down;
}

Eigen::MatrixXd weighted_orthonormalize(const Eigen::MatrixXd& basis, const Eigen::VectorXd& mu) {
  Eigen::MatrixXd q = basis;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < j; ++i) {
        const double proj = q.col(i).cwiseProduct(mu).dot(q.col(j));
        q.col(j) -= proj * q.col(i);
      }
    const double norm = std::sqrt(q.col(j).cwiseProduct(mu).dot(q.col(j)));
    if (norm == 0) throw VerificationFailure("weighted orthonormalization of a dependent basis");
    q.col(j) /= norm;
  }
  return q;
}

namespace {

Eigen::VectorXd weight_vector(const SimplexWeights& weights, int k) {
  const auto& w = weights.of_double(k);
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

Eigen::VectorXd as_vector(const RealForm& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.values.data(), static_cast<Eigen::Index>(f.size()));
}

RealForm as_form(const Eigen::VectorXd& v, int degree, int generation) {
  return {degree, generation, std::vector<double>(v.data(), v.data() + v.size())};
}

/// Weighted least-squares projection of f onto the column space of B.
Eigen::VectorXd project_onto_image(const Eigen::MatrixXd& b, const Eigen::VectorXd& f, const Eigen::VectorXd& sqrt_mu) {
  if (b.cols() == 0 || b.rows() == 0) return Eigen::VectorXd::Zero(f.size());
  Eigen::MatrixXd a = sqrt_mu.asDiagonal() * b;
  Eigen::VectorXd rhs = sqrt_mu.cwiseProduct(f);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  cod.setThreshold(kFloatRankTolerance);
  Eigen::VectorXd x = cod.solve(rhs);
  for (int step = 0; step < 3; ++step) {
    Eigen::VectorXd r = rhs - a * x;
    x += cod.solve(r);
  }
  return b * x;
}

}  // namespace

HarmonicSpace harmonic_space(const GasketGraph& graph, const SimplexWeights& weights, int k,
                             std::size_t exact_column_limit) {
  if (k < 0 || k > graph.dimension()) throw DomainError("harmonic_space degree must lie in [0, n]");
  const auto d = assemble_d(graph, k);
  const auto delta = assemble_delta(graph, weights, k);
  const std::size_t cols = graph.num_simplices(k);
  const Eigen::VectorXd mu = weight_vector(weights, k);

  HarmonicSpace space;
  space.degree = k;
  if (cols < exact_column_limit) {
    for (auto& v : nullspace({&d, &delta}))
      space.exact_basis.push_back({k, graph.generation(), std::move(v)});
    space.dimension = space.exact_basis.size();
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(space.dimension));
    for (std::size_t j = 0; j < space.dimension; ++j)
      for (std::size_t i = 0; i < cols; ++i) basis(i, j) = space.exact_basis[j].values[i].get_d();
    space.orthonormal = weighted_orthonormalize(basis, mu);
    return space;
  }

  space.exact = false;
  Eigen::MatrixXd stacked(static_cast<Eigen::Index>(d.rows() + delta.rows()), static_cast<Eigen::Index>(cols));
  stacked.topRows(d.rows()) = Eigen::MatrixXd(d.to_eigen());
  stacked.bottomRows(delta.rows()) = Eigen::MatrixXd(delta.to_eigen());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double cutoff = kFloatRankTolerance * (sigma.size() > 0 ? sigma(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
  Eigen::MatrixXd kernel = svd.matrixV().rightCols(static_cast<Eigen::Index>(cols) - rank);
  space.dimension = static_cast<std::size_t>(kernel.cols());
  space.orthonormal = weighted_orthonormalize(kernel, mu);
  return space;
}

HodgeSplit hodge_decompose(const RealForm& f, const GasketGraph& graph, const SimplexWeights& weights) {
  return hodge_decompose(f, graph, weights, harmonic_space(graph, weights, f.degree));
}

HodgeSplit hodge_decompose(const RealForm& f, const GasketGraph& graph, const SimplexWeights& weights,
                           const HarmonicSpace& harmonic) {
  const int k = f.degree;
  if (f.generation != graph.generation() || f.size() != graph.num_simplices(k) || harmonic.degree != k)
    throw DomainError("hodge_decompose: form does not match the graph");
  const Eigen::VectorXd mu = weight_vector(weights, k);
  const Eigen::VectorXd sqrt_mu = mu.cwiseSqrt();
  const Eigen::VectorXd v = as_vector(f);

  const Eigen::MatrixXd d_below(assemble_d(graph, k - 1).to_eigen());
  const Eigen::MatrixXd delta_above(assemble_delta(graph, weights, k + 1).to_eigen());
  const Eigen::VectorXd exact = project_onto_image(d_below, v, sqrt_mu);
  const Eigen::VectorXd coexact = project_onto_image(delta_above, v, sqrt_mu);
  const Eigen::MatrixXd& q = harmonic.orthonormal;
  const Eigen::VectorXd harm = q.cols() == 0 ? Eigen::VectorXd::Zero(v.size()) : Eigen::VectorXd(q * (q.transpose() * mu.cwiseProduct(v)));

  auto inner = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.cwiseProduct(mu).dot(b); };
  const double fnorm2 = inner(v, v);
  HodgeSplit split;
  split.exact = as_form(exact, k, f.generation);
  split.coexact = as_form(coexact, k, f.generation);
  split.harmonic = as_form(harm, k, f.generation);
  const Eigen::VectorXd rest = v - exact - coexact - harm;
  split.residual_norm = std::sqrt(inner(rest, rest)) / std::max(1.0, std::sqrt(fnorm2));
  split.orthogonality_residual =
      std::max({std::abs(inner(exact, coexact)), std::abs(inner(exact, harm)), std::abs(inner(coexact, harm))}) /
      std::max(1.0, fnorm2);
  return split;
}

StokesCheck verify_stokes(const ExactForm& f, const Chain& c, const GasketGraph& graph) {
  if (c.degree != f.degree + 1) throw DomainError("Stokes check needs a chain one degree above the form");
  if (c.generation != graph.generation() || f.generation != graph.generation())
    throw DomainError("Stokes check across generations");
  StokesCheck out;
  out.lhs = integrate(assemble_d(graph, f.degree).apply(f), c);
  out.rhs = integrate(f, boundary(graph, c));
  out.equal = out.lhs == out.rhs;
  return out;
}

}  // namespace fractal_hodge
