#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

#include "fractal_hodge/forms.hpp"
#include "fractal_hodge/gasket.hpp"
#include "fractal_hodge/sparse_operator.hpp"

namespace fractal_hodge {

/// Column count from which harmonic_space switches to the floating-point path.
inline constexpr std::size_t kExactKernelColumnLimit = 5000;
/// Relative singular-value threshold of the floating-point rank decisions.
inline constexpr double kFloatRankTolerance = 1e-9;

TableId simplex_table(const GasketGraph& graph, int k);

/// d_k : k-forms -> (k+1)-forms for -1 <= k <= n. d_n and d_{-1} are the
/// zero maps between the corresponding (possibly empty) tables.
SparseOperator assemble_d(const GasketGraph& graph, int k);

/// delta_k : k-forms -> (k-1)-forms for 0 <= k <= n+1, the weighted adjoint
/// mu_{k-1}^{-1} d_{k-1}^T mu_k.
SparseOperator assemble_delta(const GasketGraph& graph, const SimplexWeights& weights, int k);

/// -Delta_k = delta_{k+1} d_k + d_{k-1} delta_k.
SparseOperator laplacian(const GasketGraph& graph, const SimplexWeights& weights, int k);

template <class Scalar>
Scalar energy(const KForm<Scalar>& f, const GasketGraph& graph, const SimplexWeights& weights) {
  auto df = assemble_d(graph, f.degree).apply(f);
  auto bf = assemble_delta(graph, weights, f.degree).apply(f);
  return inner_product(df, df, weights) + inner_product(bf, bf, weights);
}

struct HarmonicSpace {
  int degree = 0;
  bool exact = true;
  std::size_t dimension = 0;
  /// Filled on the exact path.
  std::vector<ExactForm> exact_basis;
  /// Columns orthonormal in the weighted inner product; filled on both paths.
  Eigen::MatrixXd orthonormal;
};

/// ker d_k intersected with ker delta_k.
HarmonicSpace harmonic_space(const GasketGraph& graph, const SimplexWeights& weights, int k,
                             std::size_t exact_column_limit = kExactKernelColumnLimit);

/// Columns of `basis` made orthonormal for the diagonal weight `mu`.
Eigen::MatrixXd weighted_orthonormalize(const Eigen::MatrixXd& basis, const Eigen::VectorXd& mu);

struct HodgeSplit {
  RealForm exact;
  RealForm coexact;
  RealForm harmonic;
  /// Weighted norm of f - (exact + coexact + harmonic), relative to max(1, |f|).
  double residual_norm = 0;
  /// Largest |<a, b>| over the three component pairs, relative to max(1, |f|^2).
  double orthogonality_residual = 0;
};

HodgeSplit hodge_decompose(const RealForm& f, const GasketGraph& graph, const SimplexWeights& weights);
HodgeSplit hodge_decompose(const RealForm& f, const GasketGraph& graph, const SimplexWeights& weights,
                           const HarmonicSpace& harmonic);

struct StokesCheck {
  Rational lhs;
  Rational rhs;
  bool equal = false;
};

/// Integral of d f over c against the integral of f over the boundary of c.
StokesCheck verify_stokes(const ExactForm& f, const Chain& c, const GasketGraph& graph);

}  // namespace fractal_hodge
