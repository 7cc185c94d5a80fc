#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "fractal_hodge/forms.hpp"
#include "fractal_hodge/gasket.hpp"
#include "fractal_hodge/rational.hpp"

namespace fractal_hodge {

/// Harmonic extension weights on G_level^{n,1}: the value at every level-1
/// point as a combination of the values at q_0..q_n. Points are keyed by their
/// barycentric numerators over `level`; corners map to unit vectors.
struct ExtensionRule {
  int n = 0;
  int level = 0;
  std::map<std::vector<Coord>, std::vector<Rational>> coefficients;

  const std::vector<Rational>& at(const std::vector<Coord>& point) const;
};

/// Solves the interior mean-value system of G_level^{n,1} exactly.
ExtensionRule extension_rule(int n, int level);

/// Extends a generation-m 0-form to generation m+1 cell by cell.
ExactForm extend_zero_form(const ExactForm& f, const GasketGraph& coarse, const GasketGraph& fine,
                           const ExtensionRule& rule);

/// Throws VerificationFailure unless d_1 h = 0 and delta_1 h = 0 exactly.
void require_harmonic_one_form(const ExactForm& h, const GasketGraph& graph, const SimplexWeights& weights);

/// Extends a harmonic 1-form from generation m to m+1 through per-cell local
/// potentials anchored at corner 0.
ExactForm extend_one_form(const ExactForm& h, const GasketGraph& coarse, const GasketGraph& fine,
                          const ExtensionRule& rule, const SimplexWeights& coarse_weights);

/// Generation-(g + depth) edges subdividing the generation-g edge given by a
/// cell index and local corners a < b, in the fine graph's numbering. All
/// sub-edges carry the orientation of the parent edge.
std::vector<std::size_t> refine_edge(const GasketGraph& fine, std::size_t coarse_cell, int depth, int a, int b);

/// Coarse edge ids whose value differs from the sum over their sub-edges.
std::vector<std::size_t> telescoping_violations(const ExactForm& coarse_form, const ExactForm& fine_form,
                                                const GasketGraph& coarse, const GasketGraph& fine);

/// h o F_word^{-1} on the generation |word|+1 graph, zero off the cell.
ExactForm localize(const ExactForm& h, const Word& word, const GasketGraph& target);

struct CycleBasis {
  int generation = 0;
  /// Number of generation-1 cycles.
  std::size_t per_cell = 0;
  std::vector<Chain> cycles;
  std::vector<Word> words;
  std::vector<int> indices;
};

/// Generation-1 cycle templates as 1-chains on G_level^{n,1}. For n = 2 these
/// are the downward triangles; otherwise fundamental cycles of a spanning tree
/// kept when independent modulo boundaries of 2-simplices.
std::vector<Chain> level_one_cycles(const GasketGraph& level_one);

/// Images F_word(gamma_i) for |word| <= m-1, subdivided to generation m.
CycleBasis cycle_basis(const GasketGraph& graph);

/// P(i, j) = integral of forms[j] over cycles[i].
std::vector<std::vector<Rational>> cycle_integral_matrix(const std::vector<ExactForm>& forms,
                                                         const std::vector<Chain>& cycles);

struct TaggedForm {
  Word word;
  int index = 0;
  ExactForm form;
};

struct HarmonicOneBasis {
  std::size_t per_cell = 0;
  std::size_t expected_dimension = 0;
  std::size_t kernel_dimension = 0;
  std::vector<TaggedForm> forms;
};

/// Generation-1 harmonic 1-forms normalized so that the integral of h_j over
/// gamma_i is the Kronecker delta.
std::vector<ExactForm> normalized_level_one_basis(const GasketGraph& level_one);

/// {h_j o F_w^{-1} : |w| <= m-1} extended to generation m, unit weights.
/// Throws VerificationFailure when the count, the rank, or the kernel oracle
/// dimension disagree.
HarmonicOneBasis harmonic_one_basis(int n, int level, int generation,
                                    std::uint64_t simplex_cap = kDefaultSimplexCap);

}  // namespace fractal_hodge
