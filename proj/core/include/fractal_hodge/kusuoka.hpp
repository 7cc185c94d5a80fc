#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fractal_hodge/gasket.hpp"
#include "fractal_hodge/rational.hpp"

namespace fractal_hodge {

// Energy measures on SG_3^2.
//
// Cell labels 0..5 used by the transfer matrices are distinct from the
// lexicographic map indices used by GasketGraph: labels 0, 1, 2 are the corner
// cells at q_0, q_1, q_2 and labels 3, 4, 5 the middle cells, label 3 being the
// one opposite q_0. Labels 1, 2, 3 are the cells meeting the edge [q_1, q_2].

using Vec3 = std::array<Rational, 3>;
using Mat3 = std::array<Vec3, 3>;

Mat3 operator*(const Mat3& a, const Mat3& b);
Vec3 operator*(const Mat3& a, const Vec3& v);
Mat3 operator+(const Mat3& a, const Mat3& b);
Mat3 identity3();
Mat3 transpose(const Mat3& a);

/// Lexicographic map index of a transfer-matrix cell label.
int map_of_label(int label);
/// Converts a word written in cell labels to map indices.
Word word_of_labels(const std::vector<int>& labels);

struct KusuokaModel {
  enum class Source { printed, derived };

  Source source = Source::derived;
  Mat3 E1, E2, E3;
  Mat3 C;
  /// (nu(F_0 K), nu(F_1 K), nu(F_2 K)).
  Vec3 e;
  /// Boundary values of h and h_perp on (q_0, q_1, q_2) before normalization,
  /// and their energies. The normalized pair is orthonormal in energy.
  std::array<Vec3, 2> basis;
  std::array<Rational, 2> basis_energy;
  /// Energy renormalization factor per generation.
  Rational rho;
  /// Map index of each cell label.
  std::array<int, 6> label_to_map{};

  const Mat3& transfer(int letter) const;
  Mat3 growth_matrix() const { return E1 + E2 + E3; }
};

/// Re-derives rho, E_1, E_2, E_3, C and e from the harmonic extension rule of
/// SG_3^2. Throws VerificationFailure if any relation fails to hold exactly.
KusuokaModel derive_transfer();

/// The matrices as printed, with e and the basis taken from the derived model.
KusuokaModel printed_model();

/// Renormalized energy of the harmonic function with the given boundary values
/// restricted to F_word K. Letters are map indices.
Rational energy_measure(const Vec3& boundary, const Word& word);

/// Kusuoka measure nu(F_word K) from the energy-orthonormal basis, computed
/// directly from the extension rule.
Rational kusuoka_cell_measure(const Word& word);

/// 1^T (I + C) E_{w_m} ... E_{w_1} e for a word of labels in {1, 2, 3}.
Rational transfer_formula(const KusuokaModel& model, const std::vector<int>& labels);

inline constexpr int kMaxOmegaDepth = 16;

struct OmegaMeasure {
  int depth = 0;
  Rational oracle;
  Rational formula;
};

/// nu(Omega_n) by enumerating the 3^n cells and by 1^T (I+C) A^n e.
OmegaMeasure nu_omega_n(const KusuokaModel& model, int depth);

/// center +- sqrt(radicand).
struct SurdPair {
  Rational center;
  Rational radicand;

  double plus() const;
  double minus() const;
  bool operator==(const SurdPair&) const = default;
};

struct SpectralData {
  Mat3 A;
  /// Entries of the restriction to vectors (c, d, d).
  std::array<std::array<Rational, 2>, 2> B;
  bool swap_symmetric = false;
  /// Eigenvalue on (0, 1, -1) when that vector is an eigenvector.
  std::optional<Rational> antisymmetric;
  SurdPair symmetric;
  std::vector<std::complex<double>> eigenvalues;
  Rational trace;
};

SpectralData spectral_growth(const KusuokaModel& model);

struct DiscrepancyEntry {
  std::string entry;
  std::string printed;
  std::string derived;
  bool equal = false;
  std::string note;
};

/// Entrywise comparison of the printed and derived models and of the printed
/// spectral claims.
std::vector<DiscrepancyEntry> discrepancy_report();

struct TwoTermFit {
  double a = 0;
  double b = 0;
  double lambda_plus = 0;
  double lambda_minus = 0;
  double max_relative_residual = 0;
};

/// Least-squares fit of values[i] = a lambda_+^n + b lambda_-^n, n = first + i.
TwoTermFit fit_two_term(const std::vector<double>& values, int first, const SurdPair& lambdas);

struct EdgeSegment {
  int generation = 0;
  Word word;
  int a = 1;
  int b = 2;
};

/// Barycentric point of SG_3^2.
using Point3 = std::array<double, 3>;
using SampledFunction = std::function<double(const Point3&)>;

/// (6/3)^n times the centroid-sampled mu-integral of f over the generation-n
/// cells containing a sub-edge of the segment.
double delta2_balanced(const SampledFunction& f, const EdgeSegment& edge, int depth);
/// Values for depths edge.generation .. depth.
std::vector<double> delta2_balanced_sequence(const SampledFunction& f, const EdgeSegment& edge, int depth);

/// (1/2)^n times the sum of f1 over the generation-n edges inside the cell.
double d1_renormalized(const std::function<double(const EdgeSegment&)>& f1, const Word& cell, int depth);

struct MeasureIdentityCell {
  Word cell;
  double lhs = 0;
  double rhs = 0;
  /// lhs / rhs, or lhs - rhs when rhs vanishes.
  double value = 0;
  bool is_ratio = true;
};

/// d1_renormalized(delta2_balanced(f, ., depth + inner_extra), cell, depth)
/// against 3 * integral of f over the cell, for every generation-m cell.
std::vector<MeasureIdentityCell> check_measure_identity(const SampledFunction& f, int m, int depth, int inner_extra = 1);

/// lambda_+^{-n} times the centroid-sampled nu-integral of f over Omega_n, for
/// n = 0 .. depth.
std::vector<double> delta2_prime_kusuoka(const KusuokaModel& model, const SampledFunction& f, int depth);

inline constexpr int kMaxSamplingDepth = 13;

}  // namespace fractal_hodge
