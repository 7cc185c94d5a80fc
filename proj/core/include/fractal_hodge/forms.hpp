#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "fractal_hodge/errors.hpp"
#include "fractal_hodge/gasket.hpp"
#include "fractal_hodge/rational.hpp"

namespace fractal_hodge {

/// Scalar function on the k-simplices of one generation, indexed by simplex id.
template <class Scalar>
struct KForm {
  int degree = 0;
  int generation = 0;
  std::vector<Scalar> values;

  std::size_t size() const { return values.size(); }
  bool operator==(const KForm&) const = default;
};

using ExactForm = KForm<Rational>;
using RealForm = KForm<double>;
using ComplexForm = KForm<std::complex<double>>;

template <class Scalar>
KForm<Scalar> zero_form(const GasketGraph& graph, int k) {
  return {k, graph.generation(), std::vector<Scalar>(graph.num_simplices(k), Scalar(0))};
}

RealForm to_real(const ExactForm& f);

/// Base measures mu_k^0 on the faces of the initial simplex and per-map
/// multipliers b_k^j. base[k][r] belongs to local face r of size k+1;
/// multipliers[k][j] to map j.
struct WeightSystem {
  std::vector<std::vector<Rational>> base;
  std::vector<std::vector<Rational>> multipliers;

  static WeightSystem uniform(int n, std::size_t num_maps);
  /// Throws DomainError on wrong shape or a non-positive entry.
  void validate(int n, std::size_t num_maps) const;
  bool operator==(const WeightSystem&) const = default;
};

/// Per-simplex measures mu_k for every degree 0..n of one graph.
class SimplexWeights {
 public:
  SimplexWeights() = default;
  explicit SimplexWeights(std::vector<std::vector<Rational>> per_degree);

  /// Empty for k = -1 and k = n+1.
  const std::vector<Rational>& of(int k) const;
  const Rational& at(int k, std::size_t id) const { return of(k).at(id); }
  const std::vector<double>& of_double(int k) const;
  int max_degree() const { return static_cast<int>(mu_.size()) - 1; }

 private:
  std::vector<std::vector<Rational>> mu_;
  std::vector<std::vector<double>> mu_double_;
};

SimplexWeights assemble_weights(const GasketGraph& graph, const WeightSystem& weights);
SimplexWeights unit_weights(const GasketGraph& graph);

/// The k-faces of a (k+1)-simplex with their incidence signs, in the order of
/// the omitted local vertex.
std::vector<std::pair<std::size_t, int>> facets(const GasketGraph& graph, int upper_degree, std::size_t upper_id);

/// sgn(lower, upper) for a k-simplex and a (k+1)-simplex of the same graph.
int sign_incidence(const GasketGraph& graph, SimplexRef lower, SimplexRef upper);

/// Formal combination of k-simplices with exact coefficients. Zero
/// coefficients are never stored.
struct Chain {
  int degree = 0;
  int generation = 0;
  std::map<std::size_t, Rational> coefficients;

  void add(std::size_t id, const Rational& a);
  bool empty() const { return coefficients.empty(); }
  bool operator==(const Chain&) const = default;
};

Chain boundary(const GasketGraph& graph, const Chain& chain);

namespace detail {
inline Rational conj(const Rational& x) { return x; }
inline double conj(double x) { return x; }
inline std::complex<double> conj(const std::complex<double>& x) { return std::conj(x); }
inline const Rational& weight_as(const Rational& w, const Rational*) { return w; }
inline double weight_as(const Rational& w, const double*) { return w.get_d(); }
inline double weight_as(const Rational& w, const std::complex<double>*) { return w.get_d(); }

template <class A, class B>
void require_same_shape(const KForm<A>& f, const KForm<B>& g) {
  if (f.degree != g.degree || f.generation != g.generation || f.size() != g.size())
    throw DomainError("forms differ in degree, generation or length");
}
}  // namespace detail

/// sum_e mu_k(e) f(e) conj(g(e)).
template <class Scalar>
Scalar inner_product(const KForm<Scalar>& f, const KForm<Scalar>& g, const SimplexWeights& weights) {
  detail::require_same_shape(f, g);
  const auto& mu = weights.of(f.degree);
  if (mu.size() != f.size()) throw DomainError("weights do not match the form's simplex table");
  Scalar sum(0);
  for (std::size_t i = 0; i < f.size(); ++i)
    sum += detail::weight_as(mu[i], static_cast<const Scalar*>(nullptr)) * f.values[i] * detail::conj(g.values[i]);
  return sum;
}

template <class Scalar>
Scalar integrate(const KForm<Scalar>& f, const Chain& chain) {
  if (f.degree != chain.degree || f.generation != chain.generation)
    throw DomainError("form and chain differ in degree or generation");
  Scalar sum(0);
  for (const auto& [id, a] : chain.coefficients) {
    if (id >= f.size()) throw DomainError("chain references a simplex outside the form");
    sum += detail::weight_as(a, static_cast<const Scalar*>(nullptr)) * f.values[id];
  }
  return sum;
}

}  // namespace fractal_hodge
