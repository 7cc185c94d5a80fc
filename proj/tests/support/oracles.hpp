#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library's construction code paths.

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <fractal_hodge/forms.hpp>
#include <fractal_hodge/gasket.hpp>
#include <fractal_hodge/rational.hpp>

namespace oracle {

using fractal_hodge::Rational;
using Point = std::vector<Rational>;

inline std::vector<std::vector<int>> offsets(int n, int level) {
  // Brute force over all (n+1)-tuples in [0, level-1], keeping those summing to level-1.
  std::vector<std::vector<int>> out;
  std::vector<int> t(n + 1, 0);
  while (true) {
    int s = 0;
    for (int x : t) s += x;
    if (s == level - 1) out.push_back(t);
    int i = n;
    while (i >= 0 && t[i] == level - 1) t[i--] = 0;
    if (i < 0) break;
    ++t[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Point corner(int n, int j) {
  Point p(n + 1, Rational(0));
  p[j] = 1;
  return p;
}

/// F_word(x) with the word applied outermost-first: F_{w1} o ... o F_{wm}.
inline Point apply_word(const std::vector<std::vector<int>>& maps, int level, const std::vector<int>& word, Point x) {
  for (auto it = word.rbegin(); it != word.rend(); ++it)
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (x[i] + maps[*it][i]) / level;
  return x;
}

inline std::vector<std::vector<int>> all_words(std::size_t alphabet, int length) {
  std::vector<std::vector<int>> words{{}};
  for (int l = 0; l < length; ++l) {
    std::vector<std::vector<int>> next;
    for (const auto& w : words)
      for (std::size_t a = 0; a < alphabet; ++a) {
        auto v = w;
        v.push_back(static_cast<int>(a));
        next.push_back(v);
      }
    words = std::move(next);
  }
  return words;
}

/// Distinct points F_w(q_j) together with their preimage counts.
inline std::map<Point, int> vertex_multiplicities(int n, int level, int m) {
  auto maps = offsets(n, level);
  std::map<Point, int> out;
  for (const auto& w : all_words(maps.size(), m))
    for (int j = 0; j <= n; ++j) ++out[apply_word(maps, level, w, corner(n, j))];
  return out;
}

/// Sign of the permutation sorting `seq` (all distinct).
inline int permutation_parity(std::vector<std::size_t> seq) {
  int sign = 1;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] > seq[j]) sign = -sign;
  return sign;
}

/// Orientation-based incidence from vertex tuples alone: lower must equal upper
/// with one vertex removed; the sign compares the orientation of (v, lower...)
/// to that of upper.
inline int incidence(const std::vector<std::size_t>& lower, const std::vector<std::size_t>& upper) {
  if (upper.size() != lower.size() + 1) return 0;
  std::vector<std::size_t> rest;
  std::size_t missing = 0;
  int found = 0;
  for (std::size_t v : upper) {
    if (std::find(lower.begin(), lower.end(), v) == lower.end()) {
      missing = v;
      ++found;
    }
  }
  if (found != 1) return 0;
  std::vector<std::size_t> candidate{missing};
  candidate.insert(candidate.end(), lower.begin(), lower.end());
  // Map vertex ids to positions in `upper` and take the parity.
  std::vector<std::size_t> positions;
  for (std::size_t v : candidate) positions.push_back(std::find(upper.begin(), upper.end(), v) - upper.begin());
  return permutation_parity(positions);
}

class RandomRationals {
 public:
  explicit RandomRationals(std::uint64_t seed) : rng_(seed) {}

  Rational next(int bound = 9) {
    std::uniform_int_distribution<int> num(-bound, bound);
    std::uniform_int_distribution<int> den(1, bound);
    Rational r(num(rng_), den(rng_));
    r.canonicalize();
    return r;
  }

  Rational positive(int bound = 9) {
    std::uniform_int_distribution<int> num(1, bound);
    std::uniform_int_distribution<int> den(1, bound);
    Rational r(num(rng_), den(rng_));
    r.canonicalize();
    return r;
  }

  std::vector<Rational> vector(std::size_t size, int bound = 9) {
    std::vector<Rational> v;
    v.reserve(size);
    for (std::size_t i = 0; i < size; ++i) v.push_back(next(bound));
    return v;
  }

  std::size_t index(std::size_t size) { return std::uniform_int_distribution<std::size_t>(0, size - 1)(rng_); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline fractal_hodge::ExactForm random_form(const fractal_hodge::GasketGraph& g, int k, RandomRationals& rng) {
  return {k, g.generation(), rng.vector(g.num_simplices(k))};
}

inline fractal_hodge::Chain random_chain(const fractal_hodge::GasketGraph& g, int k, RandomRationals& rng,
                                         std::size_t terms = 6) {
  fractal_hodge::Chain c{k, g.generation(), {}};
  for (std::size_t t = 0; t < terms; ++t) c.add(rng.index(g.num_simplices(k)), rng.next());
  return c;
}

}  // namespace oracle
