#include "fractal_hodge/verify.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "fractal_hodge/derham.hpp"
#include "fractal_hodge/errors.hpp"
#include "fractal_hodge/exact_linalg.hpp"
#include "fractal_hodge/harmonic.hpp"
#include "fractal_hodge/io.hpp"
#include "fractal_hodge/kusuoka.hpp"

#ifndef FRACTAL_HODGE_VERSION
#define FRACTAL_HODGE_VERSION "unknown"
#endif

namespace fractal_hodge {

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::erratum: return "erratum";
  }
  return "fail";
}

void VerificationReport::add(Check check) {
  for (const auto& c : checks)
    if (c.id == check.id) throw DomainError("duplicate check id " + check.id);
  checks.push_back(std::move(check));
}

std::size_t VerificationReport::failures() const {
  return std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.status == CheckStatus::fail; });
}

std::size_t VerificationReport::errata() const {
  return std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.status == CheckStatus::erratum; });
}

namespace {

struct GraphCase {
  int n, level, m;
};

std::string tag(const GraphCase& c) {
  return "n" + std::to_string(c.n) + ".l" + std::to_string(c.level) + ".m" + std::to_string(c.m);
}

std::string num(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

Check exact(std::string id, std::string description, const std::string& lhs, const std::string& rhs) {
  Check c{std::move(id), std::move(description), lhs == rhs ? CheckStatus::pass : CheckStatus::fail, lhs, rhs, 0, {}};
  return c;
}

Check truth(std::string id, std::string description, bool ok, std::string detail = {}) {
  return {std::move(id), std::move(description), ok ? CheckStatus::pass : CheckStatus::fail,
          ok ? "true" : "false", "true", 0, std::move(detail)};
}

Check bounded(std::string id, std::string description, double value, double target, double tolerance) {
  const bool ok = std::isfinite(value) && std::abs(value - target) <= tolerance;
  return {std::move(id), std::move(description), ok ? CheckStatus::pass : CheckStatus::fail, num(value), num(target),
          tolerance, {}};
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Rational next(int bound = 9) {
    Rational r(std::uniform_int_distribution<int>(-bound, bound)(engine_),
               std::uniform_int_distribution<int>(1, bound)(engine_));
    r.canonicalize();
    return r;
  }
  Rational positive(int bound = 9) {
    Rational r(std::uniform_int_distribution<int>(1, bound)(engine_),
               std::uniform_int_distribution<int>(1, bound)(engine_));
    r.canonicalize();
    return r;
  }
  std::size_t index(std::size_t size) { return std::uniform_int_distribution<std::size_t>(0, size - 1)(engine_); }
  double normal() { return std::normal_distribution<double>()(engine_); }

  ExactForm form(const GasketGraph& g, int k) {
    ExactForm f = zero_form<Rational>(g, k);
    for (auto& v : f.values) v = next();
    return f;
  }

 private:
  std::mt19937_64 engine_;
};

// Wraps a check body so that a thrown invariant violation becomes a failed
// check instead of aborting the suite.
template <class F>
void guarded(VerificationReport& report, const std::string& id, const std::string& description, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report.add({id + ".error", description, CheckStatus::fail, e.what(), "no exception", 0, {}});
  }
}

void counting_suite(VerificationReport& report, const VerifyOptions& options) {
  for (int n = 2; n <= 6; ++n)
    for (int level = 2; level <= 6; ++level) {
      const std::string id = "counting.maps.n" + std::to_string(n) + ".l" + std::to_string(level);
      report.add(exact(id, "map count equals C(n+l-1, n)", std::to_string(enumerate_cell_maps(n, level).size()),
                       std::to_string(binomial(n + level - 1, n))));
    }
  for (int n = 2; n <= 4; ++n)
    for (int level = 2; level <= 4; ++level)
      for (int m = 0; m <= 2; ++m) {
        const GraphCase c{n, level, m};
        const std::string id = "counting.vertices." + tag(c);
        if (estimated_simplex_count(n, level, m) > options.simplex_cap) continue;
        guarded(report, id, "built vertex count equals the gluing recursion", [&] {
          const auto g = GasketGraph::build(n, level, m, options.simplex_cap);
          report.add(exact(id, "built vertex count equals the gluing recursion", std::to_string(g.num_vertices()),
                           std::to_string(count_vertices(n, level, m))));
          if (m == 1)
            report.add(exact(id + ".closed", "generation-one vertex count equals C(n+l, n)",
                             std::to_string(g.num_vertices()), std::to_string(binomial(n + level, n))));
        });
      }
}

WeightSystem random_weights(int n, std::size_t maps, Rng& rng) {
  auto w = WeightSystem::uniform(n, maps);
  for (auto& row : w.base)
    for (auto& x : row) x = rng.positive();
  for (auto& row : w.multipliers)
    for (auto& x : row) x = rng.positive();
  return w;
}

void complex_checks(VerificationReport& report, const GraphCase& c, const VerifyOptions& options, Rng& rng) {
  const auto g = GasketGraph::build(c.n, c.level, c.m, options.simplex_cap);
  const auto mu = assemble_weights(g, random_weights(c.n, g.num_maps(), rng));
  const std::string base = "complex." + tag(c);

  bool dd = true, bb = true, adjoint = true, parity = true, boundary_ok = true;
  for (int k = -1; k < c.n; ++k) dd = dd && assemble_d(g, k + 1).compose(assemble_d(g, k)).is_zero();
  for (int k = 0; k <= c.n; ++k) bb = bb && assemble_delta(g, mu, k).compose(assemble_delta(g, mu, k + 1)).is_zero();
  for (int k = 0; k < c.n; ++k)
    for (int t = 0; t < 3; ++t) {
      const ExactForm f = rng.form(g, k + 1);
      const ExactForm h = rng.form(g, k);
      adjoint = adjoint && inner_product(assemble_delta(g, mu, k + 1).apply(f), h, mu) ==
                               inner_product(f, assemble_d(g, k).apply(h), mu);
    }
  for (int k = 2; k <= c.n; ++k)
    for (std::size_t up = 0; up < g.num_simplices(k); ++up) {
      std::map<std::size_t, int> sums;
      for (auto [mid, s1] : facets(g, k, up))
        for (auto [low, s2] : facets(g, k - 1, mid)) sums[low] += s1 * s2;
      for (auto [low, s] : sums) parity = parity && s == 0;
    }
  for (int k = 2; k <= c.n; ++k)
    for (int t = 0; t < 10; ++t) {
      Chain chain{k, g.generation(), {}};
      for (int i = 0; i < 6; ++i) chain.add(rng.index(g.num_simplices(k)), rng.next());
      boundary_ok = boundary_ok && boundary(g, boundary(g, chain)).empty();
    }
  std::size_t stokes_failures = 0;
  for (int t = 0; t < 200; ++t) {
    const int k = 1 + static_cast<int>(rng.index(static_cast<std::size_t>(c.n)));
    Chain chain{k, g.generation(), {}};
    for (int i = 0; i < 5; ++i) chain.add(rng.index(g.num_simplices(k)), rng.next());
    if (!verify_stokes(rng.form(g, k - 1), chain, g).equal) ++stokes_failures;
  }
  report.add(truth(base + ".dd", "d_{k+1} d_k = 0 for every k", dd));
  report.add(truth(base + ".deltadelta", "delta_k delta_{k+1} = 0 for every k", bb));
  report.add(truth(base + ".adjoint", "<delta f, g> = <f, d g> on random forms", adjoint));
  report.add(truth(base + ".parity", "incidence parity sums vanish", parity));
  report.add(truth(base + ".boundary", "boundary of a boundary vanishes on random chains", boundary_ok));
  report.add(exact(base + ".stokes", "Stokes identity on 200 random chains", std::to_string(stokes_failures), "0"));
}

void complex_suite(VerificationReport& report, const VerifyOptions& options) {
  Rng rng(options.seed);
  for (auto [n, level] : {std::pair{2, 2}, {2, 3}, {2, 4}, {3, 2}, {3, 3}})
    for (int m = 1; m <= 2; ++m) {
      const GraphCase c{n, level, m};
      if (estimated_simplex_count(n, level, m) > options.simplex_cap) continue;
      guarded(report, "complex." + tag(c), "exact complex identities", [&] { complex_checks(report, c, options, rng); });
    }
}

std::string joined(const std::vector<Rational>& values) {
  std::string out;
  for (const auto& v : values) out += (out.empty() ? "" : ", ") + to_string(v);
  return out;
}

std::vector<Rational> fractions(std::initializer_list<std::pair<long, long>> xs) {
  std::vector<Rational> out;
  for (auto [p, q] : xs) {
    Rational r(p, q);
    r.canonicalize();
    out.push_back(r);
  }
  return out;
}

void harmonic_suite(VerificationReport& report, const VerifyOptions& options) {
  const struct {
    int n, level;
    std::vector<Coord> point;
    std::vector<Rational> expected;
  } rules[] = {
      {2, 2, {1, 1, 0}, fractions({{2, 5}, {2, 5}, {1, 5}})},
      {2, 3, {2, 1, 0}, fractions({{8, 15}, {4, 15}, {3, 15}})},
      {3, 3, {2, 1, 0, 0}, fractions({{28, 64}, {14, 64}, {11, 64}, {11, 64}})},
  };
  for (const auto& r : rules) {
    const std::string id = "harmonic.rule.n" + std::to_string(r.n) + ".l" + std::to_string(r.level);
    guarded(report, id, "harmonic extension weights", [&] {
      report.add(exact(id, "harmonic extension weights", joined(extension_rule(r.n, r.level).at(r.point)),
                       joined(r.expected)));
    });
  }

  const std::pair<int, int> grid[] = {{2, 2}, {2, 3}, {3, 2}};
  for (auto [n, level] : grid) {
    const std::string id = "harmonic.extension." + tag({n, level, 2});
    guarded(report, id, "kernel basis extends harmonically and telescopes", [&] {
      const auto g1 = GasketGraph::build(n, level, 1, options.simplex_cap);
      const auto g2 = GasketGraph::build(n, level, 2, options.simplex_cap);
      const auto mu1 = unit_weights(g1);
      const auto mu2 = unit_weights(g2);
      const auto rule = extension_rule(n, level);
      const auto space = harmonic_space(g1, mu1, 1);
      std::size_t violations = 0;
      for (const auto& h : space.exact_basis) {
        const auto h2 = extend_one_form(h, g1, g2, rule, mu1);
        require_harmonic_one_form(h2, g2, mu2);
        violations += telescoping_violations(h, h2, g1, g2).size();
      }
      report.add(exact(id, "kernel basis extends harmonically and telescopes (" +
                               std::to_string(space.exact_basis.size()) + " forms)",
                       std::to_string(violations), "0"));
    });
  }

  for (auto [n, level] : grid) {
    const std::string id = "harmonic.basis.n" + std::to_string(n) + ".l" + std::to_string(level);
    guarded(report, id, "basis dimension and orthogonality", [&] {
      const auto g1 = GasketGraph::build(n, level, 1, options.simplex_cap);
      const std::size_t M = harmonic_space(g1, unit_weights(g1), 1).dimension;
      const std::size_t N = g1.num_maps();
      if (n == 2)
        report.add(exact(id + ".cycles", "generation-one harmonic dimension equals l(l-1)/2", std::to_string(M),
                         std::to_string(level * (level - 1) / 2)));
      for (int m = 1; m <= 2; ++m) {
        const auto basis = harmonic_one_basis(n, level, m, options.simplex_cap);
        const std::size_t expected = m == 1 ? M : M * (N + 1);
        report.add(exact(id + ".m" + std::to_string(m) + ".dimension",
                         "basis count and kernel rank equal M(N^m-1)/(N-1)",
                         std::to_string(basis.forms.size()) + "/" + std::to_string(basis.kernel_dimension),
                         std::to_string(expected) + "/" + std::to_string(expected)));
        if (m != 2) continue;
        const auto g = GasketGraph::build(n, level, m, options.simplex_cap);
        const auto mu = unit_weights(g);
        std::size_t nonzero = 0;
        for (std::size_t a = 0; a < basis.forms.size(); ++a)
          for (std::size_t b = a + 1; b < basis.forms.size(); ++b)
            if (basis.forms[a].word != basis.forms[b].word &&
                sgn(inner_product(basis.forms[a].form, basis.forms[b].form, mu)) != 0)
              ++nonzero;
        report.add(exact(id + ".m2.orthogonal", "distinct-word basis forms are orthogonal", std::to_string(nonzero), "0"));
      }
    });
  }

  Rng rng(options.seed + 1);
  for (auto [n, level] : grid)
    for (int m = 1; m <= 2; ++m) {
      const GraphCase c{n, level, m};
      const std::string id = "harmonic.hodge." + tag(c);
      guarded(report, id, "Hodge decomposition residuals", [&] {
        const auto g = GasketGraph::build(n, level, m, options.simplex_cap);
        const auto mu = unit_weights(g);
        const auto space = harmonic_space(g, mu, 1);
        double residual = 0, orthogonality = 0;
        for (int t = 0; t < 50; ++t) {
          RealForm f = zero_form<double>(g, 1);
          for (auto& v : f.values) v = rng.normal();
          const auto split = hodge_decompose(f, g, mu, space);
          residual = std::max(residual, split.residual_norm);
          orthogonality = std::max(orthogonality, split.orthogonality_residual);
        }
        report.add(bounded(id + ".reconstruction", "max reconstruction residual over 50 random 1-forms", residual, 0,
                           1e-10));
        report.add(bounded(id + ".orthogonality", "max pairwise inner product over 50 random 1-forms", orthogonality,
                           0, 1e-10));
      });
    }
}

// Cell energies of the harmonic function with the given boundary values,
// obtained by extending through the graph generations.
std::vector<std::vector<Rational>> graph_extension(const Vec3& boundary, int generations,
                                                   std::vector<GasketGraph>& graphs) {
  const auto rule = extension_rule(2, 3);
  if (graphs.empty())
    for (int m = 0; m <= generations; ++m) graphs.push_back(GasketGraph::build(2, 3, m));
  ExactForm f = zero_form<Rational>(graphs[0], 0);
  for (int j = 0; j < 3; ++j) f.values[graphs[0].cell_corner(0, j)] = boundary[j];
  std::vector<std::vector<Rational>> out{f.values};
  for (int m = 1; m <= generations; ++m) {
    f = extend_zero_form(f, graphs[m - 1], graphs[m], rule);
    out.push_back(f.values);
  }
  return out;
}

Rational graph_cell_energy(const GasketGraph& g, const std::vector<Rational>& values, const Word& word,
                           const Rational& rho) {
  const std::size_t cell = g.cell_of_word(word);
  Rational total = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Rational d = values[g.cell_corner(cell, i)] - values[g.cell_corner(cell, j)];
      total += d * d;
    }
  for (std::size_t i = 0; i < word.length(); ++i) total *= rho;
  return total;
}

void kusuoka_suite(VerificationReport& report, const VerifyOptions& options) {
  const KusuokaModel model = derive_transfer();
  Rng rng(options.seed + 2);

  guarded(report, "kusuoka.additivity", "energy additivity", [&] {
    std::size_t mismatches = 0;
    for (int t = 0; t < 20; ++t) {
      const Vec3 x{rng.next(), rng.next(), rng.next()};
      const Rational whole = energy_measure(x, Word{});
      std::vector<Word> words{Word{}};
      for (int k = 1; k <= 4; ++k) {
        std::vector<Word> next;
        for (const auto& w : words)
          for (int letter = 0; letter < 6; ++letter) {
            Word child = w;
            child.letters.push_back(letter);
            next.push_back(std::move(child));
          }
        words = std::move(next);
        Rational total = 0;
        for (const auto& w : words) total += energy_measure(x, w);
        if (total != whole) ++mismatches;
      }
    }
    report.add(exact("kusuoka.additivity", "sum of cell energies over |w| = k equals the total, k <= 4, 20 triples",
                     std::to_string(mismatches), "0"));
  });

  std::vector<GasketGraph> graphs;
  guarded(report, "kusuoka.transfer.depth2", "derived transfer matrices against graph energies", [&] {
    std::size_t mismatches = 0;
    for (int t = 0; t < 10; ++t) {
      const Vec3 x{rng.next(), rng.next(), rng.next()};
      const auto values = graph_extension(x, 2, graphs);
      Vec3 corners{};
      for (int k = 0; k < 3; ++k)
        corners[k] = graph_cell_energy(graphs[1], values[1], Word{{model.label_to_map[k]}}, model.rho);
      for (int letter = 1; letter <= 3; ++letter) {
        const Vec3 predicted = model.transfer(letter) * corners;
        for (int k = 0; k < 3; ++k)
          if (predicted[k] != graph_cell_energy(graphs[2], values[2],
                                                Word{{model.label_to_map[letter], model.label_to_map[k]}}, model.rho))
            ++mismatches;
      }
      const Vec3 middles = model.C * corners;
      for (int k = 0; k < 3; ++k)
        if (middles[k] != graph_cell_energy(graphs[1], values[1], Word{{model.label_to_map[3 + k]}}, model.rho))
          ++mismatches;
    }
    report.add(exact("kusuoka.transfer.depth2", "derived E_i and C reproduce depth-2 graph cell energies",
                     std::to_string(mismatches), "0"));
  });

  graphs.clear();
  guarded(report, "kusuoka.formula", "transfer formula against graph energies", [&] {
    const auto h = graph_extension(model.basis[0], 4, graphs);
    const auto hp = graph_extension(model.basis[1], 4, graphs);
    std::size_t mismatches = 0, words = 0;
    std::vector<std::vector<int>> labels{{}};
    for (int length = 0; length <= 4; ++length) {
      for (const auto& l : labels) {
        const Word w = word_of_labels(l);
        const Rational direct = graph_cell_energy(graphs[length], h[length], w, model.rho) / model.basis_energy[0] +
                                graph_cell_energy(graphs[length], hp[length], w, model.rho) / model.basis_energy[1];
        ++words;
        if (transfer_formula(model, l) != direct) ++mismatches;
      }
      std::vector<std::vector<int>> next;
      for (const auto& l : labels)
        for (int letter = 1; letter <= 3; ++letter) {
          auto child = l;
          child.push_back(letter);
          next.push_back(std::move(child));
        }
      labels = std::move(next);
    }
    report.add(exact("kusuoka.formula", "transfer formula equals graph cell measure on " + std::to_string(words) +
                                            " words over {1,2,3}",
                     std::to_string(mismatches), "0"));
  });

  guarded(report, "kusuoka.omega", "nu(Omega_n)", [&] {
    const auto zero = nu_omega_n(model, 0);
    report.add(exact("kusuoka.omega.0", "nu(K) = 2", to_string(zero.oracle), "2"));
    std::size_t mismatches = 0;
    std::vector<double> values;
    for (int n = 0; n <= 10; ++n) {
      const auto m = nu_omega_n(model, n);
      if (m.oracle != m.formula) ++mismatches;
      values.push_back(to_double(m.oracle));
    }
    report.add(exact("kusuoka.omega.formula", "enumeration equals 1^T(I+C)A^n e for n <= 10",
                     std::to_string(mismatches), "0"));
    const auto spectral = spectral_growth(model);
    const auto fit = fit_two_term(std::vector<double>(values.begin() + 2, values.end()), 2, spectral.symmetric);
    report.add(bounded("kusuoka.omega.fit", "two-term fit over n = 2..10, max relative residual",
                       fit.max_relative_residual, 0, 1e-6));
    const auto prime = delta2_prime_kusuoka(model, [](const Point3&) { return 1.0; }, 8);
    report.add(bounded("kusuoka.delta2prime.one", "delta_2' of 1 at depth 8 equals lambda_+^-8 nu(Omega_8)",
                       prime[8], to_double(nu_omega_n(model, 8).formula) / std::pow(spectral.symmetric.plus(), 8),
                       1e-12));
  });

  guarded(report, "kusuoka.printed", "printed versus derived values", [&] {
    for (const auto& e : discrepancy_report()) {
      Check c{"kusuoka.printed." + e.entry, "printed " + e.entry + " against the derived value",
              e.equal ? CheckStatus::pass : CheckStatus::erratum, e.printed, e.derived, 0, {}};
      if (!e.equal) c.citation = "printed transfer-matrix and growth-rate displays" + (e.note.empty() ? "" : "; " + e.note);
      report.add(std::move(c));
    }
  });

  guarded(report, "kusuoka.identity", "d_1 delta_2 against 3 mu", [&] {
    double worst_one = 0;
    for (int depth = 1; depth <= 6; ++depth)
      for (const auto& cell : check_measure_identity([](const Point3&) { return 1.0; }, 1, depth))
        worst_one = std::max(worst_one, std::abs(cell.value - 1));
    report.add(bounded("kusuoka.identity.one", "max |ratio - 1| for f = 1, depths 1..6", worst_one, 0, 0));
    const std::pair<const char*, SampledFunction> functions[] = {
        {"quadratic", [](const Point3& x) { return 1 + x[0] * x[0]; }},
        {"transcendental", [](const Point3& x) { return std::exp(x[1]) + std::cos(2 * x[2]); }},
    };
    for (const auto& [name, f] : functions) {
      double worst = 0;
      for (const auto& cell : check_measure_identity(f, 1, options.identity_depth))
        worst = std::max(worst, std::abs(cell.value - 1));
      report.add(bounded(std::string("kusuoka.identity.") + name,
                         "max |ratio - 1| over generation-1 cells at depth " + std::to_string(options.identity_depth),
                         worst, 0, 0.01));
    }
  });
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"counting", "complex", "harmonic", "kusuoka", "all"};
  return names;
}

VerificationReport run_suite(std::string_view suite, const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  VerificationReport report;
  report.suite = std::string(suite);
  report.version = FRACTAL_HODGE_VERSION;
  report.seed = options.seed;
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "counting") counting_suite(report, options), known = true;
  if (all || suite == "complex") complex_suite(report, options), known = true;
  if (all || suite == "harmonic") harmonic_suite(report, options), known = true;
  if (all || suite == "kusuoka") kusuoka_suite(report, options), known = true;
  if (!known) throw DomainError("unknown suite '" + std::string(suite) + "'");
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string report_json(const VerificationReport& report, bool include_timing) {
  nlohmann::json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "verification_report";
  doc["suite"] = report.suite;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json entry{{"id", c.id},   {"description", c.description}, {"status", to_string(c.status)},
                         {"lhs", c.lhs}, {"rhs", c.rhs},                 {"tolerance", c.tolerance}};
    if (!c.citation.empty()) entry["citation"] = c.citation;
    checks.push_back(std::move(entry));
  }
  doc["checks"] = std::move(checks);
  doc["summary"] = {{"checks", report.checks.size()}, {"failures", report.failures()}, {"errata", report.errata()}};
  nlohmann::json env{{"version", report.version}, {"seed", report.seed}};
  if (include_timing) env["seconds"] = report.seconds;
  doc["environment"] = std::move(env);
  return doc.dump(1) + "\n";
}

}  // namespace fractal_hodge
