#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <fractal_hodge/derham.hpp>
#include <fractal_hodge/errors.hpp>
#include <fractal_hodge/harmonic.hpp>
#include <fractal_hodge/io.hpp>
#include <fractal_hodge/kusuoka.hpp>
#include <fractal_hodge/verify.hpp>

using namespace fractal_hodge;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kChecksFailed = 1, kUsage = 2, kResource = 3, kFormat = 4 };

struct Options {
  int dim = 2;
  int level = 2;
  int gen = 1;
  int degree = 1;
  int depth = -1;
  int count = 10;
  std::string out = "-";
  std::string format;
  std::string measure = "nu";
  std::string suite = "all";
  std::string function = "quadratic";
  std::string what = "table";
  std::string input;
  std::optional<std::uint64_t> cap;
  std::uint64_t seed = VerifyOptions{}.seed;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
  if (!out) throw FormatError("write failed for " + path);
}

void require_format(const Options& o, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (o.format == f) return;
  std::string list;
  for (const char* f : allowed) list += (list.empty() ? "" : "|") + std::string(f);
  throw DomainError("--format must be one of " + list + " for this command");
}

std::string csv_number(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

GasketGraph build_graph(const Options& o) {
  return GasketGraph::build(o.dim, o.level, o.gen, resolve_simplex_cap(o.cap));
}

int cmd_generate(const Options& o) {
  require_format(o, {"json"});
  const auto g = build_graph(o);
  emit(o.out, graph_document(g, unit_weights(g)));
  return kOk;
}

int cmd_operators(const Options& o) {
  require_format(o, {"mm", "json"});
  if (o.out.empty() || o.out == "-") throw DomainError("operators writes several files; --out must be a path prefix");
  const auto loaded = parse_graph_document(read_file(o.input));
  const auto& g = loaded.graph;
  if (o.degree < 0 || o.degree > g.dimension()) throw DomainError("--degree must lie in 0..n");
  const std::pair<std::string, SparseOperator> ops[] = {
      {"d" + std::to_string(o.degree), assemble_d(g, o.degree)},
      {"delta" + std::to_string(o.degree), assemble_delta(g, loaded.weights, o.degree)},
      {"laplacian" + std::to_string(o.degree), laplacian(g, loaded.weights, o.degree)},
  };
  for (const auto& [name, op] : ops) {
    const std::string stem = o.out + name;
    if (o.format == "mm") {
      std::ostringstream mm;
      write_matrix_market(mm, op, name + " of G_" + std::to_string(g.level()) + "^{" + std::to_string(g.dimension()) +
                                      "," + std::to_string(g.generation()) + "}");
      emit(stem + ".mtx", mm.str());
    }
    emit(stem + ".exact.json", exact_sidecar(op));
  }
  return kOk;
}

int cmd_verify(const Options& o) {
  require_format(o, {"json"});
  VerifyOptions options;
  options.seed = o.seed;
  options.simplex_cap = resolve_simplex_cap(o.cap);
  if (o.depth >= 0) options.identity_depth = o.depth;
  const auto report = run_suite(o.suite, options);
  emit(o.out, report_json(report));
  std::cerr << report.suite << ": " << report.checks.size() << " checks, " << report.failures() << " failures, "
            << report.errata() << " errata\n";
  return report.passed() ? kOk : kChecksFailed;
}

int cmd_basis(const Options& o) {
  require_format(o, {"json", "csv"});
  const auto basis = harmonic_one_basis(o.dim, o.level, o.gen, resolve_simplex_cap(o.cap));
  if (o.format == "json") {
    emit(o.out, basis_document(o.dim, o.level, o.gen, basis));
    return kOk;
  }
  const auto g = build_graph(o);
  std::vector<ExactForm> forms;
  for (const auto& f : basis.forms) forms.push_back(f.form);
  emit(o.out, periods_csv(cycle_integral_matrix(forms, cycle_basis(g).cycles)));
  return kOk;
}

int cmd_spectrum(const Options& o) {
  require_format(o, {"csv", "json"});
  const auto g = build_graph(o);
  if (o.degree < 0 || o.degree > g.dimension()) throw DomainError("--degree must lie in 0..n");
  const auto mu = unit_weights(g);
  const Eigen::MatrixXd lap = Eigen::MatrixXd(laplacian(g, mu, o.degree).to_eigen());
  if (lap.rows() > 6000) throw ResourceError("spectrum uses a dense solver; table too large");
  const auto& w = mu.of_double(o.degree);
  Eigen::VectorXd root(lap.rows());
  for (Eigen::Index i = 0; i < root.size(); ++i) root(i) = std::sqrt(w[i]);
  const Eigen::MatrixXd sym = root.asDiagonal() * lap * root.cwiseInverse().asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (sym + sym.transpose()), Eigen::EigenvaluesOnly);
  const auto& values = solver.eigenvalues();
  const Eigen::Index count = std::min<Eigen::Index>(o.count, values.size());
  if (o.format == "csv") {
    std::string text = "index,eigenvalue\n";
    for (Eigen::Index i = 0; i < count; ++i) text += std::to_string(i) + "," + csv_number(values(i)) + "\n";
    emit(o.out, text);
  } else {
    json doc{{"schema_version", kSchemaVersion}, {"kind", "spectrum"}, {"n", o.dim}, {"level", o.level},
             {"m", o.gen},                       {"degree", o.degree}};
    doc["eigenvalues"] = json::array();
    for (Eigen::Index i = 0; i < count; ++i) doc["eigenvalues"].push_back(values(i));
    emit(o.out, doc.dump(1) + "\n");
  }
  return kOk;
}

int cmd_extend(const Options& o) {
  require_format(o, {"json"});
  const ExactForm form = parse_form_document(read_file(o.input));
  const std::uint64_t cap = resolve_simplex_cap(o.cap);
  const auto coarse = GasketGraph::build(o.dim, o.level, form.generation, cap);
  const auto fine = GasketGraph::build(o.dim, o.level, form.generation + 1, cap);
  const auto rule = extension_rule(o.dim, o.level);
  if (form.size() != coarse.num_simplices(form.degree)) throw FormatError("form length does not match the graph");
  ExactForm out;
  if (form.degree == 0)
    out = extend_zero_form(form, coarse, fine, rule);
  else if (form.degree == 1)
    out = extend_one_form(form, coarse, fine, rule, unit_weights(coarse));
  else
    throw DomainError("extend handles 0-forms and harmonic 1-forms");
  emit(o.out, form_document(out));
  return kOk;
}

SampledFunction test_function(const std::string& name) {
  if (name == "one") return [](const Point3&) { return 1.0; };
  if (name == "zero") return [](const Point3&) { return 0.0; };
  if (name == "quadratic") return [](const Point3& x) { return 1 + x[0] * x[0]; };
  if (name == "transcendental") return [](const Point3& x) { return std::exp(x[1]) + std::cos(2 * x[2]); };
  throw DomainError("unknown --function " + name);
}

int cmd_kusuoka(const Options& o) {
  require_format(o, {"csv", "json"});
  if (o.what == "report") {
    json entries = json::array();
    for (const auto& e : discrepancy_report()) {
      json entry{{"entry", e.entry}, {"printed", e.printed}, {"derived", e.derived}, {"equal", e.equal}};
      if (!e.note.empty()) entry["note"] = e.note;
      entries.push_back(std::move(entry));
    }
    emit(o.out, json{{"schema_version", kSchemaVersion}, {"kind", "kusuoka_discrepancies"}, {"entries", entries}}
                        .dump(1) + "\n");
    return kOk;
  }
  if (o.what != "table") throw DomainError("kusuoka takes 'table' or 'report'");
  const auto model = derive_transfer();
  json rows = json::array();
  std::string csv;
  if (o.measure == "nu") {
    const int depth = o.depth >= 0 ? o.depth : 10;
    const auto prime = delta2_prime_kusuoka(model, test_function(o.function), std::min(depth, kMaxSamplingDepth));
    csv = "n,nu_omega,nu_omega_formula,ratio,delta2_prime\n";
    Rational previous = 0;
    for (int n = 0; n <= depth; ++n) {
      const auto m = nu_omega_n(model, n);
      const std::string ratio = n == 0 ? "" : csv_number(to_double(m.oracle / previous));
      const std::string d2 = n < static_cast<int>(prime.size()) ? csv_number(prime[n]) : "";
      csv += std::to_string(n) + "," + to_string(m.oracle) + "," + to_string(m.formula) + "," + ratio + "," + d2 + "\n";
      rows.push_back({{"n", n}, {"nu_omega", to_string(m.oracle)}, {"nu_omega_formula", to_string(m.formula)},
                      {"ratio", ratio}, {"delta2_prime", d2}});
      previous = m.oracle;
    }
  } else if (o.measure == "mu") {
    const int depth = o.depth >= 0 ? o.depth : 6;
    const auto f = test_function(o.function);
    csv = "depth,cell,lhs,rhs,value,kind\n";
    for (int n = 1; n <= depth; ++n)
      for (const auto& cell : check_measure_identity(f, 1, n)) {
        const std::string kind = cell.is_ratio ? "ratio" : "difference";
        csv += std::to_string(n) + "," + std::to_string(cell.cell.letters[0]) + "," + csv_number(cell.lhs) + "," +
               csv_number(cell.rhs) + "," + csv_number(cell.value) + "," + kind + "\n";
        rows.push_back({{"depth", n}, {"cell", cell.cell.letters}, {"lhs", cell.lhs}, {"rhs", cell.rhs},
                        {"value", cell.value}, {"kind", kind}});
      }
  } else {
    throw DomainError("--measure must be nu or mu");
  }
  if (o.format == "csv")
    emit(o.out, csv);
  else
    emit(o.out, json{{"schema_version", kSchemaVersion}, {"kind", "kusuoka_" + o.measure}, {"rows", rows}}.dump(1) +
                    "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hodge-de Rham forms on higher-dimensional Sierpinski gaskets"};
  app.require_subcommand(1);
  Options o;

  const auto shape = [&](CLI::App* sub) {
    sub->add_option("--dim", o.dim, "Dimension n")->check(CLI::Range(1, 16));
    sub->add_option("--level", o.level, "Level l")->check(CLI::Range(2, 64));
    sub->add_option("--gen", o.gen, "Generation m")->check(CLI::NonNegativeNumber);
    sub->add_option("--cap", o.cap, "Simplex cap (overrides FRACTAL_HODGE_CAP)");
  };
  const auto output = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "Output path, '-' for stdout");
    sub->add_option("--format", o.format, "json|mm|csv")->check(CLI::IsMember({"json", "mm", "csv"}));
  };

  auto* generate = app.add_subcommand("generate", "Write a graph document");
  shape(generate);

  auto* operators = app.add_subcommand("operators", "Export d_k, delta_k and -Laplacian_k");
  operators->add_option("graph", o.input, "Graph document")->required();
  operators->add_option("--degree", o.degree, "Form degree k");

  auto* verify = app.add_subcommand("verify", "Run invariant suites and write a report");
  verify->add_option("suite", o.suite, "counting|complex|harmonic|kusuoka|all")->check(CLI::IsMember(suite_names()));
  verify->add_option("--depth", o.depth, "Sampling depth of the d_1 delta_2 checks");
  verify->add_option("--seed", o.seed, "Random seed");
  verify->add_option("--cap", o.cap, "Simplex cap (overrides FRACTAL_HODGE_CAP)");

  auto* basis = app.add_subcommand("basis", "Harmonic 1-form basis with word tags, or its periods");
  shape(basis);

  auto* spectrum = app.add_subcommand("spectrum", "Lowest eigenvalues of -Laplacian_k");
  shape(spectrum);
  spectrum->add_option("--degree", o.degree, "Form degree k");
  spectrum->add_option("--count", o.count, "Number of eigenvalues")->check(CLI::PositiveNumber);

  auto* extend = app.add_subcommand("extend", "Extend a 0-form or harmonic 1-form by one generation");
  extend->add_option("form", o.input, "Form document")->required();
  extend->add_option("--dim", o.dim, "Dimension n")->check(CLI::Range(1, 16));
  extend->add_option("--level", o.level, "Level l")->check(CLI::Range(2, 64));
  extend->add_option("--cap", o.cap, "Simplex cap (overrides FRACTAL_HODGE_CAP)");

  auto* kusuoka = app.add_subcommand("kusuoka", "Energy-measure tables on SG_3^2");
  kusuoka->add_option("what", o.what, "table|report")->check(CLI::IsMember({"table", "report"}));
  kusuoka->add_option("--measure", o.measure, "nu|mu")->check(CLI::IsMember({"nu", "mu"}));
  kusuoka->add_option("--depth", o.depth, "Largest depth")->check(CLI::NonNegativeNumber);
  kusuoka->add_option("--function", o.function, "one|zero|quadratic|transcendental");

  for (auto* sub : {generate, operators, verify, basis, spectrum, extend, kusuoka}) output(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  const auto* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  if (o.format.empty()) {
    if (name == "operators") o.format = "mm";
    else if (name == "spectrum" || name == "kusuoka") o.format = "csv";
    else o.format = "json";
  }

  try {
    if (name == "generate") return cmd_generate(o);
    if (name == "operators") return cmd_operators(o);
    if (name == "verify") return cmd_verify(o);
    if (name == "basis") return cmd_basis(o);
    if (name == "spectrum") return cmd_spectrum(o);
    if (name == "extend") return cmd_extend(o);
    if (name == "kusuoka") return cmd_kusuoka(o);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kResource;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFormat;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return kChecksFailed;
  }
  return kUsage;
}
