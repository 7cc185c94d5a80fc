#include "fractal_hodge/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "fractal_hodge/errors.hpp"

namespace fractal_hodge {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

void require_schema(const json& doc, std::string_view kind) {
  if (!doc.is_object() || !doc.contains("schema_version") || !doc.contains("kind"))
    throw FormatError("document lacks schema_version or kind");
  if (doc.at("schema_version") != kSchemaVersion)
    throw FormatError("unsupported schema_version " + doc.at("schema_version").dump());
  if (doc.at("kind") != kind) throw FormatError("expected a " + std::string(kind) + " document");
}

template <class T>
T field(const json& doc, const char* key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad field '") + key + "': " + e.what());
  }
}

json rationals(const std::vector<Rational>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(to_string(v));
  return out;
}

std::vector<Rational> parse_rationals(const json& array) {
  if (!array.is_array()) throw FormatError("expected an array of rationals");
  std::vector<Rational> out;
  out.reserve(array.size());
  for (const auto& v : array) {
    if (!v.is_string()) throw FormatError("rational values must be strings");
    out.push_back(parse_rational(v.get<std::string>()));
  }
  return out;
}

std::string dump(const json& doc) { return doc.dump(1) + "\n"; }

}  // namespace

std::uint64_t resolve_simplex_cap(std::optional<std::uint64_t> flag) {
  if (flag) {
    if (*flag == 0) throw DomainError("simplex cap must be positive");
    return *flag;
  }
  const char* env = std::getenv(kCapEnvironmentVariable);
  if (env == nullptr || *env == '\0') return kDefaultSimplexCap;
  std::string_view text(env);
  std::uint64_t value = 0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || value == 0)
    throw FormatError(std::string(kCapEnvironmentVariable) + " must be a positive integer");
  return value;
}

std::string graph_document(const GasketGraph& g, const SimplexWeights& weights) {
  const int n = g.dimension();
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "graph";
  doc["n"] = n;
  doc["level"] = g.level();
  doc["m"] = g.generation();

  std::vector<int> vertex_class(g.num_vertices(), 0);
  const auto classes = classify_vertices(g);
  for (std::size_t k = 0; k < classes.size(); ++k)
    for (std::size_t v : classes[k]) vertex_class[v] = static_cast<int>(k);
  json vertices = json::array();
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    auto c = g.vertex_coords(v);
    vertices.push_back({{"id", v}, {"coords", std::vector<Coord>(c.begin(), c.end())}, {"class", vertex_class[v]}});
  }
  doc["vertices"] = std::move(vertices);

  json cells = json::array();
  for (std::size_t c = 0; c < g.num_cells(); ++c) {
    std::vector<std::size_t> corners;
    for (int j = 0; j <= n; ++j) corners.push_back(g.cell_corner(c, j));
    cells.push_back({{"id", c}, {"word", g.word_of_cell(c).letters}, {"corners", corners}});
  }
  doc["cells"] = std::move(cells);

  json simplices = json::object();
  for (int k = 1; k <= n; ++k) {
    json table = json::array();
    for (std::size_t id = 0; id < g.num_simplices(k); ++id) {
      const Simplex s = g.simplex(k, id);
      table.push_back({{"id", id}, {"word", s.word.letters}, {"face", s.local_face}, {"vertex_ids", s.vertex_ids}});
    }
    simplices[std::to_string(k)] = std::move(table);
  }
  doc["simplices"] = std::move(simplices);

  json w = json::object();
  for (int k = 0; k <= weights.max_degree(); ++k) w[std::to_string(k)] = rationals(weights.of(k));
  doc["weights"] = std::move(w);
  return dump(doc);
}

LoadedGraph parse_graph_document(std::string_view text) {
  const json doc = parse_json(text);
  require_schema(doc, "graph");
  const int n = field<int>(doc, "n");
  const int level = field<int>(doc, "level");
  const int m = field<int>(doc, "m");
  if (n < 1 || level < 2 || m < 0) throw FormatError("graph parameters out of range");

  std::vector<Coord> coords;
  const json& vertices = doc.at("vertices");
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    if (field<std::size_t>(vertices[v], "id") != v) throw FormatError("vertex ids are not dense and ordered");
    const auto c = field<std::vector<Coord>>(vertices[v], "coords");
    if (c.size() != static_cast<std::size_t>(n + 1)) throw FormatError("vertex coordinate length mismatch");
    coords.insert(coords.end(), c.begin(), c.end());
  }
  std::vector<std::size_t> corners;
  const json& cells = doc.at("cells");
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (field<std::size_t>(cells[c], "id") != c) throw FormatError("cell ids are not dense and ordered");
    const auto k = field<std::vector<std::size_t>>(cells[c], "corners");
    if (k.size() != static_cast<std::size_t>(n + 1)) throw FormatError("cell corner count mismatch");
    corners.insert(corners.end(), k.begin(), k.end());
  }
  GasketGraph graph = GasketGraph::from_tables(n, level, m, std::move(coords), std::move(corners));

  const json& simplices = doc.at("simplices");
  for (int k = 1; k <= n; ++k) {
    const json& table = simplices.at(std::to_string(k));
    if (table.size() != graph.num_simplices(k)) throw FormatError("simplex table size mismatch");
    for (std::size_t id = 0; id < table.size(); ++id) {
      const Simplex s = graph.simplex(k, id);
      if (field<std::size_t>(table[id], "id") != id ||
          field<std::vector<std::size_t>>(table[id], "vertex_ids") != s.vertex_ids ||
          field<std::vector<int>>(table[id], "face") != s.local_face)
        throw FormatError("simplex " + std::to_string(id) + " of degree " + std::to_string(k) +
                          " disagrees with the cell tables");
    }
  }

  std::vector<std::vector<Rational>> per_degree;
  const json& w = doc.at("weights");
  for (int k = 0; k <= n; ++k) {
    auto table = parse_rationals(w.at(std::to_string(k)));
    if (table.size() != graph.num_simplices(k)) throw FormatError("weight table size mismatch");
    for (const auto& x : table)
      if (sgn(x) <= 0) throw FormatError("weights must be positive");
    per_degree.push_back(std::move(table));
  }
  return {std::move(graph), SimplexWeights(std::move(per_degree))};
}

void write_matrix_market(std::ostream& out, const SparseOperator& op, std::string_view comment) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  if (!comment.empty()) out << "% " << comment << "\n";
  const auto entries = op.entries();
  out << op.rows() << ' ' << op.cols() << ' ' << entries.size() << '\n';
  out << std::setprecision(17);
  for (const auto& e : entries) out << e.row + 1 << ' ' << e.col + 1 << ' ' << to_double(e.value) << '\n';
}

Eigen::SparseMatrix<double> read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty Matrix Market stream");
  std::istringstream header(line);
  std::string banner, object, format, field_type, symmetry;
  header >> banner >> object >> format >> field_type >> symmetry;
  if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate" ||
      (field_type != "real" && field_type != "integer") || symmetry != "general")
    throw FormatError("unsupported Matrix Market header: " + line);
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::istringstream size_line(line);
  long rows = -1, cols = -1, count = -1;
  if (!(size_line >> rows >> cols >> count) || rows < 0 || cols < 0 || count < 0)
    throw FormatError("bad Matrix Market size line");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    long r = 0, c = 0;
    double v = 0;
    if (!(in >> r >> c >> v)) throw FormatError("truncated Matrix Market entries");
    if (r < 1 || r > rows || c < 1 || c > cols) throw FormatError("Matrix Market index out of range");
    triplets.emplace_back(r - 1, c - 1, v);
  }
  Eigen::SparseMatrix<double> out(rows, cols);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

std::string exact_sidecar(const SparseOperator& op) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "operator";
  const auto table = [](const TableId& t) {
    return json{{"degree", t.degree}, {"generation", t.generation}, {"size", t.size}};
  };
  doc["rows"] = table(op.row_table());
  doc["cols"] = table(op.col_table());
  json entries = json::array();
  for (const auto& e : op.entries()) entries.push_back({e.row, e.col, to_string(e.value)});
  doc["entries"] = std::move(entries);
  return dump(doc);
}

SparseOperator parse_exact_sidecar(std::string_view text) {
  const json doc = parse_json(text);
  require_schema(doc, "operator");
  const auto table = [](const json& t) {
    return TableId{field<int>(t, "degree"), field<int>(t, "generation"), field<std::size_t>(t, "size")};
  };
  const TableId rows = table(doc.at("rows"));
  const TableId cols = table(doc.at("cols"));
  std::vector<SparseEntry> entries;
  for (const auto& e : doc.at("entries")) {
    if (!e.is_array() || e.size() != 3 || !e[2].is_string()) throw FormatError("operator entries are [row, col, \"p/q\"]");
    const auto r = e[0].get<std::size_t>();
    const auto c = e[1].get<std::size_t>();
    if (r >= rows.size || c >= cols.size) throw FormatError("operator entry out of range");
    entries.push_back({r, c, parse_rational(e[2].get<std::string>())});
  }
  return SparseOperator(rows, cols, std::move(entries));
}

std::string form_document(const ExactForm& form) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "form";
  doc["degree"] = form.degree;
  doc["generation"] = form.generation;
  doc["values"] = rationals(form.values);
  return dump(doc);
}

ExactForm parse_form_document(std::string_view text) {
  const json doc = parse_json(text);
  require_schema(doc, "form");
  return {field<int>(doc, "degree"), field<int>(doc, "generation"), parse_rationals(doc.at("values"))};
}

std::string basis_document(int n, int level, int generation, const HarmonicOneBasis& basis) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["kind"] = "harmonic_one_basis";
  doc["n"] = n;
  doc["level"] = level;
  doc["m"] = generation;
  doc["per_cell"] = basis.per_cell;
  doc["dimension"] = basis.forms.size();
  json forms = json::array();
  for (const auto& f : basis.forms)
    forms.push_back({{"word", f.word.letters}, {"index", f.index}, {"values", rationals(f.form.values)}});
  doc["forms"] = std::move(forms);
  return dump(doc);
}

std::string periods_csv(const std::vector<std::vector<Rational>>& periods) {
  std::ostringstream out;
  const std::size_t cols = periods.empty() ? 0 : periods.front().size();
  out << "cycle";
  for (std::size_t j = 0; j < cols; ++j) out << ",form_" << j;
  out << '\n';
  for (std::size_t i = 0; i < periods.size(); ++i) {
    out << i;
    for (const auto& v : periods[i]) out << ',' << to_string(v);
    out << '\n';
  }
  return out.str();
}

}  // namespace fractal_hodge
