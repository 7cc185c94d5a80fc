#include "fractal_hodge/kusuoka.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <future>
#include <map>

#include "fractal_hodge/errors.hpp"
#include "fractal_hodge/exact_linalg.hpp"
#include "fractal_hodge/harmonic.hpp"

namespace fractal_hodge {

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Rational s = 0;
      for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
      out[i][j] = s;
    }
  return out;
}

Vec3 operator*(const Mat3& a, const Vec3& v) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i) out[i] = a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2];
  return out;
}

Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = a[i][j] + b[i][j];
  return out;
}

Mat3 identity3() {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = i == j ? 1 : 0;
  return out;
}

Mat3 transpose(const Mat3& a) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = a[j][i];
  return out;
}

namespace {

constexpr int kLevel = 3;
constexpr int kCells = 6;

Rational frac(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

Mat3 scaled(const Mat3& a, const Rational& s) {
  Mat3 out = a;
  for (auto& row : out)
    for (auto& x : row) x *= s;
  return out;
}

Mat3 from_integers(const std::array<std::array<long, 3>, 3>& rows, const Rational& scale) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = Rational(rows[i][j]) * scale;
  return out;
}

// sum_{a<b} (y_a - y_b)^2
Rational triangle_energy(const Vec3& y) {
  Rational d01 = y[0] - y[1], d02 = y[0] - y[2], d12 = y[1] - y[2];
  return d01 * d01 + d02 * d02 + d12 * d12;
}

Mat3 triangle_laplacian() {
  Mat3 l{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) l[i][j] = i == j ? 2 : -1;
  return l;
}

// Geometry shared by every routine: the extension matrices of the six cells
// (row i holds the weights of corner i of the cell) and the derived rho.
struct Geometry {
  std::vector<CellOffset> maps;
  std::array<Mat3, kCells> extension{};
  Rational rho;
};

const Geometry& geometry() {
  static const Geometry g = [] {
    Geometry out;
    out.maps = enumerate_cell_maps(2, kLevel);
    const auto rule = extension_rule(2, kLevel);
    for (int c = 0; c < kCells; ++c)
      for (int i = 0; i < 3; ++i) {
        std::vector<Coord> point(out.maps[c].offsets.begin(), out.maps[c].offsets.end());
        point[i] += 1;
        const auto& w = rule.at(point);
        for (int j = 0; j < 3; ++j) out.extension[c][i][j] = w[j];
      }
    const Mat3 l = triangle_laplacian();
    Mat3 sum{};
    for (auto& row : sum) row.fill(Rational(0));
    for (const auto& a : out.extension) sum = sum + transpose(a) * l * a;
    out.rho = l[0][0] / sum[0][0];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (sum[i][j] * out.rho != l[i][j])
          throw VerificationFailure("level-1 energy is not a multiple of the level-0 energy");
    return out;
  }();
  return g;
}

void check_word(const Word& word) {
  for (int letter : word.letters)
    if (letter < 0 || letter >= kCells) throw DomainError("word letter outside SG_3^2");
}

Rational power(const Rational& x, std::size_t n) {
  Rational out = 1;
  for (std::size_t i = 0; i < n; ++i) out *= x;
  return out;
}

// Renormalized corner-energy quadratic form of F_word K, as a matrix in the
// boundary values.
Mat3 cell_form(const Word& word) {
  const auto& geo = geometry();
  Mat3 a = identity3();
  for (int letter : word.letters) a = geo.extension[letter] * a;
  return scaled(transpose(a) * triangle_laplacian() * a, power(geo.rho, word.length()));
}

Vec3 off_diagonal(const Mat3& q) { return {q[0][1], q[0][2], q[1][2]}; }

Mat3 columns(const Vec3& a, const Vec3& b, const Vec3& c) {
  Mat3 out{};
  for (int i = 0; i < 3; ++i) out[i] = {a[i], b[i], c[i]};
  return out;
}

Mat3 inverse3(const Mat3& m) {
  DenseRational a(3, std::vector<Rational>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = m[i][j];
  const auto inv = inverse(a);
  Mat3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i][j] = inv[i][j];
  return out;
}

// Matrix T with triple(F_label F_{corner k}) = T triple(F_{corner k}), i.e.
// T^T = V0^{-1} W where the columns are off-diagonal vectors of cell forms.
Mat3 transfer_into(const Mat3& v0_inverse, const std::array<Word, 3>& targets) {
  const Mat3 w = columns(off_diagonal(cell_form(targets[0])), off_diagonal(cell_form(targets[1])),
                         off_diagonal(cell_form(targets[2])));
  return transpose(v0_inverse * w);
}

bool is_symmetric_circulant(const Mat3& c) {
  return c[0][0] == c[1][1] && c[1][1] == c[2][2] && c[0][1] == c[0][2] && c[0][1] == c[1][0] &&
         c[0][1] == c[1][2] && c[0][1] == c[2][0] && c[0][1] == c[2][1];
}

Rational sum_with_c(const Mat3& c, const Vec3& v) {
  Rational total = v[0] + v[1] + v[2];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) total += c[i][j] * v[j];
  return total;
}

std::string surd_string(const SurdPair& s) {
  return to_string(s.center) + " +- sqrt(" + to_string(s.radicand) + ")";
}

void require_depth(int depth, int max, const char* what) {
  if (depth < 0) throw DomainError(std::string(what) + ": negative depth");
  if (depth > max) throw ResourceError(std::string(what) + ": depth exceeds " + std::to_string(max));
}

}  // namespace

const Mat3& KusuokaModel::transfer(int letter) const {
  switch (letter) {
    case 1: return E1;
    case 2: return E2;
    case 3: return E3;
    default: throw DomainError("transfer matrices exist for labels 1, 2, 3 only");
  }
}

KusuokaModel derive_transfer() {
  const auto& geo = geometry();
  KusuokaModel model;
  model.source = KusuokaModel::Source::derived;
  model.rho = geo.rho;

  std::array<int, 3> corners{};
  std::vector<int> middles;
  for (int c = 0; c < kCells; ++c) {
    const auto& o = geo.maps[c].offsets;
    auto top = std::find(o.begin(), o.end(), kLevel - 1);
    if (top != o.end())
      corners[top - o.begin()] = c;
    else
      middles.push_back(c);
  }

  const auto one = [](int c) { return Word{{c}}; };
  const auto two = [](int a, int b) { return Word{{a, b}}; };
  const Mat3 v0 = columns(off_diagonal(cell_form(one(corners[0]))), off_diagonal(cell_form(one(corners[1]))),
                          off_diagonal(cell_form(one(corners[2]))));
  const Mat3 v0_inverse = inverse3(v0);

  bool found = false;
  std::sort(middles.begin(), middles.end());
  do {
    std::array<int, 6> labels{corners[0], corners[1], corners[2], middles[0], middles[1], middles[2]};
    const Mat3 c = transfer_into(v0_inverse, {one(middles[0]), one(middles[1]), one(middles[2])});
    if (is_symmetric_circulant(c)) {
      model.C = c;
      model.label_to_map = labels;
      found = true;
      break;
    }
  } while (std::next_permutation(middles.begin(), middles.end()));
  if (!found) throw VerificationFailure("no middle-cell labeling gives a symmetric circulant C");

  std::array<Mat3*, 3> e{&model.E1, &model.E2, &model.E3};
  for (int letter = 1; letter <= 3; ++letter) {
    const int m = model.label_to_map[letter];
    *e[letter - 1] = transfer_into(v0_inverse, {two(m, corners[0]), two(m, corners[1]), two(m, corners[2])});
  }

  model.basis = {Vec3{1, 0, 0}, Vec3{0, 1, -1}};
  const Mat3 l = triangle_laplacian();
  for (int i = 0; i < 2; ++i) model.basis_energy[i] = triangle_energy(model.basis[i]);
  {
    const auto& h = model.basis[0];
    const auto& p = model.basis[1];
    Rational cross = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cross += h[i] * l[i][j] * p[j];
    if (cross != 0) throw VerificationFailure("harmonic basis is not energy-orthogonal");
  }
  for (int k = 0; k < 3; ++k) {
    Rational total = 0;
    for (int i = 0; i < 2; ++i) total += energy_measure(model.basis[i], one(corners[k])) / model.basis_energy[i];
    model.e[k] = total;
  }
  return model;
}

KusuokaModel printed_model() {
  KusuokaModel model = derive_transfer();
  model.source = KusuokaModel::Source::printed;
  const Rational k = frac(98, 5 * 5 * 5 * 5 * 27);
  model.E1 = from_integers({{{287, 962, -283}, {-49, 3701, -49}, {-283, 962, 287}}}, k);
  model.E2 = from_integers({{{287, -283, 962}, {-283, 287, 962}, {-49, -49, 3701}}}, k);
  model.E3 = from_integers({{{1174, 49, 49}, {-962, 3613, 1213}, {-962, 1213, 3613}}},
                           frac(1, 5 * 5 * 5 * 5 * 27 * 4));
  model.C = from_integers({{{-2, 13, 13}, {13, -2, 13}, {13, 13, -2}}}, frac(1, 60));
  return model;
}

int map_of_label(int label) {
  static const KusuokaModel model = derive_transfer();
  if (label < 0 || label >= kCells) throw DomainError("cell label outside 0..5");
  return model.label_to_map[label];
}

Word word_of_labels(const std::vector<int>& labels) {
  Word w;
  for (int l : labels) w.letters.push_back(map_of_label(l));
  return w;
}

Rational energy_measure(const Vec3& boundary, const Word& word) {
  check_word(word);
  const auto& geo = geometry();
  Vec3 y = boundary;
  for (int letter : word.letters) y = geo.extension[letter] * y;
  return triangle_energy(y) * power(geo.rho, word.length());
}

Rational kusuoka_cell_measure(const Word& word) {
  static const KusuokaModel model = derive_transfer();
  Rational total = 0;
  for (int i = 0; i < 2; ++i) total += energy_measure(model.basis[i], word) / model.basis_energy[i];
  return total;
}

Rational transfer_formula(const KusuokaModel& model, const std::vector<int>& labels) {
  Vec3 v = model.e;
  for (int l : labels) v = model.transfer(l) * v;
  return sum_with_c(model.C, v);
}

namespace {

void omega_oracle(const KusuokaModel& model, const std::array<Vec3, 2>& values, int remaining,
                  const Rational& scale, Rational& total) {
  if (remaining == 0) {
    for (int i = 0; i < 2; ++i) total += triangle_energy(values[i]) * scale / model.basis_energy[i];
    return;
  }
  const auto& geo = geometry();
  for (int label = 1; label <= 3; ++label) {
    const auto& a = geo.extension[model.label_to_map[label]];
    omega_oracle(model, {a * values[0], a * values[1]}, remaining - 1, scale * geo.rho, total);
  }
}

}  // namespace

OmegaMeasure nu_omega_n(const KusuokaModel& model, int depth) {
  require_depth(depth, kMaxOmegaDepth, "nu_omega_n");
  OmegaMeasure out;
  out.depth = depth;
  out.oracle = 0;
  omega_oracle(model, model.basis, depth, Rational(1), out.oracle);
  Vec3 v = model.e;
  const Mat3 a = model.growth_matrix();
  for (int i = 0; i < depth; ++i) v = a * v;
  out.formula = sum_with_c(model.C, v);
  return out;
}

double SurdPair::plus() const { return to_double(center) + std::sqrt(to_double(radicand)); }
double SurdPair::minus() const { return to_double(center) - std::sqrt(to_double(radicand)); }

namespace {

SpectralData spectral_of(const Mat3& a) {
  SpectralData s;
  s.A = a;
  s.trace = a[0][0] + a[1][1] + a[2][2];
  s.swap_symmetric = a[0][1] == a[0][2] && a[1][0] == a[2][0] && a[1][1] == a[2][2] && a[1][2] == a[2][1];
  const Vec3 av = a * Vec3{0, 1, -1};
  if (av[0] == 0 && av[2] == -av[1]) s.antisymmetric = av[1];
  s.B = {{{a[0][0], a[0][1] + a[0][2]}, {a[1][0], a[1][1] + a[1][2]}}};
  s.symmetric.center = (s.B[0][0] + s.B[1][1]) / 2;
  s.symmetric.radicand = s.symmetric.center * s.symmetric.center - (s.B[0][0] * s.B[1][1] - s.B[0][1] * s.B[1][0]);
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = to_double(a[i][j]);
  Eigen::EigenSolver<Eigen::Matrix3d> solver(m, false);
  for (int i = 0; i < 3; ++i) s.eigenvalues.push_back(solver.eigenvalues()(i));
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](auto x, auto y) {
    return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
  });
  return s;
}

const Mat3& printed_growth_display() {
  static const Mat3 a = from_integers(
      {{{75394, 94619, 94619}, {-37822, 522303, 119703}, {-37822, 119703, 522303}}}, frac(1, 22500));
  return a;
}

DiscrepancyEntry compare(std::string entry, const Rational& printed, const Rational& derived, std::string note = {}) {
  return {std::move(entry), to_string(printed), to_string(derived), printed == derived, std::move(note)};
}

std::string cell_name(const std::string& matrix, int i, int j) {
  return matrix + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

}  // namespace

SpectralData spectral_growth(const KusuokaModel& model) { return spectral_of(model.growth_matrix()); }

std::vector<DiscrepancyEntry> discrepancy_report() {
  const KusuokaModel derived = derive_transfer();
  const KusuokaModel printed = printed_model();
  std::vector<DiscrepancyEntry> out;

  for (int letter = 1; letter <= 3; ++letter) {
    const std::string name = "E" + std::to_string(letter);
    const Mat3& p = printed.transfer(letter);
    const Mat3& d = derived.transfer(letter);
    std::map<Rational, int> ratios;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        out.push_back(compare(cell_name(name, i, j), p[i][j], d[i][j]));
        const Rational raw = d[i][j] / derived.rho;
        out.push_back(compare(cell_name(name, i, j) + " unrenormalized", p[i][j], raw));
        if (raw != 0) ++ratios[p[i][j] / raw];
      }
    const auto common = std::max_element(ratios.begin(), ratios.end(),
                                         [](const auto& x, const auto& y) { return x.second < y.second; });
    std::string outliers;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const Rational raw = d[i][j] / derived.rho;
        if (raw != 0 && p[i][j] / raw != common->first) outliers += (outliers.empty() ? "" : ", ") + cell_name(name, i, j);
      }
    out.push_back({name + " scale over unrenormalized", to_string(common->first), "1", common->first == 1,
                   outliers.empty() ? "all entries share the scale" : "entries off the common scale: " + outliers});
  }

  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.push_back(compare(cell_name("C", i, j), printed.C[i][j], derived.C[i][j]));

  const Mat3& shown = printed_growth_display();
  const Mat3 printed_sum = printed.growth_matrix();
  const Mat3 derived_sum = derived.growth_matrix();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      out.push_back(compare(cell_name("A", i, j) + " vs printed E1+E2+E3", shown[i][j], printed_sum[i][j]));
      out.push_back(compare(cell_name("A", i, j), shown[i][j], derived_sum[i][j]));
    }
  const auto shown_spec = spectral_of(shown);
  const auto derived_spec = spectral_of(derived_sum);
  out.push_back(compare("trace(A printed)", frac(1120000, 22500), shown_spec.trace));

  const Rational lambda1 = frac(1342, 75);
  out.push_back({"lambda_1 on (0,1,-1) of printed A", to_string(lambda1),
                 shown_spec.antisymmetric ? to_string(*shown_spec.antisymmetric) : "not an eigenvector",
                 shown_spec.antisymmetric && *shown_spec.antisymmetric == lambda1, {}});
  {
    const Vec3 image = shown * Vec3{0, 1, 1};
    const bool eigen = image[0] == 0 && image[1] == image[2];
    out.push_back({"lambda_1 on (0,1,1) of printed A", to_string(lambda1),
                   eigen ? to_string(image[1]) : "not an eigenvector", eigen && image[1] == lambda1, {}});
  }
  out.push_back({"lambda_1", to_string(lambda1),
                 derived_spec.antisymmetric ? to_string(*derived_spec.antisymmetric) : "none",
                 derived_spec.antisymmetric && *derived_spec.antisymmetric == lambda1, {}});

  const std::array<std::array<Rational, 2>, 2> printed_b{
      {{frac(75394, 22500), frac(189238, 22500)}, {frac(-37822, 22500), frac(534006, 22500)}}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.push_back(compare(cell_name("B", i, j) + " vs printed A", printed_b[i][j], shown_spec.B[i][j]));

  const SurdPair printed_lambdas{frac(15235, 3375), frac(21L * 21 * 257505, 3375L * 3375)};
  out.push_back({"lambda_+- vs printed A", surd_string(printed_lambdas), surd_string(shown_spec.symmetric),
                 printed_lambdas == shown_spec.symmetric, {}});
  out.push_back({"lambda_+-", surd_string(printed_lambdas), surd_string(derived_spec.symmetric),
                 printed_lambdas == derived_spec.symmetric, {}});
  out.push_back(compare("sum of printed eigenvalues vs trace(A printed)", lambda1 + 2 * printed_lambdas.center,
                        shown_spec.trace));
  return out;
}

TwoTermFit fit_two_term(const std::vector<double>& values, int first, const SurdPair& lambdas) {
  if (values.size() < 2) throw DomainError("fit_two_term needs at least two values");
  TwoTermFit fit;
  fit.lambda_plus = lambdas.plus();
  fit.lambda_minus = lambdas.minus();
  const auto rows = static_cast<Eigen::Index>(values.size());
  Eigen::MatrixXd design(rows, 2);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double n = first + static_cast<double>(i);
    design(i, 0) = std::pow(fit.lambda_plus, n);
    design(i, 1) = std::pow(fit.lambda_minus, n);
    rhs(i) = values[i];
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  fit.a = coef(0);
  fit.b = coef(1);
  const Eigen::VectorXd residual = design * coef - rhs;
  for (Eigen::Index i = 0; i < rows; ++i)
    fit.max_relative_residual = std::max(fit.max_relative_residual, std::abs(residual(i)) / std::abs(rhs(i)));
  return fit;
}

namespace {

using Base = std::array<std::int64_t, 3>;

Base child_base(const Base& base, int letter) {
  const auto& o = geometry().maps[letter].offsets;
  return {kLevel * base[0] + o[0], kLevel * base[1] + o[1], kLevel * base[2] + o[2]};
}

Base base_of(const Word& word) {
  Base b{0, 0, 0};
  for (int letter : word.letters) b = child_base(b, letter);
  return b;
}

Point3 centroid(const Base& base, int generation) {
  const double scale = std::pow(3.0, generation);
  return {(base[0] + 1.0 / 3) / scale, (base[1] + 1.0 / 3) / scale, (base[2] + 1.0 / 3) / scale};
}

bool along(int letter, int a, int b) {
  const auto& o = geometry().maps[letter].offsets;
  for (int i = 0; i < 3; ++i)
    if (i != a && i != b && o[i] != 0) return false;
  return true;
}

double edge_cells_sum(const SampledFunction& f, const Base& base, int generation, int remaining, int a, int b) {
  if (remaining == 0) return f(centroid(base, generation));
  double total = 0;
  for (int letter = 0; letter < kCells; ++letter)
    if (along(letter, a, b)) total += edge_cells_sum(f, child_base(base, letter), generation + 1, remaining - 1, a, b);
  return total;
}

void check_edge(const EdgeSegment& edge) {
  check_word(edge.word);
  if (static_cast<int>(edge.word.length()) != edge.generation) throw DomainError("edge word length differs from its generation");
  if (edge.a < 0 || edge.b > 2 || edge.a >= edge.b) throw DomainError("edge corners must satisfy 0 <= a < b <= 2");
}

}  // namespace

double delta2_balanced(const SampledFunction& f, const EdgeSegment& edge, int depth) {
  check_edge(edge);
  require_depth(depth, kMaxSamplingDepth, "delta2_balanced");
  if (depth < edge.generation) throw DomainError("delta2_balanced: depth below the edge generation");
  const double sum = edge_cells_sum(f, base_of(edge.word), edge.generation, depth - edge.generation, edge.a, edge.b);
  return std::pow(2.0, depth) * std::pow(6.0, -depth) * sum;
}

std::vector<double> delta2_balanced_sequence(const SampledFunction& f, const EdgeSegment& edge, int depth) {
  std::vector<double> out;
  for (int n = edge.generation; n <= depth; ++n) out.push_back(delta2_balanced(f, edge, n));
  return out;
}

namespace {

void collect_edges(const std::function<double(const EdgeSegment&)>& f1, Word& word, int remaining, double& total) {
  if (remaining == 0) {
    const int g = static_cast<int>(word.length());
    for (auto [a, b] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}}) total += f1(EdgeSegment{g, word, a, b});
    return;
  }
  for (int letter = 0; letter < kCells; ++letter) {
    word.letters.push_back(letter);
    collect_edges(f1, word, remaining - 1, total);
    word.letters.pop_back();
  }
}

// Per generation-n cell: the 6^extra sub-cell samples, weighted by how many
// of the cell's edges they lie along (numerator) and unweighted (denominator).
struct SubcellWeights {
  std::vector<Base> offsets;
  std::vector<double> edge_count;
  std::int64_t scale = 1;
};

SubcellWeights subcell_weights(int extra) {
  SubcellWeights w;
  std::vector<Word> words{Word{}};
  for (int i = 0; i < extra; ++i) {
    std::vector<Word> next;
    for (const auto& word : words)
      for (int letter = 0; letter < kCells; ++letter) {
        Word child = word;
        child.letters.push_back(letter);
        next.push_back(std::move(child));
      }
    words = std::move(next);
  }
  for (const auto& word : words) {
    int count = 0;
    for (auto [a, b] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
      count += std::all_of(word.letters.begin(), word.letters.end(), [&](int l) { return along(l, a, b); });
    w.offsets.push_back(base_of(word));
    w.edge_count.push_back(count);
  }
  for (int i = 0; i < extra; ++i) w.scale *= kLevel;
  return w;
}

struct CellSums {
  double weighted = 0;
  double plain = 0;
};

void accumulate_cell(const SampledFunction& f, const SubcellWeights& w, const Base& base, int generation, int remaining,
                     int extra, CellSums& sums) {
  if (remaining == 0) {
    CellSums local;
    const double inverse = std::pow(3.0, -(generation + extra));
    for (std::size_t s = 0; s < w.offsets.size(); ++s) {
      const Base b{base[0] * w.scale + w.offsets[s][0], base[1] * w.scale + w.offsets[s][1],
                   base[2] * w.scale + w.offsets[s][2]};
      const double v = f({(b[0] + 1.0 / 3) * inverse, (b[1] + 1.0 / 3) * inverse, (b[2] + 1.0 / 3) * inverse});
      local.weighted += w.edge_count[s] * v;
      local.plain += v;
    }
    sums.weighted += local.weighted;
    sums.plain += local.plain;
    return;
  }
  // Children are summed separately and then added so that the floating-point
  // result does not depend on how the tree is split across threads.
  for (int letter = 0; letter < kCells; ++letter) {
    CellSums child;
    accumulate_cell(f, w, child_base(base, letter), generation + 1, remaining - 1, extra, child);
    sums.weighted += child.weighted;
    sums.plain += child.plain;
  }
}

}  // namespace

double d1_renormalized(const std::function<double(const EdgeSegment&)>& f1, const Word& cell, int depth) {
  check_word(cell);
  require_depth(depth, kMaxSamplingDepth, "d1_renormalized");
  const int m = static_cast<int>(cell.length());
  if (depth < m) throw DomainError("d1_renormalized: depth below the cell generation");
  Word word = cell;
  double total = 0;
  collect_edges(f1, word, depth - m, total);
  return std::pow(0.5, depth) * total;
}

std::vector<MeasureIdentityCell> check_measure_identity(const SampledFunction& f, int m, int depth, int inner_extra) {
  if (m < 0 || inner_extra < 0) throw DomainError("check_measure_identity: negative generation");
  if (depth < m) throw DomainError("check_measure_identity: depth below the cell generation");
  require_depth(depth + inner_extra, kMaxSamplingDepth, "check_measure_identity");
  const auto weights = subcell_weights(inner_extra);
  const int inner = depth + inner_extra;

  std::vector<Word> cells{Word{}};
  for (int i = 0; i < m; ++i) {
    std::vector<Word> next;
    for (const auto& w : cells)
      for (int letter = 0; letter < kCells; ++letter) {
        Word child = w;
        child.letters.push_back(letter);
        next.push_back(std::move(child));
      }
    cells = std::move(next);
  }

  std::vector<std::future<CellSums>> jobs;
  for (const auto& cell : cells)
    jobs.push_back(std::async(std::launch::async, [&, cell] {
      CellSums sums;
      accumulate_cell(f, weights, base_of(cell), m, depth - m, inner_extra, sums);
      return sums;
    }));

  std::vector<MeasureIdentityCell> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const CellSums sums = jobs[i].get();
    MeasureIdentityCell r;
    r.cell = cells[i];
    // (1/2)^n * sum over edges of 2^inner 6^-inner * (edge sub-cell samples).
    r.lhs = std::pow(0.5, depth) * std::pow(2.0, inner) * std::pow(6.0, -inner) * sums.weighted;
    r.rhs = 3 * std::pow(6.0, -inner) * sums.plain;
    r.is_ratio = sums.plain != 0;
    r.value = r.is_ratio ? std::ldexp(sums.weighted, inner - depth) / (3 * sums.plain) : r.lhs - r.rhs;
    out.push_back(std::move(r));
  }
  return out;
}

namespace {

void omega_samples(const KusuokaModel& model, const SampledFunction& f, const std::array<double, 3>& triple,
                   const Base& base, int generation, int remaining, const std::array<Eigen::Matrix3d, 3>& e,
                   const Eigen::Matrix3d& c, double& total) {
  if (remaining == 0) {
    const Eigen::Vector3d v(triple[0], triple[1], triple[2]);
    const double measure = v.sum() + (c * v).sum();
    total += f(centroid(base, generation)) * measure;
    return;
  }
  for (int label = 1; label <= 3; ++label) {
    const Eigen::Vector3d v = e[label - 1] * Eigen::Vector3d(triple[0], triple[1], triple[2]);
    omega_samples(model, f, {v(0), v(1), v(2)}, child_base(base, model.label_to_map[label]), generation + 1,
                  remaining - 1, e, c, total);
  }
}

Eigen::Matrix3d to_eigen(const Mat3& m) {
  Eigen::Matrix3d out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = to_double(m[i][j]);
  return out;
}

}  // namespace

std::vector<double> delta2_prime_kusuoka(const KusuokaModel& model, const SampledFunction& f, int depth) {
  require_depth(depth, kMaxSamplingDepth, "delta2_prime_kusuoka");
  const double lambda = spectral_growth(derive_transfer()).symmetric.plus();
  const std::array<Eigen::Matrix3d, 3> e{to_eigen(model.E1), to_eigen(model.E2), to_eigen(model.E3)};
  const Eigen::Matrix3d c = to_eigen(model.C);
  const std::array<double, 3> start{to_double(model.e[0]), to_double(model.e[1]), to_double(model.e[2])};
  std::vector<double> out;
  for (int n = 0; n <= depth; ++n) {
    double total = 0;
    omega_samples(model, f, start, Base{0, 0, 0}, 0, n, e, c, total);
    out.push_back(total / std::pow(lambda, n));
  }
  return out;
}

}  // namespace fractal_hodge
