#include "lnv/netsys.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lnv/rng.hpp"

namespace lnv {

std::size_t Architecture::layer_offset(std::size_t layer) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < layer; ++i) off += layer_rows(i) * layer_cols(i);
  return off;
}

std::size_t Architecture::nvars() const { return layer_offset(layers()); }

int Architecture::width() const { return dims.empty() ? 0 : *std::min_element(dims.begin(), dims.end()); }

std::vector<std::vector<std::size_t>> Architecture::layer_groups() const {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t l = 0; l < layers(); ++l) {
    std::vector<std::size_t> g(layer_rows(l) * layer_cols(l));
    std::iota(g.begin(), g.end(), layer_offset(l));
    groups.push_back(std::move(g));
  }
  return groups;
}

std::string Architecture::label() const {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(dims[i]);
  }
  if (residual) s += " (residual)";
  return s;
}

void Architecture::validate(bool allow_large) const {
  if (dims.size() < 3) throw ShapeMismatch("need at least two weight layers (three widths)");
  for (int d : dims) {
    if (d < 1) throw ShapeMismatch("layer widths must be positive");
    if (!allow_large && d > kEnvelopeLimit)
      throw ShapeMismatch("layer width " + std::to_string(d) + " outside the default envelope; pass the override flag");
  }
  if (residual && std::any_of(dims.begin(), dims.end(), [&](int d) { return d != dims.front(); }))
    throw NonSquareLayer("residual networks need all widths equal");
}

void check_conforms(const Architecture& arch, const TrainingSet& data) {
  if (data.x.rows != arch.input_dim()) throw ShapeMismatch("X rows must equal d_0");
  if (data.y.rows != arch.output_dim()) throw ShapeMismatch("Y rows must equal d_{H+1}");
  if (data.x.cols != data.y.cols) throw ShapeMismatch("X and Y must have the same number of samples");
  if (data.x.cols == 0) throw ShapeMismatch("need at least one sample");
  for (double v : data.x.values)
    if (!std::isfinite(v)) throw ShapeMismatch("X has non-finite entries");
  for (double v : data.y.values)
    if (!std::isfinite(v)) throw ShapeMismatch("Y has non-finite entries");
}

double half_output_energy(const TrainingSet& data) {
  double s = 0.0;
  for (double v : data.y.values) s += v * v;
  return 0.5 * s;
}

namespace {

struct PolyMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Polynomial> entries;

  PolyMatrix(std::size_t r, std::size_t c, std::size_t nvars) : rows(r), cols(c), entries(r * c, Polynomial(nvars)) {}
  Polynomial& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  const Polynomial& operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
};

PolyMatrix multiply(const PolyMatrix& a, const PolyMatrix& b, std::size_t nvars) {
  PolyMatrix out(a.rows, b.cols, nvars);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.cols; ++j)
      for (std::size_t k = 0; k < a.cols; ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

PolyMatrix symbolic_layer(const Architecture& arch, std::size_t layer, bool add_identity) {
  const std::size_t n = arch.nvars();
  const std::size_t rows = arch.layer_rows(layer);
  const std::size_t cols = arch.layer_cols(layer);
  const std::size_t off = arch.layer_offset(layer);
  PolyMatrix w(rows, cols, n);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      w(r, c) = Polynomial::variable(n, off + r * cols + c);
      if (add_identity && r == c) w(r, c) += Polynomial::constant(n, 1.0);
    }
  return w;
}

// W_{H+1} ... W_1 in the architecture's own coordinates.
PolyMatrix symbolic_product(const Architecture& arch, bool add_identity) {
  const std::size_t n = arch.nvars();
  PolyMatrix prod = symbolic_layer(arch, 0, add_identity);
  for (std::size_t l = 1; l < arch.layers(); ++l) prod = multiply(symbolic_layer(arch, l, add_identity), prod, n);
  return prod;
}

Polynomial determinant(const PolyMatrix& m, std::span<const std::size_t> rows, std::span<const std::size_t> cols,
                       std::size_t nvars) {
  const std::size_t r = rows.size();
  if (r == 1) return m(rows[0], cols[0]);
  Polynomial det(nvars);
  std::vector<std::size_t> sub_cols;
  for (std::size_t j = 0; j < r; ++j) {
    sub_cols.clear();
    for (std::size_t k = 0; k < r; ++k)
      if (k != j) sub_cols.push_back(cols[k]);
    Polynomial minor = determinant(m, rows.subspan(1), sub_cols, nvars);
    Polynomial term = m(rows[0], cols[j]) * minor;
    if (j % 2 == 0)
      det += term;
    else
      det -= term;
  }
  return det;
}

void combinations(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), 0);
  while (true) {
    out.push_back(c);
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
}

}  // namespace

Polynomial build_loss(const Architecture& arch, const TrainingSet& data) {
  check_conforms(arch, data);
  const std::size_t n = arch.nvars();
  const PolyMatrix prod = symbolic_product(arch, arch.residual);
  Polynomial loss(n);
  for (std::size_t s = 0; s < data.samples(); ++s) {
    for (std::size_t i = 0; i < prod.rows; ++i) {
      Polynomial r = Polynomial::constant(n, -data.y(i, s));
      for (std::size_t k = 0; k < prod.cols; ++k) r += prod(i, k) * Complex(data.x(k, s));
      loss += r * r;
    }
  }
  loss *= 0.5;
  return loss;
}

PolySystem build_gradient_system(const Polynomial& loss) {
  std::vector<Polynomial> grad;
  grad.reserve(loss.nvars());
  for (std::size_t i = 0; i < loss.nvars(); ++i) grad.push_back(differentiate(loss, i));
  return PolySystem(std::move(grad));
}

PolySystem build_product_minors(const Architecture& arch, int r) {
  if (r < 1 || r > arch.width()) throw RankOutOfRange("rank bound must lie in [1, width]");
  const std::size_t n = arch.nvars();
  const PolyMatrix prod = symbolic_product(arch, arch.residual);
  std::vector<std::vector<std::size_t>> row_sets, col_sets;
  combinations(prod.rows, static_cast<std::size_t>(r), row_sets);
  combinations(prod.cols, static_cast<std::size_t>(r), col_sets);
  std::vector<Polynomial> minors;
  for (const auto& rs : row_sets)
    for (const auto& cs : col_sets) {
      Polynomial d = determinant(prod, rs, cs, n);
      if (!d.is_zero()) minors.push_back(std::move(d));
    }
  return PolySystem(std::move(minors));
}

CVector residual_shift(std::span<const Complex> point, const Architecture& arch, ShiftDirection direction) {
  if (point.size() != arch.nvars()) throw DimensionMismatch("point length does not match the architecture");
  for (std::size_t l = 0; l < arch.layers(); ++l)
    if (arch.layer_rows(l) != arch.layer_cols(l)) throw NonSquareLayer("residual shift needs square layers");
  CVector out(point.begin(), point.end());
  const double sign = direction == ShiftDirection::to_plain ? 1.0 : -1.0;
  for (std::size_t l = 0; l < arch.layers(); ++l) {
    const std::size_t d = arch.layer_rows(l);
    const std::size_t off = arch.layer_offset(l);
    for (std::size_t i = 0; i < d; ++i) out[off + i * d + i] += sign;
  }
  return out;
}

std::vector<CMatrix> layer_matrices(const Architecture& arch, std::span<const Complex> point) {
  if (point.size() != arch.nvars()) throw DimensionMismatch("point length does not match the architecture");
  std::vector<CMatrix> layers;
  for (std::size_t l = 0; l < arch.layers(); ++l) {
    const std::size_t rows = arch.layer_rows(l), cols = arch.layer_cols(l), off = arch.layer_offset(l);
    CMatrix w(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) w(r, c) = point[off + r * cols + c];
    layers.push_back(std::move(w));
  }
  return layers;
}

CVector flatten_layers(const Architecture& arch, const std::vector<CMatrix>& layers) {
  if (layers.size() != arch.layers()) throw DimensionMismatch("layer count does not match the architecture");
  CVector out;
  out.reserve(arch.nvars());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].rows() != arch.layer_rows(l) || layers[l].cols() != arch.layer_cols(l))
      throw DimensionMismatch("layer shape does not match the architecture");
    out.insert(out.end(), layers[l].data().begin(), layers[l].data().end());
  }
  return out;
}

CMatrix product_matrix(const Architecture& arch, std::span<const Complex> plain_point) {
  const auto layers = layer_matrices(arch, plain_point);
  CMatrix prod = layers.front();
  for (std::size_t l = 1; l < layers.size(); ++l) prod = layers[l] * prod;
  return prod;
}

std::vector<ExpectedComponent> width1_oracle(const Architecture& arch, const TrainingSet& data) {
  if (std::any_of(arch.dims.begin(), arch.dims.end(), [](int d) { return d != 1; }))
    throw NotWidthOne("width-one oracle needs every width equal to 1");
  check_conforms(arch, data);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t s = 0; s < data.samples(); ++s) {
    sxx += data.x(0, s) * data.x(0, s);
    sxy += data.x(0, s) * data.y(0, s);
  }
  if (sxx == 0.0 || sxy == 0.0) throw Error("width-one oracle needs <x,x> != 0 and <x,y> != 0");
  const int weights = static_cast<int>(arch.layers());  // H + 1
  const int h = weights - 1;
  ExpectedComponent global{h, weights, 1, false, true};
  ExpectedComponent saddles{h - 1, 1, weights * (weights - 1) / 2, true, false};
  return {global, saddles};
}

namespace {
// singular values below this fraction of the largest count as lost rank
constexpr double kDataConditionFloor = 0.05;
}  // namespace

RealizableData generate_realizable_data(const Architecture& arch, std::size_t m, std::uint64_t seed) {
  if (m < 1) throw ShapeMismatch("need at least one sample");
  const auto k = static_cast<std::size_t>(arch.width());
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(seed, attempt);
    RealizableData out;
    out.draws = attempt + 1;
    for (std::size_t l = 0; l < arch.layers(); ++l) {
      RealMatrix w(arch.layer_rows(l), arch.layer_cols(l));
      for (auto& v : w.values) v = rng.normal();
      out.teacher.push_back(std::move(w));
    }
    RealMatrix x(arch.input_dim(), m);
    for (auto& v : x.values) v = rng.normal();

    // teacher product in plain coordinates
    std::vector<CMatrix> layers;
    for (const auto& w : out.teacher) {
      CMatrix c(w.rows, w.cols);
      for (std::size_t i = 0; i < w.values.size(); ++i) c.data()[i] = w.values[i];
      layers.push_back(std::move(c));
    }
    CMatrix prod = layers.front();
    for (std::size_t l = 1; l < layers.size(); ++l) prod = layers[l] * prod;
    if (numerical_rank(prod, kDataConditionFloor) != k) continue;

    RealMatrix y(arch.output_dim(), m);
    for (std::size_t i = 0; i < y.rows; ++i)
      for (std::size_t s = 0; s < m; ++s) {
        double acc = 0.0;
        for (std::size_t j = 0; j < x.rows; ++j) acc += prod(i, j).real() * x(j, s);
        y(i, s) = acc;
      }
    CMatrix yc(y.rows, y.cols);
    for (std::size_t i = 0; i < y.values.size(); ++i) yc.data()[i] = y.values[i];
    if (numerical_rank(yc, kDataConditionFloor) != std::min({k, m, x.rows})) continue;
    out.data = TrainingSet{std::move(x), std::move(y)};
    return out;
  }
}

CVector teacher_point(const Architecture& arch, const std::vector<RealMatrix>& teacher) {
  CVector plain;
  for (const auto& w : teacher)
    for (double v : w.values) plain.emplace_back(v);
  if (plain.size() != arch.nvars()) throw DimensionMismatch("teacher does not match the architecture");
  return arch.residual ? residual_shift(plain, arch, ShiftDirection::to_residual) : plain;
}

CVector NetProblem::to_plain(std::span<const Complex> point) const {
  if (!arch.residual) return CVector(point.begin(), point.end());
  return residual_shift(point, arch, ShiftDirection::to_plain);
}

CVector NetProblem::from_plain(std::span<const Complex> plain_point) const {
  if (!arch.residual) return CVector(plain_point.begin(), plain_point.end());
  return residual_shift(plain_point, arch, ShiftDirection::to_residual);
}

CVector NetProblem::plain_origin() const { return from_plain(CVector(arch.nvars())); }

NetProblem make_problem(const Architecture& arch, const TrainingSet& data) {
  NetProblem p;
  p.arch = arch;
  p.data = data;
  p.loss = build_loss(arch, data);
  Architecture plain = arch;
  plain.residual = false;
  p.plain_loss = arch.residual ? build_loss(plain, data) : p.loss;
  p.gradient = build_gradient_system(p.loss);
  return p;
}

}  // namespace lnv
