#pragma once

// Compiles a linear (or linear residual) network and its training data into
// polynomial form: squared-error loss, gradient system, rank-condition minors.
//
// Weight flattening order, used by every module and archive: layers in order
// W_1, W_2, ..., W_{H+1}; within a layer the d_i x d_{i-1} matrix is stored
// row-major. W_i maps layer i-1 (width d_{i-1}) to layer i (width d_i).

#include <cstdint>
#include <string>
#include <vector>

#include "lnv/linalg.hpp"
#include "lnv/poly.hpp"

namespace lnv {

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};
class RankOutOfRange : public Error {
 public:
  using Error::Error;
};
class NonSquareLayer : public Error {
 public:
  using Error::Error;
};
class NotWidthOne : public Error {
 public:
  using Error::Error;
};

/// Default envelope: widths and sample counts up to this bound.
inline constexpr int kEnvelopeLimit = 3;

struct Architecture {
  std::vector<int> dims;  // d_0 .. d_{H+1}
  bool residual = false;

  std::size_t layers() const { return dims.empty() ? 0 : dims.size() - 1; }
  std::size_t input_dim() const { return static_cast<std::size_t>(dims.front()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(dims.back()); }
  std::size_t layer_rows(std::size_t layer) const { return static_cast<std::size_t>(dims[layer + 1]); }
  std::size_t layer_cols(std::size_t layer) const { return static_cast<std::size_t>(dims[layer]); }
  std::size_t layer_offset(std::size_t layer) const;
  std::size_t nvars() const;
  /// k = min over all widths.
  int width() const;
  /// Variable indices of each layer, the natural multi-homogeneous grouping.
  std::vector<std::vector<std::size_t>> layer_groups() const;
  std::string label() const;

  /// Throws ShapeMismatch / NonSquareLayer on malformed input; widths above
  /// kEnvelopeLimit need allow_large.
  void validate(bool allow_large = false) const;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  RealMatrix() = default;
  RealMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;
};

struct TrainingSet {
  RealMatrix x;  // d_x x m
  RealMatrix y;  // d_y x m

  std::size_t samples() const { return x.cols; }
  friend bool operator==(const TrainingSet&, const TrainingSet&) = default;
};

/// Throws ShapeMismatch unless the data matches the architecture.
void check_conforms(const Architecture& arch, const TrainingSet& data);

/// 0.5 * ||Y||_F^2, the loss at W = 0 of a plain network.
double half_output_energy(const TrainingSet& data);

/// 0.5 * sum_i ||prod(W) x_i - y_i||^2 expanded without conjugation; residual
/// networks use (I + W'_k) factors.
Polynomial build_loss(const Architecture& arch, const TrainingSet& data);

PolySystem build_gradient_system(const Polynomial& loss);

/// All r x r minors of the symbolic product W_{H+1} ... W_1, expanded, in the
/// architecture's own coordinates (I + W'_k factors for residual networks).
PolySystem build_product_minors(const Architecture& arch, int r);

enum class ShiftDirection { to_plain, to_residual };

/// to_plain adds the identity to every layer, to_residual subtracts it.
CVector residual_shift(std::span<const Complex> point, const Architecture& arch, ShiftDirection direction);

std::vector<CMatrix> layer_matrices(const Architecture& arch, std::span<const Complex> point);
CVector flatten_layers(const Architecture& arch, const std::vector<CMatrix>& layers);
/// W_{H+1} ... W_1 at a point given in plain coordinates.
CMatrix product_matrix(const Architecture& arch, std::span<const Complex> plain_point);

struct ExpectedComponent {
  int dim = 0;
  int degree = 0;
  int count = 0;
  bool contains_origin = false;
  bool global_minimum = false;
};

/// Closed-form decomposition of a width-one chain: one global-minimum
/// hypersurface prod(w) = <x,y>/<x,x> of degree H+1, plus C(H+1,2) coordinate
/// planes w_i = w_j = 0 of dimension H-1 through the origin.
std::vector<ExpectedComponent> width1_oracle(const Architecture& arch, const TrainingSet& data);

struct RealizableData {
  TrainingSet data;
  std::vector<RealMatrix> teacher;  // W*_1 .. W*_{H+1}, plain coordinates
  std::uint64_t draws = 1;          // attempts until the conditioning checks passed
};

/// Gaussian inputs X and outputs Y = (prod W*) X from a Gaussian teacher
/// whose product has full rank k. Draws are repeated until the product and
/// Y keep their full rank at a relative singular-value floor of 0.05.
/// Deterministic in the seed.
RealizableData generate_realizable_data(const Architecture& arch, std::size_t m, std::uint64_t seed);

/// Teacher weights flattened in the architecture's own coordinates.
CVector teacher_point(const Architecture& arch, const std::vector<RealMatrix>& teacher);

/// Everything the engine needs about one network instance.
struct NetProblem {
  Architecture arch;
  TrainingSet data;
  Polynomial loss;        // in the architecture's own coordinates
  Polynomial plain_loss;  // same network with plain parameterization
  PolySystem gradient;    // gradient of `loss`

  /// Maps a point in the problem's coordinates to plain coordinates.
  CVector to_plain(std::span<const Complex> point) const;
  CVector from_plain(std::span<const Complex> plain_point) const;
  /// The plain origin W = 0 expressed in the problem's coordinates.
  CVector plain_origin() const;
};

NetProblem make_problem(const Architecture& arch, const TrainingSet& data);

}  // namespace lnv
