#pragma once

// Reference computations for the tests. Nothing here calls into the library:
// networks are evaluated with Eigen matrices, roots come from companion
// matrices and path counts from explicit enumeration.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

/// Roots of sum_k coeffs[k] w^k (degree <= 8, leading coefficient nonzero).
std::vector<cd> univariate_roots(const std::vector<cd>& coeffs);
cd horner(const std::vector<cd>& coeffs, cd w);

struct GridScan {
  double min_value = 0.0;
  std::vector<double> argmin;
  std::size_t points = 0;
  std::size_t negative = 0;  // grid points with a negative value
};

/// Exhaustive scan of a box [lo, hi]^n at the given spacing (n <= 4).
GridScan grid_min_scan(const std::function<double(const std::vector<double>&)>& f, std::size_t n, double lo, double hi,
                       double resolution);

std::uint64_t bezout_count(const std::vector<int>& degrees);
/// Sum over assignments of equations to variable groups, group j receiving
/// exactly group_sizes[j] equations, of the product of the chosen degrees.
std::uint64_t multihom_count(const std::vector<std::vector<int>>& multidegree, const std::vector<int>& group_sizes);

/// A chain of dense layers W_1 .. W_L, flattened layer by layer in row-major
/// order. Residual nets use (I + W_l) factors.
struct Net {
  std::vector<int> dims;
  bool residual = false;

  std::size_t nvars() const;
};

/// Loss 0.5 * sum_i ||P x_i - y_i||^2 without conjugation; x and y are
/// column-major per sample: x[i] holds sample i.
cd loss(const Net& net, const std::vector<cd>& w, const std::vector<std::vector<double>>& x,
        const std::vector<std::vector<double>>& y);
/// Product matrix, row-major, d_out x d_in.
std::vector<cd> product(const Net& net, const std::vector<cd>& w);

/// Central differences of `loss` at steps h and h/2, Richardson-extrapolated
/// (error O(h^4)).
std::vector<cd> fd_gradient(const Net& net, const std::vector<cd>& w, const std::vector<std::vector<double>>& x,
                            const std::vector<std::vector<double>>& y, double h = 1e-3);
/// Row-major n x n second differences, extrapolated the same way.
std::vector<cd> fd_hessian(const Net& net, const std::vector<cd>& w, const std::vector<std::vector<double>>& x,
                           const std::vector<std::vector<double>>& y, double h = 1e-3);

/// Eigenvalues of a row-major n x n complex matrix.
std::vector<cd> eigenvalues(const std::vector<cd>& a, std::size_t n);

/// Expected decomposition of a width-one chain with H+1 weights: the
/// global-minimum hypersurface of degree H+1 and C(H+1, 2) codimension-two
/// coordinate planes through the origin.
struct Width1Expectation {
  int minimum_dim = 0;
  int minimum_degree = 0;
  int plane_dim = 0;
  int plane_count = 0;
};
Width1Expectation width1_expectation(int weights);

/// Unique nonzero Hessian eigenvalue of a single-datum width-one chain at a
/// global minimum: sum_k y^2 / w_k^2.
cd width1_eigenvalue(const std::vector<cd>& w, double y);

}  // namespace oracle
