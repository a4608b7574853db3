#pragma once

// Dense complex linear algebra for the small systems (n <= 64) that appear in
// path tracking and Hessian analysis. All tolerances are relative to the
// scale of the matrix involved.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lnv {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

/// Row-major dense complex matrix.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static CMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<Complex> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<const Complex> data() const { return data_; }
  std::span<Complex> data() { return data_; }

  void resize(std::size_t rows, std::size_t cols);
  void set_zero();

  CMatrix transpose() const;
  CMatrix adjoint() const;

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  friend CVector operator*(const CMatrix& a, std::span<const Complex> x);
  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

// Vector helpers used throughout the tracker.
double norm2(std::span<const Complex> v);
double norm_inf(std::span<const Complex> v);
double frobenius_norm(const CMatrix& a);
bool all_finite(std::span<const Complex> v);

/// LU factorization with partial pivoting, reusable for several right-hand sides.
class LuFactorization {
 public:
  /// Throws SingularMatrix when a pivot falls below 1e-14 * ||A||_F.
  explicit LuFactorization(CMatrix a);

  std::size_t size() const { return lu_.rows(); }
  CVector solve(std::span<const Complex> b) const;
  /// Explicit inverse; only for condition estimates on small matrices.
  CMatrix inverse() const;

 private:
  CMatrix lu_;
  std::vector<std::size_t> perm_;
};

CVector solve_linear(const CMatrix& a, std::span<const Complex> b);

/// Singular values in descending order (one-sided Jacobi).
std::vector<double> singular_values(const CMatrix& a);

struct Svd {
  CMatrix u;                  // rows x k
  std::vector<double> sigma;  // k = min(rows, cols), descending
  CMatrix v;                  // cols x k
};

Svd svd(const CMatrix& a);

/// Number of singular values above tol * sigma_max. Zero matrix has rank 0.
std::size_t numerical_rank(const CMatrix& a, double tol);

/// Eigenvalues with multiplicity, via Householder Hessenberg reduction and
/// Wilkinson-shifted complex QR. Order follows deflation.
std::vector<Complex> eigenvalues(const CMatrix& a);

/// Minimum-norm least-squares solution of a x = b using singular values
/// above rel_tol * sigma_max.
CVector pseudo_solve(const CMatrix& a, std::span<const Complex> b, double rel_tol);

}  // namespace lnv
