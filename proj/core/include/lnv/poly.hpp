#pragma once

// Sparse multivariate polynomials with complex coefficients.
//
// Terms are kept in a map keyed by exponent vectors under graded
// lexicographic order, so iteration order (and therefore the text
// serialization) is canonical.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lnv/linalg.hpp"

namespace lnv {

using Exponent = std::uint16_t;
using Monomial = std::vector<Exponent>;

int total_degree(const Monomial& m);

/// Graded lexicographic order: total degree first, then exponents compared
/// left to right (larger exponent on an earlier variable is larger).
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Polynomial {
 public:
  using TermMap = std::map<Monomial, Complex, GrlexLess>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, Complex c);
  static Polynomial variable(std::size_t nvars, std::size_t index);

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Adds c * monomial; drops the term if the coefficient cancels to zero.
  void add_term(const Monomial& m, Complex c);

  int total_degree() const;
  /// Maximum over terms of the summed exponents of the given variables.
  int degree_in(std::span<const std::size_t> vars) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(Complex s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, Complex s) { return a *= s; }
  friend Polynomial operator*(Complex s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

 private:
  std::size_t nvars_ = 0;
  TermMap terms_;
};

Complex evaluate(const Polynomial& p, std::span<const Complex> point);
Polynomial differentiate(const Polynomial& p, std::size_t var);
/// Homogenizes to the given degree with a new last variable; degree must be
/// at least p's total degree.
Polynomial homogenize(const Polynomial& p, int degree);
CMatrix hessian_at(const Polynomial& p, std::span<const Complex> point);

/// Text form: one term per line, `re,im : e1 e2 ... en`, 17 significant
/// digits, leading (grlex-largest) term first.
std::vector<std::string> to_text_terms(const Polynomial& p);
std::string to_text(const Polynomial& p);
Polynomial polynomial_from_text_terms(std::span<const std::string> lines, std::size_t nvars);
Polynomial polynomial_from_text(const std::string& text, std::size_t nvars);

std::string format_complex(Complex z);
Complex parse_complex(const std::string& s);

/// Flat, immutable form of a list of polynomials for repeated evaluation.
class CompiledPolys {
 public:
  CompiledPolys() = default;
  explicit CompiledPolys(std::span<const Polynomial> polys);

  std::size_t size() const { return term_begin_.empty() ? 0 : term_begin_.size() - 1; }
  int max_exponent() const { return max_exp_; }

  /// powers[v * stride + e] must hold x_v^e for e <= max_exponent().
  void evaluate(std::span<const Complex> powers, std::size_t stride, std::span<Complex> out) const;
  /// Same with |coefficients| and |x|: a cancellation-free magnitude bound.
  void evaluate_abs(std::span<const double> powers, std::size_t stride, std::span<double> out) const;

 private:
  std::vector<Complex> coef_;
  std::vector<std::uint32_t> term_begin_;
  std::vector<std::uint32_t> factor_begin_;
  std::vector<std::uint16_t> factor_var_;
  std::vector<std::uint16_t> factor_exp_;
  int max_exp_ = 0;
};

/// Values and Jacobian of a polynomial system at a point.
class SystemEvaluator {
 public:
  SystemEvaluator(std::span<const Polynomial> polys, std::size_t nvars);

  std::size_t equations() const { return neq_; }
  std::size_t nvars() const { return nvars_; }

  void values(std::span<const Complex> x, std::span<Complex> out) const;
  void values_and_jacobian(std::span<const Complex> x, std::span<Complex> out, CMatrix& jac) const;
  /// Per equation, sum over terms of |c| |x|^a: the roundoff scale of values().
  void abs_values(std::span<const Complex> x, std::span<double> out) const;
  void abs_jacobian(std::span<const Complex> x, std::vector<double>& out) const;

 private:
  void fill_powers(std::span<const Complex> x, std::vector<Complex>& pw) const;
  void fill_abs_powers(std::span<const Complex> x, std::vector<double>& pw) const;

  std::size_t neq_;
  std::size_t nvars_;
  int max_exp_;
  CompiledPolys values_;
  CompiledPolys jac_;
};

/// Ordered, nonempty list of polynomials in a common variable count.
class PolySystem {
 public:
  PolySystem() = default;
  explicit PolySystem(std::vector<Polynomial> polys);

  std::size_t size() const { return polys_.size(); }
  std::size_t nvars() const { return nvars_; }
  bool empty() const { return polys_.empty(); }
  const Polynomial& operator[](std::size_t i) const { return polys_[i]; }
  const std::vector<Polynomial>& polys() const { return polys_; }
  std::vector<int> degrees() const;
  int max_degree() const;

  const SystemEvaluator& evaluator() const { return *eval_; }

  CVector evaluate(std::span<const Complex> point) const;

 private:
  std::vector<Polynomial> polys_;
  std::size_t nvars_ = 0;
  std::shared_ptr<const SystemEvaluator> eval_;
};

PolySystem concat(const PolySystem& a, const PolySystem& b);

CMatrix jacobian_at(const PolySystem& sys, std::span<const Complex> point);

/// max_i |f_i(x)| / max(1, max_i sum|c||x|^a): residual relative to the
/// evaluation's own roundoff scale.
double scaled_residual(const PolySystem& sys, std::span<const Complex> point);

}  // namespace lnv
