#include "lnv/poly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace lnv {

int total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), 0); }

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

Polynomial Polynomial::constant(std::size_t nvars, Complex c) {
  Polynomial p(nvars);
  p.add_term(Monomial(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
  if (index >= nvars) throw DimensionMismatch("variable index out of range");
  Polynomial p(nvars);
  Monomial m(nvars, 0);
  m[index] = 1;
  p.add_term(m, 1.0);
  return p;
}

void Polynomial::add_term(const Monomial& m, Complex c) {
  if (m.size() != nvars_) throw DimensionMismatch("monomial length does not match variable count");
  if (c == Complex{}) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex{}) terms_.erase(it);
  }
}

int Polynomial::total_degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, lnv::total_degree(m));
  return terms_.empty() ? 0 : d;
}

int Polynomial::degree_in(std::span<const std::size_t> vars) const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int s = 0;
    for (auto v : vars) s += m[v];
    d = std::max(d, s);
  }
  return d;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.nvars_ != nvars_) throw DimensionMismatch("polynomial variable counts differ");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.nvars_ != nvars_) throw DimensionMismatch("polynomial variable counts differ");
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(Complex s) {
  if (s == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    if (it->second == Complex{})
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_) throw DimensionMismatch("polynomial variable counts differ");
  Polynomial out(a.nvars_);
  Monomial m(a.nvars_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<Exponent>(ma[i] + mb[i]);
      out.add_term(m, ca * cb);
    }
  return out;
}

Complex evaluate(const Polynomial& p, std::span<const Complex> point) {
  if (point.size() != p.nvars()) throw DimensionMismatch("evaluation point length does not match variable count");
  Complex sum{};
  for (const auto& [m, c] : p.terms()) {
    Complex t = c;
    for (std::size_t v = 0; v < m.size(); ++v)
      for (Exponent e = 0; e < m[v]; ++e) t *= point[v];
    sum += t;
  }
  return sum;
}

Polynomial differentiate(const Polynomial& p, std::size_t var) {
  if (var >= p.nvars()) throw DimensionMismatch("differentiation variable out of range");
  Polynomial d(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    if (m[var] == 0) continue;
    Monomial dm = m;
    dm[var] = static_cast<Exponent>(dm[var] - 1);
    d.add_term(dm, c * static_cast<double>(m[var]));
  }
  return d;
}

Polynomial homogenize(const Polynomial& p, int degree) {
  if (degree < p.total_degree()) throw Error("homogenizing degree is below the total degree");
  Polynomial h(p.nvars() + 1);
  for (const auto& [m, c] : p.terms()) {
    Monomial hm = m;
    hm.push_back(static_cast<Exponent>(degree - lnv::total_degree(m)));
    h.add_term(hm, c);
  }
  return h;
}

CMatrix hessian_at(const Polynomial& p, std::span<const Complex> point) {
  const std::size_t n = p.nvars();
  if (point.size() != n) throw DimensionMismatch("hessian point length does not match variable count");
  CMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Polynomial di = differentiate(p, i);
    for (std::size_t j = i; j < n; ++j) {
      const Complex v = evaluate(differentiate(di, j), point);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

std::string format_complex(Complex z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g", z.real(), z.imag());
  return buf;
}

namespace {

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error("cannot parse number '" + std::string(s) + "'");
  return v;
}

}  // namespace

Complex parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw Error("complex value must be 're,im': '" + s + "'");
  std::string_view sv(s);
  return {parse_double(sv.substr(0, comma)), parse_double(sv.substr(comma + 1))};
}

std::vector<std::string> to_text_terms(const Polynomial& p) {
  std::vector<std::string> lines;
  lines.reserve(p.term_count());
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    std::string line = format_complex(it->second) + " :";
    for (auto e : it->first) line += " " + std::to_string(e);
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string to_text(const Polynomial& p) {
  std::string out;
  for (const auto& l : to_text_terms(p)) {
    out += l;
    out += '\n';
  }
  return out;
}

Polynomial polynomial_from_text_terms(std::span<const std::string> lines, std::size_t nvars) {
  Polynomial p(nvars);
  for (const auto& line : lines) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw Error("polynomial term missing ':' in '" + line + "'");
    const Complex c = parse_complex(line.substr(0, colon));
    std::istringstream in(line.substr(colon + 1));
    Monomial m;
    long e = 0;
    while (in >> e) {
      if (e < 0 || e > 0xFFFF) throw Error("exponent out of range in '" + line + "'");
      m.push_back(static_cast<Exponent>(e));
    }
    if (!in.eof()) throw Error("malformed exponent list in '" + line + "'");
    if (m.size() != nvars) throw DimensionMismatch("term has wrong number of exponents: '" + line + "'");
    p.add_term(m, c);
  }
  return p;
}

Polynomial polynomial_from_text(const std::string& text, std::size_t nvars) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return polynomial_from_text_terms(lines, nvars);
}

CompiledPolys::CompiledPolys(std::span<const Polynomial> polys) {
  term_begin_.push_back(0);
  factor_begin_.push_back(0);
  for (const auto& p : polys) {
    for (const auto& [m, c] : p.terms()) {
      coef_.push_back(c);
      for (std::size_t v = 0; v < m.size(); ++v) {
        if (m[v] == 0) continue;
        factor_var_.push_back(static_cast<std::uint16_t>(v));
        factor_exp_.push_back(m[v]);
        max_exp_ = std::max<int>(max_exp_, m[v]);
      }
      factor_begin_.push_back(static_cast<std::uint32_t>(factor_var_.size()));
    }
    term_begin_.push_back(static_cast<std::uint32_t>(coef_.size()));
  }
}

void CompiledPolys::evaluate(std::span<const Complex> powers, std::size_t stride, std::span<Complex> out) const {
  const std::size_t np = size();
  for (std::size_t p = 0; p < np; ++p) {
    Complex sum{};
    for (std::uint32_t t = term_begin_[p]; t < term_begin_[p + 1]; ++t) {
      Complex v = coef_[t];
      for (std::uint32_t f = factor_begin_[t]; f < factor_begin_[t + 1]; ++f)
        v *= powers[factor_var_[f] * stride + factor_exp_[f]];
      sum += v;
    }
    out[p] = sum;
  }
}

void CompiledPolys::evaluate_abs(std::span<const double> powers, std::size_t stride, std::span<double> out) const {
  const std::size_t np = size();
  for (std::size_t p = 0; p < np; ++p) {
    double sum = 0.0;
    for (std::uint32_t t = term_begin_[p]; t < term_begin_[p + 1]; ++t) {
      double v = std::abs(coef_[t]);
      for (std::uint32_t f = factor_begin_[t]; f < factor_begin_[t + 1]; ++f)
        v *= powers[factor_var_[f] * stride + factor_exp_[f]];
      sum += v;
    }
    out[p] = sum;
  }
}

SystemEvaluator::SystemEvaluator(std::span<const Polynomial> polys, std::size_t nvars)
    : neq_(polys.size()), nvars_(nvars), values_(polys) {
  std::vector<Polynomial> derivs;
  derivs.reserve(neq_ * nvars_);
  for (const auto& p : polys)
    for (std::size_t j = 0; j < nvars_; ++j) derivs.push_back(differentiate(p, j));
  jac_ = CompiledPolys(derivs);
  max_exp_ = std::max(values_.max_exponent(), 1);
}

void SystemEvaluator::fill_powers(std::span<const Complex> x, std::vector<Complex>& pw) const {
  const std::size_t stride = static_cast<std::size_t>(max_exp_) + 1;
  pw.resize(nvars_ * stride);
  for (std::size_t v = 0; v < nvars_; ++v) {
    Complex* row = pw.data() + v * stride;
    row[0] = 1.0;
    for (int e = 1; e <= max_exp_; ++e) row[e] = row[e - 1] * x[v];
  }
}

void SystemEvaluator::fill_abs_powers(std::span<const Complex> x, std::vector<double>& pw) const {
  const std::size_t stride = static_cast<std::size_t>(max_exp_) + 1;
  pw.resize(nvars_ * stride);
  for (std::size_t v = 0; v < nvars_; ++v) {
    double* row = pw.data() + v * stride;
    const double a = std::abs(x[v]);
    row[0] = 1.0;
    for (int e = 1; e <= max_exp_; ++e) row[e] = row[e - 1] * a;
  }
}

void SystemEvaluator::values(std::span<const Complex> x, std::span<Complex> out) const {
  if (x.size() != nvars_ || out.size() != neq_) throw DimensionMismatch("evaluator argument sizes");
  thread_local std::vector<Complex> pw;
  fill_powers(x, pw);
  values_.evaluate(pw, static_cast<std::size_t>(max_exp_) + 1, out);
}

void SystemEvaluator::values_and_jacobian(std::span<const Complex> x, std::span<Complex> out, CMatrix& jac) const {
  if (x.size() != nvars_ || out.size() != neq_) throw DimensionMismatch("evaluator argument sizes");
  thread_local std::vector<Complex> pw;
  fill_powers(x, pw);
  const std::size_t stride = static_cast<std::size_t>(max_exp_) + 1;
  values_.evaluate(pw, stride, out);
  if (jac.rows() != neq_ || jac.cols() != nvars_) jac.resize(neq_, nvars_);
  jac_.evaluate(pw, stride, jac.data());
}

void SystemEvaluator::abs_values(std::span<const Complex> x, std::span<double> out) const {
  thread_local std::vector<double> pw;
  fill_abs_powers(x, pw);
  values_.evaluate_abs(pw, static_cast<std::size_t>(max_exp_) + 1, out);
}

void SystemEvaluator::abs_jacobian(std::span<const Complex> x, std::vector<double>& out) const {
  thread_local std::vector<double> pw;
  fill_abs_powers(x, pw);
  out.resize(neq_ * nvars_);
  jac_.evaluate_abs(pw, static_cast<std::size_t>(max_exp_) + 1, out);
}

PolySystem::PolySystem(std::vector<Polynomial> polys) : polys_(std::move(polys)) {
  if (polys_.empty()) throw Error("polynomial system must be nonempty");
  nvars_ = polys_.front().nvars();
  for (const auto& p : polys_)
    if (p.nvars() != nvars_) throw DimensionMismatch("polynomials in a system must share the variable count");
  eval_ = std::make_shared<const SystemEvaluator>(polys_, nvars_);
}

std::vector<int> PolySystem::degrees() const {
  std::vector<int> d;
  d.reserve(polys_.size());
  for (const auto& p : polys_) d.push_back(p.total_degree());
  return d;
}

int PolySystem::max_degree() const {
  int d = 0;
  for (const auto& p : polys_) d = std::max(d, p.total_degree());
  return d;
}

CVector PolySystem::evaluate(std::span<const Complex> point) const {
  if (point.size() != nvars_) throw DimensionMismatch("evaluation point length does not match variable count");
  CVector out(polys_.size());
  eval_->values(point, out);
  return out;
}

PolySystem concat(const PolySystem& a, const PolySystem& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<Polynomial> polys = a.polys();
  polys.insert(polys.end(), b.polys().begin(), b.polys().end());
  return PolySystem(std::move(polys));
}

CMatrix jacobian_at(const PolySystem& sys, std::span<const Complex> point) {
  if (point.size() != sys.nvars()) throw DimensionMismatch("jacobian point length does not match variable count");
  CVector f(sys.size());
  CMatrix jac(sys.size(), sys.nvars());
  sys.evaluator().values_and_jacobian(point, f, jac);
  return jac;
}

double scaled_residual(const PolySystem& sys, std::span<const Complex> point) {
  const CVector f = sys.evaluate(point);
  std::vector<double> scale(sys.size());
  sys.evaluator().abs_values(point, scale);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) worst = std::max(worst, std::abs(f[i]) / std::max(1.0, scale[i]));
  return worst;
}

}  // namespace lnv
