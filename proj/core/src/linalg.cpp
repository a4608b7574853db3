#include "lnv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lnv {

CMatrix::CMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void CMatrix::resize(std::size_t rows, std::size_t cols) {
  rows_ = rows;
  cols_ = cols;
  data_.assign(rows * cols, Complex{});
}

void CMatrix::set_zero() { std::fill(data_.begin(), data_.end(), Complex{}); }

CMatrix CMatrix::transpose() const {
  CMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

CMatrix CMatrix::adjoint() const {
  CMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = std::conj((*this)(r, c));
  return t;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product shape mismatch");
  CMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

CVector operator*(const CMatrix& a, std::span<const Complex> x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector shape mismatch");
  CVector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex s{};
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    out[i] = s;
  }
  return out;
}

double norm2(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

double norm_inf(std::span<const Complex> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

double frobenius_norm(const CMatrix& a) { return norm2(a.data()); }

bool all_finite(std::span<const Complex> v) {
  return std::all_of(v.begin(), v.end(),
                     [](const Complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

LuFactorization::LuFactorization(CMatrix a) : lu_(std::move(a)) {
  if (!lu_.square()) throw DimensionMismatch("LU requires a square matrix");
  const std::size_t n = lu_.rows();
  const double scale = frobenius_norm(lu_);
  const double threshold = 1e-14 * scale;
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best > threshold)) throw SingularMatrix("pivot below 1e-14 * ||A||");
    if (piv != k) {
      std::swap(perm_[k], perm_[piv]);
      auto rk = lu_.row(k);
      auto rp = lu_.row(piv);
      std::swap_ranges(rk.begin(), rk.end(), rp.begin());
    }
    const Complex inv_pivot = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = lu_(i, k) * inv_pivot;
      lu_(i, k) = f;
      if (f == Complex{}) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

CVector LuFactorization::solve(std::span<const Complex> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw DimensionMismatch("rhs length does not match LU size");
  CVector x(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    Complex s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

CMatrix LuFactorization::inverse() const {
  const std::size_t n = lu_.rows();
  CMatrix inv(n, n);
  CVector e(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::fill(e.begin(), e.end(), Complex{});
    e[c] = 1.0;
    const CVector col = solve(e);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
  }
  return inv;
}

CVector solve_linear(const CMatrix& a, std::span<const Complex> b) {
  if (!a.square() || a.rows() != b.size()) throw DimensionMismatch("solve_linear shape mismatch");
  return LuFactorization(a).solve(b);
}

namespace {

// Hestenes one-sided Jacobi on the columns of a (rows >= cols assumed).
Svd jacobi_svd_tall(CMatrix a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  CMatrix v = CMatrix::identity(n);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        Complex gamma{};
        for (std::size_t i = 0; i < m; ++i) {
          alpha += std::norm(a(i, p));
          beta += std::norm(a(i, q));
          gamma += std::conj(a(i, p)) * a(i, q);
        }
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const Complex phase = gamma / g;  // e^{i phi}
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        const Complex unphase = std::conj(phase);
        for (std::size_t i = 0; i < m; ++i) {
          const Complex ap = a(i, p);
          const Complex aq = a(i, q) * unphase;
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const Complex vp = v(i, p);
          const Complex vq = v(i, q) * unphase;
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += std::norm(a(i, j));
    sigma[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });
  Svd out;
  out.u = CMatrix(m, n);
  out.v = CMatrix(n, n);
  out.sigma.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = sigma[j];
    for (std::size_t i = 0; i < m; ++i) out.u(i, k) = sigma[j] > 0.0 ? a(i, j) / sigma[j] : Complex{};
    for (std::size_t i = 0; i < n; ++i) out.v(i, k) = v(i, j);
  }
  return out;
}

}  // namespace

Svd svd(const CMatrix& a) {
  if (a.rows() >= a.cols()) return jacobi_svd_tall(a);
  Svd t = jacobi_svd_tall(a.adjoint());
  return Svd{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

std::vector<double> singular_values(const CMatrix& a) { return svd(a).sigma; }

std::size_t numerical_rank(const CMatrix& a, double tol) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  const auto sigma = singular_values(a);
  if (sigma.empty() || sigma.front() == 0.0) return 0;
  const double cut = tol * sigma.front();
  return static_cast<std::size_t>(std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > cut; }));
}

CVector pseudo_solve(const CMatrix& a, std::span<const Complex> b, double rel_tol) {
  if (a.rows() != b.size()) throw DimensionMismatch("pseudo_solve shape mismatch");
  const Svd d = svd(a);
  CVector x(a.cols());
  if (d.sigma.empty() || d.sigma.front() == 0.0) return x;
  const double cut = rel_tol * d.sigma.front();
  for (std::size_t k = 0; k < d.sigma.size(); ++k) {
    if (d.sigma[k] <= cut) break;
    Complex coef{};
    for (std::size_t i = 0; i < a.rows(); ++i) coef += std::conj(d.u(i, k)) * b[i];
    coef /= d.sigma[k];
    for (std::size_t j = 0; j < a.cols(); ++j) x[j] += d.v(j, k) * coef;
  }
  return x;
}

namespace {

void hessenberg_reduce(CMatrix& h) {
  const std::size_t n = h.rows();
  if (n < 3) return;
  std::vector<Complex> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double xnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
    xnorm = std::sqrt(xnorm);
    if (xnorm == 0.0) continue;
    const Complex x0 = h(k + 1, k);
    const Complex phase = std::abs(x0) > 0.0 ? x0 / std::abs(x0) : Complex{1.0};
    std::fill(v.begin(), v.end(), Complex{});
    for (std::size_t i = k + 1; i < n; ++i) v[i] = h(i, k);
    v[k + 1] += phase * xnorm;
    double vnorm2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
    if (vnorm2 == 0.0) continue;
    const double scale = 2.0 / vnorm2;
    // H <- (I - s v v^H) H
    for (std::size_t j = 0; j < n; ++j) {
      Complex dot{};
      for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * h(i, j);
      dot *= scale;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * dot;
    }
    // H <- H (I - s v v^H)
    for (std::size_t i = 0; i < n; ++i) {
      Complex dot{};
      for (std::size_t j = k + 1; j < n; ++j) dot += h(i, j) * v[j];
      dot *= scale;
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= dot * std::conj(v[j]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = Complex{};
  }
}

struct Givens {
  double c;
  Complex s;
};

// Rotation G with G^H-free convention: [c s; -conj(s) c] * [a; b] = [r; 0].
Givens make_givens(Complex a, Complex b) {
  const double ab = std::abs(b);
  if (ab == 0.0) return {1.0, Complex{}};
  const double aa = std::abs(a);
  if (aa == 0.0) return {0.0, std::conj(b) / ab};
  const double r = std::hypot(aa, ab);
  const Complex phase = a / aa;
  return {aa / r, phase * std::conj(b) / r};
}

}  // namespace

std::vector<Complex> eigenvalues(const CMatrix& a) {
  if (!a.square()) throw DimensionMismatch("eigenvalues requires a square matrix");
  const std::size_t n = a.rows();
  std::vector<Complex> eig;
  eig.reserve(n);
  if (n == 0) return eig;
  if (!all_finite(a.data())) throw Error("eigenvalues: non-finite entries");
  CMatrix h = a;
  hessenberg_reduce(h);
  const double anorm = std::max(frobenius_norm(h), std::numeric_limits<double>::min());
  constexpr double eps = std::numeric_limits<double>::epsilon();

  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
  int iter = 0;
  int total_iter = 0;
  const int max_total = 60 * static_cast<int>(n) + 100;
  std::vector<Givens> rots(n);
  while (hi >= 0) {
    std::ptrdiff_t lo = hi;
    while (lo > 0) {
      const double sub = std::abs(h(lo, lo - 1));
      const double diag = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      if (sub <= eps * (diag > 0.0 ? diag : anorm)) {
        h(lo, lo - 1) = Complex{};
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig.push_back(h(hi, hi));
      --hi;
      iter = 0;
      continue;
    }
    if (++total_iter > max_total) throw NoConvergence("shifted QR iteration cap reached");
    ++iter;
    Complex mu;
    if (iter % 11 == 0) {
      // exceptional shift to break cycles
      mu = h(hi, hi) + Complex(0.75 * std::abs(h(hi, hi - 1)), 0.0);
    } else {
      const Complex aa = h(hi - 1, hi - 1), bb = h(hi - 1, hi), cc = h(hi, hi - 1), dd = h(hi, hi);
      const Complex tr_half = 0.5 * (aa + dd);
      const Complex disc = std::sqrt(0.25 * (aa - dd) * (aa - dd) + bb * cc);
      const Complex l1 = tr_half + disc, l2 = tr_half - disc;
      mu = std::abs(l1 - dd) < std::abs(l2 - dd) ? l1 : l2;
    }
    const auto ulo = static_cast<std::size_t>(lo);
    const auto uhi = static_cast<std::size_t>(hi);
    for (std::size_t k = ulo; k <= uhi; ++k) h(k, k) -= mu;
    // QR: apply rotations from the left
    for (std::size_t k = ulo; k < uhi; ++k) {
      const Givens g = make_givens(h(k, k), h(k + 1, k));
      rots[k] = g;
      for (std::size_t j = k; j <= uhi; ++j) {
        const Complex x = h(k, j), y = h(k + 1, j);
        h(k, j) = g.c * x + g.s * y;
        h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
      }
    }
    // RQ: apply adjoint rotations from the right
    for (std::size_t k = ulo; k < uhi; ++k) {
      const Givens g = rots[k];
      const std::size_t last = std::min(k + 2, uhi);
      for (std::size_t i = ulo; i <= last; ++i) {
        const Complex x = h(i, k), y = h(i, k + 1);
        h(i, k) = g.c * x + std::conj(g.s) * y;
        h(i, k + 1) = -g.s * x + g.c * y;
      }
    }
    for (std::size_t k = ulo; k <= uhi; ++k) h(k, k) += mu;
  }
  return eig;
}

}  // namespace lnv
