#include "lnv/tracker.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <bit>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <thread>

#include "lnv/rng.hpp"

namespace lnv {

void TrackSettings::validate() const {
  if (!(step_min > 0.0 && step_min <= step_init && step_init <= step_max && step_max <= 1.0))
    throw Error("track settings need 0 < step_min <= step_init <= step_max <= 1");
  if (!(corrector_tol > 0.0 && final_tol > 0.0 && divergence_bound > 0.0 && singular_condition > 0.0))
    throw Error("track tolerances must be positive");
  if (max_steps < 1 || max_corrector_iterations < 1) throw Error("track iteration caps must be positive");
}

TrackSettings TrackSettings::tightened() const {
  TrackSettings t = *this;
  t.step_max = std::max(step_max * 0.25, step_min);
  t.step_init = std::clamp(step_init * 0.25, t.step_min, t.step_max);
  t.max_steps = max_steps * 4;
  return t;
}

std::string to_string(PathStatus s) {
  switch (s) {
    case PathStatus::converged: return "converged";
    case PathStatus::diverged: return "diverged";
    case PathStatus::step_failure: return "step_failure";
    case PathStatus::ill_conditioned: return "ill_conditioned";
  }
  return "unknown";
}

std::string to_string(StartStrategy s) {
  switch (s) {
    case StartStrategy::total: return "total";
    case StartStrategy::multihom: return "multihom";
    case StartStrategy::automatic: return "auto";
  }
  return "auto";
}

StartStrategy parse_start_strategy(const std::string& s) {
  if (s == "total") return StartStrategy::total;
  if (s == "multihom") return StartStrategy::multihom;
  if (s == "auto") return StartStrategy::automatic;
  throw Error("unknown start strategy '" + s + "' (expected total, multihom or auto)");
}

namespace {

PolySystem homogenized(const PolySystem& sys, const std::vector<int>& degrees) {
  std::vector<Polynomial> polys;
  polys.reserve(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) polys.push_back(homogenize(sys[i], degrees[i]));
  return PolySystem(std::move(polys));
}

}  // namespace

Homotopy::Homotopy(PolySystem start, PolySystem target, Complex gamma, bool projective)
    : start_(std::move(start)), target_(std::move(target)), gamma_(gamma), projective_(projective) {
  if (start_.nvars() != target_.nvars() || start_.size() != target_.size())
    throw DimensionMismatch("start and target systems must have the same shape");
  if (!projective_) return;
  const auto gd = start_.degrees();
  const auto fd = target_.degrees();
  std::vector<int> degrees(gd.size());
  for (std::size_t i = 0; i < degrees.size(); ++i) degrees[i] = std::max(gd[i], fd[i]);
  hstart_ = homogenized(start_, degrees);
  htarget_ = homogenized(target_, degrees);
  // the chart is a function of gamma so that a homotopy is reproducible
  Rng rng(std::bit_cast<std::uint64_t>(gamma.real()) ^ std::rotl(std::bit_cast<std::uint64_t>(gamma.imag()), 29),
          0xC4A27);
  chart_.resize(nvars() + 1);
  for (auto& c : chart_) c = rng.complex_normal();
}

CVector Homotopy::lift(std::span<const Complex> w) const {
  if (w.size() != nvars()) throw DimensionMismatch("point length does not match the homotopy");
  if (!projective_) return CVector(w.begin(), w.end());
  CVector x(w.begin(), w.end());
  x.push_back(1.0);
  Complex s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += chart_[i] * x[i];
  // a point on the chart's hyperplane at infinity cannot be lifted
  if (std::abs(s) < 1e-300) throw SingularMatrix("point lies on the chart's hyperplane at infinity");
  for (auto& z : x) z /= s;
  return x;
}

CVector Homotopy::drop(std::span<const Complex> x) const {
  if (!projective_) return CVector(x.begin(), x.end());
  const std::size_t n = nvars();
  CVector w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = x[i] / x[n];
  return w;
}

double Homotopy::affine_norm(std::span<const Complex> x) const {
  if (!projective_) return norm_inf(x);
  const std::size_t n = nvars();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  const double h = std::abs(x[n]);
  if (h == 0.0) return std::numeric_limits<double>::infinity();
  return m / h;
}

void Homotopy::evaluate(std::span<const Complex> x, double t, CVector& h, CMatrix& hw, CVector& ht) const {
  thread_local CVector g, f;
  thread_local CMatrix gw, fw;
  const PolySystem& gs = projective_ ? hstart_ : start_;
  const PolySystem& fs = projective_ ? htarget_ : target_;
  const std::size_t m = fs.size();
  const std::size_t rows = projective_ ? m + 1 : m;
  const std::size_t cols = x.size();
  g.resize(m);
  f.resize(m);
  gs.evaluator().values_and_jacobian(x, g, gw);
  fs.evaluator().values_and_jacobian(x, f, fw);
  const Complex a = gamma_ * t;
  const double b = 1.0 - t;
  h.resize(rows);
  ht.resize(rows);
  if (hw.rows() != rows || hw.cols() != cols) hw.resize(rows, cols);
  for (std::size_t i = 0; i < m; ++i) {
    h[i] = a * g[i] + b * f[i];
    ht[i] = gamma_ * g[i] - f[i];
    for (std::size_t j = 0; j < cols; ++j) hw(i, j) = a * gw(i, j) + b * fw(i, j);
  }
  if (projective_) {
    Complex s{};
    for (std::size_t j = 0; j < cols; ++j) {
      s += chart_[j] * x[j];
      hw(m, j) = chart_[j];
    }
    h[m] = s - 1.0;
    ht[m] = 0.0;
  }
}

double Homotopy::condition_estimate(std::span<const Complex> x, double t) const {
  CVector h, ht;
  CMatrix hw;
  evaluate(x, t, h, hw, ht);
  std::vector<double> ga, fa;
  const PolySystem& gs = projective_ ? hstart_ : start_;
  const PolySystem& fs = projective_ ? htarget_ : target_;
  gs.evaluator().abs_jacobian(x, ga);
  fs.evaluator().abs_jacobian(x, fa);
  const std::size_t m = fs.size(), n = hw.cols();
  const double a = std::abs(gamma_ * t), b = std::abs(1.0 - t);
  double abs_norm = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += a * ga[i * n + j] + b * fa[i * n + j];
    abs_norm = std::max(abs_norm, row);
  }
  if (projective_) {
    double row = 0.0;
    for (const auto& c : chart_) row += std::abs(c);
    abs_norm = std::max(abs_norm, row);
  }
  try {
    const CMatrix inv = LuFactorization(hw).inverse();
    double inv_norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < hw.rows(); ++j) row += std::abs(inv(i, j));
      inv_norm = std::max(inv_norm, row);
    }
    return inv_norm * abs_norm;
  } catch (const SingularMatrix&) {
    return std::numeric_limits<double>::infinity();
  }
}

namespace {

// dw/dt at (w, t); throws SingularMatrix.
void tangent(const Homotopy& hom, std::span<const Complex> w, double t, CVector& out) {
  thread_local CVector h, ht;
  thread_local CMatrix hw;
  hom.evaluate(w, t, h, hw, ht);
  out = LuFactorization(hw).solve(ht);
  for (auto& z : out) z = -z;
}

// Newton at fixed t. Returns true on convergence with contraction.
bool correct(const Homotopy& hom, CVector& w, double t, double tol, int max_iter) {
  thread_local CVector h, ht;
  thread_local CMatrix hw;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    hom.evaluate(w, t, h, hw, ht);
    CVector dx;
    try {
      dx = LuFactorization(hw).solve(h);
    } catch (const SingularMatrix&) {
      return false;
    }
    const double dn = norm_inf(dx);
    if (!std::isfinite(dn)) return false;
    if (it > 0 && dn > 0.5 * prev) return false;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= dx[i];
    if (dn <= tol * (1.0 + norm_inf(w))) return true;
    prev = dn;
  }
  return false;
}

}  // namespace

namespace {

constexpr double kInfinityGrowth = 0.15;
constexpr int kGrowingDecades = 4;
constexpr double kApproachExponent = 0.08;

}  // namespace

PathResult track_path(std::span<const Complex> start_solution, const Homotopy& hom, const TrackSettings& s) {
  if (start_solution.size() != hom.nvars()) throw DimensionMismatch("start solution length does not match the homotopy");
  const std::size_t n = hom.tracking_dim();
  PathResult res;
  CVector w = hom.lift(start_solution);
  double t = 1.0;
  double step = s.step_init;
  int successes = 0;
  CVector k1, k2, k3, k4, tmp(n), pred(n);
  // affine norms at end-zone marks one decade apart; a norm that grows like
  // a power of 1/t across them is a path to infinity
  double mark_t = -1.0;
  double mark_norm = 0.0;
  double prev_mark_t = -1.0;
  double prev_mark_norm = 0.0;
  int growing_decades = 0;
  auto growth = [](double norm1, double t1, double norm0, double t0) {
    return std::log(norm1 / norm0) / std::log(t0 / t1);
  };

  auto finish = [&](PathStatus status) {
    if (status == PathStatus::ill_conditioned && hom.projective() && t > 0.0) {
      // compare against a mark at least a factor 2 earlier in t
      const bool use_last = mark_t > 2.0 * t;
      const double t0 = use_last ? mark_t : prev_mark_t;
      const double n0 = use_last ? mark_norm : prev_mark_norm;
      if (t0 > 0.0 && growth(hom.affine_norm(w), t, n0, t0) > kInfinityGrowth) status = PathStatus::diverged;
    }
    res.status = status;
    res.endpoint = hom.drop(w);
    res.final_t = t;
    if (!all_finite(res.endpoint) || norm_inf(res.endpoint) > s.divergence_bound) {
      res.status = PathStatus::diverged;
      res.residual = std::numeric_limits<double>::infinity();
      return res;
    }
    res.residual = scaled_residual(hom.target(), res.endpoint);
    return res;
  };

  struct Polisher {
    const Homotopy& hom;
    const TrackSettings& s;
    // Newton on the target until the update is below final_tol or stops shrinking
    void operator()(CVector& x) const {
      double prev = std::numeric_limits<double>::infinity();
      for (int it = 0; it < 8; ++it) {
        CVector h, ht;
        CMatrix hw;
        hom.evaluate(x, 0.0, h, hw, ht);
        CVector dx;
        try {
          dx = LuFactorization(hw).solve(h);
        } catch (const SingularMatrix&) {
          return;
        }
        const double dn = norm_inf(dx);
        if (!std::isfinite(dn) || dn > prev) return;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= dx[i];
        if (dn <= s.final_tol * (1.0 + norm_inf(x))) return;
        prev = dn;
      }
    }
  };
  const Polisher polish_at_zero{hom, s};

  // A stop in the end zone is singular unless Newton on the target lands on
  // a well-conditioned zero.
  auto stop_in_end_zone = [&]() {
    finish(PathStatus::ill_conditioned);
    if (res.status != PathStatus::ill_conditioned) return res;
    CVector x = w;
    polish_at_zero(x);
    const double cond = hom.condition_estimate(x, 0.0);
    if (cond > s.singular_condition) return res;
    const CVector e = hom.drop(x);
    if (!all_finite(e) || scaled_residual(hom.target(), e) > s.final_tol) return res;
    w = std::move(x);
    t = 0.0;
    res.condition_estimate = cond;
    return finish(PathStatus::converged);
  };

  while (t > 0.0) {
    if (res.steps >= s.max_steps) return t < s.end_zone ? stop_in_end_zone() : finish(PathStatus::step_failure);
    ++res.steps;
    const double h = std::min(step, t);
    const double t1 = (h >= t) ? 0.0 : t - h;
    const double dt = t1 - t;
    bool ok = true;
    try {
      tangent(hom, w, t, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] + 0.5 * dt * k1[i];
      tangent(hom, tmp, t + 0.5 * dt, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] + 0.5 * dt * k2[i];
      tangent(hom, tmp, t + 0.5 * dt, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = w[i] + dt * k3[i];
      tangent(hom, tmp, t1, k4);
      for (std::size_t i = 0; i < n; ++i) pred[i] = w[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      ok = all_finite(pred) && correct(hom, pred, t1, s.corrector_tol, s.max_corrector_iterations);
    } catch (const SingularMatrix&) {
      ok = false;
    }
    if (!ok) {
      step *= 0.5;
      successes = 0;
      if (step < s.step_min) return t < s.end_zone ? stop_in_end_zone() : finish(PathStatus::step_failure);
      continue;
    }
    w = pred;
    t = t1;
    if (++successes >= 3) {
      step = std::min(2.0 * step, s.step_max);
      successes = 0;
    }
    // on a chart, large affine norms away from t = 0 are ordinary
    if ((!hom.projective() || t < s.end_zone) && hom.affine_norm(w) > s.divergence_bound)
      return finish(PathStatus::diverged);
    if (t > 0.0 && t < s.end_zone) {
      if (mark_t < 0.0 || t <= 0.1 * mark_t) {
        const double norm = hom.affine_norm(w);
        if (hom.projective() && mark_t > 0.0) growing_decades = growth(norm, t, mark_norm, mark_t) > kInfinityGrowth ? growing_decades + 1 : 0;
        prev_mark_t = mark_t;
        prev_mark_norm = mark_norm;
        mark_t = t;
        res.approach.emplace_back(t, hom.drop(w));
        mark_norm = norm;
        if (growing_decades >= kGrowingDecades) return finish(PathStatus::diverged);
      }
      res.condition_estimate = hom.condition_estimate(w, t);
      if (res.condition_estimate > s.singular_condition) return stop_in_end_zone();
    }
  }

  polish_at_zero(w);
  res.condition_estimate = hom.condition_estimate(w, 0.0);
  finish(PathStatus::converged);
  if (res.status == PathStatus::diverged) return res;
  // the update may stall above final_tol at moderate condition; the residual
  // and condition decide
  if (res.condition_estimate > s.singular_condition || res.residual > s.final_tol)
    res.status = PathStatus::ill_conditioned;
  return res;
}

bool path_reaches(const PathResult& r, std::span<const Complex> p, double match_tol) {
  if (r.endpoint.size() != p.size()) throw DimensionMismatch("path endpoint and point differ in length");
  if (all_finite(r.endpoint) && same_point(r.endpoint, p, match_tol)) return true;
  if (r.status != PathStatus::ill_conditioned || r.final_t <= 0.0 || r.approach.empty()) return false;
  auto dist = [&](const CVector& q) {
    double d = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) d = std::max(d, std::abs(q[i] - p[i]));
    return d;
  };
  const double tz = r.final_t;
  const double dz = dist(r.endpoint);
  // the newest mark at least a decade before the stop
  for (auto it = r.approach.rbegin(); it != r.approach.rend(); ++it) {
    if (it->first < 10.0 * tz) continue;
    const double da = dist(it->second);
    if (!(dz < da) || dz > 1e-2 * (1.0 + norm_inf(p))) return false;
    return std::log(da / dz) / std::log(it->first / tz) >= kApproachExponent;
  }
  return false;
}

StartSystem start_total_degree(const PolySystem& target) {
  const std::size_t n = target.nvars();
  if (target.size() != n) throw NonSquareSystem("start_total_degree needs a square system");
  const auto degrees = target.degrees();
  std::vector<Polynomial> polys;
  for (std::size_t i = 0; i < n; ++i) {
    if (degrees[i] < 1) throw Error("target equation " + std::to_string(i) + " is constant");
    Polynomial p(n);
    Monomial m(n, 0);
    m[i] = static_cast<Exponent>(degrees[i]);
    p.add_term(m, 1.0);
    p.add_term(Monomial(n, 0), -1.0);
    polys.push_back(std::move(p));
  }
  StartSystem out{PolySystem(std::move(polys)), {}};
  const std::uint64_t count = total_degree_count(degrees);
  out.solutions.reserve(count);
  std::vector<int> digit(n, 0);
  for (std::uint64_t c = 0; c < count; ++c) {
    CVector s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = std::polar(1.0, 2.0 * std::numbers::pi * digit[i] / degrees[i]);
    out.solutions.push_back(std::move(s));
    for (std::size_t i = n; i-- > 0;) {
      if (++digit[i] < degrees[i]) break;
      digit[i] = 0;
    }
  }
  return out;
}

std::uint64_t total_degree_count(const std::vector<int>& degrees) {
  std::uint64_t c = 1;
  for (int d : degrees) c *= static_cast<std::uint64_t>(d);
  return c;
}

std::vector<std::vector<int>> multidegrees(const PolySystem& sys, const std::vector<std::vector<std::size_t>>& groups) {
  std::vector<std::vector<int>> md;
  for (const auto& p : sys.polys()) {
    std::vector<int> row;
    for (const auto& g : groups) row.push_back(p.degree_in(g));
    md.push_back(std::move(row));
  }
  return md;
}

namespace {

void check_groups(const std::vector<std::vector<std::size_t>>& groups, std::size_t n) {
  std::vector<int> seen(n, 0);
  for (const auto& g : groups)
    for (auto v : g) {
      if (v >= n) throw Error("group variable index out of range");
      ++seen[v];
    }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; }))
    throw Error("variable groups must partition the variables");
}

std::uint64_t count_rec(const std::vector<std::vector<int>>& md, std::size_t eq, std::vector<std::size_t>& room) {
  if (eq == md.size()) return 1;
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < room.size(); ++j) {
    if (room[j] == 0 || md[eq][j] == 0) continue;
    --room[j];
    total += static_cast<std::uint64_t>(md[eq][j]) * count_rec(md, eq + 1, room);
    ++room[j];
  }
  return total;
}

}  // namespace

std::uint64_t multihom_count(const std::vector<std::vector<int>>& multidegree, const std::vector<std::size_t>& group_sizes) {
  std::vector<std::size_t> room = group_sizes;
  return count_rec(multidegree, 0, room);
}

StartSystem start_multihom(const PolySystem& target, const std::vector<std::vector<std::size_t>>& groups,
                           std::uint64_t seed) {
  const std::size_t n = target.nvars();
  if (target.size() != n) throw NonSquareSystem("start_multihom needs a square system");
  check_groups(groups, n);
  const auto md = multidegrees(target, groups);
  const std::size_t ng = groups.size();

  // forms[i][j][l]: coefficients (group vars..., constant)
  std::vector<std::vector<std::vector<CVector>>> forms(n, std::vector<std::vector<CVector>>(ng));
  Rng rng(seed, 0x5754A27);
  std::vector<Polynomial> polys;
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial prod = Polynomial::constant(n, 1.0);
    for (std::size_t j = 0; j < ng; ++j)
      for (int l = 0; l < md[i][j]; ++l) {
        CVector coef(groups[j].size() + 1);
        for (auto& c : coef) c = rng.complex_normal();
        Polynomial form = Polynomial::constant(n, coef.back());
        for (std::size_t k = 0; k < groups[j].size(); ++k) form += Polynomial::variable(n, groups[j][k]) * coef[k];
        prod = prod * form;
        forms[i][j].push_back(std::move(coef));
      }
    if (prod.total_degree() < 1) throw Error("target equation " + std::to_string(i) + " is constant");
    polys.push_back(std::move(prod));
  }
  StartSystem out{PolySystem(std::move(polys)), {}};

  // enumerate (group, factor) choices per equation with group j used |G_j| times
  std::vector<std::size_t> room(ng);
  for (std::size_t j = 0; j < ng; ++j) room[j] = groups[j].size();
  std::vector<std::pair<std::size_t, int>> choice(n);
  std::function<void(std::size_t)> rec = [&](std::size_t eq) {
    if (eq == n) {
      CVector sol(n);
      for (std::size_t j = 0; j < ng; ++j) {
        const std::size_t gs = groups[j].size();
        CMatrix a(gs, gs);
        CVector b(gs);
        std::size_t r = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (choice[i].first != j) continue;
          const CVector& c = forms[i][j][static_cast<std::size_t>(choice[i].second)];
          for (std::size_t k = 0; k < gs; ++k) a(r, k) = c[k];
          b[r] = -c[gs];
          ++r;
        }
        const CVector x = solve_linear(a, b);
        for (std::size_t k = 0; k < gs; ++k) sol[groups[j][k]] = x[k];
      }
      out.solutions.push_back(std::move(sol));
      return;
    }
    for (std::size_t j = 0; j < ng; ++j) {
      if (room[j] == 0) continue;
      for (int l = 0; l < md[eq][j]; ++l) {
        --room[j];
        choice[eq] = {j, l};
        rec(eq + 1);
        ++room[j];
      }
    }
  };
  rec(0);
  return out;
}

bool same_point(std::span<const Complex> a, std::span<const Complex> b, double tol) {
  if (a.size() != b.size()) return false;
  const double scale = std::max({1.0, norm_inf(a), norm_inf(b)});
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol * scale) return false;
  return true;
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  const unsigned nt = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  for (unsigned k = 0; k < nt; ++k)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

CVector newton_refine(std::span<const Complex> p, const PolySystem& sys, double tol, int max_iter) {
  if (sys.size() != sys.nvars()) throw NonSquareSystem("newton_refine needs a square system");
  CVector w(p.begin(), p.end());
  CVector f(sys.size());
  CMatrix jac;
  for (int it = 0; it < max_iter; ++it) {
    sys.evaluator().values_and_jacobian(w, f, jac);
    CVector dx;
    try {
      dx = LuFactorization(jac).solve(f);
    } catch (const SingularMatrix&) {
      throw SingularJacobian("Jacobian is singular at the Newton iterate");
    }
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= dx[i];
    if (!all_finite(w)) break;
    if (norm_inf(dx) <= tol * (1.0 + norm_inf(w))) return w;
  }
  throw NoConvergence("Newton did not converge");
}

std::optional<CVector> singular_refine(std::span<const Complex> p, const PolySystem& sys, double accept, int max_iter) {
  CVector w(p.begin(), p.end());
  CVector best = w;
  double best_res = scaled_residual(sys, w);
  CVector f(sys.size());
  CMatrix jac;
  int stall = 0;
  for (int it = 0; it < max_iter && best_res > 1e-15; ++it) {
    sys.evaluator().values_and_jacobian(w, f, jac);
    const CVector dx = pseudo_solve(jac, f, 1e-10);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= dx[i];
    if (!all_finite(w)) break;
    const double r = scaled_residual(sys, w);
    if (r < best_res) {
      if (r > 0.5 * best_res) ++stall;
      best_res = r;
      best = w;
      if (stall > 6) break;
    } else if (++stall > 6) {
      break;
    }
  }
  if (best_res > accept) return std::nullopt;
  return best;
}

namespace {

PathResult track_with_retry(const CVector& start, const Homotopy& hom, const TrackSettings& s) {
  PathResult r = track_path(start, hom, s);
  if (r.status == PathStatus::step_failure) {
    PathResult again = track_path(start, hom, s.tightened());
    again.steps += r.steps;
    return again;
  }
  return r;
}

}  // namespace

SolveResult solve_system(const PolySystem& target, const SolveOptions& options) {
  if (target.size() != target.nvars()) throw NonSquareSystem("solve_system needs a square system");
  options.settings.validate();
  SolveResult out;
  StartStrategy strategy = options.strategy;
  if (strategy == StartStrategy::automatic) {
    const bool big = static_cast<int>(target.nvars()) * target.max_degree() > kMultihomThreshold;
    strategy = (big && options.groups.size() > 1) ? StartStrategy::multihom : StartStrategy::total;
  }
  if (strategy == StartStrategy::multihom && options.groups.empty())
    throw Error("multihom start needs a variable grouping");
  out.strategy_used = strategy;
  const StartSystem start = strategy == StartStrategy::multihom
                                ? start_multihom(target, options.groups, options.seed)
                                : start_total_degree(target);
  const Complex gamma = Rng(options.seed, 0x6A3A).unit_complex();
  const Homotopy hom(start.system, target, gamma, options.settings.projective);

  out.paths.resize(start.solutions.size());
  parallel_for(start.solutions.size(), options.threads,
               [&](std::size_t i) { out.paths[i] = track_with_retry(start.solutions[i], hom, options.settings); });

  // singular endpoints: polish with rank-truncated Gauss-Newton
  parallel_for(out.paths.size(), options.threads, [&](std::size_t i) {
    PathResult& r = out.paths[i];
    if (r.status != PathStatus::ill_conditioned) return;
    if (auto refined = singular_refine(r.endpoint, target, 1e-6)) {
      r.endpoint = std::move(*refined);
      r.residual = scaled_residual(target, r.endpoint);
    }
  });

  for (std::size_t i = 0; i < out.paths.size(); ++i) {
    const PathResult& r = out.paths[i];
    switch (r.status) {
      case PathStatus::converged: ++out.converged; break;
      case PathStatus::diverged: ++out.diverged; continue;
      case PathStatus::step_failure: ++out.failed; continue;
      case PathStatus::ill_conditioned: ++out.singular; break;
    }
    if (r.status == PathStatus::ill_conditioned && r.residual > 1e-6) continue;
    const bool singular = r.status == PathStatus::ill_conditioned;
    auto it = std::find_if(out.solutions.begin(), out.solutions.end(), [&](const Solution& s) {
      return s.singular == singular && same_point(s.point, r.endpoint, 1e-6);
    });
    if (it == out.solutions.end()) {
      Solution s;
      s.point = r.endpoint;
      s.singular = singular;
      s.condition_estimate = r.condition_estimate;
      s.residual = r.residual;
      s.paths.push_back(i);
      out.solutions.push_back(std::move(s));
    } else {
      ++it->multiplicity;
      it->paths.push_back(i);
    }
  }
  return out;
}

}  // namespace lnv
