#include "lnv/witness.hpp"

#include <algorithm>
#include <numeric>

#include "lnv/rng.hpp"

namespace lnv {

std::vector<Polynomial> SliceSystem::polys() const {
  const std::size_t n = nvars();
  std::vector<Polynomial> out;
  out.reserve(codim());
  for (std::size_t i = 0; i < codim(); ++i) {
    Polynomial p = Polynomial::constant(n, constants[i]);
    for (std::size_t j = 0; j < n; ++j) p += Polynomial::variable(n, j) * coefficients(i, j);
    out.push_back(std::move(p));
  }
  return out;
}

CVector SliceSystem::evaluate(std::span<const Complex> point) const {
  if (point.size() != nvars()) throw DimensionMismatch("slice evaluation point has the wrong length");
  CVector v = coefficients * point;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += constants[i];
  return v;
}

SliceSystem SliceSystem::random(std::size_t codim, std::size_t nvars, std::uint64_t seed) {
  Rng rng(seed, 0x511CE);
  SliceSystem s{CMatrix(codim, nvars), CVector(codim)};
  for (auto& c : s.coefficients.data()) c = rng.complex_normal();
  for (auto& c : s.constants) c = rng.complex_normal();
  return s;
}

SliceSystem SliceSystem::random_through(std::span<const Complex> point, std::size_t codim, std::uint64_t seed) {
  return random(codim, point.size(), seed).parallel_through(point);
}

SliceSystem SliceSystem::parallel_through(std::span<const Complex> point) const {
  SliceSystem s = *this;
  const CVector v = coefficients * point;
  for (std::size_t i = 0; i < v.size(); ++i) s.constants[i] = -v[i];
  return s;
}

RandomizedSystem randomize(const PolySystem& sys, std::size_t target_count, std::uint64_t seed) {
  const std::size_t neq = sys.size();
  if (target_count < 1 || target_count > neq)
    throw Error("randomization target count must lie in [1, " + std::to_string(neq) + "]");
  const auto degrees = sys.degrees();
  std::vector<std::size_t> order(neq);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return degrees[a] > degrees[b]; });

  Rng rng(seed, 0xA4D0);
  RandomizedSystem out{PolySystem(), CMatrix(target_count, neq)};
  for (std::size_t i = 0; i < target_count; ++i) {
    out.matrix(i, order[i]) = rng.unit_complex();
    for (std::size_t j = target_count; j < neq; ++j) out.matrix(i, order[j]) = rng.complex_normal();
  }
  std::vector<Polynomial> polys;
  polys.reserve(target_count);
  for (std::size_t i = 0; i < target_count; ++i) {
    Polynomial p(sys.nvars());
    for (std::size_t j = 0; j < neq; ++j)
      if (out.matrix(i, j) != Complex{}) p += sys[j] * out.matrix(i, j);
    polys.push_back(std::move(p));
  }
  out.system = PolySystem(std::move(polys));
  return out;
}

PolySystem WitnessSet::sliced() const { return sliced_with(slice); }

PolySystem WitnessSet::sliced_with(const SliceSystem& other) const {
  if (other.codim() != static_cast<std::size_t>(dim)) throw DimensionMismatch("slice codimension must equal the dimension");
  if (other.codim() == 0) return randomized.system;
  return concat(randomized.system, PolySystem(other.polys()));
}

WitnessSet WitnessSet::restricted(std::span<const std::size_t> indices) const {
  WitnessSet w{dim, system, randomized, slice, {}};
  for (auto i : indices) w.points.push_back(points.at(i));
  return w;
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::member: return "true";
    case Membership::not_member: return "false";
    case Membership::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

namespace {

void add_unique(std::vector<CVector>& pts, CVector p) {
  for (const auto& q : pts)
    if (same_point(q, p, kMatchTol)) return;
  pts.push_back(std::move(p));
}

}  // namespace

WitnessSuperset witness_superset(const PolySystem& sys, int dim, const WitnessOptions& options, std::uint64_t seed) {
  const auto n = static_cast<int>(sys.nvars());
  if (dim < 0 || dim >= n) throw Error("witness dimension must lie in [0, n-1]");
  WitnessSuperset out;
  out.dim = dim;
  out.system = sys;
  const auto count = static_cast<std::size_t>(n - dim);
  out.slice = SliceSystem::random(static_cast<std::size_t>(dim), sys.nvars(), derive_seed(seed, 2));
  // fewer equations than the codimension: every component is larger
  if (count > sys.size()) return out;
  out.randomized = randomize(sys, count, derive_seed(seed, 1));

  const PolySystem square =
      dim == 0 ? out.randomized.system : concat(out.randomized.system, PolySystem(out.slice.polys()));
  const PolySystem original_sliced = dim == 0 ? sys : concat(sys, PolySystem(out.slice.polys()));

  SolveOptions so;
  so.settings = options.settings;
  so.strategy = options.strategy;
  so.groups = options.groups;
  so.seed = derive_seed(seed, 3);
  so.threads = options.threads;
  const SolveResult res = solve_system(square, so);

  auto& diag = out.diagnostics;
  diag.paths = res.paths.size();
  diag.converged = res.converged;
  diag.diverged = res.diverged;
  diag.failed = res.failed;
  diag.singular = res.singular;
  diag.strategy = res.strategy_used;

  std::vector<std::optional<CVector>> refined(res.solutions.size());
  parallel_for(res.solutions.size(), options.threads, [&](std::size_t i) {
    const Solution& s = res.solutions[i];
    if (!s.singular) {
      if (scaled_residual(sys, s.point) <= options.settings.final_tol) refined[i] = s.point;
      return;
    }
    refined[i] = singular_refine(s.point, original_sliced, kSingularAccept);
  });
  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    if (!refined[i]) {
      ++diag.spurious;
      continue;
    }
    if (!res.solutions[i].singular) add_unique(out.regular, std::move(*refined[i]));
  }
  // a singular endpoint at a regular solution is a second path to it
  for (std::size_t i = 0; i < res.solutions.size(); ++i) {
    if (!refined[i] || !res.solutions[i].singular) continue;
    const bool known = std::any_of(out.regular.begin(), out.regular.end(),
                                   [&](const CVector& q) { return same_point(q, *refined[i], kMatchTol); });
    if (!known) add_unique(out.singular, std::move(*refined[i]));
  }
  return out;
}

std::vector<PathResult> move_slice(const WitnessSet& ws, std::span<const CVector> points, const SliceSystem& to,
                                   Complex gamma, const TrackSettings& settings, unsigned threads) {
  const PolySystem target = ws.sliced_with(to);
  const Homotopy hom(ws.sliced(), target, gamma, settings.projective);
  std::vector<PathResult> out(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    PathResult r = track_path(points[i], hom, settings);
    if (r.status == PathStatus::step_failure) r = track_path(points[i], hom, settings.tightened());
    if (r.status == PathStatus::ill_conditioned) {
      if (auto p = singular_refine(r.endpoint, target, kSingularAccept)) {
        r.endpoint = std::move(*p);
        r.residual = scaled_residual(target, r.endpoint);
      }
    }
    out[i] = std::move(r);
  });
  return out;
}

namespace {

Membership contains_point_once(const WitnessSet& ws, std::span<const Complex> point, const TrackSettings& settings,
                               std::uint64_t seed) {
  if (point.size() != ws.system.nvars()) throw DimensionMismatch("membership point has the wrong length");
  if (ws.points.empty()) return Membership::not_member;
  if (!all_finite(point)) return Membership::not_member;
  if (ws.dim == 0) {
    for (const auto& q : ws.points)
      if (same_point(q, point, kMatchTol)) return Membership::member;
    return Membership::not_member;
  }
  // a point of the component solves the randomized system
  if (scaled_residual(ws.randomized.system, point) > 1e3 * kSingularAccept) return Membership::not_member;

  const SliceSystem through = SliceSystem::random_through(point, static_cast<std::size_t>(ws.dim), seed);
  const Complex gamma = Rng(seed, 0x6A3A).unit_complex();
  const PolySystem target = ws.sliced_with(through);
  const Homotopy hom(ws.sliced(), target, gamma, settings.projective);
  bool failed = false;
  for (const auto& start : ws.points) {
    PathResult r = track_path(start, hom, settings);
    if (r.status == PathStatus::step_failure) r = track_path(start, hom, settings.tightened());
    switch (r.status) {
      case PathStatus::converged:
        if (same_point(r.endpoint, point, kMatchTol)) return Membership::member;
        break;
      case PathStatus::ill_conditioned: {
        // singular stops fall short of the point; the approach rate decides
        if (path_reaches(r, point, kMatchTol)) return Membership::member;
        const auto p = singular_refine(r.endpoint, target, kSingularAccept);
        if (p && same_point(*p, point, kMatchTol)) return Membership::member;
        if (!p) failed = true;
        break;
      }
      case PathStatus::diverged:
      case PathStatus::step_failure: failed = true; break;
    }
  }
  return failed ? Membership::indeterminate : Membership::not_member;
}

}  // namespace

Membership contains_point(const WitnessSet& ws, std::span<const Complex> point, const TrackSettings& settings,
                          std::uint64_t seed) {
  Membership m = Membership::indeterminate;
  for (std::uint64_t attempt = 0; attempt < kMembershipAttempts && m == Membership::indeterminate; ++attempt)
    m = contains_point_once(ws, point, settings, derive_seed(seed, attempt));
  return m;
}

JunkFilterResult junk_filter(const WitnessSuperset& candidates, const std::vector<const WitnessSet*>& higher,
                             const WitnessOptions& options, std::uint64_t seed) {
  struct Candidate {
    const CVector* point;
    bool singular;
  };
  std::vector<Candidate> all;
  for (const auto& p : candidates.regular) all.push_back({&p, false});
  for (const auto& p : candidates.singular) all.push_back({&p, true});

  std::vector<Membership> verdict(all.size(), Membership::not_member);
  parallel_for(all.size(), options.threads, [&](std::size_t i) {
    bool unsure = false;
    for (std::size_t k = 0; k < higher.size(); ++k) {
      const Membership m = contains_point(*higher[k], *all[i].point, options.settings, derive_seed(seed, i * 131 + k));
      if (m == Membership::member) {
        verdict[i] = Membership::member;
        return;
      }
      if (m == Membership::indeterminate) unsure = true;
    }
    verdict[i] = unsure ? Membership::indeterminate : Membership::not_member;
  });

  JunkFilterResult out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (verdict[i] == Membership::member) {
      ++out.junk;
      continue;
    }
    if (verdict[i] == Membership::indeterminate) ++out.indeterminate;
    (all[i].singular ? out.quarantined : out.points).push_back(*all[i].point);
  }
  return out;
}

std::map<int, DimensionWitness> compute_all_dims(const PolySystem& sys, int min_dim, int max_dim,
                                                 const WitnessOptions& options, std::uint64_t seed) {
  const auto n = static_cast<int>(sys.nvars());
  if (min_dim < 0 || max_dim >= n || min_dim > max_dim) throw Error("dimension range must satisfy 0 <= min <= max < n");
  std::map<int, DimensionWitness> out;
  for (int d = max_dim; d >= min_dim; --d) {
    const std::uint64_t dseed = derive_seed(seed, 0x100 + static_cast<std::uint64_t>(d));
    WitnessSuperset sup = witness_superset(sys, d, options, dseed);
    std::vector<const WitnessSet*> higher;
    for (auto it = out.rbegin(); it != out.rend(); ++it)
      if (!it->second.witness.points.empty()) higher.push_back(&it->second.witness);
    JunkFilterResult filtered = junk_filter(sup, higher, options, derive_seed(dseed, 4));

    DimensionWitness& dw = out[d];
    dw.witness = WitnessSet{d, sys, std::move(sup.randomized), std::move(sup.slice), std::move(filtered.points)};
    dw.diagnostics = sup.diagnostics;
    dw.quarantined = std::move(filtered.quarantined);
    dw.junk = filtered.junk;
    dw.junk_indeterminate = filtered.indeterminate;
  }
  return out;
}

}  // namespace lnv
