#include "lnv/nid.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <numeric>

#include "lnv/rng.hpp"

namespace lnv {

namespace {

SliceSystem translated(const SliceSystem& s, Complex shift) {
  SliceSystem out = s;
  out.constants[0] += shift;
  return out;
}

bool usable(const PathResult& r) {
  return (r.status == PathStatus::converged || r.status == PathStatus::ill_conditioned) &&
         r.residual <= kSingularAccept && all_finite(r.endpoint);
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t add() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return true;
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<std::vector<std::size_t>> groups_of(UnionFind& uf) {
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < uf.size(); ++i) by_root[uf.find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : by_root) out.push_back(std::move(members));
  return out;
}

}  // namespace

TraceOracle::TraceOracle(const WitnessSet& ws, const TrackSettings& settings, std::uint64_t seed, unsigned threads)
    : ws_(&ws), settings_(settings), threads_(threads) {
  if (ws.dim > 0) {
    Rng rng(seed, 0x7ACE);
    const Complex shift = 0.25 * rng.unit_complex();
    plus_ = translated(ws.slice, shift);
    minus_ = translated(ws.slice, -shift);
  }
  extend(ws.points);
}

void TraceOracle::extend(std::span<const CVector> points) {
  const std::size_t first = samples_.size();
  samples_.resize(first + points.size());
  if (ws_->dim == 0) {
    for (std::size_t i = 0; i < points.size(); ++i)
      samples_[first + i] = {points[i], points[i], points[i], true};
    return;
  }
  // straight-line parameter paths, so +s and -s continue the same branch
  const auto up = move_slice(*ws_, points, plus_, 1.0, settings_, threads_);
  const auto down = move_slice(*ws_, points, minus_, 1.0, settings_, threads_);
  for (std::size_t i = 0; i < points.size(); ++i) {
    TraceSamples& s = samples_[first + i];
    s.at_zero = points[i];
    s.valid = usable(up[i]) && usable(down[i]);
    if (s.valid) {
      s.at_plus = up[i].endpoint;
      s.at_minus = down[i].endpoint;
    }
  }
}

std::optional<CVector> TraceOracle::deviation(std::span<const std::size_t> group) const {
  const std::size_t n = ws_->system.nvars();
  CVector dev(n);
  for (auto i : group) {
    const TraceSamples& s = samples_.at(i);
    if (!s.valid) return std::nullopt;
    for (std::size_t k = 0; k < n; ++k) dev[k] += s.at_plus[k] + s.at_minus[k] - 2.0 * s.at_zero[k];
  }
  return dev;
}

bool TraceOracle::linear(std::span<const std::size_t> group) const {
  const auto dev = deviation(group);
  if (!dev) return false;
  if (ws_->dim == 0) return true;
  const std::size_t n = ws_->system.nvars();
  CVector step(n);
  for (auto i : group) {
    const TraceSamples& s = samples_[i];
    for (std::size_t k = 0; k < n; ++k) step[k] += s.at_plus[k] - s.at_zero[k];
  }
  return norm_inf(*dev) <= kTraceTol * std::max(1.0, norm_inf(step));
}

bool trace_test(std::span<const std::size_t> group, const WitnessSet& ws, const TrackSettings& settings,
                std::uint64_t seed) {
  for (auto i : group)
    if (i >= ws.points.size()) throw Error("trace group index out of range");
  std::vector<CVector> pts;
  std::vector<std::size_t> local;
  for (auto i : group) {
    local.push_back(pts.size());
    pts.push_back(ws.points[i]);
  }
  const WitnessSet sub{ws.dim, ws.system, ws.randomized, ws.slice, std::move(pts)};
  const TraceOracle oracle(sub, settings, seed);
  return oracle.linear(local);
}

namespace {

// Merges failing groups whose deviations cancel; smallest unions first.
bool merge_by_trace(const TraceOracle& oracle, UnionFind& uf) {
  auto groups = groups_of(uf);
  std::vector<std::vector<std::size_t>> failing;
  for (auto& g : groups)
    if (!oracle.linear(g)) failing.push_back(g);
  if (failing.size() < 2 || failing.size() > 14) return false;
  const std::size_t m = failing.size();
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask)
    if (std::popcount(mask) >= 2) masks.push_back(mask);
  std::stable_sort(masks.begin(), masks.end(),
                   [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
  for (auto mask : masks) {
    std::vector<std::size_t> joined;
    for (std::size_t g = 0; g < m; ++g)
      if (mask & (1u << g)) joined.insert(joined.end(), failing[g].begin(), failing[g].end());
    if (oracle.linear(joined)) {
      for (auto i : joined) uf.unite(joined.front(), i);
      return true;
    }
  }
  return false;
}

bool all_linear(const TraceOracle& oracle, UnionFind& uf) {
  for (const auto& g : groups_of(uf))
    if (!oracle.linear(g)) return false;
  return true;
}

}  // namespace

BreakupResult monodromy_breakup(const WitnessSet& ws_in, int max_loops, std::uint64_t seed,
                                const TrackSettings& settings, unsigned threads) {
  if (ws_in.points.empty()) throw Error("monodromy breakup needs a nonempty witness set");
  BreakupResult out;
  WitnessSet ws = ws_in;
  UnionFind uf(ws.points.size());
  TraceOracle oracle(ws, settings, derive_seed(seed, 0), threads);

  if (ws.dim > 0) {
    while (!all_linear(oracle, uf) && out.loops < max_loops) {
      if (merge_by_trace(oracle, uf)) continue;
      const std::uint64_t lseed = derive_seed(seed, 1 + static_cast<std::uint64_t>(out.loops));
      ++out.loops;
      Rng rng(lseed, 0x100F);
      const SliceSystem s1 = SliceSystem::random(ws.slice.codim(), ws.slice.nvars(), derive_seed(lseed, 1));
      const SliceSystem s2 = SliceSystem::random(ws.slice.codim(), ws.slice.nvars(), derive_seed(lseed, 2));
      const Complex g0 = rng.unit_complex(), g1 = rng.unit_complex(), g2 = rng.unit_complex();

      const std::vector<CVector> starts = ws.points;
      auto leg0 = move_slice(ws, starts, s1, g0, settings, threads);
      WitnessSet at1 = ws;
      at1.slice = s1;
      std::vector<CVector> mid;
      std::vector<std::size_t> origin;
      for (std::size_t i = 0; i < leg0.size(); ++i)
        if (usable(leg0[i])) {
          mid.push_back(leg0[i].endpoint);
          origin.push_back(i);
        }
      auto leg1 = move_slice(at1, mid, s2, g1, settings, threads);
      WitnessSet at2 = ws;
      at2.slice = s2;
      std::vector<CVector> mid2;
      std::vector<std::size_t> origin2;
      for (std::size_t i = 0; i < leg1.size(); ++i)
        if (usable(leg1[i])) {
          mid2.push_back(leg1[i].endpoint);
          origin2.push_back(origin[i]);
        }
      auto leg2 = move_slice(at2, mid2, ws.slice, g2, settings, threads);

      std::vector<CVector> found;
      std::vector<std::size_t> found_from;
      for (std::size_t i = 0; i < leg2.size(); ++i) {
        const PathResult& r = leg2[i];
        if (r.status != PathStatus::converged) continue;
        const std::size_t from = origin2[i];
        auto it = std::find_if(ws.points.begin(), ws.points.end(),
                               [&](const CVector& q) { return same_point(q, r.endpoint, kMatchTol); });
        if (it != ws.points.end()) {
          uf.unite(from, static_cast<std::size_t>(it - ws.points.begin()));
          continue;
        }
        // witness completion: a point this set missed
        if (scaled_residual(ws.system, r.endpoint) > settings.final_tol) continue;
        auto seen = std::find_if(found.begin(), found.end(),
                                 [&](const CVector& q) { return same_point(q, r.endpoint, kMatchTol); });
        if (seen == found.end()) {
          found.push_back(r.endpoint);
          found_from.push_back(from);
        } else {
          uf.unite(from, found_from[static_cast<std::size_t>(seen - found.begin())]);
        }
      }
      for (std::size_t k = 0; k < found.size(); ++k) {
        ws.points.push_back(found[k]);
        uf.unite(found_from[k], uf.add());
      }
      if (!found.empty()) oracle.extend(found);
    }
  }

  out.points = ws.points;
  out.groups = groups_of(uf);
  out.complete = true;
  for (const auto& g : out.groups) {
    const bool ok = oracle.linear(g);
    out.certified.push_back(ok);
    out.complete = out.complete && ok;
  }
  return out;
}

Membership membership_test(std::span<const Complex> point, const IrreducibleComponent& comp,
                           const TrackSettings& settings, std::uint64_t seed) {
  return contains_point(comp.witness, point, settings, seed);
}

CVector sample_point(const IrreducibleComponent& comp, std::uint64_t seed, const TrackSettings& settings) {
  const WitnessSet& ws = comp.witness;
  if (ws.points.empty()) throw Error("cannot sample a component without witness points");
  if (comp.dim == 0) return ws.points.front();
  for (int attempt = 0; attempt < kSampleAttempts; ++attempt) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(attempt));
    Rng rng(s, 0x5A);
    const SliceSystem slice = SliceSystem::random(ws.slice.codim(), ws.slice.nvars(), derive_seed(s, 1));
    const std::size_t pick = static_cast<std::size_t>(rng.next() % ws.points.size());
    const CVector start = ws.points[pick];
    auto r = move_slice(ws, std::span<const CVector>(&start, 1), slice, rng.unit_complex(), settings, 1);
    if (r[0].status == PathStatus::converged && scaled_residual(ws.system, r[0].endpoint) <= settings.final_tol)
      return r[0].endpoint;
  }
  throw Error("sampling component " + comp.id + " failed on " + std::to_string(kSampleAttempts) + " slices");
}

std::string component_id(int dim, std::span<const CVector> points) {
  CVector trace;
  for (const auto& p : points) {
    if (trace.empty()) trace.assign(p.size(), Complex{});
    for (std::size_t k = 0; k < p.size(); ++k) trace[k] += p[k];
  }
  // FNV-1a over the trace rounded to 6 significant digits
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const char* s) {
    for (; *s; ++s) {
      h ^= static_cast<unsigned char>(*s);
      h *= 0x100000001b3ULL;
    }
  };
  char buf[64];
  for (auto z : trace) {
    std::snprintf(buf, sizeof buf, "%.5e,%.5e;", z.real() + 0.0, z.imag() + 0.0);
    mix(buf);
  }
  std::snprintf(buf, sizeof buf, "d%d-k%zu-%08llx", dim, points.size(),
                static_cast<unsigned long long>(h & 0xffffffffULL));
  return buf;
}

void sort_components(std::vector<IrreducibleComponent>& comps) {
  std::stable_sort(comps.begin(), comps.end(), [](const IrreducibleComponent& a, const IrreducibleComponent& b) {
    if (a.dim != b.dim) return a.dim > b.dim;
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.id < b.id;
  });
}

const IrreducibleComponent* Decomposition::find(const std::string& id) const {
  for (const auto& c : components)
    if (c.id == id) return &c;
  return nullptr;
}

Decomposition decompose(const PolySystem& sys, const DecomposeOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int n = static_cast<int>(sys.nvars());
  Decomposition out;
  out.system = sys;
  out.options = options;
  const int max_dim = options.max_dim < 0 ? n - 1 : std::min(options.max_dim, n - 1);
  const int min_dim = std::max(options.min_dim, 0);
  out.options.max_dim = max_dim;
  out.options.min_dim = min_dim;

  std::map<int, DimensionWitness> dims;
  try {
    dims = compute_all_dims(sys, min_dim, max_dim, options.witness, derive_seed(options.seed, 1));
  } catch (const Error& e) {
    DimensionReport r;
    r.dim = -1;
    r.complete = false;
    r.error = std::string("witness computation: ") + e.what();
    out.dimensions.push_back(std::move(r));
    out.provisional = true;
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }

  for (auto it = dims.rbegin(); it != dims.rend(); ++it) {
    const int d = it->first;
    DimensionWitness& dw = it->second;
    DimensionReport rep;
    rep.dim = d;
    rep.superset = dw.diagnostics;
    rep.junk = dw.junk;
    rep.junk_indeterminate = dw.junk_indeterminate;
    rep.quarantined = dw.quarantined;
    rep.witness = dw.witness;
    if (dw.witness.points.empty()) {
      rep.witness_points = 0;
      out.dimensions.push_back(std::move(rep));
      continue;
    }
    try {
      const BreakupResult br =
          monodromy_breakup(dw.witness, options.max_loops, derive_seed(options.seed, 0x200 + static_cast<std::uint64_t>(d)),
                            options.witness.settings, options.witness.threads);
      dw.witness.points = br.points;
      rep.loops = br.loops;
      rep.complete = br.complete;
      for (std::size_t g = 0; g < br.groups.size(); ++g) {
        IrreducibleComponent c;
        c.dim = d;
        c.witness_indices = br.groups[g];
        c.witness = dw.witness.restricted(br.groups[g]);
        c.certified = br.certified[g];
        c.id = component_id(d, c.witness.points);
        out.components.push_back(std::move(c));
      }
      if (!br.complete) out.provisional = true;
    } catch (const Error& e) {
      rep.complete = false;
      rep.error = std::string("monodromy breakup: ") + e.what();
      out.provisional = true;
    }
    rep.witness = dw.witness;
    rep.witness_points = dw.witness.points.size();
    out.dimensions.push_back(std::move(rep));
  }
  sort_components(out.components);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace lnv
