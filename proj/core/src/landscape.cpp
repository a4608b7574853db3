#include "lnv/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lnv/rng.hpp"

namespace lnv {

Complex pseudo_loss(const Polynomial& loss, std::span<const Complex> point) {
  if (point.size() != loss.nvars()) throw DimensionMismatch("loss point has the wrong length");
  return evaluate(loss, point);
}

std::vector<Complex> hessian_spectrum(const Polynomial& loss, std::span<const Complex> point) {
  if (point.size() != loss.nvars()) throw DimensionMismatch("hessian point has the wrong length");
  return eigenvalues(hessian_at(loss, point));
}

int zero_eig_count(const Polynomial& loss, std::span<const Complex> point, double tol) {
  if (point.size() != loss.nvars()) throw DimensionMismatch("hessian point has the wrong length");
  const CMatrix h = hessian_at(loss, point);
  return static_cast<int>(h.rows()) - static_cast<int>(numerical_rank(h, tol));
}

int product_rank(const Architecture& arch, std::span<const Complex> plain_point, double tol) {
  // relative to max(1, sigma_max) so that a numerically zero product has rank 0
  const auto sv = singular_values(product_matrix(arch, plain_point));
  const double floor = tol * std::max(1.0, sv.empty() ? 0.0 : sv.front());
  return static_cast<int>(std::count_if(sv.begin(), sv.end(), [&](double v) { return v > floor; }));
}

std::string to_string(Classification c) {
  return c == Classification::global_minimum ? "global_minimum" : "saddle_component";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::verified: return "verified";
    case Verdict::violated: return "violated";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

namespace {

double max_pairwise(const std::vector<SampleAnalysis>& samples) {
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i + 1; j < samples.size(); ++j) d = std::max(d, std::abs(samples[i].loss - samples[j].loss));
  return d;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

SampleAnalysis analyze_sample(const NetProblem& problem, CVector point) {
  if (point.size() != problem.loss.nvars()) throw DimensionMismatch("sample point has the wrong length");
  SampleAnalysis s;
  const CVector plain = problem.to_plain(point);
  s.loss = pseudo_loss(problem.loss, point);
  // the plain Hessian at the shifted point, for residual nets too
  const CMatrix h = hessian_at(problem.plain_loss, plain);
  s.spectrum = eigenvalues(h);
  s.zero_eig_count = static_cast<int>(h.rows()) - static_cast<int>(numerical_rank(h, kZeroEigTol));
  s.product_rank = product_rank(problem.arch, plain, kZeroEigTol);
  s.point = std::move(point);
  return s;
}

OriginAnalysis analyze_origin(const NetProblem& problem) {
  OriginAnalysis o;
  const CVector plain_zero(problem.loss.nvars(), Complex{});
  const CMatrix h0 = hessian_at(problem.plain_loss, plain_zero);
  o.loss = pseudo_loss(problem.plain_loss, plain_zero);
  o.spectrum = eigenvalues(h0);
  o.zero_eig_count = static_cast<int>(h0.rows()) - static_cast<int>(numerical_rank(h0, kZeroEigTol));
  return o;
}

void summarize(ComponentAnalysis& a, double half_energy) {
  if (a.samples.empty()) throw Error("component " + a.id + " has no samples");
  Complex sum{};
  for (const auto& s : a.samples) sum += s.loss;
  a.pseudo_loss = sum / static_cast<double>(a.samples.size());
  a.loss_deviation = max_pairwise(a.samples);
  a.zero_eig_count = a.samples.front().zero_eig_count;
  a.product_rank = 0;
  for (const auto& s : a.samples) a.product_rank = std::max(a.product_rank, s.product_rank);
  a.classification = std::abs(a.pseudo_loss) < kGlobalLossTol * (1.0 + half_energy) ? Classification::global_minimum
                                                                                    : Classification::saddle_component;
}

LandscapeAnalysis analyze(const Decomposition& decomp, const NetProblem& problem, int samples_per_component,
                          std::uint64_t seed, const TrackSettings& settings) {
  if (samples_per_component < 1) throw Error("need at least one sample per component");
  if (decomp.system.nvars() != problem.loss.nvars()) throw DimensionMismatch("decomposition and network disagree on variables");
  LandscapeAnalysis out;
  out.half_output_energy = half_output_energy(problem.data);

  out.origin = analyze_origin(problem);

  const CVector origin = problem.plain_origin();
  for (std::size_t c = 0; c < decomp.components.size(); ++c) {
    const IrreducibleComponent& comp = decomp.components[c];
    const std::uint64_t cseed = derive_seed(seed, c);
    ComponentAnalysis a;
    a.id = comp.id;
    a.dim = comp.dim;
    a.degree = comp.degree();
    try {
      // a point has one sample; more would repeat it
      const int count = comp.dim == 0 ? 1 : samples_per_component;
      for (int k = 0; k < count; ++k)
        a.samples.push_back(analyze_sample(problem, sample_point(comp, derive_seed(cseed, 1 + k), settings)));
      summarize(a, out.half_output_energy);
      a.contains_origin = membership_test(origin, comp, settings, derive_seed(cseed, 0));
    } catch (const Error& e) {
      a.error = e.what();
    }
    out.components.push_back(std::move(a));
  }
  return out;
}

void annotate(Decomposition& decomp, const LandscapeAnalysis& analysis) {
  for (const auto& a : analysis.components) {
    if (!a.ok()) continue;
    for (auto& comp : decomp.components) {
      if (comp.id != a.id) continue;
      comp.annotations.pseudo_loss = a.pseudo_loss;
      comp.annotations.zero_eig_count = a.zero_eig_count;
      comp.annotations.product_rank = a.product_rank;
      if (a.contains_origin != Membership::indeterminate)
        comp.annotations.contains_origin = a.contains_origin == Membership::member;
    }
  }
}

HypothesisReport verify_h2(const LandscapeAnalysis& analysis, double tol) {
  HypothesisReport r;
  r.id = "H2";
  bool violated = false;
  bool unsure = false;
  for (const auto& a : analysis.components) {
    if (!a.ok()) {
      unsure = true;
      r.stage = "sampling " + a.id + ": " + a.error;
      continue;
    }
    const double bound = tol * (1.0 + std::abs(a.pseudo_loss));
    const bool pass = a.loss_deviation <= bound;
    r.evidence.push_back({a.id, "pairwise loss spread over " + std::to_string(a.samples.size()) + " samples",
                          a.loss_deviation, bound, pass});
    violated = violated || !pass;
    if (a.contains_origin == Membership::indeterminate) {
      unsure = true;
      if (r.stage.empty()) r.stage = "origin membership of " + a.id;
      continue;
    }
    if (a.contains_origin != Membership::member) continue;
    const double diff = std::abs(a.pseudo_loss - analysis.origin.loss);
    const double obound = tol * (1.0 + std::abs(analysis.origin.loss));
    const bool opass = diff <= obound;
    r.evidence.push_back({a.id, "loss equals the origin loss " + fmt(analysis.origin.loss.real()), diff, obound, opass});
    violated = violated || !opass;
  }
  r.verdict = violated ? Verdict::violated : unsure ? Verdict::indeterminate : Verdict::verified;
  if (r.verdict != Verdict::indeterminate) r.stage.clear();
  return r;
}

HypothesisReport verify_h3(const LandscapeAnalysis& analysis) {
  HypothesisReport r;
  r.id = "H3";
  bool violated = false;
  bool unsure = false;
  int origin_dim = -1;
  for (const auto& a : analysis.components) {
    if (!a.ok()) {
      unsure = true;
      r.stage = "sampling " + a.id + ": " + a.error;
      continue;
    }
    for (std::size_t k = 0; k < a.samples.size(); ++k) {
      const int z = a.samples[k].zero_eig_count;
      const bool pass = z == a.dim;
      // a component sitting at the origin is judged by the origin rule
      if (!pass && a.dim == 0 && a.contains_origin == Membership::member) continue;
      r.evidence.push_back({a.id, "zero eigenvalues at sample " + std::to_string(k) + " equal the dimension",
                            static_cast<double>(z), static_cast<double>(a.dim), pass});
      violated = violated || !pass;
    }
    if (a.contains_origin == Membership::member) origin_dim = std::max(origin_dim, a.dim);
    if (a.contains_origin == Membership::indeterminate) {
      unsure = true;
      if (r.stage.empty()) r.stage = "origin membership of " + a.id;
    }
  }
  if (origin_dim >= 0) {
    const bool pass = analysis.origin.zero_eig_count >= origin_dim;
    r.evidence.push_back({"origin", "zero eigenvalues at the origin at least the largest dimension through it",
                          static_cast<double>(analysis.origin.zero_eig_count), static_cast<double>(origin_dim), pass});
    violated = violated || !pass;
  }
  r.verdict = violated ? Verdict::violated : unsure ? Verdict::indeterminate : Verdict::verified;
  if (r.verdict != Verdict::indeterminate) r.stage.clear();
  return r;
}

std::vector<Stratum> compute_strata(const NetProblem& problem, const DecomposeOptions& options, int samples,
                                    std::uint64_t seed) {
  std::vector<Stratum> out;
  const int k = problem.arch.width();
  for (int r = 1; r <= k; ++r) {
    Stratum s;
    s.rank_bound = r;
    const PolySystem sys = concat(problem.gradient, build_product_minors(problem.arch, r));
    DecomposeOptions o = options;
    o.seed = derive_seed(seed, 2 * static_cast<std::uint64_t>(r));
    s.decomposition = decompose(sys, o);
    s.analysis = analyze(s.decomposition, problem, samples, derive_seed(seed, 2 * static_cast<std::uint64_t>(r) + 1),
                         options.witness.settings);
    out.push_back(std::move(s));
  }
  return out;
}

HypothesisReport verify_h1(const NetProblem& problem, const Decomposition& plain, const LandscapeAnalysis& plain_analysis,
                           const std::vector<Stratum>& strata, const TrackSettings& settings, std::uint64_t seed,
                           double tol) {
  HypothesisReport r;
  r.id = "H1";
  const int k = problem.arch.width();
  bool unsure = false;
  bool violated = false;

  // real loss values by exact product rank; the plain decomposition supplies rank k
  std::map<int, std::vector<std::pair<std::string, double>>> by_rank;
  auto collect = [&](const LandscapeAnalysis& an, int bound) {
    for (const auto& a : an.components) {
      if (!a.ok()) {
        unsure = true;
        r.stage = "sampling " + a.id + ": " + a.error;
        continue;
      }
      if (a.product_rank >= bound) continue;
      for (const auto& s : a.samples) by_rank[s.product_rank].push_back({a.id, s.loss.real()});
    }
  };
  for (const auto& s : strata) {
    if (s.decomposition.provisional) {
      unsure = true;
      r.stage = "stratum rank < " + std::to_string(s.rank_bound) + " decomposition is provisional";
    }
    collect(s.analysis, s.rank_bound);
  }
  collect(plain_analysis, k + 1);

  for (auto lo = by_rank.begin(); lo != by_rank.end(); ++lo) {
    for (auto hi = std::next(lo); hi != by_rank.end(); ++hi) {
      double lo_min = lo->second.front().second;
      std::string lo_id = lo->second.front().first;
      for (const auto& [id, v] : lo->second)
        if (v < lo_min) lo_min = v, lo_id = id;
      double hi_max = hi->second.front().second;
      std::string hi_id = hi->second.front().first;
      for (const auto& [id, v] : hi->second)
        if (v > hi_max) hi_max = v, hi_id = id;
      const double bound = tol * (1.0 + std::abs(hi_max));
      const bool pass = lo_min >= hi_max - bound;
      r.evidence.push_back({lo_id + " vs " + hi_id,
                            "min loss at rank " + std::to_string(lo->first) + " minus max loss at rank " +
                                std::to_string(hi->first),
                            lo_min - hi_max, -bound, pass});
      violated = violated || !pass;
    }
  }

  // rank-zero stratum against the plain components through the origin
  const Stratum* zero = nullptr;
  for (const auto& s : strata)
    if (s.rank_bound == 1) zero = &s;
  if (zero != nullptr) {
    Rng rng(seed, 0x41);
    auto matched = [&](const IrreducibleComponent& comp, const CVector& point) {
      const Membership m = membership_test(point, comp, settings, rng.next());
      if (m == Membership::indeterminate) {
        unsure = true;
        r.stage = "membership against " + comp.id;
      }
      return m == Membership::member;
    };
    for (std::size_t i = 0; i < zero->analysis.components.size(); ++i) {
      const auto& a = zero->analysis.components[i];
      if (!a.ok() || a.product_rank != 0) continue;
      bool found = false;
      for (std::size_t j = 0; j < plain.components.size() && !found; ++j) {
        const auto& pc = plain.components[j];
        if (pc.dim != a.dim || pc.degree() != a.degree) continue;
        if (j < plain_analysis.components.size() && plain_analysis.components[j].contains_origin != Membership::member)
          continue;
        found = matched(pc, a.samples.front().point);
      }
      r.evidence.push_back({a.id, "rank-zero component matches a plain component through the origin",
                            found ? 1.0 : 0.0, 1.0, found});
      violated = violated || !found;
    }
    for (std::size_t j = 0; j < plain_analysis.components.size(); ++j) {
      const auto& a = plain_analysis.components[j];
      if (!a.ok() || a.contains_origin != Membership::member) continue;
      bool found = false;
      for (const auto& sc : zero->decomposition.components) {
        if (sc.dim != a.dim || sc.degree() != a.degree) continue;
        if (matched(sc, a.samples.front().point)) {
          found = true;
          break;
        }
      }
      r.evidence.push_back({a.id, "plain component through the origin lies in the rank-zero stratum",
                            found ? 1.0 : 0.0, 1.0, found});
      violated = violated || !found;
    }
  }
  r.verdict = violated ? Verdict::violated : unsure ? Verdict::indeterminate : Verdict::verified;
  if (r.verdict != Verdict::indeterminate) r.stage.clear();
  return r;
}

HypothesisReport verify_residual(const NetProblem& plain_problem, const Decomposition& plain,
                                 const NetProblem& residual_problem, const Decomposition& residual, int samples,
                                 const TrackSettings& settings, std::uint64_t seed) {
  if (plain_problem.arch.residual || !residual_problem.arch.residual ||
      plain_problem.arch.dims != residual_problem.arch.dims || plain_problem.data != residual_problem.data)
    throw Error("residual check needs the plain and residual forms of one network and data set");
  HypothesisReport r;
  r.id = "RES";
  bool violated = false;
  bool unsure = false;

  auto table = [](const Decomposition& d) {
    std::vector<std::pair<int, std::size_t>> t;
    for (const auto& c : d.components) t.push_back({c.dim, c.degree()});
    std::sort(t.begin(), t.end());
    return t;
  };
  const bool same_table = table(plain) == table(residual);
  r.evidence.push_back({"decompositions", "identical (dim, degree) multisets", same_table ? 1.0 : 0.0, 1.0, same_table});
  violated = !same_table;
  if (plain.provisional || residual.provisional) {
    unsure = true;
    r.stage = "provisional decomposition";
  }

  Rng rng(seed, 0x7E5);
  // samples of `from` components, shifted, must lie on an equal-shape `to` component
  auto check = [&](const Decomposition& from, const Decomposition& to, auto&& shift, const std::string& label) {
    for (const auto& comp : from.components) {
      const int count = comp.dim == 0 ? 1 : samples;
      for (int k = 0; k < count; ++k) {
        CVector p;
        try {
          p = shift(sample_point(comp, rng.next(), settings));
        } catch (const Error& e) {
          unsure = true;
          r.stage = "sampling " + comp.id + ": " + e.what();
          continue;
        }
        Membership best = Membership::not_member;
        for (const auto& other : to.components) {
          if (other.dim != comp.dim || other.degree() != comp.degree()) continue;
          const Membership m = membership_test(p, other, settings, rng.next());
          if (m == Membership::member) {
            best = m;
            break;
          }
          if (m == Membership::indeterminate) best = m;
        }
        if (best == Membership::indeterminate) {
          unsure = true;
          r.stage = "membership of a shifted sample of " + comp.id;
        }
        const bool pass = best == Membership::member;
        if (best != Membership::indeterminate) violated = violated || !pass;
        r.evidence.push_back({comp.id, label + " sample " + std::to_string(k) + " lies on a matching component",
                              pass ? 1.0 : 0.0, 1.0, pass});
      }
    }
  };
  check(residual, plain, [&](const CVector& p) { return residual_problem.to_plain(p); }, "residual-to-plain");
  check(plain, residual, [&](const CVector& p) { return residual_problem.from_plain(p); }, "plain-to-residual");

  r.verdict = violated ? Verdict::violated : unsure ? Verdict::indeterminate : Verdict::verified;
  if (r.verdict != Verdict::indeterminate) r.stage.clear();
  return r;
}

}  // namespace lnv
