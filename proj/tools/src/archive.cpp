#include "lnv/cli/archive.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace lnv::cli {

using json = nlohmann::ordered_json;

json complex_vector_to_json(std::span<const Complex> v) {
  json out = json::array();
  for (const auto& z : v) out.push_back(format_complex(z));
  return out;
}

CVector complex_vector_from_json(const json& j) {
  if (!j.is_array()) throw ArchiveError("expected a list of complex numbers");
  CVector v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_string()) throw ArchiveError("complex entries must be \"re,im\" strings");
    try {
      v.push_back(parse_complex(e.get<std::string>()));
    } catch (const Error& err) {
      throw ArchiveError(std::string("bad complex number: ") + err.what());
    }
  }
  return v;
}

json cmatrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(complex_vector_to_json(m.row(r)));
  return rows;
}

CMatrix cmatrix_from_json(const json& j) {
  if (!j.is_array()) throw ArchiveError("expected a matrix");
  if (j.empty()) return {};
  const CVector first = complex_vector_from_json(j[0]);
  CMatrix m(j.size(), first.size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const CVector row = complex_vector_from_json(j[r]);
    if (row.size() != m.cols()) throw ArchiveError("matrix rows must have equal length");
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

namespace {

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json system_to_json(const PolySystem& sys) {
  json eqs = json::array();
  for (const auto& p : sys.polys()) eqs.push_back(to_text_terms(p));
  return json{{"nvars", sys.nvars()}, {"equations", std::move(eqs)}};
}

json diagnostics_to_json(const SupersetDiagnostics& d) {
  return json{{"paths", d.paths},     {"converged", d.converged}, {"diverged", d.diverged},
              {"failed", d.failed},   {"singular", d.singular},   {"spurious", d.spurious},
              {"strategy", to_string(d.strategy)}};
}

SupersetDiagnostics diagnostics_from_json(const json& j) {
  SupersetDiagnostics d;
  d.paths = j.at("paths").get<std::size_t>();
  d.converged = j.at("converged").get<std::size_t>();
  d.diverged = j.at("diverged").get<std::size_t>();
  d.failed = j.at("failed").get<std::size_t>();
  d.singular = j.at("singular").get<std::size_t>();
  d.spurious = j.at("spurious").get<std::size_t>();
  d.strategy = parse_start_strategy(j.at("strategy").get<std::string>());
  return d;
}

json dimension_to_json(const DimensionReport& r) {
  const WitnessSet& ws = r.witness;
  json points = json::array();
  json residuals = json::array();
  for (const auto& p : ws.points) {
    points.push_back(complex_vector_to_json(p));
    residuals.push_back(finite_or_null(ws.system.size() ? scaled_residual(ws.system, p) : 0.0));
  }
  json quarantined = json::array();
  for (const auto& q : r.quarantined) quarantined.push_back(complex_vector_to_json(q));
  return json{{"dim", r.dim},
              {"complete", r.complete},
              {"loops", r.loops},
              {"error", r.error},
              {"diagnostics", diagnostics_to_json(r.superset)},
              {"junk", r.junk},
              {"junk_indeterminate", r.junk_indeterminate},
              {"slice", json{{"coefficients", cmatrix_to_json(ws.slice.coefficients)},
                             {"constants", complex_vector_to_json(ws.slice.constants)}}},
              {"randomization", cmatrix_to_json(ws.randomized.matrix)},
              {"points", std::move(points)},
              {"residuals", std::move(residuals)},
              {"quarantined", std::move(quarantined)}};
}

RandomizedSystem rebuild_randomized(const PolySystem& sys, CMatrix matrix) {
  if (matrix.rows() == 0) return {PolySystem(), std::move(matrix)};
  if (matrix.cols() != sys.size()) throw ArchiveError("randomization matrix does not match the system");
  // same accumulation order as the randomization itself
  std::vector<Polynomial> polys;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    Polynomial p(sys.nvars());
    for (std::size_t j = 0; j < sys.size(); ++j)
      if (matrix(i, j) != Complex{}) p += sys[j] * matrix(i, j);
    polys.push_back(std::move(p));
  }
  return {PolySystem(std::move(polys)), std::move(matrix)};
}

DimensionReport dimension_from_json(const json& j, const PolySystem& sys) {
  DimensionReport r;
  r.dim = j.at("dim").get<int>();
  r.complete = j.at("complete").get<bool>();
  r.loops = j.at("loops").get<int>();
  r.error = j.at("error").get<std::string>();
  r.superset = diagnostics_from_json(j.at("diagnostics"));
  r.junk = j.at("junk").get<std::size_t>();
  r.junk_indeterminate = j.at("junk_indeterminate").get<std::size_t>();
  for (const auto& q : j.at("quarantined")) r.quarantined.push_back(complex_vector_from_json(q));
  WitnessSet& ws = r.witness;
  ws.dim = r.dim;
  ws.system = sys;
  ws.randomized = rebuild_randomized(sys, cmatrix_from_json(j.at("randomization")));
  ws.slice.coefficients = cmatrix_from_json(j.at("slice").at("coefficients"));
  ws.slice.constants = complex_vector_from_json(j.at("slice").at("constants"));
  if (ws.slice.codim() != static_cast<std::size_t>(std::max(r.dim, 0)) && !j.at("points").empty())
    throw ArchiveError("slice of dimension " + std::to_string(r.dim) + " has the wrong codimension");
  for (const auto& p : j.at("points")) {
    ws.points.push_back(complex_vector_from_json(p));
    if (ws.points.back().size() != sys.nvars()) throw ArchiveError("witness point has the wrong length");
  }
  r.witness_points = ws.points.size();
  return r;
}

json analysis_to_json(const LandscapeAnalysis& an, int samples, std::uint64_t seed) {
  json comps = json::array();
  for (const auto& c : an.components) {
    json ss = json::array();
    for (const auto& s : c.samples)
      ss.push_back(json{{"point", complex_vector_to_json(s.point)},
                        {"loss", format_complex(s.loss)},
                        {"zero_eig_count", s.zero_eig_count},
                        {"product_rank", s.product_rank}});
    comps.push_back(json{{"id", c.id},
                         {"dim", c.dim},
                         {"degree", c.degree},
                         {"pseudo_loss", format_complex(c.pseudo_loss)},
                         {"loss_deviation", finite_or_null(c.loss_deviation)},
                         {"zero_eig_count", c.zero_eig_count},
                         {"product_rank", c.product_rank},
                         {"contains_origin", to_string(c.contains_origin)},
                         {"classification", to_string(c.classification)},
                         {"error", c.error},
                         {"samples", std::move(ss)}});
  }
  return json{{"samples_per_component", samples},
              {"seed", seed},
              {"half_output_energy", an.half_output_energy},
              {"origin", json{{"loss", format_complex(an.origin.loss)},
                              {"zero_eig_count", an.origin.zero_eig_count},
                              {"spectrum", complex_vector_to_json(an.origin.spectrum)}}},
              {"components", std::move(comps)}};
}

Membership membership_from_string(const std::string& s) {
  if (s == "true") return Membership::member;
  if (s == "false") return Membership::not_member;
  if (s == "indeterminate") return Membership::indeterminate;
  throw ArchiveError("unknown membership value " + s);
}

LandscapeAnalysis analysis_from_json(const json& j, const NetProblem& problem) {
  LandscapeAnalysis an;
  an.half_output_energy = half_output_energy(problem.data);
  an.origin = analyze_origin(problem);
  for (const auto& cj : j.at("components")) {
    ComponentAnalysis c;
    c.id = cj.at("id").get<std::string>();
    c.dim = cj.at("dim").get<int>();
    c.degree = cj.at("degree").get<std::size_t>();
    c.contains_origin = membership_from_string(cj.at("contains_origin").get<std::string>());
    c.error = cj.at("error").get<std::string>();
    for (const auto& sj : cj.at("samples")) {
      CVector p = complex_vector_from_json(sj.at("point"));
      if (p.size() != problem.loss.nvars()) throw ArchiveError("sample point of " + c.id + " has the wrong length");
      c.samples.push_back(analyze_sample(problem, std::move(p)));
    }
    if (c.ok()) summarize(c, an.half_output_energy);
    an.components.push_back(std::move(c));
  }
  return an;
}

}  // namespace

json hypothesis_to_json(const HypothesisReport& r) {
  json ev = json::array();
  for (const auto& e : r.evidence)
    ev.push_back(json{{"subject", e.subject},
                      {"check", e.check},
                      {"value", finite_or_null(e.value)},
                      {"bound", finite_or_null(e.bound)},
                      {"pass", e.pass}});
  return json{{"id", r.id}, {"verdict", to_string(r.verdict)}, {"stage", r.stage}, {"evidence", std::move(ev)}};
}

json archive_to_json(const Archive& a) {
  const Decomposition& d = a.decomposition;
  json dims = json::array();
  for (const auto& r : d.dimensions) dims.push_back(dimension_to_json(r));
  json comps = json::array();
  for (const auto& c : d.components)
    comps.push_back(json{{"id", c.id},
                         {"dim", c.dim},
                         {"degree", c.degree()},
                         {"witness_indices", c.witness_indices},
                         {"certified", c.certified}});
  json out{{"format_version", kFormatVersion},
           {"kind", a.kind},
           {"config", config_to_json(a.config)},
           {"arch", json{{"dims", a.problem.arch.dims},
                         {"residual", a.problem.arch.residual},
                         {"label", a.problem.arch.label()},
                         {"nvars", a.problem.arch.nvars()}}},
           {"data", json{{"X", matrix_to_json(a.problem.data.x)}, {"Y", matrix_to_json(a.problem.data.y)}}},
           {"seed", a.config.seed},
           {"settings", settings_to_json(a.config.settings)},
           {"system", system_to_json(d.system)},
           {"provisional", d.provisional},
           {"dimensions", std::move(dims)},
           {"components", std::move(comps)}};
  if (a.analysis) out["analysis"] = analysis_to_json(*a.analysis, a.samples, a.analysis_seed);
  return out;
}

Archive archive_from_json(const json& j) {
  Archive a;
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion) throw ArchiveError("unsupported archive format_version " + std::to_string(version));
    a.kind = j.at("kind").get<std::string>();
    if (a.kind != "decomposition" && a.kind != "analysis") throw ArchiveError("unknown archive kind " + a.kind);
    a.config = config_from_json(j.at("config"));
    a.config.validate();
    a.problem = build_problem(a.config);

    // the stored system must be the one the config produces
    const json& sj = j.at("system");
    if (sj.at("nvars").get<std::size_t>() != a.problem.gradient.nvars() ||
        sj.at("equations").size() != a.problem.gradient.size())
      throw ArchiveError("archived system does not match the archived config");
    for (std::size_t i = 0; i < a.problem.gradient.size(); ++i)
      if (sj.at("equations")[i].get<std::vector<std::string>>() != to_text_terms(a.problem.gradient[i]))
        throw ArchiveError("archived equation " + std::to_string(i) + " does not match the archived config");

    Decomposition& d = a.decomposition;
    d.system = a.problem.gradient;
    d.options = decompose_options(a.config);
    d.provisional = j.at("provisional").get<bool>();
    for (const auto& dj : j.at("dimensions")) d.dimensions.push_back(dimension_from_json(dj, d.system));
    for (const auto& cj : j.at("components")) {
      IrreducibleComponent c;
      c.id = cj.at("id").get<std::string>();
      c.dim = cj.at("dim").get<int>();
      c.certified = cj.at("certified").get<bool>();
      c.witness_indices = cj.at("witness_indices").get<std::vector<std::size_t>>();
      const DimensionReport* rep = nullptr;
      for (const auto& r : d.dimensions)
        if (r.dim == c.dim) rep = &r;
      if (!rep) throw ArchiveError("component " + c.id + " has no dimension block");
      for (auto i : c.witness_indices)
        if (i >= rep->witness.points.size()) throw ArchiveError("component " + c.id + " indexes a missing witness point");
      c.witness = rep->witness.restricted(c.witness_indices);
      if (c.degree() != cj.at("degree").get<std::size_t>()) throw ArchiveError("component " + c.id + " degree mismatch");
      d.components.push_back(std::move(c));
    }
    if (j.contains("analysis")) {
      const json& an = j.at("analysis");
      a.samples = an.at("samples_per_component").get<int>();
      a.analysis_seed = an.at("seed").get<std::uint64_t>();
      a.analysis = analysis_from_json(an, a.problem);
      annotate(d, *a.analysis);
    } else if (a.kind == "analysis") {
      throw ArchiveError("analysis archive without an analysis block");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArchiveError(std::string("malformed archive: ") + e.what());
  } catch (const ArchiveError&) {
    throw;
  } catch (const Error& e) {
    throw ArchiveError(std::string("invalid archive: ") + e.what());
  }
  return a;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(1) << '\n';
  if (!out) throw Error("write failed for " + path);
}

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArchiveError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArchiveError(path + " is not valid JSON: " + e.what());
  }
}

void save_archive(const std::string& path, const Archive& a) { write_json(path, archive_to_json(a)); }

Archive load_archive(const std::string& path) { return archive_from_json(read_json(path)); }

}  // namespace lnv::cli
