#include "lnv/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lnv::cli {

using json = nlohmann::ordered_json;

namespace {

bool same_row(const ReportRow& a, const ReportRow& b) {
  if (a.dim != b.dim || a.degree != b.degree || a.contains_origin != b.contains_origin ||
      a.zero_eig_count != b.zero_eig_count || a.classification != b.classification)
    return false;
  if (a.loss.has_value() != b.loss.has_value()) return false;
  if (!a.loss) return true;
  return std::abs(*a.loss - *b.loss) <= 1e-6 * (1.0 + std::abs(*a.loss));
}

std::string format_loss(const std::optional<Complex>& z) {
  if (!z) return "-";
  char buf[64];
  // imaginary parts at rounding level are not shown
  if (std::abs(z->imag()) <= 1e-9 * (1.0 + std::abs(z->real())))
    std::snprintf(buf, sizeof buf, "%.8g", std::abs(z->real()) < 1e-12 ? 0.0 : z->real());
  else
    std::snprintf(buf, sizeof buf, "%.8g%+.3gi", z->real(), z->imag());
  return buf;
}

}  // namespace

Report make_report(const Archive& a) {
  Report r;
  r.arch = a.problem.arch.label();
  r.seed = a.config.seed;
  r.data_seed = a.config.data.mode == DataMode::realizable ? a.config.data.seed : 0;
  r.provisional = a.decomposition.provisional;
  r.half_output_energy = half_output_energy(a.problem.data);

  for (const auto& c : a.decomposition.components) {
    ReportRow row;
    row.dim = c.dim;
    row.degree = c.degree();
    row.count = 1;
    row.ids.push_back(c.id);
    if (a.analysis) {
      for (const auto& ca : a.analysis->components) {
        if (ca.id != c.id) continue;
        if (ca.ok()) {
          row.loss = ca.pseudo_loss;
          row.zero_eig_count = ca.zero_eig_count;
          row.classification = to_string(ca.classification);
        } else {
          row.classification = "error";
        }
        row.contains_origin = to_string(ca.contains_origin);
      }
    }
    auto it = std::find_if(r.rows.begin(), r.rows.end(), [&](const ReportRow& o) { return same_row(o, row); });
    if (it == r.rows.end()) {
      r.rows.push_back(std::move(row));
    } else {
      ++it->count;
      it->ids.push_back(c.id);
    }
  }
  for (auto& row : r.rows) std::sort(row.ids.begin(), row.ids.end());
  std::sort(r.rows.begin(), r.rows.end(), [](const ReportRow& x, const ReportRow& y) {
    if (x.dim != y.dim) return x.dim > y.dim;
    if (x.degree != y.degree) return x.degree < y.degree;
    return x.ids.front() < y.ids.front();
  });
  return r;
}

json report_to_json(const Report& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json j{{"dim", row.dim}, {"degree", row.degree}, {"count", row.count}};
    j["loss"] = row.loss ? json(format_complex(*row.loss)) : json(nullptr);
    j["contains_origin"] = row.contains_origin;
    j["zero_eig_count"] = row.zero_eig_count ? json(*row.zero_eig_count) : json(nullptr);
    j["classification"] = row.classification;
    j["ids"] = row.ids;
    rows.push_back(std::move(j));
  }
  json hyps = json::array();
  for (const auto& h : r.hypotheses) hyps.push_back(hypothesis_to_json(h));
  json timings = json::object();
  for (const auto& [k, v] : r.timings) timings[k] = v;
  return json{{"format_version", kFormatVersion},
              {"arch", r.arch},
              {"provisional", r.provisional},
              {"half_output_energy", r.half_output_energy},
              {"components", std::move(rows)},
              {"hypotheses", std::move(hyps)},
              {"seeds", json{{"master", r.seed}, {"data", r.data_seed}}},
              {"timings", std::move(timings)}};
}

std::string render_table(const Report& r) {
  std::ostringstream os;
  os << "network " << r.arch << "   0.5*||Y||^2 = " << format_loss(Complex(r.half_output_energy)) << "   seed "
     << r.seed;
  if (r.provisional) os << "   (provisional)";
  os << '\n';
  char buf[256];
  std::snprintf(buf, sizeof buf, "%4s %6s %6s  %-18s %-14s %5s  %s\n", "dim", "degree", "count", "loss", "origin", "zero",
                "classification");
  os << buf;
  for (const auto& row : r.rows) {
    const std::string zero = row.zero_eig_count ? std::to_string(*row.zero_eig_count) : "-";
    std::snprintf(buf, sizeof buf, "%4d %6zu %6zu  %-18s %-14s %5s  %s\n", row.dim, row.degree, row.count,
                  format_loss(row.loss).c_str(), row.contains_origin.c_str(), zero.c_str(), row.classification.c_str());
    os << buf;
  }
  for (const auto& h : r.hypotheses) {
    os << h.id << ": " << to_string(h.verdict);
    if (!h.stage.empty()) os << " (" << h.stage << ")";
    os << '\n';
    for (const auto& e : h.evidence)
      if (!e.pass) os << "  failed: " << e.subject << ": " << e.check << " value " << e.value << " bound " << e.bound << '\n';
  }
  for (const auto& [k, v] : r.timings) {
    std::snprintf(buf, sizeof buf, "time %-12s %.2f s\n", k.c_str(), v);
    os << buf;
  }
  return os.str();
}

}  // namespace lnv::cli
