#include "dce/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace dce {

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

// Errors end up in a CSV cell: keep them on one line and comma free.
std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ch == ',' ? ';' : ' ';
  return s;
}

void complex_cells(std::vector<std::string>& out, cplx z) {
  out.push_back(format_number(z.real()));
  out.push_back(format_number(z.imag()));
  out.push_back(format_number(std::abs(z)));
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string rate_table_csv(const RateTable& table) {
  const auto& ks = table.config.ks;
  std::vector<std::string> head{"grid_value"};
  for (int k : ks) {
    const std::string s = "_" + std::to_string(k);
    for (const char* base : {"C", "A1", "A2", "A3", "theta"})
      for (const char* part : {"_re", "_im", "_abs"}) head.push_back(base + std::string(part) + s);
    for (const char* base : {"fidelity_lower", "fidelity", "eta", "eta_resonant", "degenerate_flag"})
      head.push_back(base + s);
  }
  head.push_back("row_ok");
  head.push_back("error");
  std::string out = join(head);

  for (const RateRow& row : table.rows) {
    std::vector<std::string> cells{format_number(row.grid_value)};
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (!row.ok || i >= row.entries.size()) {
        cells.insert(cells.end(), 20, std::string());
        continue;
      }
      const RateEntry& e = row.entries[i];
      complex_cells(cells, e.C);
      for (const cplx& a : e.A) complex_cells(cells, a);
      complex_cells(cells, e.theta);
      cells.push_back(format_number(e.fidelity_lower));
      cells.push_back(format_number(e.fidelity));
      cells.push_back(format_number(e.eta));
      cells.push_back(format_number(e.eta_resonant));
      cells.push_back(e.degenerate ? "1" : "0");
    }
    cells.push_back(row.ok ? "1" : "0");
    cells.push_back(sanitize(row.error));
    out += join(cells);
  }
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::vector<std::string> head{"t", "mean_n", "mandel_q"};
  for (int a = 0; a < traj.basis.levels(); ++a) head.push_back("P_a_" + std::to_string(a));
  for (int m = 0; m <= traj.basis.n_max; ++m) head.push_back("p_" + std::to_string(m));
  std::string out = join(head);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    std::vector<std::string> cells{format_number(traj.t[i]), format_number(traj.mean_n[i]), cell(traj.mandel_q[i])};
    for (Eigen::Index a = 0; a < traj.atom_pop.cols(); ++a) cells.push_back(format_number(traj.atom_pop(i, a)));
    for (Eigen::Index m = 0; m < traj.fock.cols(); ++m) cells.push_back(format_number(traj.fock(i, m)));
    out += join(cells);
  }
  return out;
}

nlohmann::json trajectory_meta_json(const Trajectory& traj) {
  const TrajectoryMeta& m = traj.meta;
  nlohmann::json j;
  j["method"] = m.method;
  j["atom"] = to_string(traj.basis.atom);
  j["n_max"] = m.n_max;
  j["truncation_retries"] = m.truncation_retries;
  j["rtol"] = m.rtol;
  j["atol"] = m.atol;
  j["max_step"] = m.max_step;
  j["period_rtol"] = m.period_rtol;
  j["norm_drift"] = m.norm_drift;
  j["hermiticity_drift"] = m.hermiticity_drift;
  j["min_eigenvalue"] = m.min_eigenvalue;
  j["edge_population"] = m.edge_population;
  j["steps"] = m.steps;
  j["rhs_evals"] = m.rhs_evals;
  j["samples"] = traj.size();
  j["t_final"] = traj.t.empty() ? 0.0 : traj.t.back();
  j["max_mean_n"] = traj.max_mean_n();
  if (m.dissipation)
    j["dissipation"] = {
        {"kappa", m.dissipation->kappa}, {"gamma", m.dissipation->gamma}, {"gamma_phi", m.dissipation->gamma_phi}};
  j["warnings"] = m.warnings;
  return j;
}

std::string spectrum_csv(const DressedSpectrum& s) {
  std::string out = join({"level", "photons", "eigen_index", "lambda", "fidelity", "degenerate_flag"});
  for (Eigen::Index e = 0; e < s.lambdas.size(); ++e) {
    const int b = s.labeled ? s.label_of_eigen_index[e] : -1;
    if (b < 0 || s.fidelity(b) < s.label_options.min_overlap) continue;
    const BareLabel l = s.basis.label(b);
    out += join({std::to_string(l.level), std::to_string(l.photons), std::to_string(e), format_number(s.lambdas(e)),
                 format_number(s.fidelity(b)), s.degenerate[b] ? "1" : "0"});
  }
  return out;
}

std::string perturbative_csv(const std::vector<PerturbativeRow>& rows) {
  std::string out = join({"kind", "E1", "k", "c4_far", "lambda_far", "c_near", "a_near", "theta_near",
                          "degeneracy_detuning", "cavity_degenerate", "dipole_degenerate", "theta_bound",
                          "lambda_dispersive", "eta_near3nu", "lambda_jc", "note"});
  for (const PerturbativeRow& r : rows)
    out += join({r.kind, format_number(r.E1), std::to_string(r.k), cell(r.c4_far), cell(r.lambda_far), cell(r.c_near),
                 cell(r.a_near), cell(r.theta_near), format_number(r.detuning), cell(r.cavity_degenerate),
                 cell(r.dipole_degenerate), format_number(r.theta_bound), format_number(r.lambda_dispersive),
                 format_number(r.eta_near3nu), cell(r.lambda_jc), sanitize(r.note)});
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) cells.push_back(c);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace dce
