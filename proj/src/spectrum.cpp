#include "dce/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <thread>

#include "dce/errors.hpp"

namespace dce {

namespace {

void fix_phases(Eigen::MatrixXcd& states) {
  for (Eigen::Index c = 0; c < states.cols(); ++c) {
    Eigen::Index imax = 0;
    states.col(c).cwiseAbs2().maxCoeff(&imax);
    const cplx v = states(imax, c);
    const double mag = std::abs(v);
    if (mag > 0.0) states.col(c) *= std::conj(v) / mag;
    states(imax, c) = cplx{states(imax, c).real(), 0.0};
  }
}

}  // namespace

int DressedSpectrum::eigen_index(const BareLabel& label) const {
  if (!labeled) throw LabelError("spectrum has not been labeled");
  if (!basis.contains(label)) throw LabelError("label " + to_string(label) + " is outside the basis");
  const int b = basis.index(label);
  const int e = eigen_index_of_label[b];
  if (fidelity(b) < label_options.min_overlap) {
    // The eigenvector this label overlaps most was claimed by another label.
    Eigen::Index best = 0;
    states.row(b).cwiseAbs2().maxCoeff(&best);
    const int owner = label_of_eigen_index[best];
    std::ostringstream msg;
    msg << "label " << to_string(label) << " is unresolved: its dominant eigenvector #" << best
        << " is already assigned to " << to_string(basis.label(owner)) << " (best remaining overlap "
        << fidelity(b) << " on eigenvector #" << e << ")";
    throw LabelError(msg.str());
  }
  return e;
}

double DressedSpectrum::fidelity_of(const BareLabel& label) const {
  eigen_index(label);
  return fidelity(basis.index(label));
}

bool DressedSpectrum::is_degenerate(const BareLabel& label) const {
  eigen_index(label);
  return degenerate[basis.index(label)];
}

DressedSpectrum diagonalize(const Eigen::MatrixXcd& h0, const BasisSpec& basis) {
  if (h0.rows() != basis.dim() || h0.cols() != basis.dim())
    throw ValidationError("Hamiltonian dimension does not match the basis");
  const double asym = (h0 - h0.adjoint()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    std::ostringstream msg;
    msg << "Hamiltonian is not Hermitian (max |H - H^dagger| = " << asym << ")";
    throw ValidationError(msg.str());
  }
  DressedSpectrum s;
  s.basis = basis;
  if (h0.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h0.real());
    if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
    s.lambdas = es.eigenvalues();
    s.states = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h0);
    if (es.info() != Eigen::Success) throw Error("eigendecomposition failed");
    s.lambdas = es.eigenvalues();
    s.states = es.eigenvectors();
  }
  fix_phases(s.states);
  return s;
}

void label_states(DressedSpectrum& s, const LabelOptions& options) {
  const int dim = static_cast<int>(s.states.rows());
  const Eigen::MatrixXd overlap = s.states.cwiseAbs2();  // (bare, eigen)

  std::vector<int> order(static_cast<std::size_t>(dim) * dim);
  std::iota(order.begin(), order.end(), 0);
  const double* ov = overlap.data();  // column-major: idx = eigen * dim + bare
  std::stable_sort(order.begin(), order.end(), [ov](int x, int y) { return ov[x] > ov[y]; });

  s.eigen_index_of_label.assign(dim, -1);
  s.label_of_eigen_index.assign(dim, -1);
  int assigned = 0;
  for (int idx : order) {
    const int e = idx / dim;
    const int b = idx % dim;
    if (s.eigen_index_of_label[b] >= 0 || s.label_of_eigen_index[e] >= 0) continue;
    s.eigen_index_of_label[b] = e;
    s.label_of_eigen_index[e] = b;
    if (++assigned == dim) break;
  }

  s.fidelity.resize(dim);
  s.degenerate.assign(dim, false);
  for (int b = 0; b < dim; ++b) {
    s.fidelity(b) = overlap(b, s.eigen_index_of_label[b]);
    s.degenerate[b] = s.fidelity(b) < options.degenerate_threshold;
  }
  s.label_options = options;
  s.labeled = true;
}

DressedSpectrum dressed_spectrum(const HamiltonianModel& model, const LabelOptions& options) {
  DressedSpectrum s = diagonalize(model.bare_hamiltonian(), model.basis());
  label_states(s, options);
  return s;
}

cplx matrix_element_C(const DressedSpectrum& s, const OperatorSet& ops, const BareLabel& m, const BareLabel& n,
                      double eta, double nu) {
  const Eigen::VectorXcd pm = s.state(m);
  const Eigen::VectorXcd pn = s.state(n);
  const Eigen::VectorXcd an = ops.a() * pn;
  const Eigen::VectorXcd adn = ops.a_dagger() * pn;
  Eigen::VectorXcd v = ops.n_hat() * pn;
  v += (eta / (4.0 * nu)) * (ops.a() * an - ops.a_dagger() * adn);
  return pm.dot(v);
}

cplx matrix_element_A(const DressedSpectrum& s, const OperatorSet& ops, const BareLabel& m, const BareLabel& n,
                      int k, int l) {
  const Eigen::MatrixXcd& d = ops.dipole(k, l);
  return s.state(m).dot(d * s.state(n));
}

cplx transition_rate_theta(const SystemParams& p, cplx C, const std::array<cplx, 3>& A) {
  const bool any_tilde = std::any_of(p.eps_tilde.begin(), p.eps_tilde.end(), [](double e) { return e != 0.0; });
  if (p.eps == 0.0) {
    if (any_tilde) throw ValidationError("transition rate undefined for eps = 0 with nonzero eps_tilde");
    return {0.0, 0.0};
  }
  cplx bracket = C;
  for (int i = 0; i < 3; ++i)
    if (p.eps_tilde[i] != 0.0) bracket += (p.eps_tilde[i] * std::polar(1.0, p.phi[i]) / p.eps) * A[i];
  return 0.5 * p.eps * bracket;
}

double resonant_modulation_frequency(const DressedSpectrum& s, int k, int q) {
  if (q != 4 && q != 5) throw ValidationError("photon step q must be 4 or 5");
  return s.eigenvalue({0, k + q}) - s.eigenvalue({0, k});
}

RateEntry compute_rates(const HamiltonianModel& model, const DressedSpectrum& s, int k, int q,
                        std::optional<double> eta) {
  RateEntry r;
  r.k = k;
  r.q = q;
  const BareLabel lo{0, k}, hi{0, k + q};
  r.eta_resonant = resonant_modulation_frequency(s, k, q);
  r.eta = eta.value_or(r.eta_resonant);
  const auto& p = model.params();
  r.C = matrix_element_C(s, model.ops(), lo, hi, r.eta, p.nu);
  for (int i = 1; i <= 3; ++i) {
    const auto [a, b] = coupling_pair(i);
    r.A[i - 1] = b < model.basis().levels() ? matrix_element_A(s, model.ops(), lo, hi, a, b) : cplx{};
  }
  r.theta = transition_rate_theta(p, r.C, r.A);
  r.fidelity_lower = s.fidelity_of(lo);
  r.fidelity = s.fidelity_of(hi);
  r.degenerate = s.is_degenerate(lo) || s.is_degenerate(hi);
  return r;
}

std::vector<double> linspace(double start, double stop, int points) {
  if (points < 2) throw ValidationError("a grid needs at least 2 points");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = start + (stop - start) * i / (points - 1);
  g.back() = stop;
  return g;
}

int sweep_thread_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("CASIMIR_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1) n = std::min<long>(n, cap);
  }
  return n;
}

RateRow sweep_point(const SweepConfig& cfg, double value) {
  RateRow row;
  row.grid_value = value;
  try {
    SystemParams p = cfg.params;
    set_param(p, cfg.parameter, value);
    const HamiltonianModel model(cfg.basis, p, cfg.chi_mode, cfg.coupling);
    const DressedSpectrum s = dressed_spectrum(model, cfg.labels);
    for (int k : cfg.ks) {
      std::optional<double> eta;
      if (cfg.pin_eta) eta = p.eta;
      row.entries.push_back(compute_rates(model, s, k, cfg.q, eta));
    }
  } catch (const Error& e) {
    row.ok = false;
    row.error = e.what();
    row.entries.clear();
  }
  return row;
}

RateTable sweep(const SweepConfig& cfg) {
  RateTable table;
  table.config = cfg;
  table.grid = linspace(cfg.start, cfg.stop, cfg.points);
  if (cfg.q != 4 && cfg.q != 5) throw ValidationError("photon step q must be 4 or 5");
  if (cfg.ks.empty()) throw ValidationError("sweep needs at least one k");
  get_param(cfg.params, cfg.parameter);
  table.rows.resize(table.grid.size());

  const int workers = std::min<int>(sweep_thread_count(cfg.threads), static_cast<int>(table.grid.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < table.grid.size(); i = next++) table.rows[i] = sweep_point(cfg, table.grid[i]);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return table;
}

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi, double xtol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (std::abs(b - a) > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

const std::vector<std::string>& param_names() {
  static const std::vector<std::string> names{"nu",         "eps",        "eta",        "E1",   "E2",   "g1",
                                              "g2",         "g3",         "eps_tilde1", "eps_tilde2",
                                              "eps_tilde3", "phi1",       "phi2",       "phi3"};
  return names;
}

namespace {

double* param_slot(SystemParams& p, const std::string& name) {
  if (name == "nu") return &p.nu;
  if (name == "eps") return &p.eps;
  if (name == "eta") return &p.eta;
  if (name == "E1") return &p.E[0];
  if (name == "E2") return &p.E[1];
  for (int i = 0; i < 3; ++i) {
    const std::string suffix = std::to_string(i + 1);
    if (name == "g" + suffix) return &p.g[i];
    if (name == "eps_tilde" + suffix) return &p.eps_tilde[i];
    if (name == "phi" + suffix) return &p.phi[i];
  }
  throw ValidationError("unknown parameter '" + name + "'");
}

}  // namespace

void set_param(SystemParams& p, const std::string& name, double value) { *param_slot(p, name) = value; }

double get_param(const SystemParams& p, const std::string& name) {
  SystemParams copy = p;
  return *param_slot(copy, name);
}

}  // namespace dce
