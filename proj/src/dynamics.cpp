#include "dce/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dce/errors.hpp"
#include "dce/observables.hpp"
#include "dce/ode.hpp"
#include "dce/spectrum.hpp"

namespace dce {

namespace {

constexpr cplx kI{0.0, 1.0};

double resolved_max_step(const HamiltonianModel& model, const EvolutionOptions& o) {
  if (o.max_step > 0.0) return o.max_step;
  if (model.params().eta > 0.0) return 2.0 * std::numbers::pi / (50.0 * model.params().eta);
  return std::numeric_limits<double>::infinity();
}

double resolved_rtol(const EvolutionOptions& o, bool density) {
  if (o.rtol > 0.0) return o.rtol;
  return density ? 1e-8 : 1e-9;
}

double resolved_atol(const EvolutionOptions& o, double rtol) { return o.atol > 0.0 ? o.atol : 1e-3 * rtol; }

Eigen::VectorXcd frame_phases(const Eigen::VectorXd& d, double t) {
  Eigen::VectorXcd u(d.size());
  for (Eigen::Index j = 0; j < d.size(); ++j) u(j) = std::polar(1.0, d(j) * t);
  return u;
}

// Schrodinger right-hand side in the frame phi = exp(i D t) psi, D = static diagonal.
struct SchrodingerRhs {
  const HamiltonianModel* model;
  SparseMatrixC off;

  explicit SchrodingerRhs(const HamiltonianModel& m) : model(&m), off(m.offdiagonal_pattern()) {}

  template <class State>
  void operator()(double t, const State& phi, State& dphi) {
    const Eigen::VectorXcd u = frame_phases(model->static_diagonal(), t);
    const State psi = u.conjugate().asDiagonal() * phi;
    model->offdiagonal_at(t, off);
    const double dw = omega_of_t(model->params(), t) - model->params().nu;
    State v = off * psi;
    if (dw != 0.0) v.noalias() += (dw * model->photon_numbers()).cast<cplx>().asDiagonal() * psi;
    dphi.noalias() = (-kI * u).asDiagonal() * v;
  }
};

// Lindblad right-hand side in the same rotating frame. Both dissipators are
// invariant under the frame change, so only the Hamiltonian entries pick up
// phases exp(i (d_r - d_c) t). The density matrix is stored as equal-size
// diagonal blocks [rho_0 | rho_1 | ...] side by side; jumps feed block b from
// block `source`.
struct LindbladRhs {
  struct Block {
    std::vector<int> idx;
    SparseMatrixC off;
    std::vector<Eigen::Index> value_src;
    std::vector<int> value_row, value_col;  // global indices of each entry
    Eigen::VectorXd n;
    Eigen::MatrixXd decay;
    int source = 0;
    // Local index in the source block of (level, n + 1) and of (1, n) for
    // level-0 states (-1 where absent), with the jump amplitudes.
    std::vector<int> photon_up, atom_up;
    Eigen::VectorXd photon_amp, atom_amp;
  };

  const HamiltonianModel* model;
  SparseMatrixC off;
  DissipationParams diss;
  std::vector<Block> blocks;
  int h = 0;
  Eigen::MatrixXcd w;

  LindbladRhs(const HamiltonianModel& m, const DissipationParams& d, const std::vector<std::vector<int>>& partition)
      : model(&m), off(m.offdiagonal_pattern()), diss(d) {
    const BasisSpec& b = m.basis();
    const int dim = b.dim();
    h = static_cast<int>(partition.front().size());
    std::vector<int> block_of(dim, -1), local(dim, -1);
    for (std::size_t q = 0; q < partition.size(); ++q)
      for (std::size_t j = 0; j < partition[q].size(); ++j) {
        block_of[partition[q][j]] = static_cast<int>(q);
        local[partition[q][j]] = static_cast<int>(j);
      }
    auto z_of = [](int level) { return level == 1 ? 1.0 : (level == 0 ? -1.0 : 0.0); };

    for (const auto& idx : partition) {
      Block blk;
      blk.idx = idx;
      blk.off.resize(h, h);
      blk.n.resize(h);
      blk.photon_up.assign(h, -1);
      blk.atom_up.assign(h, -1);
      blk.photon_amp = Eigen::VectorXd::Zero(h);
      blk.atom_amp = Eigen::VectorXd::Zero(h);
      std::vector<Eigen::Triplet<cplx>> trips;
      for (int j = 0; j < h; ++j) {
        const int r = idx[j];
        const BareLabel lab = b.label(r);
        blk.n(j) = lab.photons;
        for (auto k = off.outerIndexPtr()[r]; k < off.outerIndexPtr()[r + 1]; ++k) {
          const int c = off.innerIndexPtr()[k];
          if (block_of[c] != block_of[r]) throw Error("Hamiltonian couples different density-matrix blocks");
          trips.emplace_back(j, local[c], cplx{});
          blk.value_src.push_back(k);
          blk.value_row.push_back(r);
          blk.value_col.push_back(c);
        }
        if (lab.photons < b.n_max) {
          const int up = b.index(lab.level, lab.photons + 1);
          blk.source = block_of[up];
          blk.photon_up[j] = local[up];
          blk.photon_amp(j) = std::sqrt(lab.photons + 1.0);
        }
        if (lab.level == 0) {
          const int up = b.index(1, lab.photons);
          blk.source = block_of[up];
          blk.atom_up[j] = local[up];
          blk.atom_amp(j) = 1.0;
        }
      }
      blk.off.setFromTriplets(trips.begin(), trips.end());
      blk.off.makeCompressed();
      if (static_cast<std::size_t>(blk.off.nonZeros()) != blk.value_src.size())
        throw Error("block sparsity pattern mismatch");
      blk.decay.resize(h, h);
      for (int k = 0; k < h; ++k)
        for (int j = 0; j < h; ++j) {
          const BareLabel lj = b.label(idx[j]), lk = b.label(idx[k]);
          const double ej = lj.level == 1, ek = lk.level == 1;
          const double zj = z_of(lj.level), zk = z_of(lk.level);
          blk.decay(j, k) = -0.5 * d.kappa * (lj.photons + lk.photons) - 0.5 * d.gamma * (ej + ek) +
                            0.5 * d.gamma_phi * (zj * zk - 0.5 * (zj * zj + zk * zk));
        }
      blocks.push_back(std::move(blk));
    }
    // Every jump target must come from a single source block.
    for (std::size_t q = 0; q < blocks.size(); ++q)
      for (int j = 0; j < h; ++j) {
        const BareLabel lab = b.label(blocks[q].idx[j]);
        if (lab.photons < b.n_max && block_of[b.index(lab.level, lab.photons + 1)] != blocks[q].source)
          throw Error("inconsistent jump structure between density-matrix blocks");
        if (lab.level == 0 && block_of[b.index(1, lab.photons)] != blocks[q].source)
          throw Error("inconsistent jump structure between density-matrix blocks");
      }
  }

  void operator()(double t, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& out) {
    const Eigen::VectorXcd u = frame_phases(model->static_diagonal(), t);
    model->offdiagonal_at(t, off);
    const cplx* full = off.valuePtr();
    const double dw = omega_of_t(model->params(), t) - model->params().nu;
    out.resize(h, y.cols());
    w.resize(h, h);
    for (std::size_t q = 0; q < blocks.size(); ++q) {
      Block& blk = blocks[q];
      cplx* vals = blk.off.valuePtr();
      for (std::size_t k = 0; k < blk.value_src.size(); ++k)
        vals[k] = full[blk.value_src[k]] * u(blk.value_row[k]) * std::conj(u(blk.value_col[k]));
      const int* outer = blk.off.outerIndexPtr();
      const int* inner = blk.off.innerIndexPtr();
      const cplx* r = y.data() + static_cast<Eigen::Index>(q) * h * h;
      const cplx* src = y.data() + static_cast<Eigen::Index>(blk.source) * h * h;
      cplx* l = out.data() + static_cast<Eigen::Index>(q) * h * h;

      // w = H_I rho, column by column.
      for (int k = 0; k < h; ++k) {
        const cplx* rk = r + k * h;
        cplx* wk = w.data() + k * h;
        for (int j = 0; j < h; ++j) {
          double re = dw * blk.n(j) * rk[j].real(), im = dw * blk.n(j) * rk[j].imag();
          for (int p = outer[j]; p < outer[j + 1]; ++p) {
            const cplx v = vals[p], x = rk[inner[p]];
            re += v.real() * x.real() - v.imag() * x.imag();
            im += v.real() * x.imag() + v.imag() * x.real();
          }
          wk[j] = {re, im};
        }
      }
      // l = -i (w - w^dag) + decay o rho + jumps
      for (int k = 0; k < h; ++k) {
        for (int j = 0; j < h; ++j) {
          const cplx a = w(j, k), b = w(k, j);
          const double dre = a.real() - b.real(), dim = a.imag() + b.imag();
          const double dec = blk.decay(j, k);
          const cplx x = r[k * h + j];
          l[k * h + j] = {dim + dec * x.real(), -dre + dec * x.imag()};
        }
      }
      if (diss.kappa != 0.0) add_jumps(l, src, blk.photon_up, blk.photon_amp, diss.kappa);
      if (diss.gamma != 0.0) add_jumps(l, src, blk.atom_up, blk.atom_amp, diss.gamma);
    }
  }

  // l(j, k) += rate amp_j amp_k src(up_j, up_k)
  void add_jumps(cplx* l, const cplx* src, const std::vector<int>& up, const Eigen::VectorXd& amp, double rate) const {
    for (int k = 0; k < h; ++k) {
      if (up[k] < 0) continue;
      const double fk = rate * amp(k);
      const cplx* sk = src + static_cast<Eigen::Index>(up[k]) * h;
      for (int j = 0; j < h; ++j)
        if (up[j] >= 0) l[k * h + j] += fk * amp(j) * sk[up[j]];
    }
  }

  Eigen::MatrixXcd pack(const Eigen::MatrixXcd& full) const {
    Eigen::MatrixXcd y(h, h * static_cast<Eigen::Index>(blocks.size()));
    for (std::size_t q = 0; q < blocks.size(); ++q)
      for (int k = 0; k < h; ++k)
        for (int j = 0; j < h; ++j) y(j, static_cast<Eigen::Index>(q) * h + k) = full(blocks[q].idx[j], blocks[q].idx[k]);
    return y;
  }

  // Lab-frame density matrix at time t from the packed rotating-frame state.
  Eigen::MatrixXcd unpack(const Eigen::MatrixXcd& y, double t) const {
    const Eigen::VectorXcd u = frame_phases(model->static_diagonal(), t);
    const int dim = model->basis().dim();
    Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t q = 0; q < blocks.size(); ++q)
      for (int k = 0; k < h; ++k)
        for (int j = 0; j < h; ++j) {
          const int gj = blocks[q].idx[j], gk = blocks[q].idx[k];
          full(gj, gk) = std::conj(u(gj)) * y(j, static_cast<Eigen::Index>(q) * h + k) * u(gk);
        }
    return full;
  }
};

// Splits the qubit space by the parity of (level + photons) when rho0 has no
// coherences between the two sectors; otherwise a single block.
std::vector<std::vector<int>> density_partition(const BasisSpec& b, const Eigen::MatrixXcd& rho0) {
  const int dim = b.dim();
  std::vector<int> all(dim);
  for (int i = 0; i < dim; ++i) all[i] = i;
  if (b.atom != AtomKind::Qubit) return {all};
  std::vector<std::vector<int>> parts(2);
  for (int i = 0; i < dim; ++i) {
    const BareLabel l = b.label(i);
    parts[(l.level + l.photons) % 2].push_back(i);
  }
  if (parts[0].size() != parts[1].size()) return {all};
  for (int k = 0; k < dim; ++k)
    for (int j = 0; j < dim; ++j) {
      const BareLabel lj = b.label(j), lk = b.label(k);
      if ((lj.level + lj.photons + lk.level + lk.photons) % 2 != 0 && rho0(j, k) != cplx{}) return {all};
    }
  return parts;
}

template <class State>
double edge_population(const BasisSpec& b, const State& s);

template <>
double edge_population(const BasisSpec& b, const Eigen::VectorXcd& psi) {
  double p = 0.0;
  for (int lv = 0; lv < b.levels(); ++lv) p += std::norm(psi(b.index(lv, b.n_max)));
  return p;
}

template <>
double edge_population(const BasisSpec& b, const Eigen::MatrixXcd& rho) {
  double p = 0.0;
  for (int lv = 0; lv < b.levels(); ++lv) p += rho(b.index(lv, b.n_max), b.index(lv, b.n_max)).real();
  return p;
}

Trajectory make_trajectory(const HamiltonianModel& model, const std::vector<double>& times) {
  Trajectory tr;
  tr.basis = model.basis();
  tr.params = model.params();
  tr.chi_mode = model.chi_mode();
  tr.t = times;
  tr.mean_n.resize(times.size());
  tr.mandel_q.resize(times.size());
  tr.atom_pop.resize(static_cast<Eigen::Index>(times.size()), model.basis().levels());
  tr.fock.resize(static_cast<Eigen::Index>(times.size()), model.basis().fock_dim());
  tr.meta.n_max = model.basis().n_max;
  tr.meta.warnings = model.warnings();
  return tr;
}

template <class State>
void record(Trajectory& tr, std::size_t s, const State& state) {
  const Eigen::VectorXd fock = fock_probs(tr.basis, state);
  tr.fock.row(static_cast<Eigen::Index>(s)) = fock.transpose();
  tr.atom_pop.row(static_cast<Eigen::Index>(s)) = atom_populations(tr.basis, state).transpose();
  tr.mean_n[s] = mean_n(fock);
  tr.mandel_q[s] = mandel_q(fock);
  tr.meta.edge_population = std::max(tr.meta.edge_population, edge_population(tr.basis, state));
}

void check_options(const EvolutionOptions& o) {
  if (!(o.t_final > 0.0) || !std::isfinite(o.t_final)) throw ValidationError("t_final must be > 0");
  if (o.samples < 2) throw ValidationError("at least 2 samples are required");
  if (o.rtol < 0.0 || o.atol < 0.0 || o.max_step < 0.0) throw ValidationError("tolerances must be >= 0");
  if (o.max_truncation_retries < 0 || o.cutoff_increment < 1)
    throw ValidationError("invalid truncation retry settings");
}

Trajectory schrodinger_once(const HamiltonianModel& model, const Eigen::VectorXcd& psi0, const EvolutionOptions& o) {
  const std::vector<double> times = sample_times(o);
  Trajectory tr = make_trajectory(model, times);
  const double rtol = resolved_rtol(o, false);
  tr.meta.rtol = rtol;
  tr.meta.atol = resolved_atol(o, rtol);
  tr.meta.max_step = resolved_max_step(model, o);
  const Eigen::VectorXd& d = model.static_diagonal();

  auto integ = ode::make_dop853<Eigen::VectorXcd>(SchrodingerRhs(model),
                                                  {rtol, tr.meta.atol, tr.meta.max_step});
  auto store = [&](std::size_t s, const Eigen::VectorXcd& psi) {
    record(tr, s, psi);
    tr.meta.norm_drift = std::max(tr.meta.norm_drift, std::abs(psi.norm() - 1.0));
    if (o.keep_states) tr.states.push_back(psi);
  };

  if (model.is_driven() && o.stroboscopic) {
    tr.meta.method = "schrodinger-stroboscopic";
    const double period = model.period();
    const double periods = std::ceil(o.t_final / period);
    const double prtol = std::max(1e-14, std::min(1e-12, rtol / std::max(periods, 1.0)));
    tr.meta.period_rtol = prtol;
    const Eigen::MatrixXcd u_period = period_propagator(model, prtol, prtol);
    Eigen::VectorXcd base = psi0;
    long n_done = 0;
    for (std::size_t s = 0; s < times.size(); ++s) {
      const long n = static_cast<long>(std::floor(times[s] / period));
      while (n_done < n) {
        base = u_period * base;
        ++n_done;
      }
      const double tau = times[s] - static_cast<double>(n) * period;
      Eigen::VectorXcd phi = base;
      double t = 0.0;
      integ.integrate(t, phi, tau);
      store(s, frame_phases(d, -tau).cwiseProduct(phi));
    }
  } else {
    tr.meta.method = "schrodinger";
    Eigen::VectorXcd phi = psi0;
    double t = 0.0;
    for (std::size_t s = 0; s < times.size(); ++s) {
      integ.integrate(t, phi, times[s]);
      store(s, frame_phases(d, -times[s]).cwiseProduct(phi));
    }
  }
  tr.meta.steps = integ.stats().accepted + integ.stats().rejected;
  tr.meta.rhs_evals = integ.stats().rhs_evals;
  return tr;
}

Trajectory lindblad_once(const HamiltonianModel& model, const Eigen::MatrixXcd& rho0, const DissipationParams& diss,
                         const EvolutionOptions& o) {
  const std::vector<double> times = sample_times(o);
  Trajectory tr = make_trajectory(model, times);
  const double rtol = resolved_rtol(o, true);
  tr.meta.rtol = rtol;
  tr.meta.atol = resolved_atol(o, rtol);
  tr.meta.max_step = resolved_max_step(model, o);
  tr.meta.dissipation = diss;
  tr.meta.min_eigenvalue = std::numeric_limits<double>::infinity();

  LindbladRhs rhs(model, diss, density_partition(model.basis(), rho0));
  tr.meta.method = rhs.blocks.size() > 1 ? "lindblad-parity-blocks" : "lindblad";
  Eigen::MatrixXcd y = rhs.pack(rho0);
  LindbladRhs unpacker = rhs;
  auto integ = ode::make_dop853<Eigen::MatrixXcd>(std::move(rhs), {rtol, tr.meta.atol, tr.meta.max_step});
  double t = 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  for (std::size_t s = 0; s < times.size(); ++s) {
    integ.integrate(t, y, times[s]);
    const Eigen::MatrixXcd rho = unpacker.unpack(y, times[s]);
    record(tr, s, rho);
    tr.meta.norm_drift = std::max(tr.meta.norm_drift, std::abs(rho.trace().real() - 1.0));
    tr.meta.hermiticity_drift = std::max(tr.meta.hermiticity_drift, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    es.compute(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    tr.meta.min_eigenvalue = std::min(tr.meta.min_eigenvalue, lmin);
    if (lmin < -1e-6) {
      std::ostringstream msg;
      msg << "density matrix lost positivity at t = " << times[s] << " (min eigenvalue " << lmin << ")";
      throw IntegrationError(msg.str());
    }
    if (o.keep_states) tr.rhos.push_back(rho);
  }
  tr.meta.steps = integ.stats().accepted + integ.stats().rejected;
  tr.meta.rhs_evals = integ.stats().rhs_evals;
  return tr;
}

// Runs `once` and repeats it with a larger cutoff while the edge population
// exceeds the truncation tolerance.
template <class State, class Once>
Trajectory with_truncation_retries(const HamiltonianModel& model, const State& initial, const EvolutionOptions& o,
                                   Once once) {
  std::optional<HamiltonianModel> grown;
  const HamiltonianModel* current = &model;
  State state = initial;
  for (int attempt = 0;; ++attempt) {
    Trajectory tr = once(*current, state);
    tr.meta.truncation_retries = attempt;
    if (tr.meta.edge_population <= o.truncation_tol) return tr;
    if (attempt >= o.max_truncation_retries) {
      std::ostringstream msg;
      msg << "population " << tr.meta.edge_population << " at the photon cutoff n_max = " << current->basis().n_max
          << " exceeds the truncation tolerance " << o.truncation_tol << " after " << attempt << " retries";
      throw IntegrationError(msg.str());
    }
    BasisSpec next = current->basis();
    next.n_max += o.cutoff_increment;
    State grown_state = embed(state, current->basis(), next);
    grown.emplace(next, model.params(), model.chi_mode(), model.coupling_form());
    current = &*grown;
    state = std::move(grown_state);
  }
}

}  // namespace

void validate_dissipation(const DissipationParams& d) {
  for (double v : {d.kappa, d.gamma, d.gamma_phi})
    if (!std::isfinite(v) || v < 0.0) throw ValidationError("dissipation rates must be finite and >= 0");
}

double Trajectory::max_mean_n() const {
  double m = 0.0;
  for (double v : mean_n) m = std::max(m, v);
  return m;
}

Eigen::VectorXcd bare_state(const BasisSpec& basis, const BareLabel& label) {
  if (!basis.contains(label)) throw ValidationError("initial state " + to_string(label) + " is outside the basis");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(basis.dim());
  psi(basis.index(label)) = 1.0;
  return psi;
}

Eigen::MatrixXcd pure_density(const Eigen::VectorXcd& psi) { return psi * psi.adjoint(); }

Eigen::VectorXcd embed(const Eigen::VectorXcd& psi, const BasisSpec& from, const BasisSpec& to) {
  if (from.atom != to.atom || to.n_max < from.n_max) throw ValidationError("embed needs the same atom and a larger cutoff");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(to.dim());
  for (int i = 0; i < from.dim(); ++i) out(to.index(from.label(i))) = psi(i);
  return out;
}

Eigen::MatrixXcd embed(const Eigen::MatrixXcd& rho, const BasisSpec& from, const BasisSpec& to) {
  if (from.atom != to.atom || to.n_max < from.n_max) throw ValidationError("embed needs the same atom and a larger cutoff");
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(to.dim(), to.dim());
  for (int j = 0; j < from.dim(); ++j)
    for (int i = 0; i < from.dim(); ++i) out(to.index(from.label(i)), to.index(from.label(j))) = rho(i, j);
  return out;
}

std::vector<double> sample_times(const EvolutionOptions& o) {
  check_options(o);
  std::vector<double> t(o.samples);
  for (int s = 0; s < o.samples; ++s) t[s] = o.t_final * s / (o.samples - 1);
  t.back() = o.t_final;
  return t;
}

Eigen::VectorXcd propagate(const HamiltonianModel& model, const Eigen::VectorXcd& psi, double t0, double t1,
                           const EvolutionOptions& o) {
  const double rtol = resolved_rtol(o, false);
  auto integ = ode::make_dop853<Eigen::VectorXcd>(SchrodingerRhs(model),
                                                  {rtol, resolved_atol(o, rtol), resolved_max_step(model, o)});
  const Eigen::VectorXd& d = model.static_diagonal();
  Eigen::VectorXcd phi = frame_phases(d, t0).cwiseProduct(psi);
  double t = t0;
  integ.integrate(t, phi, t1);
  return frame_phases(d, -t1).cwiseProduct(phi);
}

Eigen::MatrixXcd period_propagator(const HamiltonianModel& model, double rtol, double atol) {
  if (model.params().eta <= 0.0) throw ValidationError("period propagator needs eta > 0");
  const double period = model.period();
  const int dim = model.basis().dim();
  auto integ = ode::make_dop853<Eigen::MatrixXcd>(SchrodingerRhs(model),
                                                  {rtol, atol, 2.0 * std::numbers::pi / (50.0 * model.params().eta)});
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  double t = 0.0;
  integ.integrate(t, u, period);
  return frame_phases(model.static_diagonal(), -period).asDiagonal() * u;
}

Trajectory evolve_schrodinger(const HamiltonianModel& model, const Eigen::VectorXcd& psi0,
                              const EvolutionOptions& options) {
  check_options(options);
  if (psi0.size() != model.basis().dim()) throw ValidationError("initial state has the wrong dimension");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw ValidationError("initial state is not normalized");
  return with_truncation_retries(model, psi0, options, [&](const HamiltonianModel& m, const Eigen::VectorXcd& psi) {
    return schrodinger_once(m, psi, options);
  });
}

Trajectory evolve_lindblad(const HamiltonianModel& model, const Eigen::MatrixXcd& rho0,
                           const DissipationParams& dissipation, const EvolutionOptions& options) {
  check_options(options);
  validate_dissipation(dissipation);
  const int dim = model.basis().dim();
  if (rho0.rows() != dim || rho0.cols() != dim) throw ValidationError("initial density matrix has the wrong dimension");
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw ValidationError("initial density matrix is not Hermitian");
  if (std::abs(rho0.trace().real() - 1.0) > 1e-10) throw ValidationError("initial density matrix must have unit trace");
  return with_truncation_retries(model, rho0, options, [&](const HamiltonianModel& m, const Eigen::MatrixXcd& rho) {
    return lindblad_once(m, rho, dissipation, options);
  });
}

AmplitudeTrajectory evolve_effective(const EffectiveModelSpec& spec, const Eigen::VectorXcd& b0, double t_final,
                                     int samples, double rtol) {
  const auto levels = static_cast<Eigen::Index>(spec.levels.size());
  if (levels < 2) throw ValidationError("effective model needs at least 2 levels");
  if (static_cast<Eigen::Index>(spec.rates.size()) != levels - 1 ||
      static_cast<Eigen::Index>(spec.detunings.size()) != levels - 1)
    throw ValidationError("effective model needs one rate and one detuning per neighboring pair");
  if (b0.size() != levels) throw ValidationError("initial amplitudes have the wrong size");

  auto rhs = [&spec, levels](double t, const Eigen::VectorXcd& b, Eigen::VectorXcd& db) {
    db.setZero(levels);
    for (Eigen::Index m = 0; m + 1 < levels; ++m) {
      const cplx ph = std::polar(1.0, spec.detunings[m] * t);
      db(m + 1) += std::conj(spec.rates[m]) * ph * b(m);
      db(m) -= spec.rates[m] * std::conj(ph) * b(m + 1);
    }
  };
  EvolutionOptions grid;
  grid.t_final = t_final;
  grid.samples = samples;
  AmplitudeTrajectory out;
  out.t = sample_times(grid);
  out.amplitudes.resize(samples, levels);
  auto integ = ode::make_dop853<Eigen::VectorXcd>(rhs, {rtol, 1e-3 * rtol});
  Eigen::VectorXcd b = b0;
  double t = 0.0;
  for (int s = 0; s < samples; ++s) {
    integ.integrate(t, b, out.t[s]);
    out.amplitudes.row(s) = b.transpose();
  }
  return out;
}

EffectiveModelSpec effective_ladder(const HamiltonianModel& model, int k0, int q, int count) {
  if (count < 2) throw ValidationError("effective ladder needs at least 2 levels");
  const DressedSpectrum s = dressed_spectrum(model);
  EffectiveModelSpec spec;
  const double eta = model.params().eta;
  for (int j = 0; j < count; ++j) spec.levels.push_back({0, k0 + j * q});
  for (int j = 0; j + 1 < count; ++j) {
    const RateEntry r = compute_rates(model, s, k0 + j * q, q, eta);
    spec.rates.push_back(r.theta);
    spec.detunings.push_back(r.eta_resonant - eta);
  }
  return spec;
}

Trajectory run_evolution(const EvolutionRequest& req) {
  const HamiltonianModel model(req.basis, req.params, req.chi_mode);
  const Eigen::VectorXcd psi0 = bare_state(req.basis, req.initial);
  if (req.dissipation) return evolve_lindblad(model, pure_density(psi0), *req.dissipation, req.options);
  return evolve_schrodinger(model, psi0, req.options);
}

ConvergedTrajectory convergence_escalation(const EvolutionRequest& req) {
  ConvergedTrajectory out;
  EvolutionRequest cur = req;
  for (int e = 0; e <= req.max_escalations; ++e) {
    out.trajectory = run_evolution(cur);
    out.cutoffs.push_back(out.trajectory.basis.n_max);
    out.final_mean_n.push_back(out.trajectory.mean_n.back());
    if (e > 0) {
      const double a = out.final_mean_n[e], b = out.final_mean_n[e - 1];
      if (std::abs(a - b) <= req.convergence_rtol * std::abs(a) + 1e-14) {
        out.converged = true;
        return out;
      }
    }
    cur.basis.n_max = out.trajectory.basis.n_max + req.options.cutoff_increment;
  }
  out.trajectory.meta.warnings.push_back("final <n> did not converge in the photon cutoff");
  return out;
}

}  // namespace dce
