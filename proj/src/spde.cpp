#include "eddylab/spde.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>

namespace eddy {

double noise_stability_indicator(const DiffusivityTensor& tensor, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Grid& g = *tensor.grid;
  double max_trq = 0.0;
  for (int node : g.interior_ids()) {
    // a = kappa I + Q/2, so tr Q = 2 (tr a - 2 kappa)
    const SymMat2 m = tensor.at(node);
    const double trq = 2.0 * (m.a11 + m.a22 - 2.0 * tensor.kappa);
    max_trq = std::max(max_trq, trq);
  }
  return dt * max_trq / (g.h * g.h);
}

double noise_stability_limit() { return 15.0 / 4.0; }

SpdeOps make_spde_ops(const Grid& grid, const DiffusivityTensor& tensor,
                      const VortexBasis* basis, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  check_same_grid(&grid, tensor.grid);
  if (basis) check_same_grid(&grid, basis->grid);
  SpdeOps ops;
  ops.grid = &grid;
  ops.kappa = tensor.kappa;
  ops.dt = dt;
  ops.basis = basis;
  ops.drift = assemble_diffusion(grid, tensor);
  ops.grad_form = assemble_diffusion(grid, DiffusivityTensor::isotropic(grid, 1.0));
  ops.implicit_lhs =
      CsrMatrix::identity(ops.drift.size()).add_scaled(ops.drift.matrix, -dt);
  ops.implicit_diag = ops.implicit_lhs.diagonal();
  return ops;
}

SpdeState make_state(const ScalarField& T0, uint64_t seed, uint64_t path) {
  if (T0.grid == nullptr) throw std::invalid_argument("initial field has no grid");
  const Grid& g = *T0.grid;
  SpdeState s;
  s.path = path;
  s.rng = CounterRng(seed);
  s.T = T0;
  s.T.pin_exterior();
  s.t_star = ScalarField(g);
  s.adv = ScalarField(g);
  s.noise_field = VectorField(g);
  s.b.assign(g.interior_count(), 0.0);
  s.x.assign(g.interior_count(), 0.0);
  return s;
}

void step(SpdeState& s, const SpdeOps& ops) {
  const Grid& g = *ops.grid;
  check_same_grid(&g, s.T.grid);
  const auto& ids = g.interior_ids();
  const int n = static_cast<int>(ids.size());

  for (int k = 0; k < n; ++k) s.b[k] = s.T.v[ids[k]];
  std::copy(s.b.begin(), s.b.end(), s.x.begin());
  const CgResult cg = conjugate_gradient(
      [&ops](const double* in, double* out) { ops.implicit_lhs.multiply(in, out); },
      n, s.b.data(), s.x.data(), 1e-10, 400, ops.implicit_diag, s.cg_ws);
  if (!cg.converged)
    throw std::runtime_error("implicit diffusion solve stalled at path " +
                             std::to_string(s.path) + ", step " +
                             std::to_string(s.step_index) + " (residual " +
                             std::to_string(cg.relative_residual) + ")");

  // Rectangle-rule energy at T*: under backward Euler this makes
  // ||T||^2 + 2 kappa E telescoping with a nonnegative remainder.
  ops.grad_form.matrix.multiply(s.x.data(), s.b.data());
  s.energy += ops.dt * (-(g.h * g.h) * vec_dot(s.x, s.b));

  if (ops.basis != nullptr && ops.basis->size() > 0) {
    for (int k = 0; k < n; ++k) s.t_star.v[ids[k]] = s.x[k];
    s.noise_field.clear();
    for (int j = 0; j < ops.basis->size(); ++j) {
      const double xi = s.rng.normal(s.path, static_cast<uint64_t>(s.step_index),
                                     static_cast<uint64_t>(j));
      ops.basis->accumulate(j, xi, s.noise_field);
    }
    // B is linear in the advecting field, so one fused application of
    // U = sum_j xi_j u_j equals the mode-by-mode sum exactly.
    apply_advection(g, s.noise_field, s.t_star, s.adv);
    const double sq = std::sqrt(ops.dt);
    for (int node : ids) s.T.v[node] = s.t_star.v[node] + sq * s.adv.v[node];
  } else {
    for (int k = 0; k < n; ++k) s.T.v[ids[k]] = s.x[k];
  }

  s.step_index += 1;
  // t derived from the counter, not accumulated, so it carries no drift
  s.t = ops.dt * static_cast<double>(s.step_index);
}

void advance_to(SpdeState& s, const SpdeOps& ops, long target_step) {
  while (s.step_index < target_step) step(s, ops);
}

long steps_for_time(double t, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const long n = std::lround(t / dt);
  if (n < 0 || std::abs(t - static_cast<double>(n) * dt) >
                   1e-9 * std::max(1.0, std::abs(t)))
    throw std::invalid_argument("time " + std::to_string(t) +
                                " is not a nonnegative multiple of dt");
  return n;
}

namespace {

// Validates checkpoints (strictly ascending positive multiples of dt whose
// last entry is t_end) and converts them to step counts.
std::vector<long> checkpoint_steps(const TimeStepConfig& cfg,
                                   const std::vector<double>& checkpoints) {
  if (checkpoints.empty())
    throw std::invalid_argument("at least one checkpoint is required");
  std::vector<long> steps;
  steps.reserve(checkpoints.size());
  long prev = 0;
  for (double tc : checkpoints) {
    const long n = steps_for_time(tc, cfg.dt);
    if (n <= prev)
      throw std::invalid_argument("checkpoints must be strictly ascending and positive");
    steps.push_back(n);
    prev = n;
  }
  if (std::abs(cfg.t_end - static_cast<double>(prev) * cfg.dt) >
      1e-9 * std::max(1.0, std::abs(cfg.t_end)))
    throw std::invalid_argument("t_end must equal the final checkpoint");
  return steps;
}

}  // namespace

std::vector<ScalarField> solve_effective(const Grid& grid,
                                         const DiffusivityTensor& tensor,
                                         const ScalarField& T0,
                                         const TimeStepConfig& cfg,
                                         const std::vector<double>& checkpoints) {
  check_same_grid(&grid, T0.grid);
  const std::vector<long> steps = checkpoint_steps(cfg, checkpoints);
  const SpdeOps ops = make_spde_ops(grid, tensor, nullptr, cfg.dt);
  SpdeState st = make_state(T0, cfg.seed, 0);
  std::vector<ScalarField> out;
  out.reserve(steps.size());
  for (long target : steps) {
    advance_to(st, ops, target);
    out.push_back(st.T);
  }
  return out;
}

PathEnsemble run_ensemble(const Grid& grid, const DiffusivityTensor& tensor,
                          const VortexBasis& basis, const ScalarField& T0,
                          const ScalarField& phi, const EnsembleConfig& cfg) {
  check_same_grid(&grid, T0.grid);
  check_same_grid(&grid, phi.grid);
  if (cfg.paths < 1) throw std::invalid_argument("paths must be at least 1");
  if (cfg.threads < 1) throw std::invalid_argument("threads must be at least 1");
  const std::vector<long> steps = checkpoint_steps(cfg.time, cfg.checkpoints);
  const SpdeOps ops = make_spde_ops(grid, tensor, &basis, cfg.time.dt);

  PathEnsemble ens;
  ens.times = cfg.checkpoints;
  ens.kappa = tensor.kappa;
  ens.seed = cfg.time.seed;
  ens.effective = solve_effective(grid, tensor, T0, cfg.time, cfg.checkpoints);
  for (const ScalarField& f : ens.effective) {
    ens.effective_phi.push_back(dot(phi, f));
    ens.effective_l2_sq.push_back(dot(f, f));
    ens.effective_l1.push_back(integral_abs(f));
  }
  {
    ScalarField pinned = T0;
    pinned.pin_exterior();
    ens.norm_T0_sq = dot(pinned, pinned);
  }

  ens.paths.resize(cfg.paths);
  const int workers = std::min(cfg.threads, cfg.paths);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    const int lo = static_cast<int>(static_cast<long>(cfg.paths) * w / workers);
    const int hi = static_cast<int>(static_cast<long>(cfg.paths) * (w + 1) / workers);
    pool.emplace_back([&, lo, hi, w]() {
      try {
        for (int p = lo; p < hi; ++p) {
          SpdeState st = make_state(T0, cfg.time.seed, static_cast<uint64_t>(p));
          PathObservables& ob = ens.paths[p];
          ob.path = static_cast<uint64_t>(p);
          ob.phi_pairing.reserve(steps.size());
          ob.l2_sq.reserve(steps.size());
          ob.l1_abs.reserve(steps.size());
          ob.energy.reserve(steps.size());
          for (long target : steps) {
            advance_to(st, ops, target);
            ob.phi_pairing.push_back(dot(phi, st.T));
            ob.l2_sq.push_back(dot(st.T, st.T));
            ob.l1_abs.push_back(integral_abs(st.T));
            ob.energy.push_back(st.energy);
          }
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return ens;
}

EnergyReport energy_report(const PathEnsemble& ens, double tol) {
  if (ens.paths.empty() || ens.times.empty())
    throw std::invalid_argument("ensemble has no recorded observables");
  if (!(ens.kappa > 0.0)) throw std::invalid_argument("ensemble kappa must be positive");
  EnergyReport r;
  r.bound = ens.norm_T0_sq / (2.0 * ens.kappa);
  const size_t last = ens.times.size() - 1;
  double sum_ratio = 0.0, sum_bal = 0.0, sum_bal_sq = 0.0;
  for (const PathObservables& p : ens.paths) {
    const double ratio = p.energy[last] / r.bound;
    r.max_ratio = std::max(r.max_ratio, ratio);
    sum_ratio += ratio;
    if (ratio > 1.0 + tol) r.violations += 1;
    const double bal =
        (p.l2_sq[last] + 2.0 * ens.kappa * p.energy[last]) / ens.norm_T0_sq;
    sum_bal += bal;
    sum_bal_sq += bal * bal;
  }
  const double np = static_cast<double>(ens.paths.size());
  r.mean_ratio = sum_ratio / np;
  r.balance_mean = sum_bal / np;
  if (ens.paths.size() > 1) {
    const double var =
        std::max(0.0, (sum_bal_sq - np * r.balance_mean * r.balance_mean) / (np - 1.0));
    r.balance_halfwidth = 1.96 * std::sqrt(var / np);
  }
  return r;
}

void write_observables_csv(std::ostream& os, const PathEnsemble& ens) {
  os << "path_id,t,phi_pairing,l2norm_sq,energy_integral\n";
  os.precision(17);
  for (const PathObservables& p : ens.paths)
    for (size_t c = 0; c < ens.times.size(); ++c)
      os << p.path << ',' << ens.times[c] << ',' << p.phi_pairing[c] << ','
         << p.l2_sq[c] << ',' << p.energy[c] << '\n';
}

}  // namespace eddy
