#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "eddylab/elliptic.hpp"
#include "eddylab/grid.hpp"
#include "eddylab/linalg.hpp"
#include "eddylab/rng.hpp"
#include "eddylab/vortex.hpp"

namespace eddy {

enum class TimeScheme { SemiImplicitDiffusion_ExplicitNoise };

struct TimeStepConfig {
  double dt = 1e-4;
  double t_end = 0.0;
  TimeScheme scheme = TimeScheme::SemiImplicitDiffusion_ExplicitNoise;
  uint64_t seed = 0;
};

// Mean-square growth proxy for the explicit noise update:
// dt * max_x tr Q(x,x) / h^2. In a (kappa, dt) refinement study the norm
// growth collapsed onto this number alone: runs with equal indicator but
// kappa or dt varied fourfold behaved alike, growth appearing near 15 and
// clear blow-up by 240. tensor is kappa I + Q/2, as fed to the drift.
double noise_stability_indicator(const DiffusivityTensor& tensor, double dt);

// Largest safe indicator: observed growth onset (about 15) over a safety
// factor of 4. Crossing it does not abort a run; it flags configurations
// whose noise update injects faster than the implicit stage dissipates.
double noise_stability_limit();

// Shared read-only operators of one time-step configuration. The implicit
// matrix bakes in dt, so one SpdeOps serves exactly one step size.
struct SpdeOps {
  const Grid* grid = nullptr;
  double kappa = 0.0;
  double dt = 0.0;
  DiscreteOperator drift;      // div((kappa I + Q/2) grad .), Ito drift
  DiscreteOperator grad_form;  // unit-tensor operator; -<f, . f> is the
                               // discrete Dirichlet energy used by E(t)
  CsrMatrix implicit_lhs;      // I - dt * drift over interior unknowns
  std::vector<double> implicit_diag;
  const VortexBasis* basis = nullptr;  // null: deterministic drift only
};

SpdeOps make_spde_ops(const Grid& grid, const DiffusivityTensor& tensor,
                      const VortexBasis* basis, double dt);

// Everything one path owns: field, clock, counters, and scratch buffers so
// stepping never allocates. T is zero on non-interior nodes at all times.
struct SpdeState {
  double t = 0.0;
  long step_index = 0;
  uint64_t path = 0;
  CounterRng rng{0};
  ScalarField T;
  // Right-endpoint rectangle sum of the unit-tensor Dirichlet form at the
  // post-diffusion field: the quadrature under which the implicit scheme
  // satisfies the energy identity with a nonnegative remainder.
  double energy = 0.0;
  // Companion accumulators for the discrete Ito identity
  //   ||T_N||^2 + 2*diss_a + remainder - injected = ||T0||^2,
  // which holds pathwise to solver tolerance: diss_a sums dt * a-form at
  // T*, remainder sums dt^2 ||A T*||^2, injected sums dt ||B_U T*||^2.
  double diss_a = 0.0;
  double remainder = 0.0;
  double injected = 0.0;

  ScalarField t_star, adv;
  VectorField noise_field;
  std::vector<double> b, x;
  CgWorkspace cg_ws;
};

SpdeState make_state(const ScalarField& T0, uint64_t seed, uint64_t path);

// One step: implicit solve (I - dt drift) T* = T, energy accumulation at
// T*, then the Euler-Maruyama noise update T = T* + sqrt(dt) B_U T* with
// the fused field U = sum_j xi_j u_j, xi_j = N(0,1) draws keyed by
// (path, step_index, j). Skipped entirely when ops.basis is null, which is
// the deterministic effective solve. Throws if the inner solve stalls.
void step(SpdeState& state, const SpdeOps& ops);

// Advances until step_index reaches target_step (no-op if already past).
void advance_to(SpdeState& state, const SpdeOps& ops, long target_step);

// Rounds t/dt to the nearest step count; throws unless t is within 1e-9
// of that multiple. Keeps checkpoint bookkeeping exact.
long steps_for_time(double t, double dt);

// Backward Euler trajectory of the effective equation
// d_t T = div((kappa I + Q/2) grad T), returned at the checkpoint times.
// Uses the same step() path as the stochastic integrator with a null
// basis, so a zero-noise ensemble reproduces it bit for bit.
std::vector<ScalarField> solve_effective(const Grid& grid,
                                         const DiffusivityTensor& tensor,
                                         const ScalarField& T0,
                                         const TimeStepConfig& cfg,
                                         const std::vector<double>& checkpoints);

// Per-path checkpoint observables. Vectors run over checkpoints.
struct PathObservables {
  uint64_t path = 0;
  std::vector<double> phi_pairing;  // <phi, T(t_c)>
  std::vector<double> l2_sq;        // ||T(t_c)||^2
  std::vector<double> l1_abs;       // integral of |T(t_c)|
  std::vector<double> energy;       // E(t_c)
  // Ito identity terms at each checkpoint; see SpdeState.
  std::vector<double> diss_a;
  std::vector<double> remainder;
  std::vector<double> injected;
};

struct PathEnsemble {
  std::vector<double> times;
  std::vector<PathObservables> paths;
  // Shared deterministic trajectory and its observables, same checkpoints.
  std::vector<ScalarField> effective;
  std::vector<double> effective_phi;
  std::vector<double> effective_l2_sq;
  std::vector<double> effective_l1;
  double norm_T0_sq = 0.0;
  double kappa = 0.0;
  uint64_t seed = 0;
};

struct EnsembleConfig {
  TimeStepConfig time;
  std::vector<double> checkpoints;  // ascending multiples of dt; the last
                                    // must equal t_end
  int paths = 0;
  int threads = 1;
};

// Runs cfg.paths independent paths (path ids 0..P-1) under the transport
// noise of basis, recording observables against phi at the checkpoints,
// plus the shared effective trajectory. Paths are distributed over
// cfg.threads workers; results are identical for any thread count because
// every random draw is keyed by (seed, path, step, member).
PathEnsemble run_ensemble(const Grid& grid, const DiffusivityTensor& tensor,
                          const VortexBasis& basis, const ScalarField& T0,
                          const ScalarField& phi, const EnsembleConfig& cfg);

struct EnergyReport {
  double bound = 0.0;       // ||T0||^2 / (2 kappa)
  double max_ratio = 0.0;   // worst E(t_end)/bound over paths
  double mean_ratio = 0.0;
  int violations = 0;       // paths with ratio > 1 + tol
  // Mean and 95 percent half-width of (||T(t_end)||^2 + 2 kappa E) /
  // ||T0||^2, which the scheme keeps at 1 in expectation: the noise
  // injection dt ||B_U T*||^2 is balanced by the Ito drift's extra
  // dissipation, up to the corrector's O(h^2) defect.
  double balance_mean = 0.0;
  double balance_halfwidth = 0.0;
};

EnergyReport energy_report(const PathEnsemble& ens, double tol);

// One row per path per checkpoint:
// path_id,t,phi_pairing,l2norm_sq,energy_integral
void write_observables_csv(std::ostream& os, const PathEnsemble& ens);

}  // namespace eddy
