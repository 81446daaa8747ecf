#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qmegs/rng.hpp"
#include "qmegs/sampler.hpp"
#include "qmegs/search.hpp"
#include "qmegs/spectrum.hpp"

namespace qmegs::baselines {

/// ESPRIT with unit time step. N = floor(T), decremented to odd; samples
/// Z_0..Z_N, one Hadamard-test average per node.
struct EspritConfig {
    double total_time = 0; // T; N = floor(T) forced odd
    int n_modes = 2;       // K
    int shots_per_node = 1;
};

/// Core ESPRIT computation from the per-node sample averages z_0..z_N
/// (N odd): build the square Hankel H_{ij} = z_{i+j} of size (N+1)/2, take
/// the top-K left singular subspace U, drop the last / first row to form
/// U0 / U1, and return the angles of the eigenvalues of pinv(U1) U0.
/// With Z(t) = sum p_m exp(-i lambda_m t) those eigenvalues are
/// exp(+i lambda_m), so the angle is the eigenvalue estimate directly.
std::vector<double> esprit_from_samples(std::span<const std::complex<double>> samples,
                                        int n_modes);

search::EstimateResult esprit_run(const spectrum::SpectralModel& model,
                                  const EspritConfig& config, Rng& rng);

/// Textbook phase estimation specialised to ground-state energy: sample the
/// ancilla-register outcome distribution and keep the smallest outcome.
struct QpeConfig {
    int ancilla_bits = 8; // d; N_t = 2^d
    int n_samples = 15;   // N_QPE
};

/// Outcome probabilities P(k) for k in [-N_t/2, N_t/2 - 1]:
/// P(k) = sum_m p_m K_{N_t}(2 pi k / N_t - lambda_m) with the squared
/// normalized Dirichlet kernel K_N(x) = sin^2(xN/2) / (N^2 sin^2(x/2));
/// the removable singularity at x = 0 (mod 2 pi) evaluates to 1.
std::vector<double> qpe_distribution(const spectrum::SpectralModel& model, int ancilla_bits);

/// ceil(6 / p_ground), the sampling count used in the experiments.
int qpe_default_samples(const spectrum::SpectralModel& model);

search::EstimateResult qpe_run(const spectrum::SpectralModel& model, const QpeConfig& config,
                               Rng& rng);

/// Multi-level complex-exponential least squares.
struct QcelsConfig {
    int n_modes = 2;    // K
    double t0 = 100;    // initial depth
    int n0 = 1000;      // shots at level 0
    int nj = 500;       // shots at levels >= 1
    int levels = 1;     // depths t0 * 2^j for j = 0..levels-1
    double sigma = 1;
    // level-0 initialization grid (blocked peaks of the level-0 filter)
    double init_alpha = 5;
    double init_q = 0.05;
};

/// levels chosen so t0 * 2^(levels-1) <= target_depth.
QcelsConfig qcels_schedule(double target_depth, int n_modes = 2, double t0 = 100,
                           int n0 = 1000, int nj = 500, double sigma = 1);

/// L = (1/N) sum_n |Z_n - sum_k r_k exp(-i theta_k t_n)|^2.
double qcels_loss(const sampler::Dataset& dataset, std::span<const std::complex<double>> amplitudes,
                  std::span<const double> phases);

/// Level 0: dataset at t0, phases initialized from the blocked peaks of the
/// filter grid, then variable-projection coordinate descent (amplitudes by
/// least squares, each phase by golden-section inside the trust region,
/// three passes). Levels j >= 1 refine inside a shrinking trust region of
/// half-width pi / T_{j-1}. Stagnation returns best-found with the degraded
/// flag set, never silently.
search::EstimateResult mmqcels_run(const spectrum::SpectralModel& model,
                                   const QcelsConfig& config, Rng& rng);

} // namespace qmegs::baselines
