#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "qmegs/rng.hpp"
#include "qmegs/sampler.hpp"
#include "qmegs/spectrum.hpp"

namespace qmegs::search {

/// Parameters of the Gaussian-filtered search. Invariants (checked by
/// validate): all fields positive, q < alpha/3, and alpha/q an integer so
/// that block-interval endpoints land exactly on grid points.
struct QmegsConfig {
    int n_shots = 500;  // N
    double depth = 0;   // T
    double sigma = 1;
    double alpha = 5;
    double q = 0.05;
    int n_peaks = 2;    // K

    void validate() const;
    std::string echo() const;
};

/// Candidate grid theta_j = -pi + j q/T for 0 <= j <= J, J = floor(2 pi T/q),
/// with the filter values once evaluated.
struct FilterGrid {
    std::vector<double> thetas;
    std::vector<double> values;
    double step = 0; // q/T
};

FilterGrid make_grid(double depth, double q);

/// Complex empirical filter (1/N) sum_n Z_n exp(i theta t_n) at each theta.
/// Evaluation is split into fixed-size blocks of thetas so the result is
/// bit-identical for any thread count; within a theta the shot order is
/// fixed. threads <= 0 picks hardware concurrency.
std::vector<std::complex<double>> filter_sum(const sampler::Dataset& dataset,
                                             std::span<const double> thetas,
                                             int threads = 0);

/// G(theta) = |filter_sum|.
std::vector<double> filter_eval(const sampler::Dataset& dataset,
                                std::span<const double> thetas, int threads = 0);

/// Expected filter in the untruncated limit:
/// G(theta) = sum_m p_m exp(-T^2 (theta - lambda_m)^2 / 2).
double filter_oracle(const spectrum::SpectralModel& model, double theta, double depth);

/// Contribution of the non-dominant modes alone (diagnostic).
double filter_oracle_tail(const spectrum::SpectralModel& model, double theta, double depth);

/// Iterative blocked argmax: K times, pick the largest eligible grid value
/// (lowest index wins ties), then exclude the open interval of half-width
/// alpha/T around it. Boundary grid points stay eligible. With wrap = true
/// intervals wrap around +-pi and distances are taken mod 2 pi. Throws
/// ExhaustionError when no eligible point remains.
std::vector<double> peak_search(const FilterGrid& grid, int n_peaks, double alpha,
                                double depth, bool wrap = false);

struct EstimateResult {
    std::vector<double> estimates;
    double t_max = 0;
    double t_total = 0;
    std::string algorithm;
    std::string config_echo;
    bool degraded = false; // optimizer stagnated; estimates are best-found
};

/// Full pipeline: truncated-Gaussian dataset, filter on the candidate grid,
/// blocked peak search. Deterministic given the RNG state.
EstimateResult qmegs_run(const spectrum::SpectralModel& model, const QmegsConfig& config,
                         Rng& rng);

/// Integer-power variant: times drawn from the periodic-Gaussian integer
/// distribution, grid and blocking interpreted mod 2 pi. Requires T >= 1.
EstimateResult qmegs_int_run(const spectrum::SpectralModel& model, const QmegsConfig& config,
                             Rng& rng);

enum class Regime { General, GappedDominant, GappedTail };

struct ModelStats {
    double p_min = 0;
    double p_tail = 0;
    double delta_dom = 0;
    double delta = 0;
    int n_dominant = 1;
};

/// Multiplicative constants in the parameter prescriptions. Defaults follow
/// the numerical setup (c1 matching the block constant 5) and a Hoeffding
/// factor for sqrt(2)-bounded variables; they are defaults, not claims.
struct TheoremConstants {
    double c1 = 5;
    double c2 = 8;
    double c3 = 6;
};

struct TheoremParams {
    QmegsConfig config;
    bool large_n_warning = false; // N impractically large (gap nearly closed)
};

/// Configuration satisfying the regime's lower bounds: block/truncation
/// constants from log^(1/2) scales, q capped below alpha/3 and snapped so
/// alpha/q is an integer, T = alpha/epsilon (raised to c3*alpha/gap in the
/// gapped regimes), and N from the matching deviation scale.
TheoremParams theorem_params(Regime regime, const ModelStats& stats, double epsilon,
                             double eta, const TheoremConstants& constants = {});

/// 2-pi-periodic Gaussian phi_p(x) = W sum_j exp(-(x+2j pi)^2 T^2/2) with W
/// chosen so phi_p(0) = 1. Requires T >= 1 (OutOfRegimeError otherwise).
double periodic_gaussian(double x, double depth);

/// min{|u-v mod 2pi|, |v-u mod 2pi|}, in [0, pi].
double wrapped_distance(double u, double v);

} // namespace qmegs::search
