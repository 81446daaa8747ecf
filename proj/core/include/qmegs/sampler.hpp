#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qmegs/rng.hpp"
#include "qmegs/spectrum.hpp"

namespace qmegs::sampler {

/// One Hadamard-test record. For t != 0 the outcome is X + iY with
/// X, Y in {-1, +1}; for t = 0 the value is exactly 1.
struct Shot {
    double t = 0;
    std::complex<double> z{1.0, 0.0};
};

enum class TimeMode { Real, Integer };

struct Dataset {
    std::vector<Shot> shots;
    double depth = 0; // T
    double sigma = 0;
    TimeMode mode = TimeMode::Real;
};

struct Cost {
    double t_max = 0;
    double t_total = 0;
};

/// Draw from the truncated Gaussian a(t): s ~ N(0, T^2), returned as-is when
/// |s| <= sigma*T, otherwise mapped to 0 (the excess mass sits on the atom
/// at the origin).
double sample_time(double depth, double sigma, Rng& rng);

/// Simulate one Hadamard test at time t. X = +1 with probability
/// (1 + Re Z(t))/2, Y = +1 with probability (1 + Im Z(t))/2, drawn in that
/// order; E[z] = Z(t) exactly. Negative t is simulated at the signed time,
/// which matches running the circuit for |t| and conjugating.
Shot hadamard_shot(const spectrum::SpectralModel& model, double t, Rng& rng);

Dataset generate_dataset(const spectrum::SpectralModel& model, int n_shots,
                         double depth, double sigma, Rng& rng);

/// Explicit probability table for the integer-power sampling distribution
/// a(k) on {-floor(sigma*T), ..., floor(sigma*T)}: proportional to the
/// Fourier coefficients of the periodic Gaussian, with all out-of-range
/// mass folded into k = 0. Built once per (T, sigma); sampled by inverse CDF.
class IntegerTimeDist {
public:
    IntegerTimeDist(double depth, double sigma);

    long k_max() const { return k_max_; }
    double prob(long k) const;
    long sample(Rng& rng) const;

private:
    long k_max_;
    std::vector<double> probs_; // index k + k_max
    std::vector<double> cdf_;
};

long sample_integer_time(double depth, double sigma, Rng& rng);

Dataset generate_dataset_integer(const spectrum::SpectralModel& model, int n_shots,
                                 double depth, double sigma, Rng& rng);

/// (T_max, T_total) = (max_n |t_n|, sum_n |t_n|).
Cost dataset_cost(const Dataset& dataset);

/// Columnar text round trip: one "t re(z) im(z)" row per shot, full float
/// precision, plus a small header carrying depth/sigma/mode.
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

} // namespace qmegs::sampler
