#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qmegs/linalg.hpp"

namespace qmegs::spectrum {

/// Where a model came from, for serialization and sweep metadata.
struct Provenance {
    std::string builder; // "toy", "tfim", "hubbard", "explicit"
    std::vector<std::pair<std::string, double>> parameters;
    std::uint64_t seed = 0;
};

/// Eigenvalue/overlap pairs plus the dominant index set. This is the ground
/// truth every estimator consumes; no state vector is ever materialized.
///
/// Construction enforces: overlaps sum to 1 (1e-12), overlaps nonnegative,
/// eigenvalues ascending and strictly inside (-pi, pi), dominant indices
/// valid and distinct, and the sufficiently-dominant condition
/// p_min > p_tail (violations raise ModelConditionError).
class SpectralModel {
public:
    SpectralModel(std::vector<double> eigenvalues, std::vector<double> overlaps,
                  std::vector<int> dominant, Provenance provenance = {});

    const std::vector<double>& eigenvalues() const { return eigenvalues_; }
    const std::vector<double>& overlaps() const { return overlaps_; }
    const std::vector<int>& dominant() const { return dominant_; } // sorted
    const Provenance& provenance() const { return provenance_; }

    int size() const { return static_cast<int>(eigenvalues_.size()); }
    double p_min() const { return p_min_; }
    double p_tail() const { return p_tail_; }

    /// Overlap of the dominant mode with the smallest eigenvalue.
    double ground_overlap() const;
    double ground_eigenvalue() const;

private:
    std::vector<double> eigenvalues_;
    std::vector<double> overlaps_;
    std::vector<int> dominant_;
    Provenance provenance_;
    double p_min_ = 0, p_tail_ = 0;
};

struct GapReport {
    double delta_dom = 0; // min gap among dominant eigenvalues; +inf if only one
    double delta = 0;     // min gap from a dominant eigenvalue to any other
    double p_min = 0;
    double p_tail = 0;
};

/// Transverse-field Ising chain on `sites` spins with periodic boundary:
/// H = -(sum_i Z_i Z_{i+1} + Z_L Z_1) - g sum_i X_i, qubit 1 most significant.
linalg::SymMatrix build_tfim(int sites, double coupling);

/// One-dimensional Hubbard chain on `sites` spinful sites, open boundary,
/// encoded on 2*sites qubits by the Jordan-Wigner transformation with the
/// spin-up block first (modes 1..L up, L+1..2L down):
/// H = -t sum_{j,s} (c^dag_{j,s} c_{j+1,s} + h.c.)
///     + U sum_j (n_{j,up} - 1/2)(n_{j,dn} - 1/2).
linalg::SymMatrix build_hubbard(int sites, double hopping, double interaction);

/// Rescale a spectrum into [-pi/4, pi/4]: lambda -> pi*lambda / (4 max|lambda|).
std::vector<double> normalize_spectrum(const std::vector<double>& eigenvalues);

/// Synthetic model with a near-degenerate dominant pair: lambda_1 seeded
/// uniform in [-pi/4, -0.1], lambda_2 = lambda_1 + gap, the remaining M-2
/// values uniform in [lambda_2 + 0.1, pi/4], then normalized; overlaps
/// 0.4/0.4 on the pair, tail split by a Dirichlet draw.
SpectralModel build_toy(int dim, double gap, std::uint64_t seed);

/// Attach overlaps to a spectrum: exact weights at the dominant indices,
/// the residual mass split across the other modes by a seeded uniform
/// Dirichlet draw (normalized i.i.d. exponentials).
SpectralModel assign_overlaps(std::vector<double> eigenvalues,
                              const std::vector<int>& dominant_indices,
                              const std::vector<double>& dominant_weights,
                              std::uint64_t seed, Provenance provenance = {});

/// Z(t) = sum_m p_m exp(-i lambda_m t).
std::complex<double> exact_signal(const SpectralModel& model, double t);

GapReport gap_report(const SpectralModel& model);

/// Convenience builders for the benchmark models: diagonalize, normalize,
/// put weight 0.4/0.4 on the two lowest eigenvalues, seed the tail split.
SpectralModel tfim_model(int sites, double coupling, std::uint64_t seed);
SpectralModel hubbard_model(int sites, double hopping, double interaction, std::uint64_t seed);

/// JSON (de)serialization: eigenvalues[], overlaps[], dominant[], provenance.
std::string model_to_json(const SpectralModel& model);
SpectralModel model_from_json(const std::string& text);
void save_model(const SpectralModel& model, const std::string& path);
SpectralModel load_model(const std::string& path);

} // namespace qmegs::spectrum
