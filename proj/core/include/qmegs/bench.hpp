#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmegs/spectrum.hpp"

namespace qmegs::bench {

/// One (algorithm, depth, trial) outcome. Failed runs carry error = NaN and
/// a "failed:..." metric tag.
struct SweepRecord {
    std::string algorithm;
    double depth = 0; // the schedule's T
    int trial = 0;
    double error = 0;
    double t_max = 0;
    double t_total = 0;
    std::string metric; // "maxmin", "maxmin-2pi", "single", or "failed:..."
};

/// max over dominant eigenvalues of the distance to the nearest estimate.
double maxmin_error(std::span<const double> estimates, const spectrum::SpectralModel& model,
                    bool wrapped = false);

/// Depths T = base * factor^n for n = 1..count.
struct Schedule {
    double base = 100;
    double factor = 2;
    int count = 7;

    std::vector<double> depths() const;
};

struct ExperimentConfig {
    spectrum::SpectralModel model;
    std::vector<std::string> algorithms; // qmegs, qmegs-int, esprit, qpe, mmqcels
    Schedule schedule;
    int trials = 20;
    std::uint64_t master_seed = 0;
    int workers = 1;
    /// ESPRIT's total time grows quadratically with depth; schedule points
    /// above this cap are skipped for it (recorded in sweep metadata).
    double esprit_depth_cap = 3200;
    /// QPE ancilla count; -1 derives d = round(log2 T) per schedule point.
    int qpe_ancilla = -1;
};

/// Run every (algorithm, depth, trial) cell with its own RNG stream derived
/// from the master seed, collect errors and costs, and return the records
/// sorted by (algorithm, depth, trial). Output is identical for any worker
/// count; per-run failures become NaN rows instead of aborting.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& config);

/// CSV with header algorithm,T,trial,error,T_max,T_total,metric and
/// shortest round-trip float formatting.
std::string records_to_csv(const std::vector<SweepRecord>& records);
void emit_csv(const std::vector<SweepRecord>& records, const std::string& path);
std::vector<SweepRecord> records_from_csv(const std::string& text);
std::vector<SweepRecord> load_csv(const std::string& path);

enum class CostAxis { TMax, TTotal };

/// Standalone SVG: log-log axes, one series per algorithm with the median
/// error against the median cost and an interquartile band. All-NaN series
/// are skipped with a warning annotation. Byte-deterministic for identical
/// records.
std::string records_to_svg(const std::vector<SweepRecord>& records, CostAxis axis);
void emit_plot(const std::vector<SweepRecord>& records, CostAxis axis, const std::string& path);

} // namespace qmegs::bench
