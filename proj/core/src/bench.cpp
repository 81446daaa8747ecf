#include "qmegs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qmegs/baselines.hpp"
#include "qmegs/errors.hpp"
#include "qmegs/rng.hpp"
#include "qmegs/search.hpp"

namespace qmegs::bench {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) {
        if (s == "nan" || s == "-nan") return kNan;
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::runtime_error("csv: bad number '" + std::string(s) + "'");
    }
    return v;
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    if (s.size() > 120) s.resize(120);
    return s;
}

} // namespace

double maxmin_error(std::span<const double> estimates, const spectrum::SpectralModel& model,
                    bool wrapped) {
    if (estimates.empty()) throw std::invalid_argument("maxmin_error: no estimates");
    double worst = 0;
    for (int d : model.dominant()) {
        const double lam = model.eigenvalues()[d];
        double best = std::numeric_limits<double>::infinity();
        for (double est : estimates) {
            const double dist = wrapped ? search::wrapped_distance(est, lam) : std::abs(est - lam);
            best = std::min(best, dist);
        }
        worst = std::max(worst, best);
    }
    return worst;
}

std::vector<double> Schedule::depths() const {
    if (count < 1) throw std::invalid_argument("Schedule: count must be >= 1");
    if (!(base > 0) || !(factor > 0)) throw std::invalid_argument("Schedule: base/factor invalid");
    std::vector<double> out(count);
    double t = base;
    for (int n = 0; n < count; ++n) {
        t *= factor;
        out[n] = t;
    }
    return out;
}

namespace {

struct Task {
    std::string algorithm;
    double depth;
    int depth_index;
    int trial;
};

SweepRecord run_one(const ExperimentConfig& cfg, const Task& task) {
    const std::uint64_t seed = hash_combine(hash_combine(cfg.master_seed, fnv1a(task.algorithm)),
                                            hash_combine(task.depth_index, task.trial));
    Rng rng(seed);

    SweepRecord rec;
    rec.algorithm = task.algorithm;
    rec.depth = task.depth;
    rec.trial = task.trial;

    if (task.algorithm == "qmegs" || task.algorithm == "qmegs-int") {
        search::QmegsConfig qc;
        qc.n_shots = 500;
        qc.depth = task.depth;
        qc.sigma = 1;
        qc.alpha = 5;
        qc.q = 0.05;
        qc.n_peaks = 2;
        const bool wrapped = task.algorithm == "qmegs-int";
        search::EstimateResult r = wrapped ? search::qmegs_int_run(cfg.model, qc, rng)
                                           : search::qmegs_run(cfg.model, qc, rng);
        rec.error = maxmin_error(r.estimates, cfg.model, wrapped);
        rec.t_max = r.t_max;
        rec.t_total = r.t_total;
        rec.metric = wrapped ? "maxmin-2pi" : "maxmin";
    } else if (task.algorithm == "esprit") {
        baselines::EspritConfig ec;
        ec.total_time = task.depth;
        ec.n_modes = 2;
        ec.shots_per_node = 1;
        search::EstimateResult r = baselines::esprit_run(cfg.model, ec, rng);
        rec.error = maxmin_error(r.estimates, cfg.model, false);
        rec.t_max = r.t_max;
        rec.t_total = r.t_total;
        rec.metric = "maxmin";
    } else if (task.algorithm == "qpe") {
        baselines::QpeConfig pc;
        pc.ancilla_bits = cfg.qpe_ancilla > 0
                              ? cfg.qpe_ancilla
                              : static_cast<int>(std::lround(std::log2(task.depth)));
        pc.n_samples = baselines::qpe_default_samples(cfg.model);
        search::EstimateResult r = baselines::qpe_run(cfg.model, pc, rng);
        rec.error = std::abs(r.estimates.at(0) - cfg.model.ground_eigenvalue());
        rec.t_max = r.t_max;
        rec.t_total = r.t_total;
        rec.metric = "single";
    } else if (task.algorithm == "mmqcels") {
        baselines::QcelsConfig qc = baselines::qcels_schedule(task.depth);
        search::EstimateResult r = baselines::mmqcels_run(cfg.model, qc, rng);
        rec.error = maxmin_error(r.estimates, cfg.model, false);
        rec.t_max = r.t_max;
        rec.t_total = r.t_total;
        rec.metric = r.degraded ? "maxmin-degraded" : "maxmin";
    }
    return rec;
}

} // namespace

std::vector<SweepRecord> run_sweep(const ExperimentConfig& cfg) {
    static const std::vector<std::string> known = {"qmegs", "qmegs-int", "esprit", "qpe",
                                                   "mmqcels"};
    if (cfg.algorithms.empty()) throw std::invalid_argument("run_sweep: no algorithms");
    if (cfg.trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
    for (const std::string& a : cfg.algorithms)
        if (std::find(known.begin(), known.end(), a) == known.end())
            throw std::invalid_argument("run_sweep: unknown algorithm '" + a + "'");

    const std::vector<double> depths = cfg.schedule.depths();
    std::vector<Task> tasks;
    for (const std::string& algo : cfg.algorithms) {
        for (int n = 0; n < static_cast<int>(depths.size()); ++n) {
            if (algo == "esprit" && depths[n] > cfg.esprit_depth_cap) continue;
            for (int trial = 0; trial < cfg.trials; ++trial)
                tasks.push_back(Task{algo, depths[n], n + 1, trial});
        }
    }

    std::vector<SweepRecord> records(tasks.size());
    auto work = [&](std::size_t i) {
        try {
            records[i] = run_one(cfg, tasks[i]);
        } catch (const std::exception& e) {
            SweepRecord rec;
            rec.algorithm = tasks[i].algorithm;
            rec.depth = tasks[i].depth;
            rec.trial = tasks[i].trial;
            rec.error = kNan;
            rec.t_max = kNan;
            rec.t_total = kNan;
            rec.metric = "failed:" + sanitize(e.what());
            records[i] = rec;
        }
    };

    const int workers = std::max(1, std::min<int>(cfg.workers, static_cast<int>(tasks.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
                    work(i);
            });
        for (auto& th : pool) th.join();
    }

    std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
        if (a.algorithm != b.algorithm) return a.algorithm < b.algorithm;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.trial < b.trial;
    });
    return records;
}

std::string records_to_csv(const std::vector<SweepRecord>& records) {
    std::string out = "algorithm,T,trial,error,T_max,T_total,metric\n";
    for (const SweepRecord& r : records) {
        out += r.algorithm;
        out += ',';
        out += fmt_double(r.depth);
        out += ',';
        out += std::to_string(r.trial);
        out += ',';
        out += fmt_double(r.error);
        out += ',';
        out += fmt_double(r.t_max);
        out += ',';
        out += fmt_double(r.t_total);
        out += ',';
        out += r.metric;
        out += '\n';
    }
    return out;
}

void emit_csv(const std::vector<SweepRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    out << records_to_csv(records);
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

std::vector<SweepRecord> records_from_csv(const std::string& text) {
    std::vector<SweepRecord> out;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue; // header
        }
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (fields.size() < 6) {
            const std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos)
                throw std::runtime_error("csv: malformed row: " + line);
            fields.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        fields.push_back(line.substr(pos)); // metric may hold sanitized text
        SweepRecord r;
        r.algorithm = fields[0];
        r.depth = parse_double(fields[1]);
        r.trial = static_cast<int>(parse_double(fields[2]));
        r.error = parse_double(fields[3]);
        r.t_max = parse_double(fields[4]);
        r.t_total = parse_double(fields[5]);
        r.metric = fields[6];
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SweepRecord> load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return records_from_csv(ss.str());
}

void emit_plot(const std::vector<SweepRecord>& records, CostAxis axis, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_plot: cannot open " + path);
    out << records_to_svg(records, axis);
    if (!out) throw std::runtime_error("emit_plot: write failed for " + path);
}

} // namespace qmegs::bench
