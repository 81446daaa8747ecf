#include "qmegs/search.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qmegs/errors.hpp"

namespace qmegs::search {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Theta-axis block size for filter evaluation. Fixed (not derived from the
// worker count) so results are bit-identical however the work is split.
constexpr std::size_t kThetaBlock = 2048;

} // namespace

void QmegsConfig::validate() const {
    if (n_shots < 1) throw std::invalid_argument("QmegsConfig: N must be >= 1");
    if (!(depth > 0)) throw std::invalid_argument("QmegsConfig: T must be positive");
    if (!(sigma > 0)) throw std::invalid_argument("QmegsConfig: sigma must be positive");
    if (!(alpha > 0)) throw std::invalid_argument("QmegsConfig: alpha must be positive");
    if (!(q > 0)) throw std::invalid_argument("QmegsConfig: q must be positive");
    if (n_peaks < 1) throw std::invalid_argument("QmegsConfig: K must be >= 1");
    if (!(q < alpha / 3.0))
        throw std::invalid_argument("QmegsConfig: q must be smaller than alpha/3");
    const double ratio = alpha / q;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("QmegsConfig: alpha/q must be an integer");
}

std::string QmegsConfig::echo() const {
    std::ostringstream os;
    os << "N=" << n_shots << " T=" << depth << " sigma=" << sigma << " alpha=" << alpha
       << " q=" << q << " K=" << n_peaks;
    return os.str();
}

FilterGrid make_grid(double depth, double q) {
    if (!(depth > 0) || !(q > 0)) throw std::invalid_argument("make_grid: T and q must be positive");
    const long j_max = static_cast<long>(std::floor(kTwoPi * depth / q));
    FilterGrid grid;
    grid.step = q / depth;
    grid.thetas.resize(j_max + 1);
    for (long j = 0; j <= j_max; ++j) grid.thetas[j] = -kPi + static_cast<double>(j) * grid.step;
    return grid;
}

std::vector<std::complex<double>> filter_sum(const sampler::Dataset& dataset,
                                             std::span<const double> thetas, int threads) {
    using cplx = std::complex<double>;
    if (dataset.shots.empty()) throw std::invalid_argument("filter_sum: empty dataset");
    if (thetas.empty()) throw std::invalid_argument("filter_sum: empty grid");

    const std::size_t n_theta = thetas.size();
    const std::size_t n_shots = dataset.shots.size();
    const double inv_n = 1.0 / static_cast<double>(n_shots);

    // uniform spacing enables a per-shot phase recurrence within each block
    double step = (n_theta >= 2) ? thetas[1] - thetas[0] : 0.0;
    bool uniform = n_theta >= 2;
    for (std::size_t j = 0; uniform && j < n_theta; ++j)
        if (std::abs(thetas[j] - (thetas[0] + static_cast<double>(j) * step)) > 1e-12)
            uniform = false;

    std::vector<cplx> out(n_theta);
    const std::size_t n_blocks = (n_theta + kThetaBlock - 1) / kThetaBlock;

    auto do_block = [&](std::size_t blk) {
        const std::size_t lo = blk * kThetaBlock;
        const std::size_t hi = std::min(lo + kThetaBlock, n_theta);
        const std::size_t len = hi - lo;
        double acc_re[kThetaBlock];
        double acc_im[kThetaBlock];
        std::fill(acc_re, acc_re + len, 0.0);
        std::fill(acc_im, acc_im + len, 0.0);
        for (std::size_t n = 0; n < n_shots; ++n) {
            const double t = dataset.shots[n].t;
            const double zr = dataset.shots[n].z.real();
            const double zi = dataset.shots[n].z.imag();
            if (uniform) {
                // phase recurrence w_{j+1} = w_j * exp(i step t); raw doubles
                // keep the loop free of the library's nan-checked multiply,
                // and two interleaved rotators overlap the dependency chains
                const double a0 = thetas[lo] * t;
                const double d = step * t;
                const double dr = std::cos(d), di = std::sin(d);
                double w0r = std::cos(a0), w0i = std::sin(a0);
                double w1r = w0r * dr - w0i * di;
                double w1i = w0r * di + w0i * dr;
                const double d2r = dr * dr - di * di;
                const double d2i = 2.0 * dr * di;
                std::size_t j = 0;
                for (; j + 1 < len; j += 2) {
                    acc_re[j] += zr * w0r - zi * w0i;
                    acc_im[j] += zr * w0i + zi * w0r;
                    acc_re[j + 1] += zr * w1r - zi * w1i;
                    acc_im[j + 1] += zr * w1i + zi * w1r;
                    const double n0r = w0r * d2r - w0i * d2i;
                    w0i = w0r * d2i + w0i * d2r;
                    w0r = n0r;
                    const double n1r = w1r * d2r - w1i * d2i;
                    w1i = w1r * d2i + w1i * d2r;
                    w1r = n1r;
                }
                if (j < len) {
                    acc_re[j] += zr * w0r - zi * w0i;
                    acc_im[j] += zr * w0i + zi * w0r;
                }
            } else {
                for (std::size_t j = 0; j < len; ++j) {
                    const double a = thetas[lo + j] * t;
                    const double wr = std::cos(a), wi = std::sin(a);
                    acc_re[j] += zr * wr - zi * wi;
                    acc_im[j] += zr * wi + zi * wr;
                }
            }
        }
        for (std::size_t j = 0; j < len; ++j)
            out[lo + j] = cplx{acc_re[j] * inv_n, acc_im[j] * inv_n};
    };

    unsigned n_workers = threads > 0 ? static_cast<unsigned>(threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(n_blocks));
    if (n_workers <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) do_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w)
            pool.emplace_back([&]() {
                for (std::size_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
                    do_block(b);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

std::vector<double> filter_eval(const sampler::Dataset& dataset, std::span<const double> thetas,
                                int threads) {
    const auto sums = filter_sum(dataset, thetas, threads);
    std::vector<double> g(sums.size());
    for (std::size_t j = 0; j < sums.size(); ++j) g[j] = std::abs(sums[j]);
    return g;
}

double filter_oracle(const spectrum::SpectralModel& model, double theta, double depth) {
    double acc = 0;
    const auto& lam = model.eigenvalues();
    const auto& p = model.overlaps();
    for (std::size_t m = 0; m < lam.size(); ++m) {
        const double x = depth * (theta - lam[m]);
        acc += p[m] * std::exp(-0.5 * x * x);
    }
    return acc;
}

double filter_oracle_tail(const spectrum::SpectralModel& model, double theta, double depth) {
    double acc = 0;
    const auto& lam = model.eigenvalues();
    const auto& p = model.overlaps();
    const auto& dom = model.dominant();
    std::size_t di = 0;
    for (std::size_t m = 0; m < lam.size(); ++m) {
        if (di < dom.size() && static_cast<int>(m) == dom[di]) {
            ++di;
            continue;
        }
        const double x = depth * (theta - lam[m]);
        acc += p[m] * std::exp(-0.5 * x * x);
    }
    return acc;
}

std::vector<double> peak_search(const FilterGrid& grid, int n_peaks, double alpha, double depth,
                                bool wrap) {
    const std::size_t n = grid.thetas.size();
    if (n == 0) throw std::invalid_argument("peak_search: empty grid");
    if (grid.values.size() != n)
        throw std::invalid_argument("peak_search: grid values not evaluated");
    if (n_peaks < 1) throw std::invalid_argument("peak_search: K must be >= 1");
    if (!(alpha > 0) || !(depth > 0))
        throw std::invalid_argument("peak_search: alpha and T must be positive");

    const double radius = alpha / depth;
    double step = grid.step;
    if (!(step > 0) && n >= 2) step = grid.thetas[1] - grid.thetas[0];

    // Block intervals are open: a grid point exactly radius away stays
    // eligible. In index space the cutoff alpha/q is snapped to an integer
    // when it is one, so the boundary point is handled exactly.
    long d_max = 0;
    if (step > 0) {
        const double hs = radius / step;
        const double rounded = std::round(hs);
        if (std::abs(hs - rounded) <= 1e-6 * std::max(1.0, hs))
            d_max = static_cast<long>(rounded) - 1;
        else
            d_max = static_cast<long>(std::floor(hs));
    }

    std::vector<char> blocked(n, 0);
    std::vector<double> peaks;
    peaks.reserve(n_peaks);
    for (int k = 0; k < n_peaks; ++k) {
        long best = -1;
        double best_val = -1;
        for (std::size_t j = 0; j < n; ++j) {
            if (blocked[j]) continue;
            if (grid.values[j] > best_val) {
                best_val = grid.values[j];
                best = static_cast<long>(j);
            }
        }
        if (best < 0)
            throw ExhaustionError("peak_search: no eligible grid point left", k);
        peaks.push_back(grid.thetas[best]);

        if (!wrap) {
            const long lo = std::max<long>(0, best - d_max);
            const long hi = std::min<long>(static_cast<long>(n) - 1, best + d_max);
            for (long j = lo; j <= hi; ++j) blocked[j] = 1;
        } else {
            const double center = grid.thetas[best];
            for (std::size_t j = 0; j < n; ++j)
                if (wrapped_distance(grid.thetas[j], center) < radius * (1.0 - 1e-12))
                    blocked[j] = 1;
        }
    }
    return peaks;
}

namespace {

search::EstimateResult run_pipeline(const spectrum::SpectralModel& model,
                                    const QmegsConfig& config, Rng& rng, bool integer_mode) {
    config.validate();
    if (integer_mode && !(config.depth >= 1))
        throw OutOfRegimeError("qmegs_int_run: integer mode requires T >= 1");

    sampler::Dataset ds =
        integer_mode
            ? sampler::generate_dataset_integer(model, config.n_shots, config.depth, config.sigma,
                                                rng)
            : sampler::generate_dataset(model, config.n_shots, config.depth, config.sigma, rng);

    FilterGrid grid = make_grid(config.depth, config.q);
    grid.values = filter_eval(ds, grid.thetas);
    std::vector<double> peaks =
        peak_search(grid, config.n_peaks, config.alpha, config.depth, integer_mode);

    // structural guarantee of the blocking scheme
    const double radius = config.alpha / config.depth;
    for (std::size_t i = 0; i < peaks.size(); ++i)
        for (std::size_t j = i + 1; j < peaks.size(); ++j) {
            const double d = integer_mode ? wrapped_distance(peaks[i], peaks[j])
                                          : std::abs(peaks[i] - peaks[j]);
            if (d < radius * (1.0 - 1e-9))
                throw std::logic_error("qmegs: blocked peaks closer than alpha/T");
        }

    sampler::Cost cost = sampler::dataset_cost(ds);
    search::EstimateResult res;
    res.estimates = std::move(peaks);
    res.t_max = cost.t_max;
    res.t_total = cost.t_total;
    res.algorithm = integer_mode ? "qmegs-int" : "qmegs";
    res.config_echo = config.echo();
    return res;
}

} // namespace

EstimateResult qmegs_run(const spectrum::SpectralModel& model, const QmegsConfig& config,
                         Rng& rng) {
    return run_pipeline(model, config, rng, false);
}

EstimateResult qmegs_int_run(const spectrum::SpectralModel& model, const QmegsConfig& config,
                             Rng& rng) {
    return run_pipeline(model, config, rng, true);
}

TheoremParams theorem_params(Regime regime, const ModelStats& stats, double epsilon, double eta,
                             const TheoremConstants& constants) {
    if (!(stats.p_min > stats.p_tail))
        throw ModelConditionError("theorem_params: p_min must exceed p_tail");
    if (!(epsilon > 0)) throw std::invalid_argument("theorem_params: epsilon must be positive");
    if (!(eta > 0 && eta < 1)) throw std::invalid_argument("theorem_params: eta must be in (0,1)");
    if (stats.n_dominant < 1)
        throw std::invalid_argument("theorem_params: dominant count must be >= 1");

    const double gap = stats.p_min - stats.p_tail;
    auto log_scale = [](double x) {
        // max(1, log^{1/2}(1/x)) with a floor to keep the log finite
        const double lx = std::log(1.0 / std::max(x, 1e-300));
        return std::max(1.0, std::sqrt(std::max(0.0, lx)));
    };

    double alpha = constants.c1 * log_scale(gap);
    double sigma = constants.c1 * log_scale(gap);
    // p_min / (p_tail + gap/2) = p_min / ((p_min + p_tail)/2) > 1
    double q_bound =
        std::sqrt(std::max(0.0, std::log(stats.p_min / (stats.p_tail + 0.5 * gap))));
    double noise_scale = gap;
    double depth = alpha / epsilon;

    if (regime == Regime::GappedDominant) {
        if (!(stats.delta_dom > 0) || !std::isfinite(stats.delta_dom))
            throw std::invalid_argument("theorem_params: gapped-dominant needs delta_dom > 0");
        const double zeta = (stats.p_tail > 0) ? std::min(gap / stats.p_tail, 1.0) : 1.0;
        const double scale = zeta * stats.p_tail;
        if (scale > 0) {
            sigma = std::max(sigma, constants.c1 * log_scale(scale));
            alpha = std::max(alpha, sigma);
            q_bound = std::min(q_bound, scale / sigma);
            noise_scale = scale;
        }
        depth = std::max(alpha / epsilon, constants.c3 * alpha / stats.delta_dom);
    } else if (regime == Regime::GappedTail) {
        if (!(stats.delta > 0) || !std::isfinite(stats.delta))
            throw std::invalid_argument("theorem_params: gapped-tail needs delta > 0");
        const double zeta = stats.p_min / 8.0; // any value below p_min/4 works
        sigma = std::max(sigma, constants.c1 * log_scale(zeta));
        alpha = std::max(alpha, sigma);
        q_bound = std::min(q_bound, zeta / sigma);
        noise_scale = zeta;
        depth = std::max(alpha / epsilon, constants.c3 * alpha / stats.delta);
    }

    const double q_cap = std::min(q_bound, alpha / 3.0);
    const long n_steps =
        std::max<long>(4, static_cast<long>(std::ceil(alpha / std::max(q_cap, 1e-300) - 1e-9)));
    const double q = alpha / static_cast<double>(n_steps);

    const double n_raw = std::ceil(
        constants.c2 / (noise_scale * noise_scale) *
        std::log((depth / q + static_cast<double>(stats.n_dominant)) / eta));

    TheoremParams out;
    out.large_n_warning = !(n_raw <= 1e6);
    out.config.n_shots = (n_raw >= 2147483647.0) ? 2147483647 : static_cast<int>(n_raw);
    out.config.depth = depth;
    out.config.sigma = sigma;
    out.config.alpha = alpha;
    out.config.q = q;
    out.config.n_peaks = stats.n_dominant;
    out.config.validate();
    return out;
}

double periodic_gaussian(double x, double depth) {
    if (!(depth >= 1))
        throw OutOfRegimeError("periodic_gaussian: requires T >= 1");
    const double xr = std::remainder(x, kTwoPi);
    auto gauss = [&](double y) { return std::exp(-0.5 * y * y * depth * depth); };
    double num = 0, den = 0;
    for (int j = -20; j <= 20; ++j) {
        num += gauss(xr + kTwoPi * j);
        den += gauss(kTwoPi * j);
    }
    return num / den;
}

double wrapped_distance(double u, double v) {
    return std::abs(std::remainder(u - v, kTwoPi));
}

} // namespace qmegs::search
