#include "qmegs/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "qmegs/errors.hpp"
#include "qmegs/linalg.hpp"

namespace qmegs::baselines {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
using cplx = std::complex<double>;

} // namespace

// ---------------------------------------------------------------------------
// ESPRIT (unit time step).
// ---------------------------------------------------------------------------

std::vector<double> esprit_from_samples(std::span<const cplx> samples, int n_modes) {
    const long n_data = static_cast<long>(samples.size()) - 1; // z_0..z_N
    if (n_data < 3 || n_data % 2 == 0)
        throw std::invalid_argument("esprit_from_samples: need samples z_0..z_N with N >= 3 odd");
    if (n_modes < 1 || n_modes > (n_data - 1) / 2)
        throw std::invalid_argument("esprit_from_samples: K must be in [1, (N-1)/2]");

    const long m = (n_data + 1) / 2; // square Hankel H_{ij} = z_{i+j}, i+j <= N-1
    auto z = std::make_shared<std::vector<cplx>>(samples.begin(), samples.end());

    linalg::LinearOperator op;
    op.rows = static_cast<int>(m);
    op.cols = static_cast<int>(m);
    op.apply = [z, m](const cplx* x, cplx* y) {
        for (long i = 0; i < m; ++i) {
            cplx acc{0, 0};
            const cplx* row = z->data() + i;
            for (long j = 0; j < m; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
    };
    op.apply_adj = [z, m](const cplx* x, cplx* y) {
        for (long j = 0; j < m; ++j) {
            cplx acc{0, 0};
            const cplx* col = z->data() + j;
            for (long i = 0; i < m; ++i) acc += std::conj(col[i]) * x[i];
            y[j] = acc;
        }
    };

    linalg::ComplexMatrix u = linalg::top_singular_subspace(op, n_modes, 1e-6);

    // U0 = U without its last row, U1 = U without its first row; the rotation
    // pinv(U1) U0 has eigenvalues exp(+i lambda) for Z(t) = sum p exp(-i lambda t).
    linalg::ComplexMatrix u1(static_cast<int>(m) - 1, n_modes);
    for (long i = 1; i < m; ++i)
        for (int c = 0; c < n_modes; ++c) u1(static_cast<int>(i) - 1, c) = u(static_cast<int>(i), c);

    linalg::ComplexMatrix rot(n_modes, n_modes);
    std::vector<cplx> rhs(m - 1);
    for (int c = 0; c < n_modes; ++c) {
        for (long i = 0; i + 1 < m; ++i) rhs[i] = u(static_cast<int>(i), c);
        std::vector<cplx> col = linalg::lstsq_complex(u1, rhs);
        for (int r = 0; r < n_modes; ++r) rot(r, c) = col[r];
    }

    std::vector<cplx> mu = linalg::small_complex_eig(rot);
    std::vector<double> out(mu.size());
    for (std::size_t k = 0; k < mu.size(); ++k) out[k] = std::arg(mu[k]);
    return out;
}

search::EstimateResult esprit_run(const spectrum::SpectralModel& model, const EspritConfig& config,
                                  Rng& rng) {
    if (!(config.total_time >= 3)) throw std::invalid_argument("esprit_run: T too small");
    if (config.shots_per_node < 1)
        throw std::invalid_argument("esprit_run: shots_per_node must be >= 1");
    long n = static_cast<long>(std::floor(config.total_time));
    if (n % 2 == 0) --n; // square Hankel needs an odd sample count
    if (config.n_modes < 1 || config.n_modes > (n - 1) / 2)
        throw std::invalid_argument("esprit_run: T too small for the requested K");

    std::vector<cplx> samples(n + 1);
    for (long t = 0; t <= n; ++t) {
        cplx acc{0, 0};
        for (int s = 0; s < config.shots_per_node; ++s)
            acc += sampler::hadamard_shot(model, static_cast<double>(t), rng).z;
        samples[t] = acc / static_cast<double>(config.shots_per_node);
    }

    std::vector<double> est = esprit_from_samples(samples, config.n_modes);

    search::EstimateResult res;
    res.estimates = std::move(est);
    res.t_max = static_cast<double>(n);
    res.t_total = static_cast<double>(config.shots_per_node) * static_cast<double>(n) *
                  static_cast<double>(n + 1) / 2.0;
    res.algorithm = "esprit";
    std::ostringstream os;
    os << "T=" << config.total_time << " N=" << n << " K=" << config.n_modes
       << " shots=" << config.shots_per_node;
    res.config_echo = os.str();
    return res;
}

// ---------------------------------------------------------------------------
// Textbook QPE for the ground-state energy.
// ---------------------------------------------------------------------------

namespace {

// squared normalized Dirichlet kernel; the x = 0 (mod 2 pi) singularity is
// removable with limit 1
double dirichlet_kernel(double x, double n_t) {
    const double e = std::remainder(x, kTwoPi);
    const double s = std::sin(0.5 * e);
    if (s == 0.0) return 1.0;
    const double v = std::sin(0.5 * n_t * e) / (n_t * s);
    return v * v;
}

} // namespace

std::vector<double> qpe_distribution(const spectrum::SpectralModel& model, int ancilla_bits) {
    if (ancilla_bits < 1 || ancilla_bits > 24)
        throw std::invalid_argument("qpe_distribution: ancilla count must be in [1, 24]");
    const long n_t = 1L << ancilla_bits;
    const auto& lam = model.eigenvalues();
    const auto& p = model.overlaps();
    std::vector<double> dist(n_t, 0.0);
    for (long idx = 0; idx < n_t; ++idx) {
        const long k = idx - n_t / 2;
        const double theta = kTwoPi * static_cast<double>(k) / static_cast<double>(n_t);
        double acc = 0;
        for (std::size_t m = 0; m < lam.size(); ++m)
            acc += p[m] * dirichlet_kernel(theta - lam[m], static_cast<double>(n_t));
        dist[idx] = acc;
    }
    return dist;
}

int qpe_default_samples(const spectrum::SpectralModel& model) {
    return static_cast<int>(std::ceil(6.0 / model.ground_overlap()));
}

search::EstimateResult qpe_run(const spectrum::SpectralModel& model, const QpeConfig& config,
                               Rng& rng) {
    if (config.n_samples < 1) throw std::invalid_argument("qpe_run: n_samples must be >= 1");
    const std::vector<double> dist = qpe_distribution(model, config.ancilla_bits);
    const long n_t = static_cast<long>(dist.size());

    std::vector<double> cdf(dist.size());
    double acc = 0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        acc += dist[i];
        cdf[i] = acc;
    }
    cdf.back() = std::max(cdf.back(), 1.0);

    long min_k = n_t; // above any outcome
    for (int s = 0; s < config.n_samples; ++s) {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const long idx = (it == cdf.end()) ? n_t - 1 : static_cast<long>(it - cdf.begin());
        min_k = std::min(min_k, idx - n_t / 2);
    }

    search::EstimateResult res;
    res.estimates = {kTwoPi * static_cast<double>(min_k) / static_cast<double>(n_t)};
    res.t_max = static_cast<double>(n_t);
    res.t_total = static_cast<double>(config.n_samples) * static_cast<double>(n_t);
    res.algorithm = "qpe";
    std::ostringstream os;
    os << "d=" << config.ancilla_bits << " n_samples=" << config.n_samples;
    res.config_echo = os.str();
    return res;
}

// ---------------------------------------------------------------------------
// MM-QCELS.
// ---------------------------------------------------------------------------

QcelsConfig qcels_schedule(double target_depth, int n_modes, double t0, int n0, int nj,
                           double sigma) {
    if (!(target_depth > 0) || !(t0 > 0))
        throw std::invalid_argument("qcels_schedule: depths must be positive");
    QcelsConfig cfg;
    cfg.n_modes = n_modes;
    cfg.t0 = t0;
    cfg.n0 = n0;
    cfg.nj = nj;
    cfg.sigma = sigma;
    cfg.levels = 1;
    while (t0 * std::pow(2.0, cfg.levels) <= target_depth) ++cfg.levels;
    return cfg;
}

double qcels_loss(const sampler::Dataset& dataset, std::span<const cplx> amplitudes,
                  std::span<const double> phases) {
    if (amplitudes.size() != phases.size())
        throw std::invalid_argument("qcels_loss: amplitude/phase count mismatch");
    if (dataset.shots.empty()) throw std::invalid_argument("qcels_loss: empty dataset");
    double acc = 0;
    for (const sampler::Shot& s : dataset.shots) {
        cplx fit{0, 0};
        for (std::size_t k = 0; k < phases.size(); ++k) {
            const double a = -phases[k] * s.t;
            fit += amplitudes[k] * cplx{std::cos(a), std::sin(a)};
        }
        acc += std::norm(s.z - fit);
    }
    return acc / static_cast<double>(dataset.shots.size());
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// variable projection: optimal amplitudes for fixed phases, then the loss
double vp_loss(const sampler::Dataset& ds, const std::vector<double>& phases,
               std::vector<cplx>* amplitudes_out) {
    const int n = static_cast<int>(ds.shots.size());
    const int k = static_cast<int>(phases.size());
    linalg::ComplexMatrix a(n, k);
    std::vector<cplx> b(n);
    for (int i = 0; i < n; ++i) {
        const double t = ds.shots[i].t;
        for (int c = 0; c < k; ++c) {
            const double ang = -phases[c] * t;
            a(i, c) = cplx{std::cos(ang), std::sin(ang)};
        }
        b[i] = ds.shots[i].z;
    }
    std::vector<cplx> r;
    try {
        r = linalg::lstsq_complex(a, b);
    } catch (const RankError&) {
        return kInf; // coincident phases; reject this candidate
    }
    double acc = 0;
    for (int i = 0; i < n; ++i) {
        cplx fit{0, 0};
        for (int c = 0; c < k; ++c) fit += a(i, c) * r[c];
        acc += std::norm(b[i] - fit);
    }
    if (amplitudes_out) *amplitudes_out = std::move(r);
    return acc / n;
}

// golden-section scan; assumes local unimodality inside the trust region
double golden_min(const std::function<double(double)>& f, double lo, double hi, double* fx_out) {
    const double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int it = 0; it < 40; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    if (f1 <= f2) {
        *fx_out = f1;
        return x1;
    }
    *fx_out = f2;
    return x2;
}

// coordinate descent within the level's trust region; returns false when the
// loss never became finite (fit degenerated)
bool refine_level(const sampler::Dataset& ds, std::vector<double>& phases, double half_width) {
    const std::vector<double> center = phases;
    double cur = vp_loss(ds, phases, nullptr);
    for (int pass = 0; pass < 3; ++pass) {
        for (std::size_t k = 0; k < phases.size(); ++k) {
            const double lo = center[k] - half_width;
            const double hi = center[k] + half_width;
            std::vector<double> probe = phases;
            auto f = [&](double x) {
                probe[k] = x;
                return vp_loss(ds, probe, nullptr);
            };
            double fx = kInf;
            const double x = golden_min(f, lo, hi, &fx);
            if (fx < cur) {
                phases[k] = x;
                cur = fx;
            }
        }
    }
    return std::isfinite(cur);
}

} // namespace

search::EstimateResult mmqcels_run(const spectrum::SpectralModel& model, const QcelsConfig& config,
                                   Rng& rng) {
    if (config.n_modes < 1) throw std::invalid_argument("mmqcels_run: K must be >= 1");
    if (!(config.t0 > 0) || config.n0 < 1 || config.nj < 1 || config.levels < 1 ||
        !(config.sigma > 0))
        throw std::invalid_argument("mmqcels_run: invalid schedule");

    double t_max = 0, t_total = 0;
    bool degraded = false;

    sampler::Dataset ds0 =
        sampler::generate_dataset(model, config.n0, config.t0, config.sigma, rng);
    {
        const sampler::Cost c = sampler::dataset_cost(ds0);
        t_max = std::max(t_max, c.t_max);
        t_total += c.t_total;
    }

    // level-0 initialization: blocked peaks of the level-0 filter
    search::FilterGrid grid = search::make_grid(config.t0, config.init_q);
    grid.values = search::filter_eval(ds0, grid.thetas);
    std::vector<double> phases =
        search::peak_search(grid, config.n_modes, config.init_alpha, config.t0);

    if (!refine_level(ds0, phases, kPi / config.t0)) degraded = true;

    double prev_depth = config.t0;
    for (int level = 1; level < config.levels; ++level) {
        const double depth = config.t0 * std::pow(2.0, level);
        sampler::Dataset ds =
            sampler::generate_dataset(model, config.nj, depth, config.sigma, rng);
        const sampler::Cost c = sampler::dataset_cost(ds);
        t_max = std::max(t_max, c.t_max);
        t_total += c.t_total;
        if (!refine_level(ds, phases, kPi / prev_depth)) degraded = true;
        prev_depth = depth;
    }

    search::EstimateResult res;
    res.estimates = std::move(phases);
    res.t_max = t_max;
    res.t_total = t_total;
    res.algorithm = "mmqcels";
    res.degraded = degraded;
    std::ostringstream os;
    os << "K=" << config.n_modes << " T0=" << config.t0 << " N0=" << config.n0
       << " Nj=" << config.nj << " levels=" << config.levels << " sigma=" << config.sigma;
    res.config_echo = os.str();
    return res;
}

} // namespace qmegs::baselines
