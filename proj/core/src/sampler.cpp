#include "qmegs/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qmegs/errors.hpp"

namespace qmegs::sampler {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{}) {
        if (s == "nan" || s == "-nan") return std::nan("");
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::runtime_error("parse_double: bad token '" + s + "'");
    }
    return v;
}

} // namespace

double sample_time(double depth, double sigma, Rng& rng) {
    if (!(depth > 0)) throw std::invalid_argument("sample_time: depth must be positive");
    if (!(sigma > 0)) throw std::invalid_argument("sample_time: sigma must be positive");
    const double s = rng.normal(0.0, depth);
    return (std::abs(s) <= sigma * depth) ? s : 0.0;
}

Shot hadamard_shot(const spectrum::SpectralModel& model, double t, Rng& rng) {
    if (t == 0.0) return Shot{0.0, {1.0, 0.0}};
    const std::complex<double> z = spectrum::exact_signal(model, t);
    const int x = rng.sign_with_prob(0.5 * (1.0 + z.real()));
    const int y = rng.sign_with_prob(0.5 * (1.0 + z.imag()));
    return Shot{t, {static_cast<double>(x), static_cast<double>(y)}};
}

Dataset generate_dataset(const spectrum::SpectralModel& model, int n_shots, double depth,
                         double sigma, Rng& rng) {
    if (n_shots < 1) throw std::invalid_argument("generate_dataset: n_shots must be >= 1");
    Dataset ds;
    ds.depth = depth;
    ds.sigma = sigma;
    ds.mode = TimeMode::Real;
    ds.shots.reserve(n_shots);
    for (int n = 0; n < n_shots; ++n) {
        const double t = sample_time(depth, sigma, rng);
        ds.shots.push_back(hadamard_shot(model, t, rng));
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Integer-power sampling distribution.
// ---------------------------------------------------------------------------

IntegerTimeDist::IntegerTimeDist(double depth, double sigma) {
    if (!(depth >= 1)) throw std::invalid_argument("IntegerTimeDist: depth must be >= 1");
    if (!(sigma > 0)) throw std::invalid_argument("IntegerTimeDist: sigma must be positive");

    k_max_ = static_cast<long>(std::floor(sigma * depth + 1e-9));
    if (k_max_ < 0) k_max_ = 0;

    // Normalizer of the periodic Gaussian: W = 1 / sum_j exp(-2 pi^2 T^2 j^2).
    // Terms beyond |j| = 20 are below 1e-300 for T >= 1.
    double wden = 0;
    for (int j = -20; j <= 20; ++j) wden += std::exp(-2.0 * kPi * kPi * depth * depth * j * j);
    const double w = 1.0 / wden;

    // Fourier coefficients hat(phi)_p(k) = W exp(-k^2 / 2T^2) / (sqrt(2 pi) T)
    // sum to phi_p(0) = 1 over all k (Poisson summation), so the mass outside
    // the support folds into k = 0 as 1 - sum_{|k| <= k_max} hat(phi)_p(k).
    auto coeff = [&](long k) {
        return w * std::exp(-0.5 * static_cast<double>(k) * k / (depth * depth)) /
               (std::sqrt(2.0 * kPi) * depth);
    };

    probs_.assign(2 * k_max_ + 1, 0.0);
    double inside = 0;
    for (long k = 1; k <= k_max_; ++k) {
        const double c = coeff(k);
        probs_[k_max_ + k] = c;
        probs_[k_max_ - k] = c;
        inside += 2.0 * c;
    }
    probs_[k_max_] = std::max(0.0, 1.0 - inside);

    cdf_.resize(probs_.size());
    double acc = 0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        cdf_[i] = acc;
    }
    cdf_.back() = 1.0;
}

double IntegerTimeDist::prob(long k) const {
    if (std::labs(k) > k_max_) return 0.0;
    return probs_[k_max_ + k];
}

long IntegerTimeDist::sample(Rng& rng) const {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const long i = (it == cdf_.end()) ? static_cast<long>(cdf_.size()) - 1
                                      : static_cast<long>(it - cdf_.begin());
    return i - k_max_;
}

long sample_integer_time(double depth, double sigma, Rng& rng) {
    return IntegerTimeDist(depth, sigma).sample(rng);
}

Dataset generate_dataset_integer(const spectrum::SpectralModel& model, int n_shots, double depth,
                                 double sigma, Rng& rng) {
    if (n_shots < 1) throw std::invalid_argument("generate_dataset_integer: n_shots must be >= 1");
    const IntegerTimeDist dist(depth, sigma);
    Dataset ds;
    ds.depth = depth;
    ds.sigma = sigma;
    ds.mode = TimeMode::Integer;
    ds.shots.reserve(n_shots);
    for (int n = 0; n < n_shots; ++n) {
        const double t = static_cast<double>(dist.sample(rng));
        ds.shots.push_back(hadamard_shot(model, t, rng));
    }
    return ds;
}

Cost dataset_cost(const Dataset& dataset) {
    Cost c;
    for (const Shot& s : dataset.shots) {
        const double a = std::abs(s.t);
        c.t_max = std::max(c.t_max, a);
        c.t_total += a;
    }
    return c;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
    out << "# depth " << fmt_double(dataset.depth) << "\n";
    out << "# sigma " << fmt_double(dataset.sigma) << "\n";
    out << "# mode " << (dataset.mode == TimeMode::Integer ? "integer" : "real") << "\n";
    out << "# t re im\n";
    for (const Shot& s : dataset.shots)
        out << fmt_double(s.t) << " " << fmt_double(s.z.real()) << " " << fmt_double(s.z.imag())
            << "\n";
    if (!out) throw std::runtime_error("save_dataset: write failed for " + path);
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
    Dataset ds;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string key;
            hs >> key;
            if (key == "depth") {
                std::string v;
                hs >> v;
                ds.depth = parse_double(v);
            } else if (key == "sigma") {
                std::string v;
                hs >> v;
                ds.sigma = parse_double(v);
            } else if (key == "mode") {
                std::string v;
                hs >> v;
                ds.mode = (v == "integer") ? TimeMode::Integer : TimeMode::Real;
            }
            continue;
        }
        std::istringstream ls(line);
        std::string a, b, c;
        if (!(ls >> a >> b >> c)) throw std::runtime_error("load_dataset: malformed row: " + line);
        ds.shots.push_back(Shot{parse_double(a), {parse_double(b), parse_double(c)}});
    }
    return ds;
}

} // namespace qmegs::sampler
