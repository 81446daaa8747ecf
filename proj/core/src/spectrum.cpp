#include "qmegs/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "qmegs/errors.hpp"
#include "qmegs/rng.hpp"

namespace qmegs::spectrum {

namespace {

constexpr double kPi = 3.14159265358979323846;

} // namespace

SpectralModel::SpectralModel(std::vector<double> eigenvalues, std::vector<double> overlaps,
                             std::vector<int> dominant, Provenance provenance)
    : eigenvalues_(std::move(eigenvalues)),
      overlaps_(std::move(overlaps)),
      dominant_(std::move(dominant)),
      provenance_(std::move(provenance)) {
    const int m = static_cast<int>(eigenvalues_.size());
    if (m == 0) throw std::invalid_argument("SpectralModel: empty spectrum");
    if (overlaps_.size() != eigenvalues_.size())
        throw std::invalid_argument("SpectralModel: overlap count does not match spectrum");
    for (int i = 0; i + 1 < m; ++i)
        if (eigenvalues_[i] > eigenvalues_[i + 1])
            throw std::invalid_argument("SpectralModel: eigenvalues must be ascending");
    for (double lam : eigenvalues_)
        if (!(lam > -kPi && lam < kPi))
            throw std::invalid_argument("SpectralModel: eigenvalues must lie strictly inside (-pi, pi)");

    double sum = 0;
    for (double p : overlaps_) {
        if (!(p >= 0)) throw std::invalid_argument("SpectralModel: overlaps must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("SpectralModel: overlaps must sum to 1 (got " +
                                    std::to_string(sum) + ")");

    if (dominant_.empty()) throw std::invalid_argument("SpectralModel: dominant set is empty");
    std::sort(dominant_.begin(), dominant_.end());
    for (std::size_t i = 0; i < dominant_.size(); ++i) {
        if (dominant_[i] < 0 || dominant_[i] >= m)
            throw std::invalid_argument("SpectralModel: dominant index out of range");
        if (i > 0 && dominant_[i] == dominant_[i - 1])
            throw std::invalid_argument("SpectralModel: duplicate dominant index");
    }

    p_min_ = std::numeric_limits<double>::infinity();
    double p_dom = 0;
    for (int d : dominant_) {
        p_min_ = std::min(p_min_, overlaps_[d]);
        p_dom += overlaps_[d];
    }
    p_tail_ = std::max(0.0, sum - p_dom);
    if (!(p_min_ > p_tail_))
        throw ModelConditionError("SpectralModel: p_min = " + std::to_string(p_min_) +
                                  " does not exceed p_tail = " + std::to_string(p_tail_));
}

double SpectralModel::ground_overlap() const { return overlaps_[dominant_.front()]; }
double SpectralModel::ground_eigenvalue() const { return eigenvalues_[dominant_.front()]; }

// ---------------------------------------------------------------------------
// Hamiltonian builders.
// ---------------------------------------------------------------------------

linalg::SymMatrix build_tfim(int sites, double coupling) {
    if (sites < 2 || sites > 12) throw std::invalid_argument("build_tfim: sites must be in [2, 12]");
    const int n = 1 << sites;
    linalg::SymMatrix h(n);
    for (int b = 0; b < n; ++b) {
        // -(sum_{i=1}^{L-1} Z_i Z_{i+1} + Z_L Z_1); qubit 1 is the most
        // significant bit, Z eigenvalue +1 on bit 0.
        double zz = 0;
        for (int i = 1; i <= sites; ++i) {
            const int j = (i % sites) + 1;
            const int zi = ((b >> (sites - i)) & 1) ? -1 : 1;
            const int zj = ((b >> (sites - j)) & 1) ? -1 : 1;
            zz += zi * zj;
        }
        h.add(b, b, -zz);
        for (int i = 1; i <= sites; ++i) {
            const int flipped = b ^ (1 << (sites - i));
            if (flipped > b) h.add(b, flipped, -coupling);
        }
    }
    return h;
}

linalg::SymMatrix build_hubbard(int sites, double hopping, double interaction) {
    if (sites < 2 || sites > 5) throw std::invalid_argument("build_hubbard: sites must be in [2, 5]");
    const int modes = 2 * sites;
    const int n = 1 << modes;
    linalg::SymMatrix h(n);

    auto bit = [&](int state, int mode) { return (state >> (modes - mode)) & 1; };

    // hopping between adjacent Jordan-Wigner modes: (X X + Y Y)/2 swaps
    // occupations 01 <-> 10 with amplitude 1, no string in between
    std::vector<std::pair<int, int>> hops;
    for (int j = 1; j < sites; ++j) {
        hops.emplace_back(j, j + 1);                 // spin up block
        hops.emplace_back(sites + j, sites + j + 1); // spin down block
    }

    for (int b = 0; b < n; ++b) {
        double diag = 0;
        for (int j = 1; j <= sites; ++j) {
            const int zu = bit(b, j) ? -1 : 1;
            const int zd = bit(b, sites + j) ? -1 : 1;
            diag += 0.25 * interaction * zu * zd;
        }
        h.add(b, b, diag);
        for (const auto& [a, c] : hops) {
            if (bit(b, a) == bit(b, c)) continue;
            const int swapped = b ^ (1 << (modes - a)) ^ (1 << (modes - c));
            if (swapped > b) h.add(b, swapped, -hopping);
        }
    }
    return h;
}

std::vector<double> normalize_spectrum(const std::vector<double>& eigenvalues) {
    if (eigenvalues.empty()) throw std::invalid_argument("normalize_spectrum: empty spectrum");
    double max_abs = 0;
    for (double lam : eigenvalues) max_abs = std::max(max_abs, std::abs(lam));
    if (max_abs == 0.0)
        throw std::domain_error("normalize_spectrum: all-zero spectrum, scale would divide by zero");
    std::vector<double> out(eigenvalues.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = 0.25 * kPi * (eigenvalues[i] / max_abs);
    return out;
}

SpectralModel assign_overlaps(std::vector<double> eigenvalues,
                              const std::vector<int>& dominant_indices,
                              const std::vector<double>& dominant_weights, std::uint64_t seed,
                              Provenance provenance) {
    const int m = static_cast<int>(eigenvalues.size());
    if (dominant_indices.size() != dominant_weights.size())
        throw std::invalid_argument("assign_overlaps: index/weight count mismatch");
    if (dominant_indices.empty())
        throw std::invalid_argument("assign_overlaps: no dominant indices");
    double wsum = 0;
    for (double w : dominant_weights) {
        if (!(w > 0)) throw std::invalid_argument("assign_overlaps: weights must be positive");
        wsum += w;
    }
    if (!(wsum < 1.0))
        throw std::invalid_argument("assign_overlaps: dominant weights must sum to less than 1");
    if (static_cast<int>(dominant_indices.size()) >= m)
        throw std::invalid_argument("assign_overlaps: no modes left for the tail");

    std::vector<double> p(m, 0.0);
    std::vector<char> is_dom(m, 0);
    for (std::size_t i = 0; i < dominant_indices.size(); ++i) {
        const int d = dominant_indices[i];
        if (d < 0 || d >= m) throw std::invalid_argument("assign_overlaps: index out of range");
        if (is_dom[d]) throw std::invalid_argument("assign_overlaps: duplicate dominant index");
        is_dom[d] = 1;
        p[d] = dominant_weights[i];
    }

    // tail: uniform Dirichlet split of the residual mass
    Rng rng(seed);
    const double residual = 1.0 - wsum;
    std::vector<double> gamma;
    gamma.reserve(m);
    double gsum = 0;
    for (int i = 0; i < m; ++i) {
        if (is_dom[i]) continue;
        const double g = -std::log1p(-rng.uniform());
        gamma.push_back(g);
        gsum += g;
    }
    std::size_t gi = 0;
    for (int i = 0; i < m; ++i) {
        if (is_dom[i]) continue;
        p[i] = (gsum > 0) ? residual * (gamma[gi] / gsum)
                          : residual / static_cast<double>(gamma.size());
        ++gi;
    }

    return SpectralModel(std::move(eigenvalues), std::move(p), dominant_indices,
                         std::move(provenance));
}

SpectralModel build_toy(int dim, double gap, std::uint64_t seed) {
    if (dim < 3) throw std::invalid_argument("build_toy: dimension must be >= 3");
    if (!(gap > 0 && gap < 1)) throw std::invalid_argument("build_toy: gap must be in (0, 1)");

    const double lo = -0.25 * kPi;
    const double hi = std::min(-0.1, 0.25 * kPi - 0.1 - gap);
    if (hi < lo) throw std::invalid_argument("build_toy: gap placement infeasible");

    Rng rng = Rng::stream(seed, 0);
    std::vector<double> lam(dim);
    lam[0] = rng.uniform(lo, hi);
    lam[1] = lam[0] + gap;
    for (int i = 2; i < dim; ++i) lam[i] = rng.uniform(lam[1] + 0.1, 0.25 * kPi);
    std::sort(lam.begin() + 2, lam.end());

    lam = normalize_spectrum(lam);

    Provenance prov;
    prov.builder = "toy";
    prov.parameters = {{"M", static_cast<double>(dim)}, {"gap", gap}};
    prov.seed = seed;
    return assign_overlaps(std::move(lam), {0, 1}, {0.4, 0.4}, hash_combine(seed, 1),
                           std::move(prov));
}

std::complex<double> exact_signal(const SpectralModel& model, double t) {
    std::complex<double> acc{0, 0};
    const auto& lam = model.eigenvalues();
    const auto& p = model.overlaps();
    for (std::size_t m = 0; m < lam.size(); ++m) {
        const double phase = -lam[m] * t;
        acc += p[m] * std::complex<double>{std::cos(phase), std::sin(phase)};
    }
    return acc;
}

GapReport gap_report(const SpectralModel& model) {
    const auto& lam = model.eigenvalues();
    const auto& dom = model.dominant();
    GapReport r;
    r.p_min = model.p_min();
    r.p_tail = model.p_tail();

    r.delta_dom = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < dom.size(); ++a)
        for (std::size_t b = a + 1; b < dom.size(); ++b)
            r.delta_dom = std::min(r.delta_dom, std::abs(lam[dom[a]] - lam[dom[b]]));

    r.delta = std::numeric_limits<double>::infinity();
    for (int d : dom)
        for (int j = 0; j < model.size(); ++j)
            if (j != d) r.delta = std::min(r.delta, std::abs(lam[d] - lam[j]));
    return r;
}

namespace {

SpectralModel model_from_matrix(const linalg::SymMatrix& h, Provenance prov, std::uint64_t seed) {
    linalg::SymEig eig = linalg::sym_eig(h);
    std::vector<double> lam = normalize_spectrum(eig.eigenvalues);
    return assign_overlaps(std::move(lam), {0, 1}, {0.4, 0.4}, hash_combine(seed, 1),
                           std::move(prov));
}

} // namespace

SpectralModel tfim_model(int sites, double coupling, std::uint64_t seed) {
    Provenance prov;
    prov.builder = "tfim";
    prov.parameters = {{"L", static_cast<double>(sites)}, {"g", coupling}};
    prov.seed = seed;
    return model_from_matrix(build_tfim(sites, coupling), std::move(prov), seed);
}

SpectralModel hubbard_model(int sites, double hopping, double interaction, std::uint64_t seed) {
    Provenance prov;
    prov.builder = "hubbard";
    prov.parameters = {{"L", static_cast<double>(sites)},
                       {"t", hopping},
                       {"U", interaction}};
    prov.seed = seed;
    return model_from_matrix(build_hubbard(sites, hopping, interaction), std::move(prov), seed);
}

// ---------------------------------------------------------------------------
// Serialization.
// ---------------------------------------------------------------------------

std::string model_to_json(const SpectralModel& model) {
    nlohmann::ordered_json j;
    j["eigenvalues"] = model.eigenvalues();
    j["overlaps"] = model.overlaps();
    j["dominant"] = model.dominant();
    nlohmann::ordered_json prov;
    prov["builder"] = model.provenance().builder;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : model.provenance().parameters) params[k] = v;
    prov["parameters"] = params;
    prov["seed"] = model.provenance().seed;
    j["provenance"] = prov;
    return j.dump(2) + "\n";
}

SpectralModel model_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Provenance prov;
    if (j.contains("provenance")) {
        const auto& p = j["provenance"];
        prov.builder = p.value("builder", std::string{});
        prov.seed = p.value("seed", std::uint64_t{0});
        if (p.contains("parameters"))
            for (const auto& [k, v] : p["parameters"].items())
                prov.parameters.emplace_back(k, v.get<double>());
    }
    return SpectralModel(j.at("eigenvalues").get<std::vector<double>>(),
                         j.at("overlaps").get<std::vector<double>>(),
                         j.at("dominant").get<std::vector<int>>(), std::move(prov));
}

void save_model(const SpectralModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    out << model_to_json(model);
    if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

SpectralModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str());
}

} // namespace qmegs::spectrum
