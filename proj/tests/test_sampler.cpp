#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "qmegs/errors.hpp"
#include "qmegs/sampler.hpp"
#include "qmegs/search.hpp"
#include "support/oracles.hpp"

using namespace qmegs;
using sampler::Dataset;

namespace {
constexpr double kPi = 3.14159265358979323846;

double phi(double s) { return std::exp(-0.5 * s * s) / std::sqrt(2.0 * kPi); }
} // namespace

TEST_SUITE_BEGIN("sampler");

TEST_CASE("sample_time truncation behavior") {
    Rng rng(3);
    CHECK_THROWS_AS(sampler::sample_time(0.0, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sampler::sample_time(1.0, 0.0, rng), std::invalid_argument);

    // sigma = 10: truncation probability ~ erfc(10/sqrt 2) < 1e-22
    for (int i = 0; i < 5000; ++i) {
        const double t = sampler::sample_time(1.0, 10.0, rng);
        CHECK(std::abs(t) <= 10.0);
        CHECK(t != 0.0); // measure-zero event aside, never truncated
    }
    // sigma tiny: everything truncates to the atom at zero
    for (int i = 0; i < 100; ++i) CHECK(sampler::sample_time(1.0, 1e-6, rng) == 0.0);
}

TEST_CASE("sample_time empirical second moment matches quadrature of the density") {
    const double depth = 2.0, sigma = 3.0;
    // E[t^2] = 2 int_0^{sigma} (T u)^2 phi(u) du with u standardized
    const double target =
        2.0 * oracle::integrate([&](double u) { return depth * depth * u * u * phi(u); }, 0.0,
                                sigma, 64);
    Rng rng(12345);
    const int n = 100000;
    double acc = 0;
    for (int i = 0; i < n; ++i) {
        const double t = sampler::sample_time(depth, sigma, rng);
        acc += t * t;
    }
    acc /= n;
    CHECK(std::abs(acc - target) <= 0.03 * target);
}

TEST_CASE("hadamard_shot outcome structure") {
    spectrum::SpectralModel flat({0.0}, {1.0}, {0});
    Rng rng(9);
    bool saw_plus = false, saw_minus = false;
    for (int i = 0; i < 2000; ++i) {
        auto s = sampler::hadamard_shot(flat, 1.7, rng);
        CHECK(s.z.real() == 1.0); // Re Z = 1 for the single zero mode
        CHECK(std::abs(std::abs(s.z.imag()) - 1.0) <= 0);
        saw_plus |= s.z.imag() > 0;
        saw_minus |= s.z.imag() < 0;
    }
    CHECK(saw_plus);
    CHECK(saw_minus);

    auto zero = sampler::hadamard_shot(flat, 0.0, rng);
    CHECK(zero.z == std::complex<double>{1.0, 0.0});
}

TEST_CASE("hadamard_shot empirical mean matches the exact signal") {
    auto model = spectrum::build_toy(20, 1e-3, 2);
    Rng rng(77);
    const double t = 37.25;
    const int n = 100000;
    std::complex<double> acc{0, 0};
    for (int i = 0; i < n; ++i) acc += sampler::hadamard_shot(model, t, rng).z;
    acc /= static_cast<double>(n);
    const auto truth = spectrum::exact_signal(model, t);
    const double tol = 4.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(acc.real() - truth.real()) <= tol);
    CHECK(std::abs(acc.imag() - truth.imag()) <= tol);
}

TEST_CASE("generate_dataset invariants and determinism") {
    auto model = spectrum::build_toy(20, 1e-3, 2);
    Rng rng(5);
    auto ds = sampler::generate_dataset(model, 500, 200.0, 1.0, rng);
    CHECK(ds.shots.size() == 500);
    auto cost = sampler::dataset_cost(ds);
    CHECK(cost.t_max <= 200.0);
    for (const auto& s : ds.shots) {
        if (s.t == 0.0) {
            CHECK(s.z == std::complex<double>{1.0, 0.0});
        } else {
            CHECK(std::abs(std::abs(s.z) - std::sqrt(2.0)) <= 1e-15);
        }
    }

    Rng r1(5);
    auto single = sampler::generate_dataset(model, 1, 50.0, 2.0, r1);
    CHECK(sampler::dataset_cost(single).t_total == std::abs(single.shots[0].t));

    Rng a(42), b(42);
    auto d1 = sampler::generate_dataset(model, 200, 100.0, 1.0, a);
    auto d2 = sampler::generate_dataset(model, 200, 100.0, 1.0, b);
    for (int i = 0; i < 200; ++i) {
        CHECK(d1.shots[i].t == d2.shots[i].t);
        CHECK(d1.shots[i].z == d2.shots[i].z);
    }
}

TEST_CASE("integer-time distribution matches an explicit summation oracle") {
    const double depth = 1.0, sigma = 10.0;
    sampler::IntegerTimeDist dist(depth, sigma);
    CHECK(dist.k_max() == 10);

    // oracle: raw Gaussian weights summed over |j| <= 1e6, no Poisson identity
    auto raw = [&](double j) { return std::exp(-0.5 * j * j / (depth * depth)); };
    double total = 0;
    for (long j = -1000000; j <= 1000000; ++j) total += raw(static_cast<double>(j));
    double outside = 0;
    for (long j = 11; j <= 1000000; ++j) outside += 2.0 * raw(static_cast<double>(j));

    for (long k = 1; k <= 10; ++k)
        CHECK(dist.prob(k) == doctest::Approx(raw(k) / total).epsilon(1e-12));
    CHECK(dist.prob(0) == doctest::Approx((raw(0) + outside) / total).epsilon(1e-12));
    CHECK(dist.prob(11) == 0.0);

    double sum = 0;
    for (long k = -10; k <= 10; ++k) sum += dist.prob(k);
    CHECK(std::abs(sum - 1.0) <= 1e-14);

    // ratio bound: P(k)/P(0) <= exp(-k^2/2) (folded mass only enlarges P(0))
    for (long k = 1; k <= 10; ++k)
        CHECK(dist.prob(k) / dist.prob(0) <= std::exp(-0.5 * k * k) * (1.0 + 1e-12));
}

TEST_CASE("integer-time sampler edge cases") {
    Rng rng(6);
    // sigma T < 1: only the origin is in the support
    for (int i = 0; i < 50; ++i) CHECK(sampler::sample_integer_time(1.0, 0.5, rng) == 0);
    CHECK_THROWS_AS(sampler::IntegerTimeDist(0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(sampler::IntegerTimeDist(2.0, 0.0), std::invalid_argument);

    auto model = spectrum::build_toy(8, 0.01, 4);
    Rng r2(8);
    auto ds = sampler::generate_dataset_integer(model, 300, 5.0, 3.0, r2);
    CHECK(ds.mode == sampler::TimeMode::Integer);
    for (const auto& s : ds.shots) {
        CHECK(s.t == std::floor(s.t));
        CHECK(std::abs(s.t) <= 15.0);
    }
}

TEST_CASE("integer-time sampler passes a chi-square goodness-of-fit test") {
    const double depth = 2.0, sigma = 3.0;
    sampler::IntegerTimeDist dist(depth, sigma);
    const long kmax = dist.k_max();
    Rng rng(2024);
    const int n = 100000;
    std::vector<long> counts(2 * kmax + 1, 0);
    for (int i = 0; i < n; ++i) ++counts[dist.sample(rng) + kmax];

    double chi2 = 0;
    int dof = -1;
    for (long k = -kmax; k <= kmax; ++k) {
        const double expect = n * dist.prob(k);
        if (expect < 5.0) continue; // sparse bins would break the asymptotics
        const double diff = counts[k + kmax] - expect;
        chi2 += diff * diff / expect;
        ++dof;
    }
    CHECK(oracle::chi2_sf(chi2, dof) > 0.01);
}

TEST_CASE("truncation bias is bounded by exp(-sigma^2/2)") {
    // quadrature of E_{t~a}[Z(t) e^{i theta t}] against the Gaussian transform
    Rng rng(31);
    for (std::uint64_t seed : {10u, 11u}) {
        auto model = spectrum::build_toy(8, 0.05, seed);
        for (double sigma : {2.0, 3.0}) {
            const double depth = 10.0;
            const double atom = 2.0 * oracle::integrate(phi, sigma, sigma + 40.0, 400);
            for (int rep = 0; rep < 10; ++rep) {
                const double theta = rng.uniform(-kPi, kPi);
                auto integrand_re = [&](double t) {
                    const auto z = spectrum::exact_signal(model, t);
                    return (z * std::polar(1.0, theta * t)).real() * phi(t / depth) / depth;
                };
                auto integrand_im = [&](double t) {
                    const auto z = spectrum::exact_signal(model, t);
                    return (z * std::polar(1.0, theta * t)).imag() * phi(t / depth) / depth;
                };
                const int panels = 600;
                const std::complex<double> inside{
                    oracle::integrate(integrand_re, -sigma * depth, sigma * depth, panels),
                    oracle::integrate(integrand_im, -sigma * depth, sigma * depth, panels)};
                const std::complex<double> expect = inside + atom; // + atom * Z(0) e^{0}
                double gauss = 0;
                for (int m = 0; m < model.size(); ++m) {
                    const double x = depth * (theta - model.eigenvalues()[m]);
                    gauss += model.overlaps()[m] * std::exp(-0.5 * x * x);
                }
                CHECK(std::abs(expect - gauss) <= std::exp(-0.5 * sigma * sigma));
            }
        }
    }
}

TEST_CASE("grid deviation concentrates at the Hoeffding-backed sample size") {
    auto model = spectrum::build_toy(20, 1e-3, 77);
    const double depth = 5.0, q = 0.1, sigma = 3.0;
    const double delta = 0.05, eta = 0.05;
    auto grid = search::make_grid(depth, q);
    std::vector<double> thetas = grid.thetas;
    for (int d : model.dominant()) thetas.push_back(model.eigenvalues()[d]);
    const double j_count = static_cast<double>(grid.thetas.size());
    const int n = static_cast<int>(
        std::ceil(8.0 / (delta * delta) *
                  std::log((j_count + model.dominant().size()) / eta)));

    int failures = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        Rng rng = Rng::stream(555, rep);
        auto ds = sampler::generate_dataset(model, n, depth, sigma, rng);
        auto sums = search::filter_sum(ds, thetas);
        double worst = 0;
        for (std::size_t j = 0; j < thetas.size(); ++j) {
            double gauss = 0;
            for (int m = 0; m < model.size(); ++m) {
                const double x = depth * (thetas[j] - model.eigenvalues()[m]);
                gauss += model.overlaps()[m] * std::exp(-0.5 * x * x);
            }
            worst = std::max(worst, std::abs(sums[j] - gauss));
        }
        if (worst > delta) ++failures;
    }
    // at most an eta fraction, with binomial slack
    CHECK(failures <= static_cast<int>(eta * reps) + 10);
}

TEST_CASE("dataset_cost on fixed shot lists") {
    Dataset ds;
    ds.shots = {{1.0, {1, 1}}, {-2.0, {1, -1}}, {0.0, {1, 0}}};
    auto c = sampler::dataset_cost(ds);
    CHECK(c.t_max == 2.0);
    CHECK(c.t_total == 3.0);

    Dataset zero;
    zero.shots = {{0.0, {1, 0}}, {0.0, {1, 0}}};
    CHECK(sampler::dataset_cost(zero).t_max == 0.0);
    CHECK(sampler::dataset_cost(zero).t_total == 0.0);

    Dataset integer;
    integer.mode = sampler::TimeMode::Integer;
    integer.shots = {{3.0, {1, 1}}, {-3.0, {-1, 1}}};
    auto ci = sampler::dataset_cost(integer);
    CHECK(ci.t_max == 3.0);
    CHECK(ci.t_total == 6.0);
}

TEST_CASE("dataset text round trip") {
    auto model = spectrum::build_toy(6, 0.02, 9);
    Rng rng(15);
    auto ds = sampler::generate_dataset(model, 100, 30.0, 1.5, rng);
    const std::string path =
        (std::filesystem::temp_directory_path() / "qmegs_dataset_test.txt").string();
    sampler::save_dataset(ds, path);
    auto back = sampler::load_dataset(path);
    REQUIRE(back.shots.size() == ds.shots.size());
    CHECK(back.depth == ds.depth);
    CHECK(back.sigma == ds.sigma);
    CHECK(back.mode == ds.mode);
    for (std::size_t i = 0; i < ds.shots.size(); ++i) {
        CHECK(back.shots[i].t == ds.shots[i].t);
        CHECK(back.shots[i].z == ds.shots[i].z);
    }
    std::remove(path.c_str());
}

TEST_SUITE_END();
