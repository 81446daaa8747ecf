#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "qmegs/bench.hpp"
#include "qmegs/errors.hpp"
#include "qmegs/spectrum.hpp"
#include "support/oracles.hpp"

using namespace qmegs;
using bench::ExperimentConfig;
using bench::Schedule;
using bench::SweepRecord;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_SUITE_BEGIN("bench");

TEST_CASE("maxmin_error fixed cases and properties") {
    spectrum::SpectralModel m({0.1, 0.2, 1.0}, {0.4, 0.4, 0.2}, {0, 1});

    std::vector<double> exact = {0.1, 0.2};
    CHECK(bench::maxmin_error(exact, m) == 0.0);

    std::vector<double> partial = {0.1};
    spectrum::SpectralModel m2({0.1, 0.5, 1.0}, {0.4, 0.4, 0.2}, {0, 1});
    CHECK(bench::maxmin_error(partial, m2) == doctest::Approx(0.4));

    std::vector<double> extra = {0.09, 0.21, 0.9};
    CHECK(bench::maxmin_error(extra, m) == doctest::Approx(0.01));

    // permutation invariance and monotonicity under added estimates
    std::vector<double> perm = {0.9, 0.09, 0.21};
    CHECK(bench::maxmin_error(perm, m) == bench::maxmin_error(extra, m));
    std::vector<double> fewer = {0.09, 0.9};
    CHECK(bench::maxmin_error(extra, m) <= bench::maxmin_error(fewer, m));

    std::vector<double> none;
    CHECK_THROWS_AS(bench::maxmin_error(none, m), std::invalid_argument);

    // wrapped metric measures across the seam
    spectrum::SpectralModel seam({-kPi + 1e-3, 0.5}, {0.6, 0.4}, {0});
    std::vector<double> near_seam = {kPi - 1e-3};
    CHECK(bench::maxmin_error(near_seam, seam, true) == doctest::Approx(2e-3));
}

TEST_CASE("schedule depths") {
    Schedule s{100, 2, 3};
    auto d = s.depths();
    REQUIRE(d.size() == 3);
    CHECK(d[0] == 200.0);
    CHECK(d[1] == 400.0);
    CHECK(d[2] == 800.0);
}

TEST_CASE("run_sweep cardinality, determinism, cost bookkeeping") {
    auto model = spectrum::build_toy(20, 1e-3, 11);
    ExperimentConfig cfg{model, {"qmegs"}, Schedule{100, 2, 3}, 2, 99, 1, 3200.0, -1};
    auto records = bench::run_sweep(cfg);
    CHECK(records.size() == 6);
    for (const auto& r : records) {
        CHECK(std::isfinite(r.error));
        CHECK(r.metric == "maxmin");
        CHECK(r.t_max <= r.depth);               // sigma = 1 defaults
        CHECK(r.t_total <= 500.0 * r.depth);
        CHECK(r.t_max <= r.t_total);
    }

    auto again = bench::run_sweep(cfg);
    CHECK(bench::records_to_csv(records) == bench::records_to_csv(again));

    ExperimentConfig wide = cfg;
    wide.workers = 3;
    auto parallel = bench::run_sweep(wide);
    CHECK(bench::records_to_csv(records) == bench::records_to_csv(parallel));

    ExperimentConfig more = cfg;
    more.algorithms = {"qmegs", "qpe"};
    CHECK(bench::run_sweep(more).size() == 12);

    ExperimentConfig bad = cfg;
    bad.algorithms = {"nonsense"};
    CHECK_THROWS_AS(bench::run_sweep(bad), std::invalid_argument);
}

TEST_CASE("run_sweep dispatches the integer and mm-qcels variants") {
    auto model = spectrum::build_toy(20, 1e-3, 11);
    ExperimentConfig cfg{model, {"mmqcels", "qmegs-int"}, Schedule{100, 2, 1}, 2, 3, 1, 3200.0,
                         -1};
    auto records = bench::run_sweep(cfg);
    REQUIRE(records.size() == 4);
    CHECK(records[0].algorithm == "mmqcels");
    CHECK(records[0].metric == "maxmin");
    CHECK(records[2].algorithm == "qmegs-int");
    CHECK(records[2].metric == "maxmin-2pi");
    for (const auto& r : records) CHECK(std::isfinite(r.error));
}

TEST_CASE("run_sweep records failures as nan rows without aborting") {
    auto model = spectrum::build_toy(20, 1e-3, 11);
    // T = 4 -> esprit needs K <= (N-1)/2 = 1 but runs with K = 2: per-run failure
    ExperimentConfig cfg{model, {"esprit"}, Schedule{2, 2, 1}, 2, 5, 1, 3200.0, -1};
    auto records = bench::run_sweep(cfg);
    REQUIRE(records.size() == 2);
    for (const auto& r : records) {
        CHECK(std::isnan(r.error));
        CHECK(r.metric.rfind("failed:", 0) == 0);
    }
}

TEST_CASE("esprit depth cap skips oversized points") {
    auto model = spectrum::build_toy(20, 1e-3, 11);
    ExperimentConfig cfg{model, {"esprit"}, Schedule{100, 2, 3}, 1, 5, 1, 300.0, -1};
    auto records = bench::run_sweep(cfg);
    REQUIRE(records.size() == 1); // only T = 200 survives the cap
    CHECK(records[0].depth == 200.0);
}

TEST_CASE("csv emission and round trip") {
    CHECK(bench::records_to_csv({}) == "algorithm,T,trial,error,T_max,T_total,metric\n");

    SweepRecord one{"qmegs", 200.0, 0, 1.25e-3, 198.7, 55000.25, "maxmin"};
    const std::string text = bench::records_to_csv({one});
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);

    std::vector<SweepRecord> recs = {
        {"qmegs", 200.0, 0, 0.0012345678901234567, 198.7, 55000.25, "maxmin"},
        {"qpe", 400.0, 1, std::nan(""), std::nan(""), std::nan(""), "failed:test"},
        {"esprit", 800.0, 2, 3.9e-17, 799.0, 319600.0, "maxmin"},
    };
    auto back = bench::records_from_csv(bench::records_to_csv(recs));
    REQUIRE(back.size() == 3);
    CHECK(back[0].error == recs[0].error); // full precision round trip
    CHECK(back[2].error == recs[2].error);
    CHECK(std::isnan(back[1].error));
    CHECK(back[1].metric == "failed:test");

    const std::string path =
        (std::filesystem::temp_directory_path() / "qmegs_records_test.csv").string();
    bench::emit_csv(recs, path);
    auto loaded = bench::load_csv(path);
    CHECK(bench::records_to_csv(loaded) == bench::records_to_csv(recs));
    std::remove(path.c_str());
}

TEST_CASE("svg structure, decades, determinism, warnings") {
    std::vector<SweepRecord> recs;
    for (int n = 0; n < 3; ++n) {
        const double t = 200.0 * (1 << n);
        for (int trial = 0; trial < 4; ++trial) {
            recs.push_back({"qmegs", t, trial, 1e-1 / std::pow(10.0, n + trial * 0.1), t * 0.9,
                            t * 250.0, "maxmin"});
        }
    }
    const std::string svg = bench::records_to_svg(recs, bench::CostAxis::TMax);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("1e-") != std::string::npos); // decade tick labels
    CHECK(svg.find("T_max") != std::string::npos);
    CHECK(bench::records_to_svg(recs, bench::CostAxis::TMax) == svg); // deterministic bytes

    // an all-failed series is skipped with a warning annotation
    std::vector<SweepRecord> with_dead = recs;
    with_dead.push_back({"esprit", 200.0, 0, std::nan(""), std::nan(""), std::nan(""), "failed:x"});
    const std::string svg2 = bench::records_to_svg(with_dead, bench::CostAxis::TTotal);
    CHECK(svg2.find("skipped") != std::string::npos);
    CHECK(svg2.find("esprit") != std::string::npos);
    CHECK(svg2.find("T_total") != std::string::npos);
}

TEST_SUITE_END();
