// Command-line front end: build spectral models, run a single estimator,
// reproduce the full comparison sweeps, and self-check library invariants.

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qmegs/baselines.hpp"
#include "qmegs/bench.hpp"
#include "qmegs/errors.hpp"
#include "qmegs/rng.hpp"
#include "qmegs/sampler.hpp"
#include "qmegs/search.hpp"
#include "qmegs/spectrum.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

using qmegs::Rng;
namespace spectrum = qmegs::spectrum;
namespace sampler = qmegs::sampler;
namespace search = qmegs::search;
namespace baselines = qmegs::baselines;
namespace bench = qmegs::bench;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

// ---------------------------------------------------------------------------
// model subcommand
// ---------------------------------------------------------------------------

struct ModelOpts {
    std::string builder;
    int m_dim = 20;
    double gap = 1e-3;
    int sites = 8;
    double coupling = 4.0;
    double hopping = 1.0;
    double interaction = 10.0;
    std::uint64_t seed = 0;
    std::string out;
    std::string weights = "0.4,0.4";
    std::string dominant = "0,1";
};

spectrum::SpectralModel build_from_opts(const ModelOpts& o) {
    if (o.builder == "toy") return spectrum::build_toy(o.m_dim, o.gap, o.seed);

    std::vector<double> w;
    for (const auto& s : split_csv(o.weights)) w.push_back(std::stod(s));
    std::vector<int> dom;
    for (const auto& s : split_csv(o.dominant)) dom.push_back(std::stoi(s));

    spectrum::Provenance prov;
    prov.seed = o.seed;
    qmegs::linalg::SymMatrix h(1);
    if (o.builder == "tfim") {
        h = spectrum::build_tfim(o.sites, o.coupling);
        prov.builder = "tfim";
        prov.parameters = {{"L", static_cast<double>(o.sites)}, {"g", o.coupling}};
    } else if (o.builder == "hubbard") {
        h = spectrum::build_hubbard(o.sites, o.hopping, o.interaction);
        prov.builder = "hubbard";
        prov.parameters = {{"L", static_cast<double>(o.sites)},
                           {"t", o.hopping},
                           {"U", o.interaction}};
    } else {
        throw CLI::ValidationError("--builder must be toy, tfim, or hubbard");
    }
    auto eig = qmegs::linalg::sym_eig(h);
    auto lam = spectrum::normalize_spectrum(eig.eigenvalues);
    return spectrum::assign_overlaps(std::move(lam), dom, w, qmegs::hash_combine(o.seed, 1),
                                     std::move(prov));
}

int cmd_model(const ModelOpts& o) {
    auto model = build_from_opts(o);
    spectrum::save_model(model, o.out);
    auto gaps = spectrum::gap_report(model);
    std::cout << "model: " << o.builder << " (" << model.size() << " modes) -> " << o.out << "\n";
    std::cout << "p_min: " << gaps.p_min << "  p_tail: " << gaps.p_tail << "\n";
    std::cout << "delta_dom: " << gaps.delta_dom << "  delta: " << gaps.delta << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// run subcommand
// ---------------------------------------------------------------------------

struct RunOpts {
    std::string model_file;
    std::string algo;
    std::string mode = "real";
    std::uint64_t seed = 0;
    int n_shots = 500;
    double depth = 200;
    double sigma = 1;
    double alpha = 5;
    double q = 0.05;
    int n_peaks = 2;
    int shots_per_node = 1;
    int ancilla = -1;
    int n_qpe = -1;
    double t0 = 100;
    int n0 = 1000;
    int nj = 500;
    std::string grid_dump;
    std::string dataset_dump;
};

int cmd_run(const RunOpts& o) {
    auto model = spectrum::load_model(o.model_file);
    Rng rng(o.seed);
    search::EstimateResult res;

    std::string algo = o.algo;
    if (algo == "qmegs" && o.mode == "integer") algo = "qmegs-int";

    if (algo == "qmegs" || algo == "qmegs-int") {
        search::QmegsConfig cfg{o.n_shots, o.depth, o.sigma, o.alpha, o.q, o.n_peaks};
        const bool integer_mode = algo == "qmegs-int";
        if (o.grid_dump.empty() && o.dataset_dump.empty()) {
            res = integer_mode ? search::qmegs_int_run(model, cfg, rng)
                               : search::qmegs_run(model, cfg, rng);
        } else {
            // same pipeline, with the intermediate products kept for dumping
            cfg.validate();
            auto ds = integer_mode
                          ? sampler::generate_dataset_integer(model, cfg.n_shots, cfg.depth,
                                                              cfg.sigma, rng)
                          : sampler::generate_dataset(model, cfg.n_shots, cfg.depth, cfg.sigma,
                                                      rng);
            auto grid = search::make_grid(cfg.depth, cfg.q);
            grid.values = search::filter_eval(ds, grid.thetas);
            res.estimates = search::peak_search(grid, cfg.n_peaks, cfg.alpha, cfg.depth,
                                                integer_mode);
            auto cost = sampler::dataset_cost(ds);
            res.t_max = cost.t_max;
            res.t_total = cost.t_total;
            res.algorithm = integer_mode ? "qmegs-int" : "qmegs";
            res.config_echo = cfg.echo();
            if (!o.dataset_dump.empty()) sampler::save_dataset(ds, o.dataset_dump);
            if (!o.grid_dump.empty()) {
                std::ofstream gout(o.grid_dump);
                if (!gout) throw std::runtime_error("cannot open " + o.grid_dump);
                gout << "theta,G\n";
                for (std::size_t j = 0; j < grid.thetas.size(); ++j)
                    gout << fmt(grid.thetas[j]) << "," << fmt(grid.values[j]) << "\n";
            }
        }
    } else if (algo == "esprit") {
        baselines::EspritConfig cfg{o.depth, o.n_peaks, o.shots_per_node};
        res = baselines::esprit_run(model, cfg, rng);
    } else if (algo == "qpe") {
        baselines::QpeConfig cfg;
        cfg.ancilla_bits =
            o.ancilla > 0 ? o.ancilla : static_cast<int>(std::lround(std::log2(o.depth)));
        cfg.n_samples = o.n_qpe > 0 ? o.n_qpe : baselines::qpe_default_samples(model);
        res = baselines::qpe_run(model, cfg, rng);
    } else if (algo == "mmqcels") {
        auto cfg = baselines::qcels_schedule(o.depth, o.n_peaks, o.t0, o.n0, o.nj, o.sigma);
        res = baselines::mmqcels_run(model, cfg, rng);
    } else {
        throw CLI::ValidationError("--algo must be qmegs, qmegs-int, esprit, qpe, or mmqcels");
    }

    std::cout << "algorithm: " << res.algorithm << "\n";
    std::cout << "config: " << res.config_echo << "\n";
    std::cout << "estimates:";
    for (double est : res.estimates) std::cout << " " << fmt(est);
    std::cout << "\n";
    std::cout << "T_max: " << fmt(res.t_max) << "\n";
    std::cout << "T_total: " << fmt(res.t_total) << "\n";
    if (res.degraded) std::cout << "warning: optimizer reported degraded convergence\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sweep subcommand
// ---------------------------------------------------------------------------

struct SweepOpts {
    std::string model = "tfim";
    std::string model_file;
    int m_dim = 20;
    double gap = 1e-3;
    int sites = 8;
    double coupling = 4.0;
    double hopping = 1.0;
    double interaction = 10.0;
    std::string algos = "qmegs,esprit,qpe,mmqcels";
    double t_base = 100;
    double t_factor = 2;
    int n_max = 5;
    int trials = 20;
    std::uint64_t seed = 0;
    std::string out_dir = "sweep_out";
    int workers = 1;
    double esprit_cap = 3200;
    int qpe_ancilla = -1;
};

void apply_config_file(SweepOpts& o, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    o.model = j.value("model", o.model);
    o.model_file = j.value("model-file", o.model_file);
    o.m_dim = j.value("M", o.m_dim);
    o.gap = j.value("gap", o.gap);
    o.sites = j.value("L", o.sites);
    o.coupling = j.value("g", o.coupling);
    o.hopping = j.value("t", o.hopping);
    o.interaction = j.value("U", o.interaction);
    o.algos = j.value("algos", o.algos);
    o.t_base = j.value("T-base", o.t_base);
    o.t_factor = j.value("T-factor", o.t_factor);
    o.n_max = j.value("n-max", o.n_max);
    o.trials = j.value("trials", o.trials);
    if (j.contains("seed")) o.seed = j["seed"].get<std::uint64_t>();
    o.out_dir = j.value("out-dir", o.out_dir);
    o.workers = j.value("workers", o.workers);
    o.esprit_cap = j.value("esprit-cap", o.esprit_cap);
    o.qpe_ancilla = j.value("qpe-d", o.qpe_ancilla);
}

int cmd_sweep(const SweepOpts& o) {
    spectrum::SpectralModel model = [&]() {
        if (!o.model_file.empty()) return spectrum::load_model(o.model_file);
        ModelOpts mo;
        mo.builder = o.model;
        mo.m_dim = o.m_dim;
        mo.gap = o.gap;
        mo.sites = o.sites;
        mo.coupling = o.coupling;
        mo.hopping = o.hopping;
        mo.interaction = o.interaction;
        mo.seed = o.seed;
        return build_from_opts(mo);
    }();

    bench::ExperimentConfig cfg{model,
                                split_csv(o.algos),
                                bench::Schedule{o.t_base, o.t_factor, o.n_max},
                                o.trials,
                                o.seed,
                                o.workers,
                                o.esprit_cap,
                                o.qpe_ancilla};

    auto records = bench::run_sweep(cfg);

    std::filesystem::create_directories(o.out_dir);
    const std::string csv_path = o.out_dir + "/records.csv";
    bench::emit_csv(records, csv_path);
    bench::emit_plot(records, bench::CostAxis::TMax, o.out_dir + "/error_vs_tmax.svg");
    bench::emit_plot(records, bench::CostAxis::TTotal, o.out_dir + "/error_vs_ttotal.svg");

    nlohmann::ordered_json meta;
    meta["model"] = nlohmann::json::parse(spectrum::model_to_json(model));
    meta["algorithms"] = cfg.algorithms;
    meta["schedule"] = {{"base", o.t_base}, {"factor", o.t_factor}, {"count", o.n_max}};
    meta["trials"] = o.trials;
    meta["master_seed"] = o.seed;
    meta["workers"] = o.workers;
    meta["esprit_depth_cap"] = o.esprit_cap;
    meta["qpe_ancilla"] = o.qpe_ancilla;
    int failed = 0;
    for (const auto& r : records)
        if (r.metric.rfind("failed:", 0) == 0) ++failed;
    meta["records"] = records.size();
    meta["failed_records"] = failed;
    std::ofstream mout(o.out_dir + "/sweep_meta.json");
    mout << meta.dump(2) << "\n";

    std::cout << "wrote " << records.size() << " records (" << failed << " failed) to "
              << csv_path << "\n";
    std::cout << "plots: " << o.out_dir << "/error_vs_tmax.svg, " << o.out_dir
              << "/error_vs_ttotal.svg\n";
    return 0;
}

// ---------------------------------------------------------------------------
// check subcommand: fast library invariants
// ---------------------------------------------------------------------------

int cmd_check() {
    int failures = 0;
    auto report = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "[ ok ] " : "[FAIL] ") << name << "\n";
        if (!ok) ++failures;
    };

    {
        bool ok = true;
        for (double depth : {50.0, 200.0, 3200.0}) {
            auto grid = search::make_grid(depth, 0.05);
            const long j_max = static_cast<long>(std::floor(2.0 * kPi * depth / 0.05));
            ok &= static_cast<long>(grid.thetas.size()) == j_max + 1;
            ok &= grid.thetas.back() <= kPi && grid.thetas.back() + 0.05 / depth > kPi;
        }
        report("candidate grid: J = floor(2 pi T / q), theta_J <= pi < theta_J + q/T", ok);
    }
    {
        auto model = spectrum::build_toy(20, 1e-3, 1);
        bool ok = std::abs(spectrum::exact_signal(model, 0.0).real() - 1.0) < 1e-12;
        double sum = 0;
        for (double p : model.overlaps()) sum += p;
        ok &= std::abs(sum - 1.0) <= 1e-12 && model.p_min() > model.p_tail();
        Rng rng(3);
        for (int i = 0; i < 20; ++i) {
            const double t = rng.uniform(-30, 30);
            ok &= std::abs(spectrum::exact_signal(model, -t) -
                           std::conj(spectrum::exact_signal(model, t))) < 1e-12;
        }
        report("spectral model: normalization, dominance, conjugate symmetry", ok);
    }
    {
        auto m1 = spectrum::build_toy(20, 1e-3, 7);
        auto m2 = spectrum::build_toy(20, 1e-3, 7);
        report("model builders are deterministic for a fixed seed",
               m1.eigenvalues() == m2.eigenvalues() && m1.overlaps() == m2.overlaps());
    }
    {
        auto model = spectrum::build_toy(20, 1e-3, 2);
        Rng rng(11);
        auto ds = sampler::generate_dataset(model, 60000, 10.0, 3.0, rng);
        auto grid = search::make_grid(10.0, 0.05);
        auto g = search::filter_eval(ds, grid.thetas);
        double worst = 0;
        for (std::size_t j = 0; j < g.size(); ++j)
            worst = std::max(worst,
                             std::abs(g[j] - search::filter_oracle(model, grid.thetas[j], 10.0)));
        report("filter consistency: empirical vs Gaussian profile within 0.025 (got " +
                   std::to_string(worst) + ")",
               worst <= 0.025);
    }
    {
        auto model = spectrum::build_toy(20, 1e-3, 5);
        search::QmegsConfig cfg{500, 200.0, 1.0, 5.0, 0.05, 2};
        Rng r1(9), r2(9);
        auto a = search::qmegs_run(model, cfg, r1);
        auto b = search::qmegs_run(model, cfg, r2);
        bool ok = a.estimates == b.estimates;
        for (std::size_t i = 0; i < a.estimates.size(); ++i)
            for (std::size_t j = i + 1; j < a.estimates.size(); ++j)
                ok &= std::abs(a.estimates[i] - a.estimates[j]) >= 5.0 / 200.0 - 1e-12;
        ok &= bench::maxmin_error(a.estimates, model) <= 5.0 / 200.0;
        report("qmegs run: deterministic, separated, covering at alpha/T", ok);
    }
    {
        bool ok = search::periodic_gaussian(0.0, 2.0) == 1.0;
        for (int i = 1; i <= 200; ++i) {
            const double x = 2.0 * kPi / 3.0 * i / 200.0;
            const double v = search::periodic_gaussian(x, 2.0);
            const double base = std::exp(-0.5 * x * x * 4.0);
            ok &= v >= base * (1 - 1e-13) && v <= 1.01 * base;
        }
        report("periodic Gaussian: unit apex and two-sided envelope", ok);
    }
    {
        auto model = spectrum::build_toy(12, 0.02, 6);
        auto dist = baselines::qpe_distribution(model, 10);
        double sum = 0;
        for (double p : dist) sum += p;
        report("qpe outcome distribution sums to 1", std::abs(sum - 1.0) <= 1e-10);
    }
    {
        std::vector<std::complex<double>> z(42);
        for (int n = 0; n <= 41; ++n) z[n] = std::polar(1.0, -0.9 * n);
        auto est = baselines::esprit_from_samples(z, 1);
        report("esprit recovers a noiseless mode to machine precision",
               std::abs(est[0] - 0.9) <= 1e-10);
    }
    {
        auto model = spectrum::build_toy(20, 1e-3, 8);
        bench::ExperimentConfig cfg{model, {"qmegs", "qpe"}, bench::Schedule{100, 2, 2},
                                    3,     77,               1,
                                    3200,  -1};
        auto r1 = bench::run_sweep(cfg);
        cfg.workers = 3;
        auto r3 = bench::run_sweep(cfg);
        report("sweep records are byte-identical across worker counts",
               bench::records_to_csv(r1) == bench::records_to_csv(r3));
    }

    std::cout << (failures == 0 ? "all checks passed\n"
                                : std::to_string(failures) + " check(s) failed\n");
    return failures == 0 ? 0 : 1;
}

} // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"Gaussian-filtered multiple-eigenvalue estimation toolkit"};
    app.require_subcommand(1);

    ModelOpts mo;
    auto* model_cmd = app.add_subcommand("model", "build and serialize a spectral model");
    model_cmd->add_option("--builder", mo.builder, "toy | tfim | hubbard")->required();
    model_cmd->add_option("--M", mo.m_dim, "toy: number of modes");
    model_cmd->add_option("--gap", mo.gap, "toy: dominant pair gap before normalization");
    model_cmd->add_option("--L", mo.sites, "tfim/hubbard: sites");
    model_cmd->add_option("--g", mo.coupling, "tfim: transverse coupling");
    model_cmd->add_option("--t", mo.hopping, "hubbard: hopping");
    model_cmd->add_option("--U", mo.interaction, "hubbard: interaction");
    model_cmd->add_option("--weights", mo.weights, "dominant overlaps (comma list)");
    model_cmd->add_option("--dominant", mo.dominant, "dominant indices (comma list)");
    model_cmd->add_option("--seed", mo.seed, "seed for the overlap tail split")->required();
    model_cmd->add_option("--out", mo.out, "output model file")->required();

    RunOpts ro;
    auto* run_cmd = app.add_subcommand("run", "run one estimator on a model file");
    run_cmd->add_option("--model", ro.model_file, "model file")->required();
    run_cmd->add_option("--algo", ro.algo, "qmegs | qmegs-int | esprit | qpe | mmqcels")
        ->required();
    run_cmd->add_option("--mode", ro.mode, "real | integer (qmegs time sampling)");
    run_cmd->add_option("--seed", ro.seed, "RNG seed")->required();
    run_cmd->add_option("--N", ro.n_shots, "qmegs: data pairs");
    run_cmd->add_option("--T", ro.depth, "depth parameter (or total/target time)");
    run_cmd->add_option("--sigma", ro.sigma, "truncation parameter");
    run_cmd->add_option("--alpha", ro.alpha, "block constant");
    run_cmd->add_option("--q", ro.q, "searching parameter");
    run_cmd->add_option("--K", ro.n_peaks, "peaks / modes to estimate");
    run_cmd->add_option("--shots-per-node", ro.shots_per_node, "esprit: averages per time node");
    run_cmd->add_option("--d", ro.ancilla, "qpe: ancilla count (default round(log2 T))");
    run_cmd->add_option("--n-qpe", ro.n_qpe, "qpe: samples (default ceil(6/p1))");
    run_cmd->add_option("--T0", ro.t0, "mmqcels: initial depth");
    run_cmd->add_option("--N0", ro.n0, "mmqcels: level-0 shots");
    run_cmd->add_option("--Nj", ro.nj, "mmqcels: shots per later level");
    run_cmd->add_option("--grid-dump", ro.grid_dump, "write theta,G csv (qmegs only)");
    run_cmd->add_option("--dump-dataset", ro.dataset_dump, "write the shot table (qmegs only)");

    SweepOpts so;
    std::string config_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "error-vs-cost comparison sweep");
    sweep_cmd->add_option("--config", config_path, "JSON file mirroring these flags");
    sweep_cmd->add_option("--model", so.model, "toy | tfim | hubbard");
    sweep_cmd->add_option("--model-file", so.model_file, "use a serialized model instead");
    sweep_cmd->add_option("--M", so.m_dim, "toy: modes");
    sweep_cmd->add_option("--gap", so.gap, "toy: dominant gap");
    sweep_cmd->add_option("--L", so.sites, "tfim/hubbard: sites");
    sweep_cmd->add_option("--g", so.coupling, "tfim: coupling");
    sweep_cmd->add_option("--t", so.hopping, "hubbard: hopping");
    sweep_cmd->add_option("--U", so.interaction, "hubbard: interaction");
    sweep_cmd->add_option("--algos", so.algos, "comma list of algorithms");
    sweep_cmd->add_option("--T-base", so.t_base, "schedule base");
    sweep_cmd->add_option("--T-factor", so.t_factor, "schedule factor");
    sweep_cmd->add_option("--n-max", so.n_max, "schedule length: T = base*factor^n, n=1..n-max");
    sweep_cmd->add_option("--trials", so.trials, "trials per point");
    sweep_cmd->add_option("--seed", so.seed, "master seed")->required();
    sweep_cmd->add_option("--out-dir", so.out_dir, "output directory");
    sweep_cmd->add_option("--workers", so.workers, "parallel trial workers");
    sweep_cmd->add_option("--esprit-cap", so.esprit_cap, "largest T esprit runs at");
    sweep_cmd->add_option("--qpe-d", so.qpe_ancilla, "fixed qpe ancilla count (-1: from T)");

    auto* check_cmd = app.add_subcommand("check", "run fast library invariant checks");

    // config file defaults load before CLI flags override them
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") apply_config_file(so, argv[i + 1]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << "usage: qmegs {model|run|sweep|check} [options]; see --help\n";
        return 2;
    }

    try {
        if (model_cmd->parsed()) return cmd_model(mo);
        if (run_cmd->parsed()) return cmd_run(ro);
        if (sweep_cmd->parsed()) return cmd_sweep(so);
        if (check_cmd->parsed()) return cmd_check();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int main(int argc, char** argv) { return cli_main(argc, argv); }
