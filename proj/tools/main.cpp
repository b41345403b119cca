// nullhom: command line front door for the null-homology toolkit.
// Subcommands: mrw analyze|lattice|simulate, rcm verify|clt|scan,
// diag tightness|equivalence|schauder. Every run writes a manifest with the
// fully resolved configuration; identical config + seed reproduces outputs
// byte for byte.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "cli_helpers.hpp"
#include "nullhom/corrector.hpp"
#include "nullhom/lattice.hpp"
#include "nullhom/mrw_io.hpp"
#include "nullhom/mrw_simulate.hpp"
#include "nullhom/quenched_walk.hpp"
#include "nullhom/rcm_reports.hpp"
#include "nullhom/sampler.hpp"
#include "nullhom/schauder.hpp"
#include "nullhom/tightness.hpp"

using namespace nullhom;
using cli::json;
using cli::Overrides;
using cli::RunContext;

namespace {

// ---------------------------------------------------------------- mrw ------

int cmd_mrw_analyze(const Overrides& ov) {
    auto ctx = cli::make_context("mrw analyze",
                                 json{{"chain", ""}, {"tol", 1e-9}}, ov);
    auto bundle = load_mrw_bundle(ctx.config.at("chain").get<std::string>());

    json report{{"exact", bundle.exact()}, {"tol", ctx.config.at("tol")}};
    bool yes = false;
    if (bundle.exact()) {
        auto decision = decide_null_homology(bundle.chain, *bundle.exact_increments);
        if (auto* xi = std::get_if<ShiftFunction<Rational>>(&decision)) {
            yes = true;
            report["shift_function"] = cli::shift_function_json(*xi);
        } else {
            report["counterexample"] =
                cli::counterexample_json(std::get<CounterexampleCycle<Rational>>(decision));
        }
    } else {
        auto decision = decide_null_homology(bundle.chain, bundle.increments,
                                             ctx.config.at("tol").get<double>());
        if (auto* xi = std::get_if<ShiftFunction<double>>(&decision)) {
            yes = true;
            report["shift_function"] = cli::shift_function_json(*xi);
        } else {
            report["counterexample"] =
                cli::counterexample_json(std::get<CounterexampleCycle<double>>(decision));
        }
    }
    report["null_homologous"] = yes;
    cli::announce(ctx.write_report("decision.json", report));
    return yes ? cli::kOk : cli::kNegative;
}

int cmd_mrw_lattice(const Overrides& ov) {
    auto ctx = cli::make_context("mrw lattice", json{{"chain", ""}}, ov);
    auto bundle = load_mrw_bundle(ctx.config.at("chain").get<std::string>());
    if (!bundle.exact())
        throw RequiresExactScalars(
            "lattice analysis needs rational annotations on every increment");

    auto rep = lattice_span(bundle.chain, *bundle.exact_increments);
    json cycles = json::array();
    for (const auto& w : rep.witness_cycles)
        cycles.push_back(json{{"states", w.states}, {"residue", cli::rational_json(w.residue)}});
    json tree = json::array(), shift = json::array();
    for (const auto& v : rep.tree_potential) tree.push_back(cli::rational_json(v));
    for (const auto& v : rep.shift_mod) shift.push_back(cli::rational_json(v));
    json report{{"span", cli::rational_json(rep.span)},
                {"degenerate", rep.degenerate()},
                {"nonarithmetic", rep.nonarithmetic},
                {"tree_potential", std::move(tree)},
                {"shift_mod", std::move(shift)},
                {"witness_cycles", std::move(cycles)}};
    cli::announce(ctx.write_report("lattice.json", report));
    return cli::kOk;
}

int cmd_mrw_simulate(const Overrides& ov) {
    auto ctx = cli::make_context(
        "mrw simulate",
        json{{"chain", ""}, {"n", 1000}, {"reps", 1}, {"start", "stationary"}}, ov);
    auto bundle = load_mrw_bundle(ctx.config.at("chain").get<std::string>());

    StartMode mode = StartMode::Stationary;
    int start_state = 0;
    const auto& start = ctx.config.at("start");
    if (start.is_number_integer()) {
        mode = StartMode::FixedState;
        start_state = start.get<int>();
    } else if (start.get<std::string>() != "stationary") {
        throw ParseError("start must be 'stationary' or a state index");
    }

    const int n = ctx.config.at("n").get<int>();
    const int reps = ctx.config.at("reps").get<int>();
    RandomSource src(ctx.seed(), 0);
    json files = json::array();
    for (int rep = 0; rep < reps; ++rep) {
        auto traj = simulate_mrw(bundle.chain, bundle.increments, n,
                                 src.substream(static_cast<std::uint64_t>(rep)), mode,
                                 start_state);
        auto path = ctx.out / ("trajectory_" + std::to_string(rep) + ".csv");
        std::ofstream os(path);
        write_trajectory_csv(os, traj);
        files.push_back(path.string());
    }
    json report{{"n", n}, {"reps", reps}, {"trajectories", std::move(files)}};
    cli::announce(ctx.write_report("simulate.json", report));
    return cli::kOk;
}

// ---------------------------------------------------------------- rcm ------

int cmd_rcm_verify(const Overrides& ov) {
    auto ctx = cli::make_context("rcm verify",
                                 json{{"dim", 2},
                                      {"L", 8},
                                      {"a", 0.5},
                                      {"b", 1.5},
                                      {"fields", 50},
                                      {"epsilon", 0.1},
                                      {"neumann_tol", 1e-9},
                                      {"walk_steps", 500},
                                      {"inject_fault", false}},
                                 ov);
    const int dim = ctx.config.at("dim").get<int>();
    const int L = ctx.config.at("L").get<int>();
    const double a = ctx.config.at("a").get<double>();
    const double b = ctx.config.at("b").get<double>();
    const int n_fields = ctx.config.at("fields").get<int>();
    const double eps = ctx.config.at("epsilon").get<double>();
    const double neumann_tol = ctx.config.at("neumann_tol").get<double>();
    const bool inject = ctx.config.at("inject_fault").get<bool>();
    RandomSource src(ctx.seed(), 0);

    struct Residuals {
        double stochasticity = 0, invariance = 0, self_adjoint = 0, drift_mean = 0;
        double poisson = 0, neumann_vs_direct = 0, plaquette = 0, winding = 0;
        double harmonic = 0, stationary_gradient = 0, martingale = 0;
    } worst;

    for (int i = 0; i < n_fields; ++i) {
        auto field = ConductanceField::sample(dim, L, a, b, src.substream(2 * i));
        auto env = build_environment(field);
        auto er = environment_residuals(env);
        worst.stochasticity = std::max(worst.stochasticity, er.stochasticity);
        worst.invariance = std::max(worst.invariance, er.invariance);
        worst.self_adjoint = std::max(worst.self_adjoint, er.self_adjointness);

        auto drift = local_drift(field);
        worst.drift_mean =
            std::max(worst.drift_mean, (env.q.transpose() * drift).cwiseAbs().maxCoeff());

        auto g_eps = solve_poisson(env, drift, eps);
        Eigen::MatrixXd A =
            (1.0 + eps) * Eigen::MatrixXd::Identity(env.pi_hat.rows(), env.pi_hat.rows()) -
            env.pi_hat;
        worst.poisson = std::max(worst.poisson, (A * g_eps - drift).cwiseAbs().maxCoeff());
        auto g_series = neumann_series(env, drift, eps, neumann_tol);
        worst.neumann_vs_direct =
            std::max(worst.neumann_vs_direct, (g_eps - g_series).cwiseAbs().maxCoeff());

        auto corr = limit_gradient(field, env, drift);
        if (inject && i == 0) corr.v(1, 0) += 0.1;
        worst.plaquette = std::max(worst.plaquette, max_plaquette_residual(corr, field));
        worst.winding = std::max(worst.winding, max_winding_residual(corr, field));
        worst.harmonic = std::max(worst.harmonic, check_harmonic(field, corr));
        worst.stationary_gradient =
            std::max(worst.stationary_gradient, check_stationary_gradient(field, corr));

        auto walk = simulate_quenched_walk(field, ctx.config.at("walk_steps").get<int>(),
                                           src.substream(2 * i + 1));
        worst.martingale =
            std::max(worst.martingale, corrected_martingale_check(walk, corr).max_residual);
    }

    json checks{{"stochasticity", {{"value", worst.stochasticity}, {"tol", 1e-12}}},
                {"q_invariance", {{"value", worst.invariance}, {"tol", 1e-12}}},
                {"self_adjointness", {{"value", worst.self_adjoint}, {"tol", 1e-12}}},
                {"drift_q_mean", {{"value", worst.drift_mean}, {"tol", 1e-12}}},
                {"poisson_residual", {{"value", worst.poisson}, {"tol", 1e-10}}},
                {"neumann_vs_direct", {{"value", worst.neumann_vs_direct}, {"tol", 1e-7}}},
                {"closed_loop", {{"value", worst.plaquette}, {"tol", 1e-8}}},
                {"torus_winding", {{"value", worst.winding}, {"tol", 1e-12}}},
                {"harmonicity", {{"value", worst.harmonic}, {"tol", 1e-8}}},
                {"stationary_gradient", {{"value", worst.stationary_gradient}, {"tol", 1e-10}}},
                {"corrected_martingale", {{"value", worst.martingale}, {"tol", 1e-8}}}};
    bool all_pass = true;
    for (auto& [name, entry] : checks.items()) {
        bool ok = entry.at("value").get<double>() <= entry.at("tol").get<double>();
        entry["pass"] = ok;
        all_pass = all_pass && ok;
    }
    json report{{"fields", n_fields},
                {"dim", dim},
                {"L", L},
                {"epsilon", eps},
                {"inject_fault", inject},
                {"checks", std::move(checks)},
                {"all_pass", all_pass}};
    cli::announce(ctx.write_report("verify.json", report));
    return all_pass ? cli::kOk : cli::kNegative;
}

ConductanceField field_from_config(const json& cfg, RandomSource src) {
    const int dim = cfg.at("dim").get<int>();
    const int L = cfg.at("L").get<int>();
    if (cfg.at("field").get<std::string>() == "constant")
        return ConductanceField::constant(dim, L, cfg.at("weight").get<double>());
    return ConductanceField::sample(dim, L, cfg.at("a").get<double>(),
                                    cfg.at("b").get<double>(), src);
}

int cmd_rcm_clt(const Overrides& ov) {
    auto ctx = cli::make_context("rcm clt",
                                 json{{"field", "constant"},
                                      {"weight", 1.0},
                                      {"dim", 1},
                                      {"L", 8},
                                      {"a", 0.5},
                                      {"b", 1.5},
                                      {"n", 2000},
                                      {"reps", 10000},
                                      {"ks_threshold", 0.0}},
                                 ov);
    RandomSource src(ctx.seed(), 0);
    auto field = field_from_config(ctx.config, src.substream(0));
    auto rep = clt_experiment(field, ctx.config.at("n").get<int>(),
                              ctx.config.at("reps").get<int>(), src.substream(1),
                              ctx.threads());

    auto samples_path = ctx.out / "samples.csv";
    {
        std::ofstream os(samples_path);
        os << "rep";
        for (int c = 0; c < field.dim(); ++c) os << ",s" << c;
        os << "\n";
        for (Eigen::Index r = 0; r < rep.endpoints.rows(); ++r) {
            os << r;
            for (Eigen::Index c = 0; c < rep.endpoints.cols(); ++c)
                os << "," << double_to_string(rep.endpoints(r, c));
            os << "\n";
        }
    }

    const double threshold = ctx.config.at("ks_threshold").get<double>();
    bool enforced = threshold > 0.0;
    bool pass = !enforced || rep.max_ks <= threshold;
    json report{{"n", rep.n},
                {"reps", rep.reps},
                {"sigma2", rep.sigma2},
                {"ks", rep.ks},
                {"max_ks", rep.max_ks},
                {"ks_threshold", threshold},
                {"threshold_enforced", enforced},
                {"pass", pass},
                {"samples_csv", samples_path.string()}};
    cli::announce(ctx.write_report("clt.json", report));
    return pass ? cli::kOk : cli::kNegative;
}

int cmd_rcm_scan(const Overrides& ov) {
    auto ctx = cli::make_context("rcm scan",
                                 json{{"dim", 2},
                                      {"a", 0.5},
                                      {"b", 1.5},
                                      {"sides", json::array({4, 8, 12})},
                                      {"reps", 8}},
                                 ov);
    auto sides = ctx.config.at("sides").get<std::vector<int>>();
    auto rep = corrector_scan(ctx.config.at("dim").get<int>(), ctx.config.at("a").get<double>(),
                              ctx.config.at("b").get<double>(), sides,
                              ctx.config.at("reps").get<int>(), RandomSource(ctx.seed(), 0),
                              ctx.threads());

    auto csv_path = ctx.out / "scan.csv";
    {
        std::ofstream os(csv_path);
        os << "L,rep,max_abs_V,max_abs_V_over_L\n";
        for (const auto& row : rep.rows)
            os << row.L << "," << row.rep << "," << double_to_string(row.max_abs_v) << ","
               << double_to_string(row.max_abs_v_over_L) << "\n";
    }

    json summaries = json::array();
    for (const auto& s : rep.summaries)
        summaries.push_back(json{{"L", s.L},
                                 {"median_max_v", s.median_max_v},
                                 {"upper_quartile_max_v", s.upper_quartile_max_v},
                                 {"median_ratio", s.median_ratio},
                                 {"upper_quartile_ratio", s.upper_quartile_ratio}});
    json report{{"sides", sides},
                {"reps", ctx.config.at("reps")},
                {"summaries", std::move(summaries)},
                {"scan_csv", csv_path.string()}};
    cli::announce(ctx.write_report("scan.json", report));
    return cli::kOk;
}

// --------------------------------------------------------------- diag ------

SamplerHandle sampler_from_config(const json& cfg) {
    const auto type = cfg.at("type").get<std::string>();
    if (type == "srw") return make_srw_sampler(cfg.at("dim").get<int>());
    if (type == "iid") {
        std::vector<Eigen::VectorXd> values;
        for (const auto& row : cfg.at("values")) {
            auto v = row.get<std::vector<double>>();
            values.push_back(Eigen::Map<Eigen::VectorXd>(v.data(),
                                                         static_cast<Eigen::Index>(v.size())));
        }
        return make_iid_sampler(std::move(values), cfg.at("probs").get<std::vector<double>>());
    }
    if (type == "mrw") {
        auto bundle = load_mrw_bundle(cfg.at("chain").get<std::string>());
        return make_mrw_sampler(bundle.chain, bundle.increments);
    }
    throw ParseError("sampler type must be srw, iid or mrw");
}

int cmd_diag_tightness(const Overrides& ov) {
    auto ctx = cli::make_context(
        "diag tightness",
        json{{"sampler", json{{"type", "srw"}, {"dim", 1}}},
             {"horizons", json::array({32, 64, 128, 256, 512, 1024})},
             {"reps", 400},
             {"levels", json::array({0.9, 0.99})}},
        ov);
    auto sampler = sampler_from_config(ctx.config.at("sampler"));
    auto rep = tightness_diagnostic(sampler, ctx.config.at("horizons").get<std::vector<int>>(),
                                    ctx.config.at("reps").get<int>(),
                                    ctx.config.at("levels").get<std::vector<double>>(),
                                    RandomSource(ctx.seed(), 0), ctx.threads());
    cli::write_quantiles_csv(ctx.out / "quantiles.csv", rep);
    json report = cli::tightness_json(rep);
    report["sampler"] = ctx.config.at("sampler");
    report["quantiles_csv"] = (ctx.out / "quantiles.csv").string();
    cli::announce(ctx.write_report("tightness.json", report));
    return cli::kOk;
}

int cmd_diag_equivalence(const Overrides& ov) {
    auto ctx = cli::make_context(
        "diag equivalence",
        json{{"chain", ""},
             {"horizons", json::array({32, 64, 128, 256, 512, 1024})},
             {"reps", 400},
             {"levels", json::array({0.9, 0.99})},
             {"tol", 1e-9}},
        ov);
    auto bundle = load_mrw_bundle(ctx.config.at("chain").get<std::string>());
    EquivalenceConfig cfg;
    cfg.horizons = ctx.config.at("horizons").get<std::vector<int>>();
    cfg.reps = ctx.config.at("reps").get<int>();
    cfg.levels = ctx.config.at("levels").get<std::vector<double>>();
    cfg.tol = ctx.config.at("tol").get<double>();
    cfg.threads = ctx.threads();
    auto rep = theorem_equivalence_experiment(bundle.chain, bundle.increments, cfg,
                                              RandomSource(ctx.seed(), 0));
    json report{{"null_homologous", rep.null_homologous},
                {"mu_mean_norm", rep.mu_mean_norm},
                {"tightness", cli::tightness_json(rep.tightness)},
                {"hard_assertion_applicable", rep.hard_assertion_applicable},
                {"hard_assertion_holds", rep.hard_assertion_holds},
                {"note", rep.note}};
    if (rep.counterexample)
        report["counterexample"] = cli::counterexample_json(*rep.counterexample);
    cli::announce(ctx.write_report("equivalence.json", report));
    return rep.hard_assertion_holds ? cli::kOk : cli::kNegative;
}

int cmd_diag_schauder(const Overrides& ov) {
    auto ctx = cli::make_context(
        "diag schauder",
        json{{"window", ""}, {"length", 12}, {"dim", 1}, {"offset", -4}, {"k_max", 5}}, ov);
    const int k_max = ctx.config.at("k_max").get<int>();

    SchauderReport rep;
    const auto window_path = ctx.config.at("window").get<std::string>();
    if (!window_path.empty()) {
        std::ifstream in(window_path);
        if (!in) throw ParseError("cannot open window CSV: " + window_path);
        auto w = read_window_csv<long long>(in);
        rep = schauder_map_checks(w, k_max);
    } else {
        RandomSource src(ctx.seed(), 0);
        const auto len = static_cast<std::size_t>(ctx.config.at("length").get<int>());
        const auto dim = static_cast<std::size_t>(ctx.config.at("dim").get<int>());
        std::vector<long long> vals(len * dim);
        for (auto& v : vals) v = static_cast<long long>(src.uniform() * 41) - 20;
        auto w = PathWindow<long long>(ctx.config.at("offset").get<long long>(), dim,
                                       std::move(vals));
        rep = schauder_map_checks(w, k_max);
    }
    json report{{"k_max", rep.k_max},
                {"lambda_composition_ok", rep.lambda_composition_ok},
                {"shift_commutes_ok", rep.shift_commutes_ok},
                {"y_recursion_ok", rep.y_recursion_ok},
                {"all_ok", rep.all_ok()}};
    cli::announce(ctx.write_report("schauder.json", report));
    return rep.all_ok() ? cli::kOk : cli::kNegative;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"null-homology toolkit: exact coboundary decisions, lattice "
                 "analysis, and random conductance verification"};
    app.require_subcommand(1);

    Overrides ov;
    app.add_option("--config", ov.config_path, "Config file (.json or .toml)");
    app.add_option("--out", ov.out_dir, "Output directory");
    app.add_option("--seed", ov.seed, "Random seed")->each([&](const std::string&) {
        ov.seed_set = true;
    });
    app.add_option("--threads", ov.threads, "Worker thread cap")->each([&](const std::string&) {
        ov.threads_set = true;
    });
    app.add_option("--tol", ov.tol, "Tolerance override")->each([&](const std::string&) {
        ov.tol_set = true;
    });

    int (*handler)(const Overrides&) = nullptr;
    auto wire = [&](CLI::App* cmd, int (*fn)(const Overrides&)) {
        cmd->fallthrough();
        cmd->callback([&handler, fn] { handler = fn; });
    };

    auto* mrw = app.add_subcommand("mrw", "Finite-state Markov random walks");
    mrw->fallthrough();
    mrw->require_subcommand(1);
    wire(mrw->add_subcommand("analyze", "Exact null-homology decision"), cmd_mrw_analyze);
    wire(mrw->add_subcommand("lattice", "Lattice span and shift function"), cmd_mrw_lattice);
    wire(mrw->add_subcommand("simulate", "Sample trajectories to CSV"), cmd_mrw_simulate);

    auto* rcm = app.add_subcommand("rcm", "Random conductance model");
    rcm->fallthrough();
    rcm->require_subcommand(1);
    wire(rcm->add_subcommand("verify", "Corrector identity battery"), cmd_rcm_verify);
    wire(rcm->add_subcommand("clt", "Scaled endpoint law vs Gaussian"), cmd_rcm_clt);
    wire(rcm->add_subcommand("scan", "Corrector growth across torus sizes"), cmd_rcm_scan);

    auto* diag = app.add_subcommand("diag", "Statistical diagnostics");
    diag->fallthrough();
    diag->require_subcommand(1);
    wire(diag->add_subcommand("tightness", "Quantile growth of |S_n|"), cmd_diag_tightness);
    wire(diag->add_subcommand("equivalence", "Exact decision vs tightness verdict"),
         cmd_diag_equivalence);
    wire(diag->add_subcommand("schauder", "Commuting-map identities on a window"),
         cmd_diag_schauder);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? cli::kOk : cli::kUsageError;
    }

    if (!handler) return cli::kUsageError;
    try {
        return handler(ov);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return cli::kInputError;
    } catch (const RequiresExactScalars& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return cli::kInputError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cli::kInputError;
    }
}
