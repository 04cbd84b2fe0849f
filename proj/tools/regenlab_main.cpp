// Command-line entry point: parse a TOML config with per-experiment tables,
// apply --set overrides, dispatch the requested experiment and print a
// one-line JSON summary on stdout (diagnostics go to stderr).
//
// Exit codes: 0 success, 1 experiment failed its configured thresholds,
// 2 usage/validation error, 3 I/O error.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "regenlab/config.hpp"
#include "regenlab/experiments.hpp"

using namespace regenlab;

namespace {

struct CliArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out_dir;
    int threads = 0;
};

int resolve_threads(const CliArgs& args, const TomlConfig& cfg) {
    if (args.threads > 0) return args.threads;
    if (const char* env = std::getenv("REGEN_STABLE_THREADS")) {
        int t = std::atoi(env);
        if (t > 0) return t;
    }
    return static_cast<int>(cfg.table("").get_int("threads", 1));
}

std::uint64_t resolve_seed(const CliArgs& args, const TomlConfig& cfg) {
    if (args.seed_given) return args.seed;
    return static_cast<std::uint64_t>(cfg.table("").get_int("seed", 1));
}

std::string resolve_out(const CliArgs& args, const TomlConfig& cfg) {
    if (!args.out_dir.empty()) return args.out_dir;
    return cfg.table("").get_string("out", "out");
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"", {"seed", "threads", "out"}},
        {"covering_check",
         {"beta", "epsilon", "horizon", "probes", "replications", "z_tolerance"}},
        {"localtime_moments",
         {"beta", "p", "epsilon", "t", "replications", "orders", "rel_tolerances"}},
        {"joint_moments",
         {"beta", "p", "index_sets", "times", "epsilon", "replications", "max_evaluations",
          "target_rel_error", "sigma_tolerance", "quadrature_rel_se_max", "psi_outer",
          "psi_max_evaluations"}},
        {"simulate_z",
         {"alpha", "beta", "p", "m", "n_arrivals", "epsilon", "grid", "replications"}},
        {"selfsim",
         {"alpha", "beta", "p", "t0", "scale", "n_paths", "m", "n_arrivals", "epsilon",
          "ks_level"}},
        {"flow_convergence",
         {"backend", "beta", "p", "n_grid", "replications", "t", "final_rel_tolerance",
          "inversion_sigma"}},
        {"clt_compare",
         {"backend", "alpha", "beta", "p", "n_grid", "replications", "reference_paths", "m",
          "n_arrivals", "epsilon", "bootstrap", "decrease_sigma"}},
        {"model", {"alpha", "beta", "p"}},
    };
    return keys;
}

// every table and key in the config (including applied overrides) must be
// known; the diagnostic lists all offending fields at once
void validate_config(const TomlConfig& cfg) {
    std::vector<std::string> bad;
    for (const auto& name : cfg.table_names()) {
        auto it = known_keys().find(name);
        if (it == known_keys().end()) {
            bad.push_back("[" + name + "] (unknown table)");
            continue;
        }
        for (const auto& k : cfg.table(name).keys())
            if (!it->second.count(k))
                bad.push_back((name.empty() ? "(global)." : name + ".") + k);
    }
    if (!bad.empty()) {
        std::string msg = "unknown config fields:";
        for (const auto& b : bad) msg += " " + b;
        throw ConfigError(msg);
    }
}

// the quantitative flow experiments run on the renewal chain; the interval-map
// backend offers orbit statistics only and is not wired to these runners
void check_backend(const TomlTable& t) {
    std::string backend = t.get_string("backend", "renewal");
    if (backend != "renewal")
        throw std::invalid_argument(
            "backend '" + backend +
            "' not supported here: quantitative flow experiments run on the renewal chain");
}

std::vector<long> to_longs(const std::vector<double>& xs) {
    std::vector<long> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(static_cast<long>(x));
    return out;
}

std::vector<int> to_ints(const std::vector<double>& xs) {
    std::vector<int> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(static_cast<int>(x));
    return out;
}

// index sets arrive as a flat numeric list grouped in rows of p
std::vector<std::vector<int>> group_index_sets(const std::vector<double>& flat, int p) {
    if (flat.empty() || flat.size() % static_cast<std::size_t>(p) != 0)
        throw ConfigError("index_sets length must be a positive multiple of p");
    std::vector<std::vector<int>> sets;
    for (std::size_t i = 0; i < flat.size(); i += static_cast<std::size_t>(p)) {
        std::vector<int> s;
        for (int j = 0; j < p; ++j) s.push_back(static_cast<int>(flat[i + static_cast<std::size_t>(j)]));
        sets.push_back(std::move(s));
    }
    return sets;
}

void print_summary_line(const std::string& kind, const StatSummary& s,
                        const std::string& out_dir) {
    nlohmann::json j;
    j["experiment"] = kind;
    j["pass"] = s.pass;
    j["mean"] = s.mean;
    j["std_error"] = s.std_error;
    j["n_samples"] = s.n_samples;
    if (s.ks_statistic) j["ks"] = *s.ks_statistic;
    if (s.ks_pvalue) j["ks_pvalue"] = *s.ks_pvalue;
    if (!s.warnings.empty()) j["warnings"] = s.warnings;
    j["out_dir"] = out_dir;
    std::cout << j.dump() << "\n";
}

int run_simulate_z(const TomlConfig& cfg, std::uint64_t seed, const RunOptions& opts) {
    const auto& t = cfg.table("simulate_z");
    double alpha = t.get_double("alpha", 0.8);
    double beta = t.get_double("beta", 0.75);
    int p = static_cast<int>(t.get_int("p", 2));
    SeriesTruncation trunc{static_cast<int>(t.get_int("m", 12)),
                           static_cast<int>(t.get_int("n_arrivals", 50))};
    double epsilon = t.get_double("epsilon", 1e-4);
    std::vector<double> grid = t.get_doubles("grid", {0.0, 0.25, 0.5, 0.75, 1.0});
    long reps = t.get_int("replications", 100);

    std::filesystem::create_directories(opts.out_dir);
    CsvWriter csv((std::filesystem::path(opts.out_dir) / "z_paths.csv").string(),
                  {"replication", "t", "Z"});
    std::vector<double> endpoints(static_cast<std::size_t>(reps));
    for (long i = 0; i < reps; ++i) {
        auto rng = make_stream(seed, "simulate-z", static_cast<std::uint64_t>(i));
        auto path = sample_multistable_path(alpha, beta, p, trunc, epsilon, grid, rng);
        for (std::size_t g = 0; g < grid.size(); ++g)
            csv.row({std::to_string(i), CsvWriter::num(grid[g]),
                     CsvWriter::num(path.values[g])});
        endpoints[static_cast<std::size_t>(i)] = path.values.back();
    }
    nlohmann::json meta = {{"alpha", alpha},
                           {"beta", beta},
                           {"p", p},
                           {"m", trunc.active_max_index},
                           {"n_arrivals", trunc.n_arrivals},
                           {"epsilon", epsilon},
                           {"grid", grid},
                           {"replications", reps},
                           {"seed", seed},
                           {"hurst", hurst_exponent(alpha, beta, p)},
                           {"library_version", library_version}};
    {
        std::ofstream mf(std::filesystem::path(opts.out_dir) / "z_run.json");
        if (!mf) throw std::runtime_error("cannot write z_run.json");
        mf << meta.dump(2) << "\n";
    }
    StatSummary s;
    auto st = summarize(endpoints);
    s.mean = st.mean;
    s.std_error = st.std_error;
    s.n_samples = reps;
    s.pass = true;
    print_summary_line("simulate_z", s, opts.out_dir);
    return 0;
}

int run_info(const TomlConfig& cfg) {
    const auto& t = cfg.table("model");
    double alpha = t.get_double("alpha", 0.8);
    double beta = t.get_double("beta", 0.75);
    int p = static_cast<int>(t.get_int("p", 2));
    LocalTimeParams params(beta, p);
    double bp = params.index();
    double h = hurst_exponent(alpha, beta, p);
    double ca = stable_norm_constant(alpha);
    std::cerr << "alpha = " << alpha << ", beta = " << beta << ", p = " << p << "\n"
              << "intersection index beta_p = " << bp << "\n"
              << "Hurst exponent H          = " << h << "\n"
              << "C_alpha                   = " << ca << "\n"
              << "c_n log-log slope target  = " << h << "\n"
              << "first moment of L at t=1  = "
              << closed_increment_moment(beta, p, 1, 0.0, 1.0) << "\n"
              << "second moment of L at t=1 = "
              << closed_increment_moment(beta, p, 2, 0.0, 1.0) << "\n";
    nlohmann::json j = {{"experiment", "info"},
                        {"alpha", alpha},
                        {"beta", beta},
                        {"p", p},
                        {"beta_p", bp},
                        {"hurst", h},
                        {"c_alpha", ca},
                        {"pass", true}};
    std::cout << j.dump() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stable-regenerative process laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    CliArgs args;
    app.add_option("--config", args.config_path, "TOML config file");
    app.add_option("--set", args.overrides, "override table.key=value (repeatable)");
    auto* seed_opt = app.add_option("--seed", args.seed, "master seed");
    app.add_option("--out", args.out_dir, "output directory");
    app.add_option("--threads", args.threads, "worker threads");

    auto* covering = app.add_subcommand("covering-check", "coverage probability vs closed form");
    auto* ltm = app.add_subcommand("localtime-moments", "local-time moments vs closed form");
    auto* jm = app.add_subcommand("joint-moments", "joint-moment oracle triangle");
    auto* simz = app.add_subcommand("simulate-z", "sample limit-process paths to CSV");
    auto* selfsim = app.add_subcommand("selfsim", "self-similarity KS test of the limit process");
    auto* flow = app.add_subcommand("flow-convergence", "flow local-time moment convergence");
    auto* clt = app.add_subcommand("clt-compare", "partial sums vs limit marginal KS trend");
    auto* info = app.add_subcommand("info", "print derived parameters for the config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    args.seed_given = seed_opt->count() > 0;

    try {
        TomlConfig cfg;
        if (!args.config_path.empty()) {
            if (!std::filesystem::exists(args.config_path)) {
                std::cerr << "config file not found: " << args.config_path << "\n";
                return 2;
            }
            cfg = TomlConfig::parse_file(args.config_path);
        }
        for (const auto& o : args.overrides) cfg.apply_override(o);
        validate_config(cfg);

        RunOptions opts;
        opts.threads = resolve_threads(args, cfg);
        opts.out_dir = resolve_out(args, cfg);
        std::uint64_t seed = resolve_seed(args, cfg);

        if (info->parsed()) return run_info(cfg);
        if (simz->parsed()) return run_simulate_z(cfg, seed, opts);

        StatSummary summary;
        std::string kind;
        if (covering->parsed()) {
            kind = "covering_check";
            const auto& t = cfg.table(kind);
            CoveringCheckParams p;
            p.beta = t.get_double("beta", p.beta);
            p.epsilon = t.get_double("epsilon", p.epsilon);
            p.horizon = t.get_double("horizon", p.horizon);
            p.probes = t.get_doubles("probes", p.probes);
            p.replications = t.get_int("replications", p.replications);
            p.z_tolerance = t.get_double("z_tolerance", p.z_tolerance);
            summary = run_covering_check(p, seed, opts);
        } else if (ltm->parsed()) {
            kind = "localtime_moments";
            const auto& t = cfg.table(kind);
            LocaltimeMomentsParams p;
            p.beta = t.get_double("beta", p.beta);
            p.multiplicity = static_cast<int>(t.get_int("p", p.multiplicity));
            p.epsilon = t.get_double("epsilon", p.epsilon);
            p.t = t.get_double("t", p.t);
            p.replications = t.get_int("replications", p.replications);
            p.orders = to_ints(t.get_doubles("orders", {1, 2}));
            p.rel_tolerances = t.get_doubles("rel_tolerances", p.rel_tolerances);
            summary = run_localtime_moments(p, seed, opts);
        } else if (jm->parsed()) {
            kind = "joint_moments";
            const auto& t = cfg.table(kind);
            JointMomentsParams p;
            p.spec.beta = t.get_double("beta", p.spec.beta);
            p.spec.multiplicity = static_cast<int>(t.get_int("p", p.spec.multiplicity));
            if (t.has("index_sets"))
                p.spec.index_sets =
                    group_index_sets(t.at("index_sets").as_doubles(), p.spec.multiplicity);
            p.spec.times = t.get_doubles("times", p.spec.times);
            p.epsilon = t.get_double("epsilon", p.epsilon);
            p.replications = t.get_int("replications", p.replications);
            p.budget.max_evaluations = t.get_int("max_evaluations", p.budget.max_evaluations);
            p.budget.target_rel_error = t.get_double("target_rel_error", p.budget.target_rel_error);
            p.sigma_tolerance = t.get_double("sigma_tolerance", p.sigma_tolerance);
            p.quadrature_rel_se_max =
                t.get_double("quadrature_rel_se_max", p.quadrature_rel_se_max);
            p.psi_outer = t.get_int("psi_outer", p.psi_outer);
            p.psi_budget.max_evaluations =
                t.get_int("psi_max_evaluations", p.psi_budget.max_evaluations);
            summary = run_joint_moments(p, seed, opts);
        } else if (selfsim->parsed()) {
            kind = "selfsim";
            const auto& t = cfg.table(kind);
            ZSelfsimParams p;
            p.alpha = t.get_double("alpha", p.alpha);
            p.beta = t.get_double("beta", p.beta);
            p.multiplicity = static_cast<int>(t.get_int("p", p.multiplicity));
            p.t0 = t.get_double("t0", p.t0);
            p.scale = t.get_double("scale", p.scale);
            p.n_paths = t.get_int("n_paths", p.n_paths);
            p.truncation.active_max_index =
                static_cast<int>(t.get_int("m", p.truncation.active_max_index));
            p.truncation.n_arrivals =
                static_cast<int>(t.get_int("n_arrivals", p.truncation.n_arrivals));
            p.epsilon = t.get_double("epsilon", p.epsilon);
            p.ks_level = t.get_double("ks_level", p.ks_level);
            summary = run_z_selfsim(p, seed, opts);
        } else if (flow->parsed()) {
            kind = "flow_convergence";
            const auto& t = cfg.table(kind);
            check_backend(t);
            FlowConvergenceParams p;
            p.beta = t.get_double("beta", p.beta);
            p.multiplicity = static_cast<int>(t.get_int("p", p.multiplicity));
            if (t.has("n_grid")) p.n_grid = to_longs(t.at("n_grid").as_doubles());
            p.replications = t.get_int("replications", p.replications);
            p.t = t.get_double("t", p.t);
            p.final_rel_tolerance = t.get_double("final_rel_tolerance", p.final_rel_tolerance);
            p.inversion_sigma = t.get_double("inversion_sigma", p.inversion_sigma);
            summary = run_flow_convergence(p, seed, opts);
        } else if (clt->parsed()) {
            kind = "clt_compare";
            const auto& t = cfg.table(kind);
            check_backend(t);
            CltCompareParams p;
            p.alpha = t.get_double("alpha", p.alpha);
            p.beta = t.get_double("beta", p.beta);
            p.multiplicity = static_cast<int>(t.get_int("p", p.multiplicity));
            if (t.has("n_grid")) p.n_grid = to_longs(t.at("n_grid").as_doubles());
            p.replications = t.get_int("replications", p.replications);
            p.reference_paths = t.get_int("reference_paths", p.reference_paths);
            p.truncation.active_max_index =
                static_cast<int>(t.get_int("m", p.truncation.active_max_index));
            p.truncation.n_arrivals =
                static_cast<int>(t.get_int("n_arrivals", p.truncation.n_arrivals));
            p.epsilon = t.get_double("epsilon", p.epsilon);
            p.bootstrap = t.get_int("bootstrap", p.bootstrap);
            p.decrease_sigma = t.get_double("decrease_sigma", p.decrease_sigma);
            summary = run_clt_compare(p, seed, opts);
        }

        print_summary_line(kind, summary, opts.out_dir);
        if (!summary.pass) {
            std::cerr << kind << ": configured threshold not met\n";
            return 1;
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    }
}
