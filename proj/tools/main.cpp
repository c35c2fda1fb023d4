// Configuration-driven command line for the uncertain-correlation solver:
// pricing runs, manufactured-solution studies, self-convergence studies and
// positivity reports, all emitting CSV artifacts.

#include "CLI11.hpp"

#include "corrband/io.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <optional>

namespace fs = std::filesystem;
using namespace corrband;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCondition = 3;
constexpr int kExitSolver = 4;

struct JobConfig {
    std::string command;  // solve | mms | convergence | positivity
    std::string problem = "tp1";
    std::string domain = "B";        // mms: A | B
    std::string scenario = "worst";  // worst | best
    double rho1 = -0.2, rho2 = 0.6;
    double sigma1 = 0.2, sigma2 = 0.2;
    double r = 0.0953102, d1 = 0.0487902, d2 = 0.0;
    double strike = 100.0, w1 = 1.0, w2 = 1.0, cap = 10.0;
    double s_min = 1.0 / 200.0, s_max = 200.0;
    double maturity = -1.0;        // command default when negative
    Index n = 41;                  // nodes per direction for solve/positivity
    std::vector<Index> meshes;     // mms/convergence sequences
    std::string dt_policy = "h2";  // h2 | rt-equality | fixed
    double dt = 0.0;
    std::string solver = "gs";  // gs | direct
    std::string stencil = "sign-switched";  // sign-switched | centered
    double tol = 1e-12;
    int max_iter = 10000;
    double epsilon = 1e-30;
    bool enforce = true;
    bool literal_paper_strikes = false;
    int workers = 1;
    std::string out_dir = "out";
};

/// Flat key = value configuration file; '#' starts a comment.
void apply_config_file(JobConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw ConfigError(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    auto parse_meshes = [&](const std::string& v) {
        std::vector<Index> out;
        std::stringstream ss(v);
        std::string tok;
        while (std::getline(ss, tok, ','))
            try {
                out.push_back(std::stol(tok));
            } catch (...) {
                fail("bad mesh list entry '" + tok + "'");
            }
        return out;
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty()) fail("empty key or value");
        try {
            if (key == "command") cfg.command = value;
            else if (key == "problem") cfg.problem = value;
            else if (key == "domain") cfg.domain = value;
            else if (key == "scenario") cfg.scenario = value;
            else if (key == "rho1") cfg.rho1 = std::stod(value);
            else if (key == "rho2") cfg.rho2 = std::stod(value);
            else if (key == "sigma1") cfg.sigma1 = std::stod(value);
            else if (key == "sigma2") cfg.sigma2 = std::stod(value);
            else if (key == "r") cfg.r = std::stod(value);
            else if (key == "D1") cfg.d1 = std::stod(value);
            else if (key == "D2") cfg.d2 = std::stod(value);
            else if (key == "strike") cfg.strike = std::stod(value);
            else if (key == "w1") cfg.w1 = std::stod(value);
            else if (key == "w2") cfg.w2 = std::stod(value);
            else if (key == "cap") cfg.cap = std::stod(value);
            else if (key == "s_min") cfg.s_min = std::stod(value);
            else if (key == "s_max") cfg.s_max = std::stod(value);
            else if (key == "T") cfg.maturity = std::stod(value);
            else if (key == "N") cfg.n = std::stol(value);
            else if (key == "meshes") cfg.meshes = parse_meshes(value);
            else if (key == "dt_policy") cfg.dt_policy = value;
            else if (key == "dt") cfg.dt = std::stod(value);
            else if (key == "solver") cfg.solver = value;
            else if (key == "stencil") cfg.stencil = value;
            else if (key == "tol") cfg.tol = std::stod(value);
            else if (key == "max_iter") cfg.max_iter = std::stoi(value);
            else if (key == "epsilon") cfg.epsilon = std::stod(value);
            else if (key == "enforce") cfg.enforce = (value == "1" || value == "true" || value == "yes");
            else if (key == "literal_paper_strikes")
                cfg.literal_paper_strikes = (value == "1" || value == "true" || value == "yes");
            else if (key == "workers") cfg.workers = std::stoi(value);
            else if (key == "out") cfg.out_dir = value;
            else fail("unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            fail("bad value '" + value + "' for key '" + key + "'");
        }
    }
}

SolverConfig solver_config(const JobConfig& cfg) {
    SolverConfig sc;
    if (cfg.dt_policy == "h2") sc.policy = DtPolicy::FixedHSquared;
    else if (cfg.dt_policy == "rt-equality") sc.policy = DtPolicy::RTEquality;
    else if (cfg.dt_policy == "fixed") {
        sc.policy = DtPolicy::Explicit;
        if (!(cfg.dt > 0)) throw ConfigError("dt_policy = fixed requires dt > 0");
        sc.dt = cfg.dt;
    } else throw ConfigError("unknown dt_policy '" + cfg.dt_policy + "' (h2|rt-equality|fixed)");
    sc.enforce_positivity_conditions = cfg.enforce;
    sc.ratio.epsilon = cfg.epsilon;
    if (cfg.solver == "gs") sc.linear.method = SolveMethod::StationaryIterative;
    else if (cfg.solver == "direct") sc.linear.method = SolveMethod::DirectBanded;
    else throw ConfigError("unknown solver '" + cfg.solver + "' (gs|direct)");
    if (cfg.stencil == "sign-switched") sc.stencil = MixedStencil::SignSwitched;
    else if (cfg.stencil == "centered") sc.stencil = MixedStencil::Centered;
    else throw ConfigError("unknown stencil '" + cfg.stencil + "' (sign-switched|centered)");
    sc.linear.tol = cfg.tol;
    sc.linear.max_iter = cfg.max_iter;
    return sc;
}

MarketParams market_of(const JobConfig& cfg) {
    MarketParams p;
    p.sigma1 = cfg.sigma1;
    p.sigma2 = cfg.sigma2;
    p.r = cfg.r;
    p.d1 = cfg.d1;
    p.d2 = cfg.d2;
    p.validate();
    return p;
}

CorrelationBand band_of(const JobConfig& cfg) {
    CorrelationBand b;
    b.rho1 = cfg.rho1;
    b.rho2 = cfg.rho2;
    if (cfg.scenario == "worst") b.scenario = Scenario::WorstCase;
    else if (cfg.scenario == "best") b.scenario = Scenario::BestCase;
    else throw ConfigError("unknown scenario '" + cfg.scenario + "' (worst|best)");
    b.validate();
    return b;
}

ProblemSpec spec_of(const JobConfig& cfg) {
    TpOptions o;
    o.strike = cfg.strike;
    o.w1 = cfg.w1;
    o.w2 = cfg.w2;
    o.cap = cfg.cap;
    o.s_min = cfg.s_min;
    o.s_max = cfg.s_max;
    o.maturity = cfg.maturity >= 0 ? cfg.maturity : 2.0;
    o.params = market_of(cfg);
    o.band = band_of(cfg);
    o.literal_paper_strikes = cfg.literal_paper_strikes;
    ProblemSpec spec = make_tp(cfg.problem, o);
    spec.validate();
    return spec;
}

std::ofstream open_artifact(const JobConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    const fs::path p = fs::path(cfg.out_dir) / name;
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot write artifact '" + p.string() + "'");
    return out;
}

int run_solve(const JobConfig& cfg, bool positivity_focus) {
    const ProblemSpec spec = spec_of(cfg);
    const ProblemBindings bindings = to_bindings(spec);
    const Mesh mesh = make_mesh(spec, cfg.n, cfg.n);
    const Field initial = Field::from_function(mesh, bindings.initial);
    const DriftPair drift = drift_coefficients(spec.params);
    const StepContext ctx{bindings, spec.params, spec.band, drift, solver_config(cfg)};

    auto [final_field, run] = integrate(initial, spec.maturity, ctx);

    if (positivity_focus) {
        auto steps = open_artifact(cfg, "positivity.csv");
        write_run_report_csv(steps, run);
        const double scale = 1e-12 * std::max(1.0, run.final_max_norm);
        const bool min_ok = run.global_min >= -scale;
        std::cout << "problem " << spec.name << " N " << cfg.n << " dt_policy " << cfg.dt_policy
                  << "\n"
                  << "P1-P4 " << (run.all_conditions ? "pass" : "FAIL") << "\n"
                  << "min value over all levels " << num(run.global_min)
                  << (min_ok ? " (non-negative within tolerance)" : " NEGATIVE") << "\n"
                  << "result " << ((run.all_conditions && min_ok) ? "PASS" : "FAIL") << "\n";
        return (run.all_conditions && min_ok) ? kExitOk : kExitCondition;
    }

    auto surf = open_artifact(cfg, "surface.csv");
    write_field_csv(surf, final_field);
    auto steps = open_artifact(cfg, "run_report.csv");
    write_run_report_csv(steps, run);
    std::cout << "problem " << spec.name << " N " << cfg.n << " T " << num(spec.maturity)
              << " final max norm " << num(run.final_max_norm) << " min value "
              << num(run.global_min) << (run.zero_rate ? " [r = 0]" : "") << "\n";
    return kExitOk;
}

int run_mms_cmd(const JobConfig& cfg) {
    MmsDomain dom;
    if (cfg.domain == "A" || cfg.domain == "a") dom = MmsDomain::A;
    else if (cfg.domain == "B" || cfg.domain == "b") dom = MmsDomain::B;
    else throw ConfigError("unknown domain '" + cfg.domain + "' (A|B)");

    MmsConfig mc;
    mc.params = market_of(cfg);
    mc.maturity = cfg.maturity >= 0 ? cfg.maturity : 0.5;
    mc.solver = solver_config(cfg);
    mc.solver.enforce_positivity_conditions = false;  // sign-indefinite data
    const CorrelationBand band = band_of(cfg);
    const std::vector<Index> meshes = cfg.meshes.empty() ? std::vector<Index>{21, 41, 81}
                                                         : cfg.meshes;

    const MmsResult res = run_mms(dom, band, meshes, mc);
    auto csv = open_artifact(cfg, "convergence.csv");
    write_convergence_csv(csv, res.report);
    std::cout << convergence_table(res.report);
    return kExitOk;
}

int run_convergence(const JobConfig& cfg) {
    JobConfig c = cfg;
    if (c.maturity < 0) c.maturity = 2.0;
    const ProblemSpec spec = spec_of(c);
    const std::vector<Index> meshes =
        cfg.meshes.empty() ? std::vector<Index>{21, 41, 81, 161} : cfg.meshes;
    SolverConfig sc = solver_config(cfg);

    SelfConvergenceResult res;
    if (cfg.workers > 1) {
        // fan the independent mesh runs out to a worker pool, then reduce
        res.report.kind = ConvergenceReport::ErrorKind::TwoGrid;
        const ProblemBindings bindings = to_bindings(spec);
        const DriftPair drift = drift_coefficients(spec.params);
        std::vector<std::future<std::pair<Field, RunReport>>> futs;
        std::size_t in_flight = 0;
        std::vector<std::pair<Field, RunReport>> results;
        results.reserve(meshes.size());
        for (Index n : meshes) {
            futs.push_back(std::async(std::launch::async, [&, n]() {
                const Mesh mesh = make_mesh(spec, n, n);
                const Field initial = Field::from_function(mesh, bindings.initial);
                const StepContext ctx{bindings, spec.params, spec.band, drift, sc};
                return integrate(initial, spec.maturity, ctx);
            }));
            if (++in_flight >= static_cast<std::size_t>(cfg.workers)) {
                futs.front().wait();
                in_flight = futs.size();
            }
        }
        for (auto& f : futs) results.push_back(f.get());
        for (std::size_t k = 0; k < meshes.size(); ++k) {
            res.report.mesh.push_back(meshes[k]);
            res.report.runtime.push_back(0.0);
            res.finals.push_back(std::move(results[k].first));
            res.runs.push_back(std::move(results[k].second));
        }
        res.report.error.assign(meshes.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t k = 0; k + 1 < res.finals.size(); ++k) {
            double err = 0.0;
            const Field& coarse = res.finals[k];
            const Field& fine = res.finals[k + 1];
            for (Index j = 1; j <= coarse.mesh.n2; ++j)
                for (Index i = 1; i <= coarse.mesh.n1; ++i)
                    err = std::max(err,
                                   std::abs(coarse.at(i, j) - fine.at(2 * i - 1, 2 * j - 1)));
            res.report.error[k] = err;
        }
        std::vector<double> e = res.report.error;
        res.report.rate.assign(e.size(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t k = 1; k < e.size(); ++k)
            if (std::isfinite(e[k - 1]) && std::isfinite(e[k]) && e[k] > 0)
                res.report.rate[k] = std::log2(e[k - 1] / e[k]);
    } else {
        res = self_convergence(spec, meshes, sc);
    }

    auto csv = open_artifact(cfg, "convergence.csv");
    write_convergence_csv(csv, res.report);
    std::cout << convergence_table(res.report);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-asset option pricing under uncertain correlation"};
    app.require_subcommand(1);

    JobConfig cfg;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value configuration file");
        sub->add_option("--scenario", cfg.scenario, "worst | best");
        sub->add_option("--rho1", cfg.rho1, "lower correlation bound");
        sub->add_option("--rho2", cfg.rho2, "upper correlation bound");
        sub->add_option("--sigma1", cfg.sigma1, "volatility of asset 1");
        sub->add_option("--sigma2", cfg.sigma2, "volatility of asset 2");
        sub->add_option("--r", cfg.r, "risk-free rate");
        sub->add_option("--D1", cfg.d1, "dividend yield of asset 1");
        sub->add_option("--D2", cfg.d2, "dividend yield of asset 2");
        sub->add_option("--T", cfg.maturity, "maturity in years");
        sub->add_option("--dt", cfg.dt, "time step for dt-policy fixed");
        sub->add_option("--dt-policy", cfg.dt_policy, "h2 | rt-equality | fixed");
        sub->add_option("--solver", cfg.solver, "gs | direct");
        sub->add_option("--stencil", cfg.stencil,
                        "sign-switched (positivity-preserving) | centered (reference tables)");
        sub->add_option("--tol", cfg.tol, "linear solver tolerance");
        sub->add_option("--max-iter", cfg.max_iter, "linear solver sweep cap");
        sub->add_option("--epsilon", cfg.epsilon, "gradient-ratio regulariser");
        sub->add_flag("--no-enforce", [&](std::size_t) { cfg.enforce = false; },
                      "record condition violations instead of aborting");
        sub->add_option("--out", cfg.out_dir, "artifact directory");
    };

    auto add_problem = [&](CLI::App* sub) {
        sub->add_option("--problem", cfg.problem, "tp1..tp5");
        sub->add_option("--strike", cfg.strike, "exercise price E");
        sub->add_option("--w1", cfg.w1, "weight of asset 1");
        sub->add_option("--w2", cfg.w2, "weight of asset 2");
        sub->add_option("--cap", cfg.cap, "cap for capped payoffs");
        sub->add_option("--s-min", cfg.s_min, "lower price bound");
        sub->add_option("--s-max", cfg.s_max, "upper price bound");
        sub->add_flag("--literal-paper-strikes", cfg.literal_paper_strikes,
                      "use the printed boundary strike pair instead of the replicating spread");
    };

    CLI::App* solve = app.add_subcommand("solve", "price one problem and export the surface");
    add_common(solve);
    add_problem(solve);
    solve->add_option("--N", cfg.n, "nodes per direction");

    CLI::App* mms = app.add_subcommand("mms", "manufactured-solution convergence study");
    add_common(mms);
    mms->add_option("--domain", cfg.domain, "A | B");
    mms->add_option("--meshes", cfg.meshes, "node counts, e.g. 21,41,81")->delimiter(',');

    CLI::App* conv = app.add_subcommand("convergence", "two-grid self-convergence study");
    add_common(conv);
    add_problem(conv);
    conv->add_option("--meshes", cfg.meshes, "nested node counts (n -> 2n-1)")->delimiter(',');
    conv->add_option("--workers", cfg.workers, "parallel mesh runs");

    CLI::App* posv = app.add_subcommand("positivity", "per-step monitor report");
    add_common(posv);
    add_problem(posv);
    posv->add_option("--N", cfg.n, "nodes per direction");

    try {
        // Parse twice: the config file fills defaults, flags override it.
        app.parse(argc, argv);
        if (!config_path.empty()) {
            JobConfig from_file;
            apply_config_file(from_file, config_path);
            const std::string keep_cmd = cfg.command;
            from_file.command = keep_cmd;
            cfg = from_file;
            app.clear();
            app.parse(argc, argv);
        }
        if (solve->parsed()) return run_solve(cfg, false);
        if (mms->parsed()) return run_mms_cmd(cfg);
        if (conv->parsed()) return run_convergence(cfg);
        if (posv->parsed()) return run_solve(cfg, true);
        throw ConfigError("no subcommand given");
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConditionError& e) {
        std::cerr << "error: condition: " << e.what() << "\n";
        return kExitCondition;
    } catch (const SolveError& e) {
        std::cerr << "error: solver: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
