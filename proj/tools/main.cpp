// Batch front-end: parses an experiment config, dispatches to the library,
// and writes CSV tables plus a run-summary JSON with the fully resolved
// configuration echoed back. Exit codes: 0 ok, 2 invalid config, 3 invariant
// violation, 4 solver failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "apfront/cell_problem.hpp"
#include "apfront/eigenvalue.hpp"
#include "apfront/io.hpp"
#include "apfront/modulus.hpp"
#include "apfront/parallel.hpp"
#include "apfront/rate_lab.hpp"
#include "apfront/simulate.hpp"
#include "apfront/speed.hpp"

using nlohmann::json;
using namespace apfront;

namespace {

struct RunContext {
    std::string config_path;
    std::filesystem::path out_dir = "out";
    double tol = 1e-6;
    int workers = 0;
    double grid_scale = 1.0;
    json config;
    json resolved;  // echoed into the summary
    CoefficientSet cs;
};

double param_or(const json& params, const std::string& key, double dflt) {
    if (!params.contains(key)) return dflt;
    return parse_decimal(params.at(key), key);
}

std::vector<double> grid_param(const json& params, const std::string& key,
                               std::vector<double> dflt) {
    if (!params.contains(key)) return dflt;
    std::vector<double> out;
    for (const auto& v : params.at(key)) out.push_back(parse_decimal(v, key));
    return out;
}

EigenOptions eigen_options(const RunContext& rc) {
    EigenOptions o;
    o.tol = rc.tol;
    o.workers = rc.workers;
    o.grid.grid_scale = rc.grid_scale;
    return o;
}

json speed_to_json(const SpeedResult& r) {
    json j;
    j["omega"] = format_decimal(r.omega);
    j["p_star"] = format_decimal(r.p_star);
    j["e"] = r.e;
    j["lambda_at_p_star"] = format_decimal(r.lambda_at_pstar);
    j["error_bar"] = format_decimal(r.error_bar);
    j["bracket"] = {format_decimal(r.p_lo), format_decimal(r.p_hi)};
    j["tangency"] = format_decimal(r.tangency);
    j["noise_limited"] = r.noise_limited;
    return j;
}

void echo_params(RunContext& rc, const json& materialized) {
    rc.resolved["task_params"] = materialized;
    rc.resolved["coefficients"] = coefficients_to_json(rc.cs);
    rc.resolved["tol"] = format_decimal(rc.tol);
    rc.resolved["workers"] = rc.workers;
    rc.resolved["grid_scale"] = format_decimal(rc.grid_scale);
}

void write_summary(const RunContext& rc, const std::string& task, const json& results) {
    json s;
    s["task"] = task;
    s["config"] = rc.resolved;
    s["results"] = results;
    write_json(rc.out_dir / "summary.json", s);
}

int run_validate(RunContext& rc) {
    ValidationReport rep = validate_coefficients(rc.cs);
    json items = json::array();
    for (const auto& it : rep.items) {
        json ji;
        ji["name"] = it.name;
        ji["pass"] = it.pass;
        ji["detail"] = it.detail;
        items.push_back(ji);
        std::printf("[%s] %s: %s\n", it.pass ? "PASS" : "FAIL", it.name.c_str(),
                    it.detail.c_str());
    }
    echo_params(rc, json::object());
    json res;
    res["all_pass"] = rep.all_pass;
    res["items"] = items;
    write_summary(rc, "validate", res);
    return 0;  // diagnostics only
}

int run_mean(RunContext& rc) {
    CsvWriter csv(rc.out_dir / "means.csv");
    csv.header({"coefficient", "mean", "harmonic_mean", "inf", "sup"});
    json res;
    const std::array<std::pair<const char*, const APFunction*>, 4> fns{
        {{"a", &rc.cs.a}, {"b", &rc.cs.b}, {"c", &rc.cs.c}, {"c_tilde", &rc.cs.c_tilde}}};
    for (auto [name, f] : fns) {
        Bounds bd = bounds(*f, std::min(rc.tol, 1e-8));
        std::string hm;
        if (bd.lower > 0.0) hm = format_decimal(harmonic_mean(*f, rc.tol));
        csv.row({name, format_decimal(f->mean()), hm, format_decimal(bd.lower),
                 format_decimal(bd.upper)});
        res[name] = {{"mean", format_decimal(f->mean())},
                     {"inf", format_decimal(bd.lower)},
                     {"sup", format_decimal(bd.upper)}};
        if (!hm.empty()) res[name]["harmonic_mean"] = hm;
    }
    echo_params(rc, json::object());
    write_summary(rc, "mean", res);
    return 0;
}

struct LambdaTarget {
    bool limit_zero = false, limit_inf = false;
    double L = 1.0;
    std::string tag;
};

LambdaTarget lambda_target(const json& params) {
    LambdaTarget t;
    if (params.contains("limit")) {
        const std::string lim = params.at("limit").get<std::string>();
        if (lim == "zero")
            t.limit_zero = true;
        else if (lim == "infinity")
            t.limit_inf = true;
        else
            throw ConfigError("limit must be 'zero' or 'infinity'");
        t.tag = lim;
    } else {
        t.L = param_or(params, "L", 1.0);
        t.tag = format_decimal(t.L);
    }
    return t;
}

int run_lambda(RunContext& rc) {
    const json params = rc.config.value("params", json::object());
    LambdaTarget tgt = lambda_target(params);
    std::vector<double> p_grid = grid_param(params, "p_grid", {-2, -1, -0.5, 0, 0.5, 1, 2});
    EigenOptions opts = eigen_options(rc);

    std::vector<EigenResult> vals(p_grid.size());
    parallel_for(p_grid.size(), rc.workers, [&](std::size_t i) {
        if (tgt.limit_zero)
            vals[i] = lambda_zero(rc.cs, p_grid[i], opts);
        else if (tgt.limit_inf)
            vals[i] = lambda_infinity(rc.cs, p_grid[i], opts);
        else
            vals[i] = lambda_finite(rc.cs, tgt.L, p_grid[i], opts);
    });

    if (tgt.limit_inf) {
        double qr = 3.0;
        for (double p : p_grid) qr = std::max(qr, std::abs(p) + 3.0);
        write_hbar_csv(rc.out_dir / "hbar_table.csv",
                       build_hbar_curve(rc.cs, -qr, qr, opts));
    }

    CsvWriter csv(rc.out_dir / "lambda_curve.csv");
    csv.header({"p", "lambda", "error_bar"});
    json rows = json::array();
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        csv.row_values({p_grid[i], vals[i].lambda, vals[i].error_bar});
        rows.push_back({{"p", format_decimal(p_grid[i])},
                        {"lambda", format_decimal(vals[i].lambda)},
                        {"error_bar", format_decimal(vals[i].error_bar)}});
    }
    json mat;
    mat["L"] = tgt.tag;
    mat["p_grid"] = json::array();
    for (double p : p_grid) mat["p_grid"].push_back(format_decimal(p));
    echo_params(rc, mat);
    write_summary(rc, "lambda", {{"curve", rows}});
    return 0;
}

int run_speed(RunContext& rc) {
    const json params = rc.config.value("params", json::object());
    LambdaTarget tgt = lambda_target(params);
    const int e = params.value("e", 1);
    EigenOptions opts = eigen_options(rc);

    SpeedResult r;
    if (tgt.limit_zero)
        r = speed_zero(rc.cs, e, rc.tol, opts);
    else if (tgt.limit_inf)
        r = speed_infinity(rc.cs, e, rc.tol, opts);
    else
        r = speed_finite(rc.cs, tgt.L, e, rc.tol, opts);

    // quotient curve around the minimizer, for plotting
    CsvWriter csv(rc.out_dir / "speed_quotient.csv");
    csv.header({"p", "lambda", "lambda_over_p", "error_bar"});
    const double q_lo = std::max(r.p_lo, 0.2 * std::abs(r.p_star));
    const double q_hi = std::max(q_lo * 1.5, std::min(r.p_hi, 3.0 * std::abs(r.p_star)));
    const int nq = 17;
    std::vector<EigenResult> vals(nq);
    std::vector<double> qs(nq);
    parallel_for(nq, rc.workers, [&](std::size_t i) {
        qs[i] = q_lo + (q_hi - q_lo) * static_cast<double>(i) / (nq - 1);
        const double p = e * qs[i];
        if (tgt.limit_zero)
            vals[i] = lambda_zero(rc.cs, p, opts);
        else if (tgt.limit_inf)
            vals[i] = lambda_infinity(rc.cs, p, opts);
        else
            vals[i] = lambda_finite(rc.cs, tgt.L, p, opts);
    });
    for (int i = 0; i < nq; ++i)
        csv.row_values({e * qs[i], vals[i].lambda, vals[i].lambda / qs[i], vals[i].error_bar});

    json mat;
    mat["L"] = tgt.tag;
    mat["e"] = e;
    echo_params(rc, mat);
    write_summary(rc, "speed", speed_to_json(r));
    std::printf("omega(%+d; %s) = %.10g  (p* = %.6g, error bar %.2g)\n", e, tgt.tag.c_str(),
                r.omega, r.p_star, r.error_bar);
    return 0;
}

SimConfig sim_config(const json& params) {
    SimConfig cfg;
    const json sim = params.value("sim", json::object());
    cfg.X = param_or(sim, "X", 200.0);
    cfg.nx = static_cast<int>(param_or(sim, "nx", 4001));
    cfg.dt = param_or(sim, "dt", 0.0);
    cfg.T = param_or(sim, "T", 80.0);
    cfg.level = param_or(sim, "level", 0.5);
    cfg.bump_center = param_or(sim, "bump_center", 0.0);
    cfg.bump_width = param_or(sim, "bump_width", 2.0);
    cfg.bump_height = param_or(sim, "bump_height", 1.0);
    cfg.fit_window = param_or(sim, "fit_window", 0.5);
    return cfg;
}

json sim_config_json(const SimConfig& cfg) {
    json j;
    j["X"] = format_decimal(cfg.X);
    j["nx"] = cfg.nx;
    j["dt"] = format_decimal(cfg.dt);
    j["T"] = format_decimal(cfg.T);
    j["level"] = format_decimal(cfg.level);
    j["bump_center"] = format_decimal(cfg.bump_center);
    j["bump_width"] = format_decimal(cfg.bump_width);
    j["bump_height"] = format_decimal(cfg.bump_height);
    j["fit_window"] = format_decimal(cfg.fit_window);
    return j;
}

int run_simulate(RunContext& rc) {
    const json params = rc.config.value("params", json::object());
    const double L = param_or(params, "L", 1.0);
    SimConfig cfg = sim_config(params);
    FrontSeries fs = simulate(rc.cs, L, cfg);

    CsvWriter csv(rc.out_dir / "front_series.csv");
    csv.header({"t", "front_right", "front_left", "mass", "max_u"});
    for (std::size_t i = 0; i < fs.times.size(); ++i)
        csv.row_values({fs.times[i], fs.front_right[i], fs.front_left[i], fs.masses[i],
                        fs.max_values[i]});
    CsvWriter snap(rc.out_dir / "snapshot.csv");
    snap.header({"t", "x", "u"});
    for (std::size_t i = 0; i < fs.final_x.size(); ++i)
        snap.row_values({fs.T, fs.final_x[i], fs.final_u[i]});

    json res;
    res["usable"] = fs.usable;
    res["min_u"] = format_decimal(fs.min_u);
    res["max_u"] = format_decimal(fs.max_u);
    if (fs.usable) {
        SpeedFit right = empirical_speed(fs, +1);
        SpeedFit left = empirical_speed(fs, -1);
        res["speed_right"] = format_decimal(right.speed);
        res["speed_right_stderr"] = format_decimal(right.stderr_);
        res["speed_left"] = format_decimal(left.speed);
        res["speed_left_stderr"] = format_decimal(left.stderr_);
        std::printf("front speeds: right %.6g +- %.2g, left %.6g +- %.2g\n", right.speed,
                    right.stderr_, left.speed, left.stderr_);
    }
    json mat;
    mat["L"] = format_decimal(L);
    mat["sim"] = sim_config_json(cfg);
    echo_params(rc, mat);
    write_summary(rc, "simulate", res);
    return 0;
}

json rate_to_json(const RateSeries& rs) {
    json j;
    j["omega_limit"] = format_decimal(rs.omega_limit);
    j["limit_error_bar"] = format_decimal(rs.limit_error_bar);
    j["noise_budget"] = format_decimal(rs.noise_budget);
    j["flat"] = rs.flat;
    j["bound_exponent"] = format_decimal(rs.bound_exponent);
    if (rs.fit) {
        j["fitted_exponent"] = format_decimal(rs.fit->exponent);
        j["fit_stderr"] = format_decimal(rs.fit->stderr_);
        j["fit_points"] = rs.fit->points_used;
    }
    if (rs.tau) j["tau"] = format_decimal(*rs.tau);
    return j;
}

int run_rate(RunContext& rc, bool small) {
    const json params = rc.config.value("params", json::object());
    const int e = params.value("e", 1);
    EigenOptions opts = eigen_options(rc);
    std::vector<double> L_grid =
        grid_param(params, "L_grid",
                   small ? std::vector<double>{0.5, 0.25, 0.1, 0.05, 0.02}
                         : std::vector<double>{5, 10, 20, 40, 80, 160});
    RateSeries rs;
    if (small) {
        const double sigma = param_or(params, "sigma", 0.9);
        rs = sweep_small_L(rc.cs, e, L_grid, rc.tol, sigma, opts);
    } else {
        rs = sweep_large_L(rc.cs, e, L_grid, rc.tol, opts);
    }
    CsvWriter csv(rc.out_dir / (small ? "rate_small.csv" : "rate_large.csv"));
    csv.header({"L", "error", "bound", "ratio", "error_bar", "dropped"});
    for (std::size_t i = 0; i < rs.L_values.size(); ++i)
        csv.row({format_decimal(rs.L_values[i]), format_decimal(rs.errors[i]),
                 format_decimal(rs.bound_values[i]), format_decimal(rs.ratios[i]),
                 format_decimal(rs.error_bars[i]), rs.dropped[i]});
    json mat;
    mat["e"] = e;
    mat["L_grid"] = json::array();
    for (double L : L_grid) mat["L_grid"].push_back(format_decimal(L));
    if (small) mat["sigma"] = format_decimal(param_or(params, "sigma", 0.9));
    echo_params(rc, mat);
    write_summary(rc, small ? "rate-small" : "rate-large", rate_to_json(rs));
    if (rs.fit)
        std::printf("fitted exponent %.4f +- %.4f (reference %.4f)\n", rs.fit->exponent,
                    rs.fit->stderr_, rs.bound_exponent);
    else
        std::printf("flat series at the noise budget %.3g; exponent fit skipped\n",
                    rs.noise_budget);
    return 0;
}

int run_ctilde_effect(RunContext& rc) {
    const json params = rc.config.value("params", json::object());
    const int e = params.value("e", 1);
    std::vector<double> L_grid = grid_param(params, "L_grid", {0.05, 20.0});
    EigenOptions opts = eigen_options(rc);

    CoefficientSet bare = assemble_coefficients(rc.cs.a, rc.cs.b, rc.cs.c, APFunction(0.0));
    CsvWriter csv(rc.out_dir / "ctilde_effect.csv");
    csv.header({"L", "omega_with", "omega_without", "delta", "threshold", "strict"});
    json rows = json::array();
    bool all_strict = true;
    for (double L : L_grid) {
        SpeedResult with_ct = speed_finite(rc.cs, L, e, rc.tol, opts);
        SpeedResult without = speed_finite(bare, L, e, rc.tol, opts);
        const double delta = with_ct.omega - without.omega;
        const double threshold = 3.0 * (with_ct.error_bar + without.error_bar);
        const bool strict = delta > threshold;
        all_strict = all_strict && strict;
        csv.row({format_decimal(L), format_decimal(with_ct.omega),
                 format_decimal(without.omega), format_decimal(delta),
                 format_decimal(threshold), strict ? "yes" : "no"});
        rows.push_back({{"L", format_decimal(L)},
                        {"omega_with", format_decimal(with_ct.omega)},
                        {"omega_without", format_decimal(without.omega)},
                        {"delta", format_decimal(delta)},
                        {"threshold", format_decimal(threshold)},
                        {"strict", strict}});
        std::printf("L=%g: omega with c~ = %.8g, without = %.8g, delta = %.3g (%s)\n", L,
                    with_ct.omega, without.omega, delta, strict ? "strict" : "NOT resolved");
    }
    json mat;
    mat["e"] = e;
    mat["L_grid"] = json::array();
    for (double L : L_grid) mat["L_grid"].push_back(format_decimal(L));
    echo_params(rc, mat);
    write_summary(rc, "ctilde-effect", {{"rows", rows}, {"all_strict", all_strict}});
    return 0;
}

int run_compare(RunContext& rc) {
    const json params = rc.config.value("params", json::object());
    const double L = param_or(params, "L", 5.0);
    const int e = params.value("e", 1);
    EigenOptions opts = eigen_options(rc);
    SimConfig cfg = sim_config(params);

    SpeedResult eig = speed_finite(rc.cs, L, e, rc.tol, opts);
    FrontSeries fs = simulate(rc.cs, L, cfg);
    SpeedFit sim = empirical_speed(fs, e);
    const double gap = std::abs(eig.omega - sim.speed) / eig.omega;

    CsvWriter csv(rc.out_dir / "compare.csv");
    csv.header({"omega_eigen", "omega_sim", "relative_gap", "eigen_error_bar", "sim_stderr"});
    csv.row_values({eig.omega, sim.speed, gap, eig.error_bar, sim.stderr_});
    json mat;
    mat["L"] = format_decimal(L);
    mat["e"] = e;
    mat["sim"] = sim_config_json(cfg);
    echo_params(rc, mat);
    json res;
    res["omega_eigen"] = format_decimal(eig.omega);
    res["omega_sim"] = format_decimal(sim.speed);
    res["relative_gap"] = format_decimal(gap);
    write_summary(rc, "compare", res);
    std::printf("omega_eigen = %.8g, omega_sim = %.8g, relative gap = %.3g\n", eig.omega,
                sim.speed, gap);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"apfront: spreading speeds of 1-D KPP fronts in almost periodic media"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global flags after the subcommand

    RunContext rc;
    std::string out_dir = "out";
    app.add_option("--config", rc.config_path, "experiment config (JSON)")->required();
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--tol", rc.tol, "solver tolerance");
    app.add_option("--workers", rc.workers, "worker pool size (0: cores)");
    app.add_option("--grid-scale", rc.grid_scale, "mesh refinement factor (<1 refines)");

    for (const char* t : {"validate", "mean", "lambda", "speed", "simulate", "rate-small",
                          "rate-large", "ctilde-effect", "compare"})
        app.add_subcommand(t);

    CLI11_PARSE(app, argc, argv);
    rc.out_dir = out_dir;
    const std::string task = app.get_subcommands().front()->get_name();

    try {
        rc.config = read_json(rc.config_path);
        if (!rc.config.contains("coefficients"))
            throw ConfigError("config must carry a 'coefficients' object");
        rc.cs = parse_coefficients(rc.config.at("coefficients"));
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (task != "validate") {
            ValidationReport rep = validate_coefficients(rc.cs);
            if (!rep.all_pass) {
                for (const auto& it : rep.items)
                    if (!it.pass)
                        std::cerr << "invariant violation [" << it.name << "]: " << it.detail
                                  << "\n";
                return 3;
            }
        }
        if (task == "validate") return run_validate(rc);
        if (task == "mean") return run_mean(rc);
        if (task == "lambda") return run_lambda(rc);
        if (task == "speed") return run_speed(rc);
        if (task == "simulate") return run_simulate(rc);
        if (task == "rate-small") return run_rate(rc, true);
        if (task == "rate-large") return run_rate(rc, false);
        if (task == "ctilde-effect") return run_ctilde_effect(rc);
        if (task == "compare") return run_compare(rc);
        std::cerr << "unknown task " << task << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const CoefficientError& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 4;
    }
}
