#pragma once

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "delaystab/analysis.hpp"
#include "delaystab/json_io.hpp"
#include "delaystab/solver.hpp"

// Command implementations. Each cmd_* is a thin composition of module
// operations: all numeric logic lives in the library headers, the layer here
// only routes options, files and report fields.

namespace delaystab::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitInput = 2;

// ---------------------------------------------------------------------------
// example1: the destabilization scenario
// ---------------------------------------------------------------------------

struct Example1Options {
    double b = 1.8;
    std::string variant = "vanishing";  // vanishing | positive
    int horizon = 12;
    double step = 0.002;
    std::string out_dir = "out";
    double sample_step = 0.01;
};

inline json run_example1(const Example1Options& opt) {
    const Example1Variant variant = opt.variant == "positive" ? Example1Variant::PositiveA
                                                              : Example1Variant::VanishingA;
    const Example1Exact exact_variant = opt.variant == "positive" ? Example1Exact::PositiveA
                                                                  : Example1Exact::VanishingA;
    const double eps = std::log(4.0) / (3.0 * opt.b);

    // the unperturbed equation x' + b x(floor t) = 0
    LinearDDE baseline;
    baseline.concentrated_terms = {{ConstantSpec{opt.b}, FloorArgument{}}};
    baseline.initial = constant_history(1.0);
    IntegratorConfig cfg{opt.step, 2, static_cast<double>(opt.horizon)};
    Trajectory base_traj = integrate_linear(baseline, cfg);
    Trajectory pert_traj = integrate_example1(opt.b, variant, opt.horizon, opt.step);

    fs::create_directories(opt.out_dir);
    const std::string base_csv = (fs::path(opt.out_dir) / "intro5.csv").string();
    const std::string pert_csv = (fs::path(opt.out_dir) / "intro6.csv").string();
    write_csv(base_traj, base_csv, opt.sample_step);
    write_csv(pert_traj, pert_csv, opt.sample_step);
    write_breakpoints_csv(pert_traj,
                          (fs::path(opt.out_dir) / "intro6_breakpoints.csv").string());

    const double g_base = growth_factor(base_traj, 1.0, 0.0);
    const double g_pert = growth_factor(pert_traj, 1.0, 0.0);
    auto exact_base = example1_exact(opt.b, Example1Exact::Baseline, 1);
    auto exact_pert = example1_exact(opt.b, exact_variant, 1);

    const ScalarFunctionSpec a_spec = example1_coefficient(opt.b, variant);
    double min_a = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000; ++i)
        min_a = std::min(min_a, evaluate(a_spec, opt.horizon * i / 1000.0));

    json report;
    report["b"] = opt.b;
    report["variant"] = opt.variant;
    report["eps"] = eps;
    report["min_a"] = min_a;
    report["baseline"] = {{"csv", base_csv},
                          {"growth_factor", g_base},
                          {"growth_factor_exact", std::abs(exact_base[1])},
                          {"sign_changes", count_sign_changes(base_traj, 0.0,
                                                              base_traj.horizon())},
                          {"classification", g_base < 1.0 ? "stable" : "unstable"}};
    report["perturbed"] = {{"csv", pert_csv},
                           {"growth_factor", g_pert},
                           {"growth_factor_exact", std::abs(exact_pert[1])},
                           {"sign_changes", count_sign_changes(pert_traj, 0.0,
                                                               pert_traj.horizon())},
                           {"classification", g_pert < 1.0 ? "stable" : "unstable"}};
    if (!pert_traj.warnings().empty()) report["warnings"] = pert_traj.warnings();
    return report;
}

// ---------------------------------------------------------------------------
// example2: the respiratory-model certificate
// ---------------------------------------------------------------------------

struct Example2Options {
    double lag = 1.0;
    std::optional<double> K_override;
    bool simulate = false;
    double horizon = 150.0;
    double step = 0.01;
    std::string out_dir = "out";
    double sample_step = 0.05;
};

inline MGParams example2_params(double lag) {
    MGParams p;
    p.alpha = 1.0;
    p.beta = 0.5;
    p.n = 4.0;
    p.r = SinusoidAffineSpec{2.7, 0.3, 1.0};
    p.r0 = 2.4;
    p.R = 3.0;
    p.h = ConstantLag{lag};
    return p;
}

inline json run_example2(const Example2Options& opt) {
    MGParams params = example2_params(opt.lag);
    MGBounds bounds = mg_attractor_bound(params, opt.K_override);
    const MGDerived& d = bounds.derived;

    Verdict v = check_thm5(d.a0, d.A, d.b0, opt.lag, CriterionId::Thm7);
    Verdict comparison = bbi_comparison_verdict(params.beta, params.n, params.R, opt.lag);

    json report;
    report["lag"] = opt.lag;
    report["K_source"] = opt.K_override ? "override" : "equilibrium";
    report["derived"] = to_json(d);
    report["attractor_bound"] = json_number(bounds.attractor_bound);
    report["comparison_bound"] = json_number(bounds.comparison_bound);
    report["verdict"] = to_json(v);
    report["comparison_verdict"] = to_json(comparison);

    if (opt.simulate) {
        MackeyGlassProblem prob{params, constant_history(0.5 * d.K)};
        IntegratorConfig cfg{opt.step, 2, opt.horizon};
        Trajectory traj = integrate_mg(prob, cfg);
        fs::create_directories(opt.out_dir);
        const std::string csv = (fs::path(opt.out_dir) / "example2.csv").string();
        write_csv(traj, csv, opt.sample_step);
        report["trajectory_csv"] = csv;
        report["final_value"] = traj.value(traj.horizon());
        report["final_distance_to_K"] = std::abs(traj.value(traj.horizon()) - d.K);
    }
    return report;
}

// ---------------------------------------------------------------------------
// check: evaluate a criterion on a problem file
// ---------------------------------------------------------------------------

struct CheckOptions {
    std::string config;
    std::string criterion = "auto";
    double burn_in = -1.0;   // < 0: default to 10% of horizon
    double grid_step = -1.0; // < 0: default
    double horizon = -1.0;   // < 0: use the file's horizon
};

namespace detail_cli {

inline CriterionId criterion_from_string(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (name == "thm1") return CriterionId::Thm1;
    if (name == "thm2") return CriterionId::Thm2;
    if (name == "thm3") return CriterionId::Thm3;
    if (name == "thm4") return CriterionId::Thm4;
    if (name == "cor1") return CriterionId::Cor1;
    if (name == "thm5") return CriterionId::Thm5;
    if (name == "thm6") return CriterionId::Thm6;
    if (name == "thm7") return CriterionId::Thm7;
    if (name == "nonosc1e" || name == "nonosc_1e") return CriterionId::Nonosc1e;
    if (name == "bbicomparison" || name == "bbi" || name == "bbi_comparison")
        return CriterionId::BBIComparison;
    throw SchemaError("unknown criterion '" + name + "'");
}

inline double max_sampled(const ScalarFunctionSpec& s, double horizon) {
    double m = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 400; ++i) m = std::max(m, evaluate(s, horizon * i / 400.0));
    for (double b : breakpoints_in(s, 0.0, horizon)) {
        m = std::max(m, evaluate(s, b, Side::Right));
        m = std::max(m, evaluate(s, b, Side::Left));
    }
    return m;
}

inline CriterionId auto_criterion(const ProblemFile& pf) {
    if (pf.is_mackey_glass()) return CriterionId::Thm7;
    if (pf.is_nonlinear()) {
        const auto& p = std::get<NonlinearDDE>(pf.problem);
        for (const auto& t : p.terms)
            if (t.kernel) return CriterionId::Thm6;
        return CriterionId::Thm5;
    }
    const auto& p = std::get<LinearDDE>(pf.problem);
    for (const auto& t : p.distributed_terms) {
        if (std::holds_alternative<DensityKernel>(t.kernel)) return CriterionId::Cor1;
    }
    if (!p.distributed_terms.empty()) return CriterionId::Thm4;
    if (p.concentrated_terms.size() > 1) return CriterionId::Thm3;
    return CriterionId::Thm2;
}

}  // namespace detail_cli

inline json run_check(const CheckOptions& opt) {
    ProblemFile pf = load_problem(opt.config);
    const double horizon = opt.horizon > 0 ? opt.horizon : pf.horizon;
    const double burn_in = opt.burn_in >= 0 ? opt.burn_in : 0.1 * horizon;
    const double grid_step =
        opt.grid_step > 0 ? opt.grid_step : std::min(0.05, (horizon - burn_in) / 200.0);
    const CriterionId id = opt.criterion == "auto"
                               ? detail_cli::auto_criterion(pf)
                               : detail_cli::criterion_from_string(opt.criterion);

    Verdict verdict;
    switch (id) {
        case CriterionId::Thm1: {
            if (!pf.is_linear()) throw PreconditionError("thm1 applies to linear problems");
            const auto& p = std::get<LinearDDE>(pf.problem);
            const auto* a = std::get_if<ConstantSpec>(&p.a);
            if (!a) throw PreconditionError("thm1 needs a constant non-delay coefficient");
            double b_bound = 0.0, h_bound = 0.0;
            for (const auto& t : p.concentrated_terms) {
                b_bound += detail_cli::max_sampled(t.b, horizon);
                h_bound = std::max(h_bound, lag_bound(t.delay));
            }
            for (const auto& t : p.distributed_terms) {
                b_bound += detail_cli::max_sampled(t.coefficient, horizon);
                h_bound = std::max(h_bound, lag_bound(t.lower_limit));
            }
            verdict = check_thm1(a->value, b_bound, h_bound);
            break;
        }
        case CriterionId::Thm2:
        case CriterionId::Thm3:
        case CriterionId::Thm4:
        case CriterionId::Cor1: {
            if (!pf.is_linear())
                throw PreconditionError("variable-coefficient criteria apply to linear problems");
            const auto& p = std::get<LinearDDE>(pf.problem);
            auto [h0, beta] = estimate_thm2_params(p, burn_in, horizon, grid_step);
            verdict = check_thm2(beta.value, h0.value, id);
            verdict.inputs["burn_in"] = burn_in;
            verdict.inputs["grid_step"] = grid_step;
            verdict.inputs["horizon"] = horizon;
            break;
        }
        case CriterionId::Thm5:
        case CriterionId::Thm6: {
            if (!pf.is_nonlinear())
                throw PreconditionError("sector-bound criteria apply to nonlinear problems");
            const auto& p = std::get<NonlinearDDE>(pf.problem);
            double h0 = 0.0;
            for (const auto& t : p.terms) h0 = std::max(h0, lag_bound(t.delay));
            verdict = check_thm5(p.sector_bounds.a0, p.sector_bounds.A, p.sector_bounds.b0(),
                                 h0, id);
            break;
        }
        case CriterionId::Thm7: {
            if (!pf.is_mackey_glass())
                throw PreconditionError("thm7 applies to the respiratory model");
            const auto& p = std::get<MackeyGlassProblem>(pf.problem);
            MGDerived d = derive_mg(p.params, pf.K_override);
            verdict = check_thm5(d.a0, d.A, d.b0, lag_bound(p.params.h), CriterionId::Thm7);
            verdict.inputs["K"] = d.K;
            break;
        }
        case CriterionId::Nonosc1e: {
            if (!pf.is_linear())
                throw PreconditionError("the 1/e test applies to linear problems");
            const auto& p = std::get<LinearDDE>(pf.problem);
            if (p.concentrated_terms.size() != 1 || !p.distributed_terms.empty())
                throw PreconditionError("the 1/e test needs a single concentrated delay");
            verdict = check_nonoscillation_1e(p.concentrated_terms[0].b,
                                              p.concentrated_terms[0].delay, p.a, burn_in,
                                              horizon, grid_step);
            break;
        }
        case CriterionId::BBIComparison: {
            if (!pf.is_mackey_glass())
                throw PreconditionError("the comparison bound applies to the respiratory model");
            const auto& p = std::get<MackeyGlassProblem>(pf.problem);
            verdict = bbi_comparison_verdict(p.params.beta, p.params.n, p.params.R,
                                             lag_bound(p.params.h));
            break;
        }
    }
    return to_json(verdict);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
    std::string config;
    double horizon = -1.0;
    double step = -1.0;
    std::string out_dir = "out";
    double sample_step = 0.05;
};

inline Trajectory integrate_problem(const ProblemFile& pf, const IntegratorConfig& cfg) {
    if (pf.is_linear()) return integrate_linear(std::get<LinearDDE>(pf.problem), cfg);
    if (pf.is_nonlinear()) return integrate_nonlinear(std::get<NonlinearDDE>(pf.problem), cfg);
    return integrate_mg(std::get<MackeyGlassProblem>(pf.problem), cfg);
}

inline IntegratorConfig config_for(const ProblemFile& pf, double horizon, double step) {
    IntegratorConfig cfg;
    if (pf.is_linear())
        cfg = default_config(std::get<LinearDDE>(pf.problem), horizon);
    else if (pf.is_nonlinear())
        cfg = default_config(std::get<NonlinearDDE>(pf.problem), horizon);
    else {
        cfg.horizon = horizon;
        const auto& mg = std::get<MackeyGlassProblem>(pf.problem);
        const double lag = lag_bound(mg.params.h);
        cfg.step_size = lag > 0 ? std::min(0.01, lag / 20.0) : 0.01;
    }
    if (step > 0) cfg.step_size = step;
    return cfg;
}

inline json run_simulate(const SimulateOptions& opt) {
    ProblemFile pf = load_problem(opt.config);
    const double horizon = opt.horizon > 0 ? opt.horizon : pf.horizon;
    IntegratorConfig cfg = config_for(pf, horizon, opt.step);
    Trajectory traj = integrate_problem(pf, cfg);

    fs::create_directories(opt.out_dir);
    const std::string csv = (fs::path(opt.out_dir) / "trajectory.csv").string();
    const std::string bps = (fs::path(opt.out_dir) / "breakpoints.csv").string();
    write_csv(traj, csv, opt.sample_step);
    write_breakpoints_csv(traj, bps);

    json report;
    report["trajectory_csv"] = csv;
    report["breakpoints_csv"] = bps;
    report["horizon"] = traj.horizon();
    report["step_size"] = traj.step_size();
    report["segments"] = traj.segments().size();
    report["final_value"] = traj.value(traj.horizon());
    report["warnings"] = traj.warnings();
    return report;
}

// ---------------------------------------------------------------------------
// bound: maximal certified lag
// ---------------------------------------------------------------------------

struct BoundOptions {
    std::string config;
    double burn_in = -1.0;
    double grid_step = -1.0;
};

inline json run_bound(const BoundOptions& opt) {
    ProblemFile pf = load_problem(opt.config);
    json report;
    if (pf.is_mackey_glass()) {
        const auto& p = std::get<MackeyGlassProblem>(pf.problem);
        MGBounds b = mg_attractor_bound(p.params, pf.K_override);
        report["criterion"] = to_string(CriterionId::Thm7);
        report["derived"] = to_json(b.derived);
        report["max_h0"] = json_number(b.attractor_bound);
        report["comparison_max_h0"] = json_number(b.comparison_bound);
    } else if (pf.is_nonlinear()) {
        const auto& p = std::get<NonlinearDDE>(pf.problem);
        report["criterion"] = to_string(CriterionId::Thm5);
        report["max_h0"] = json_number(
            invert_delay_bound(p.sector_bounds.a0, p.sector_bounds.A, p.sector_bounds.b0()));
    } else {
        const auto& p = std::get<LinearDDE>(pf.problem);
        const double horizon = pf.horizon;
        const double burn_in = opt.burn_in >= 0 ? opt.burn_in : 0.1 * horizon;
        const double grid_step =
            opt.grid_step > 0 ? opt.grid_step : std::min(0.05, (horizon - burn_in) / 200.0);
        auto [h0, beta] = estimate_thm2_params(p, burn_in, horizon, grid_step);
        report["criterion"] = to_string(CriterionId::Thm2);
        report["beta"] = beta.value;
        report["h0_estimate"] = h0.value;
        // bound on the integral \int_{h(t)}^t a, not on the raw lag
        report["max_h0"] = json_number(invert_delay_bound(1.0, 1.0, beta.value));
    }
    return report;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOptions {
    std::string config;
    std::string parameter = "b";  // b | a | lag
    double from = 0.0;
    double to = 1.0;
    int steps = 10;  // number of intervals; steps+1 rows
    std::string criterion;  // empty: classify by simulation
    bool simulate = false;
    double period = 1.0;  // growth-factor period when simulating
    double horizon = -1.0;
    double step = -1.0;
    std::string out_dir = "out";
};

namespace detail_cli {

inline void set_parameter(LinearDDE& p, const std::string& name, double value) {
    if (name == "a") {
        p.a = ConstantSpec{value};
        return;
    }
    if (p.concentrated_terms.empty())
        throw PreconditionError("sweep: problem has no concentrated term");
    if (name == "b") {
        if (!std::holds_alternative<ConstantSpec>(p.concentrated_terms[0].b))
            throw PreconditionError("sweep: parameter 'b' needs a constant coefficient");
        p.concentrated_terms[0].b = ConstantSpec{value};
        return;
    }
    if (name == "lag") {
        p.concentrated_terms[0].delay = ConstantLag{value};
        return;
    }
    throw SchemaError("sweep: unknown parameter '" + name + "' (expected a, b or lag)");
}

inline std::size_t sweep_threads(std::size_t points) {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DELAYSTAB_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
    return std::min(n, points);
}

}  // namespace detail_cli

inline json run_sweep(const SweepOptions& opt) {
    ProblemFile pf = load_problem(opt.config);
    if (!pf.is_linear()) throw PreconditionError("sweep supports linear problems");
    if (opt.steps < 1) throw SchemaError("sweep: steps must be >= 1");
    if (!opt.simulate && opt.criterion.empty())
        throw SchemaError("sweep: pass --criterion and/or --simulate");
    const double horizon = opt.horizon > 0 ? opt.horizon : pf.horizon;

    struct Row {
        double value = 0.0;
        bool certified = false;
        std::optional<double> growth;
    };
    std::vector<Row> rows(static_cast<std::size_t>(opt.steps) + 1);

    auto eval_point = [&](std::size_t i) {
        const double value = opt.from + (opt.to - opt.from) * static_cast<double>(i) / opt.steps;
        LinearDDE problem = std::get<LinearDDE>(pf.problem);
        detail_cli::set_parameter(problem, opt.parameter, value);
        Row row;
        row.value = value;
        if (opt.simulate) {
            IntegratorConfig cfg = default_config(problem, horizon);
            if (opt.step > 0) cfg.step_size = opt.step;
            Trajectory traj = integrate_linear(problem, cfg);
            row.growth = growth_factor(traj, opt.period, 0.0);
        }
        if (!opt.criterion.empty()) {
            const CriterionId id = detail_cli::criterion_from_string(opt.criterion);
            if (id == CriterionId::Thm1) {
                const auto* a = std::get_if<ConstantSpec>(&problem.a);
                if (!a) throw PreconditionError("thm1 sweep needs a constant a");
                double b_bound = 0.0, h_bound = 0.0;
                for (const auto& t : problem.concentrated_terms) {
                    b_bound += detail_cli::max_sampled(t.b, horizon);
                    h_bound = std::max(h_bound, lag_bound(t.delay));
                }
                row.certified = check_thm1(a->value, b_bound, h_bound).certified;
            } else {
                auto [h0, beta] = estimate_thm2_params(problem, 0.1 * horizon, horizon,
                                                       std::min(0.05, horizon / 200.0));
                row.certified = check_thm2(beta.value, h0.value, id).certified;
            }
        } else {
            row.certified = row.growth && *row.growth < 1.0;
        }
        rows[i] = row;
    };

    const std::size_t n_threads = detail_cli::sweep_threads(rows.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < rows.size(); i += n_threads) eval_point(i);
        });
    }
    for (auto& th : pool) th.join();

    fs::create_directories(opt.out_dir);
    const std::string csv_path = (fs::path(opt.out_dir) / "sweep.csv").string();
    std::FILE* f = std::fopen(csv_path.c_str(), "wb");
    if (!f) throw Error("cannot open " + csv_path + " for writing");
    std::fprintf(f, "%s,certified,growth_factor\n", opt.parameter.c_str());
    for (const Row& r : rows) {
        if (r.growth)
            std::fprintf(f, "%.12g,%s,%.12g\n", r.value, r.certified ? "true" : "false",
                         *r.growth);
        else
            std::fprintf(f, "%.12g,%s,\n", r.value, r.certified ? "true" : "false");
    }
    std::fclose(f);

    json report;
    report["csv"] = csv_path;
    report["rows"] = rows.size();
    report["parameter"] = opt.parameter;
    json jrows = json::array();
    for (const Row& r : rows) {
        json jr = {{"value", r.value}, {"certified", r.certified}};
        if (r.growth) jr["growth_factor"] = *r.growth;
        jrows.push_back(jr);
    }
    report["data"] = jrows;
    return report;
}

// ---------------------------------------------------------------------------
// mg: derived constants and bounds from a problem file
// ---------------------------------------------------------------------------

struct MgOptions {
    std::string config;
    bool simulate = false;
    double horizon = -1.0;
    double step = -1.0;
    std::string out_dir = "out";
    double sample_step = 0.05;
};

inline json run_mg(const MgOptions& opt) {
    ProblemFile pf = load_problem(opt.config);
    if (!pf.is_mackey_glass())
        throw PreconditionError("mg expects an equation_class mackey_glass problem file");
    const auto& p = std::get<MackeyGlassProblem>(pf.problem);
    MGBounds b = mg_attractor_bound(p.params, pf.K_override);

    json report;
    report["derived"] = to_json(b.derived);
    report["max_h0"] = json_number(b.attractor_bound);
    report["comparison_max_h0"] = json_number(b.comparison_bound);
    report["lag_bound"] = lag_bound(p.params.h);
    report["verdict"] =
        to_json(check_thm5(b.derived.a0, b.derived.A, b.derived.b0, lag_bound(p.params.h),
                           CriterionId::Thm7));
    if (opt.simulate) {
        const double horizon = opt.horizon > 0 ? opt.horizon : pf.horizon;
        IntegratorConfig cfg = config_for(pf, horizon, opt.step);
        Trajectory traj = integrate_mg(p, cfg);
        fs::create_directories(opt.out_dir);
        const std::string csv = (fs::path(opt.out_dir) / "mg.csv").string();
        write_csv(traj, csv, opt.sample_step);
        report["trajectory_csv"] = csv;
        report["final_value"] = traj.value(traj.horizon());
    }
    return report;
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

inline int dispatch(std::vector<std::string> args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"scalar delay differential equations: simulation and stability certificates"};
    app.require_subcommand(1);

    Example1Options e1;
    auto* c_e1 = app.add_subcommand("example1", "destabilization by a non-delay term");
    c_e1->add_option("--b", e1.b, "delayed coefficient");
    c_e1->add_option("--variant", e1.variant, "vanishing | positive")
        ->check(CLI::IsMember({"vanishing", "positive"}));
    c_e1->add_option("--horizon", e1.horizon, "number of periods");
    c_e1->add_option("--step", e1.step, "integration step");
    c_e1->add_option("--out", e1.out_dir, "output directory");
    c_e1->add_option("--sample-step", e1.sample_step, "CSV sampling step");

    Example2Options e2;
    double e2_override = 0.0;
    auto* c_e2 = app.add_subcommand("example2", "respiratory-model attractivity certificate");
    c_e2->add_option("--lag", e2.lag, "delay bound h0");
    auto* e2k = c_e2->add_option("--override-k", e2_override, "fix K instead of solving");
    c_e2->add_flag("--simulate", e2.simulate, "also integrate and export the trajectory");
    c_e2->add_option("--horizon", e2.horizon, "simulation horizon");
    c_e2->add_option("--step", e2.step, "integration step");
    c_e2->add_option("--out", e2.out_dir, "output directory");
    c_e2->add_option("--sample-step", e2.sample_step, "CSV sampling step");

    CheckOptions ck;
    auto* c_ck = app.add_subcommand("check", "evaluate a stability criterion");
    c_ck->add_option("--config", ck.config, "problem file")->required();
    c_ck->add_option("--criterion", ck.criterion, "thm1..thm7, cor1, nonosc_1e, bbi, auto");
    c_ck->add_option("--burn-in", ck.burn_in, "grid start for limsup estimates");
    c_ck->add_option("--grid-step", ck.grid_step, "grid step for limsup estimates");
    c_ck->add_option("--horizon", ck.horizon, "grid end (defaults to the file's horizon)");

    SimulateOptions sim;
    auto* c_sim = app.add_subcommand("simulate", "integrate and export CSV");
    c_sim->add_option("--config", sim.config, "problem file")->required();
    c_sim->add_option("--horizon", sim.horizon, "override the file's horizon");
    c_sim->add_option("--step", sim.step, "integration step");
    c_sim->add_option("--out", sim.out_dir, "output directory");
    c_sim->add_option("--sample-step", sim.sample_step, "CSV sampling step");

    BoundOptions bd;
    auto* c_bd = app.add_subcommand("bound", "maximal certified delay bound");
    c_bd->add_option("--config", bd.config, "problem file")->required();
    c_bd->add_option("--burn-in", bd.burn_in, "grid start for limsup estimates");
    c_bd->add_option("--grid-step", bd.grid_step, "grid step for limsup estimates");

    SweepOptions sw;
    auto* c_sw = app.add_subcommand("sweep", "sweep a parameter and classify each point");
    c_sw->add_option("--config", sw.config, "problem file")->required();
    c_sw->add_option("--parameter", sw.parameter, "a | b | lag");
    c_sw->add_option("--from", sw.from, "range start")->required();
    c_sw->add_option("--to", sw.to, "range end")->required();
    c_sw->add_option("--steps", sw.steps, "number of intervals");
    c_sw->add_option("--criterion", sw.criterion, "certify each point with this criterion");
    c_sw->add_flag("--simulate", sw.simulate, "integrate each point, report growth factor");
    c_sw->add_option("--period", sw.period, "growth-factor period");
    c_sw->add_option("--horizon", sw.horizon, "simulation horizon");
    c_sw->add_option("--step", sw.step, "integration step");
    c_sw->add_option("--out", sw.out_dir, "output directory");

    MgOptions mg;
    auto* c_mg = app.add_subcommand("mg", "respiratory-model constants and bounds");
    c_mg->add_option("--config", mg.config, "problem file")->required();
    c_mg->add_flag("--simulate", mg.simulate, "also integrate and export the trajectory");
    c_mg->add_option("--horizon", mg.horizon, "simulation horizon");
    c_mg->add_option("--step", mg.step, "integration step");
    c_mg->add_option("--out", mg.out_dir, "output directory");
    c_mg->add_option("--sample-step", mg.sample_step, "CSV sampling step");

    std::reverse(args.begin(), args.end());  // CLI11 consumes back-to-front
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out << app.help() << std::flush;
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        json report;
        if (c_e1->parsed()) report = run_example1(e1);
        if (c_e2->parsed()) {
            if (!e2k->empty()) e2.K_override = e2_override;
            report = run_example2(e2);
        }
        if (c_ck->parsed()) report = run_check(ck);
        if (c_sim->parsed()) report = run_simulate(sim);
        if (c_bd->parsed()) report = run_bound(bd);
        if (c_sw->parsed()) report = run_sweep(sw);
        if (c_mg->parsed()) report = run_mg(mg);
        out << report.dump(2) << "\n";
        return kExitOk;
    } catch (const SchemaError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace delaystab::cli
