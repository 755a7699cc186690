#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "delaystab/criteria.hpp"
#include "delaystab/mackey_glass.hpp"
#include "delaystab/model.hpp"

namespace delaystab {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// serialization (numbers stay numbers; infinities become strings, JSON has
// no representation for them)
// ---------------------------------------------------------------------------

inline json json_number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline json to_json(const ScalarFunctionSpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantSpec>) {
                return json{{"kind", "constant"}, {"value", s.value}};
            } else if constexpr (std::is_same_v<T, PiecewisePeriodicSpec>) {
                json pieces = json::array();
                for (const Piece& p : s.pieces)
                    pieces.push_back({{"from", p.from}, {"to", p.to}, {"value", p.value}});
                return json{{"kind", "piecewise_periodic"}, {"period", s.period},
                            {"pieces", pieces}};
            } else if constexpr (std::is_same_v<T, SinusoidAffineSpec>) {
                return json{{"kind", "sinusoid_affine"}, {"offset", s.offset},
                            {"amplitude", s.amplitude}, {"frequency", s.frequency}};
            } else {
                json knots = json::array();
                for (const Knot& k : s.knots) knots.push_back({k.t, k.value});
                return json{{"kind", "tabulated"},
                            {"interpolation",
                             s.interpolation == Interpolation::Step ? "step" : "linear"},
                            {"knots", knots}};
            }
        },
        spec);
}

inline json to_json(const DelaySpec& spec) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantLag>) {
                return json{{"kind", "constant_lag"}, {"tau", s.tau}};
            } else if constexpr (std::is_same_v<T, FloorArgument>) {
                return json{{"kind", "floor_argument"}};
            } else {
                json knots = json::array();
                for (const Knot& k : s.lag.knots) knots.push_back({k.t, k.value});
                return json{{"kind", "tabulated_lag"},
                            {"interpolation",
                             s.lag.interpolation == Interpolation::Step ? "step" : "linear"},
                            {"knots", knots}};
            }
        },
        spec);
}

inline json to_json(const Kernel& k) {
    if (const auto* a = std::get_if<AtomKernel>(&k)) {
        json atoms = json::array();
        for (const KernelAtom& at : a->atoms)
            atoms.push_back({{"position", at.position}, {"weight", at.weight}});
        return json{{"kind", "atoms"}, {"atoms", atoms}};
    }
    return json{{"kind", "density"}, {"shape", to_json(std::get<DensityKernel>(k).shape)}};
}

inline json to_json(const Nonlinearity& nl) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearGain>) {
                return json{{"kind", "linear_gain"}, {"gain", s.gain}};
            } else if constexpr (std::is_same_v<T, EquilibriumRestoring>) {
                return json{{"kind", "equilibrium_restoring"}, {"alpha", s.alpha},
                            {"K", s.K}, {"r", to_json(s.r)}};
            } else if constexpr (std::is_same_v<T, SaturatingFeedback>) {
                return json{{"kind", "saturating_feedback"}, {"beta", s.beta}, {"K", s.K},
                            {"n", s.n}, {"r", to_json(s.r)}};
            } else {
                return json{{"kind", "sampled"},
                            {"table", to_json(ScalarFunctionSpec{s.table})}};
            }
        },
        nl);
}

inline json to_json(const InitialCondition& ic) {
    return json{{"history", to_json(ic.history)}, {"value_at_zero", ic.value_at_zero}};
}

inline json to_json(const Verdict& v) {
    json inputs = json::object();
    for (const auto& [k, val] : v.inputs) inputs[k] = json_number(val);
    return json{{"criterion", to_string(v.criterion)}, {"certified", v.certified},
                {"status", v.status()},               {"lhs", json_number(v.lhs)},
                {"rhs", json_number(v.rhs)},          {"inputs", inputs}};
}

inline json to_json(const MGDerived& d) {
    return json{{"K", d.K}, {"mu", d.mu}, {"M", d.M},   {"c", d.c},
                {"C", d.C}, {"a0", d.a0}, {"A", d.A},   {"b0", d.b0}};
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace detail_json {

inline const json& require(const json& obj, const char* field, const std::string& where) {
    if (!obj.is_object() || !obj.contains(field))
        throw SchemaError(where + ": missing field '" + field + "'");
    return obj.at(field);
}

inline double require_number(const json& obj, const char* field, const std::string& where) {
    const json& v = require(obj, field, where);
    if (!v.is_number()) throw SchemaError(where + ": field '" + field + "' must be a number");
    return v.get<double>();
}

inline std::string require_string(const json& obj, const char* field,
                                  const std::string& where) {
    const json& v = require(obj, field, where);
    if (!v.is_string()) throw SchemaError(where + ": field '" + field + "' must be a string");
    return v.get<std::string>();
}

inline TabulatedSpec parse_knots(const json& obj, const std::string& where) {
    TabulatedSpec tab;
    const std::string interp = obj.contains("interpolation")
                                   ? obj.at("interpolation").get<std::string>()
                                   : "linear";
    if (interp == "step")
        tab.interpolation = Interpolation::Step;
    else if (interp == "linear")
        tab.interpolation = Interpolation::Linear;
    else
        throw SchemaError(where + ": interpolation must be 'step' or 'linear'");
    const json& knots = require(obj, "knots", where);
    if (!knots.is_array()) throw SchemaError(where + ": 'knots' must be an array");
    for (const json& k : knots) {
        if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
            throw SchemaError(where + ": each knot must be a [t, value] number pair");
        tab.knots.push_back({k[0].get<double>(), k[1].get<double>()});
    }
    return tab;
}

}  // namespace detail_json

inline ScalarFunctionSpec parse_function_spec(const json& obj, const std::string& where) {
    using namespace detail_json;
    const std::string kind = require_string(obj, "kind", where);
    if (kind == "constant") {
        return ConstantSpec{require_number(obj, "value", where)};
    }
    if (kind == "piecewise_periodic") {
        PiecewisePeriodicSpec s;
        s.period = require_number(obj, "period", where);
        const json& pieces = require(obj, "pieces", where);
        if (!pieces.is_array()) throw SchemaError(where + ": 'pieces' must be an array");
        for (const json& p : pieces) {
            s.pieces.push_back({require_number(p, "from", where + ".pieces"),
                                require_number(p, "to", where + ".pieces"),
                                require_number(p, "value", where + ".pieces")});
        }
        ScalarFunctionSpec out = s;
        validate(out);
        return out;
    }
    if (kind == "sinusoid_affine") {
        return SinusoidAffineSpec{require_number(obj, "offset", where),
                                  require_number(obj, "amplitude", where),
                                  require_number(obj, "frequency", where)};
    }
    if (kind == "tabulated") {
        ScalarFunctionSpec out = parse_knots(obj, where);
        validate(out);
        return out;
    }
    throw SchemaError(where + ": unknown function kind '" + kind + "'");
}

inline DelaySpec parse_delay_spec(const json& obj, const std::string& where) {
    using namespace detail_json;
    const std::string kind = require_string(obj, "kind", where);
    if (kind == "constant_lag") return ConstantLag{require_number(obj, "tau", where)};
    if (kind == "floor_argument") return FloorArgument{};
    if (kind == "tabulated_lag") {
        DelaySpec out = TabulatedLag{parse_knots(obj, where)};
        validate(out);
        return out;
    }
    throw SchemaError(where + ": unknown delay kind '" + kind + "'");
}

inline Kernel parse_kernel(const json& obj, const std::string& where) {
    using namespace detail_json;
    const std::string kind = require_string(obj, "kind", where);
    if (kind == "atoms") {
        AtomKernel k;
        const json& atoms = require(obj, "atoms", where);
        if (!atoms.is_array()) throw SchemaError(where + ": 'atoms' must be an array");
        for (const json& a : atoms)
            k.atoms.push_back({require_number(a, "position", where + ".atoms"),
                               require_number(a, "weight", where + ".atoms")});
        Kernel out = k;
        validate(out);
        return out;
    }
    if (kind == "density") {
        Kernel out = DensityKernel{
            parse_function_spec(detail_json::require(obj, "shape", where), where + ".shape")};
        validate(out);
        return out;
    }
    throw SchemaError(where + ": unknown kernel kind '" + kind + "'");
}

inline Nonlinearity parse_nonlinearity(const json& obj, const std::string& where) {
    using namespace detail_json;
    const std::string kind = require_string(obj, "kind", where);
    if (kind == "linear_gain") return LinearGain{require_number(obj, "gain", where)};
    if (kind == "equilibrium_restoring") {
        return EquilibriumRestoring{
            require_number(obj, "alpha", where), require_number(obj, "K", where),
            parse_function_spec(require(obj, "r", where), where + ".r")};
    }
    if (kind == "saturating_feedback") {
        return SaturatingFeedback{
            require_number(obj, "beta", where), require_number(obj, "K", where),
            require_number(obj, "n", where),
            parse_function_spec(require(obj, "r", where), where + ".r")};
    }
    if (kind == "sampled") {
        return SampledNonlinearity{parse_knots(require(obj, "table", where), where + ".table")};
    }
    throw SchemaError(where + ": unknown nonlinearity kind '" + kind + "'");
}

inline InitialCondition parse_initial(const json& obj, const std::string& where) {
    InitialCondition ic;
    ic.history =
        parse_function_spec(detail_json::require(obj, "history", where), where + ".history");
    ic.value_at_zero = detail_json::require_number(obj, "value_at_zero", where);
    return ic;
}

/// A parsed problem-description file.
struct ProblemFile {
    std::variant<LinearDDE, NonlinearDDE, MackeyGlassProblem> problem;
    double horizon = 50.0;
    std::optional<double> K_override;  // mackey_glass only

    bool is_linear() const { return std::holds_alternative<LinearDDE>(problem); }
    bool is_nonlinear() const { return std::holds_alternative<NonlinearDDE>(problem); }
    bool is_mackey_glass() const { return std::holds_alternative<MackeyGlassProblem>(problem); }
};

inline ProblemFile parse_problem(const json& root) {
    using namespace detail_json;
    ProblemFile out;
    const std::string cls = require_string(root, "equation_class", "problem");
    out.horizon = require_number(root, "horizon", "problem");

    if (cls == "linear") {
        LinearDDE p;
        if (root.contains("a")) p.a = parse_function_spec(root.at("a"), "problem.a");
        const json& terms = require(root, "terms", "problem");
        if (!terms.is_array()) throw SchemaError("problem: 'terms' must be an array");
        for (const json& t : terms) {
            if (t.contains("kernel")) {
                DistributedTerm dt;
                dt.coefficient = parse_function_spec(require(t, "b", "term"), "term.b");
                dt.lower_limit = parse_delay_spec(require(t, "delay", "term"), "term.delay");
                dt.kernel = parse_kernel(t.at("kernel"), "term.kernel");
                p.distributed_terms.push_back(std::move(dt));
            } else {
                p.concentrated_terms.push_back(
                    {parse_function_spec(require(t, "b", "term"), "term.b"),
                     parse_delay_spec(require(t, "delay", "term"), "term.delay")});
            }
        }
        p.initial = parse_initial(require(root, "initial", "problem"), "problem.initial");
        out.problem = std::move(p);
        return out;
    }

    if (cls == "nonlinear") {
        NonlinearDDE p;
        p.f = parse_nonlinearity(require(root, "f", "problem"), "problem.f");
        const json& terms = require(root, "terms", "problem");
        if (!terms.is_array()) throw SchemaError("problem: 'terms' must be an array");
        for (const json& t : terms) {
            NonlinearTerm term;
            term.g = parse_nonlinearity(require(t, "g", "term"), "term.g");
            term.delay = parse_delay_spec(require(t, "delay", "term"), "term.delay");
            if (t.contains("kernel")) term.kernel = parse_kernel(t.at("kernel"), "term.kernel");
            p.terms.push_back(std::move(term));
        }
        const json& sb = require(root, "sector_bounds", "problem");
        p.sector_bounds.a0 = require_number(sb, "a0", "sector_bounds");
        p.sector_bounds.A = require_number(sb, "A", "sector_bounds");
        const json& bk = require(sb, "b_k", "sector_bounds");
        if (!bk.is_array()) throw SchemaError("sector_bounds: 'b_k' must be an array");
        for (const json& b : bk) p.sector_bounds.b_k.push_back(b.get<double>());
        const json& box = require(sb, "box", "sector_bounds");
        if (!box.is_array() || box.size() != 2)
            throw SchemaError("sector_bounds: 'box' must be [x1, x2]");
        p.sector_bounds.x1 = box[0].get<double>();
        p.sector_bounds.x2 = box[1].get<double>();
        if (root.contains("initial_box")) {
            const json& ib = root.at("initial_box");
            if (!ib.is_array() || ib.size() != 2)
                throw SchemaError("problem: 'initial_box' must be [lo, hi]");
            p.initial_box_lo = ib[0].get<double>();
            p.initial_box_hi = ib[1].get<double>();
        } else {
            p.initial_box_lo = p.sector_bounds.x1;
            p.initial_box_hi = p.sector_bounds.x2;
        }
        p.initial = parse_initial(require(root, "initial", "problem"), "problem.initial");
        out.problem = std::move(p);
        return out;
    }

    if (cls == "mackey_glass") {
        MackeyGlassProblem p;
        p.params.alpha = require_number(root, "alpha", "problem");
        p.params.beta = require_number(root, "beta", "problem");
        p.params.n = require_number(root, "n", "problem");
        p.params.r = parse_function_spec(require(root, "r_spec", "problem"), "problem.r_spec");
        p.params.r0 = require_number(root, "r0", "problem");
        p.params.R = require_number(root, "R", "problem");
        p.params.h = parse_delay_spec(require(root, "lag", "problem"), "problem.lag");
        if (root.contains("K_override")) out.K_override = root.at("K_override").get<double>();
        if (root.contains("initial")) {
            p.initial = parse_initial(root.at("initial"), "problem.initial");
        } else {
            const double K =
                out.K_override ? *out.K_override
                               : solve_equilibrium(p.params.alpha, p.params.beta, p.params.n);
            p.initial = constant_history(0.5 * K);
        }
        out.problem = std::move(p);
        return out;
    }

    throw SchemaError("problem: unknown equation_class '" + cls +
                      "' (expected linear, nonlinear or mackey_glass)");
}

/// Parse a problem file from disk; JSON syntax errors are reported with the
/// line they occur on.
inline ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open problem file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json root;
    try {
        root = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        for (std::size_t i = 0; i < std::min(e.byte, text.size()); ++i)
            if (text[i] == '\n') ++line;
        throw SchemaError(path + ":" + std::to_string(line) + ": " + e.what());
    }
    try {
        return parse_problem(root);
    } catch (const SchemaError& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

inline json to_json(const ProblemFile& pf) {
    json root;
    if (pf.is_linear()) {
        const auto& p = std::get<LinearDDE>(pf.problem);
        root["equation_class"] = "linear";
        root["a"] = to_json(p.a);
        json terms = json::array();
        for (const auto& t : p.concentrated_terms)
            terms.push_back({{"b", to_json(t.b)}, {"delay", to_json(t.delay)}});
        for (const auto& t : p.distributed_terms)
            terms.push_back({{"b", to_json(t.coefficient)},
                             {"delay", to_json(t.lower_limit)},
                             {"kernel", to_json(t.kernel)}});
        root["terms"] = terms;
        root["initial"] = to_json(p.initial);
    } else if (pf.is_nonlinear()) {
        const auto& p = std::get<NonlinearDDE>(pf.problem);
        root["equation_class"] = "nonlinear";
        root["f"] = to_json(p.f);
        json terms = json::array();
        for (const auto& t : p.terms) {
            json jt = {{"g", to_json(t.g)}, {"delay", to_json(t.delay)}};
            if (t.kernel) jt["kernel"] = to_json(*t.kernel);
            terms.push_back(jt);
        }
        root["terms"] = terms;
        root["sector_bounds"] = {{"a0", p.sector_bounds.a0},
                                 {"A", p.sector_bounds.A},
                                 {"b_k", p.sector_bounds.b_k},
                                 {"box", {p.sector_bounds.x1, p.sector_bounds.x2}}};
        root["initial_box"] = {p.initial_box_lo, p.initial_box_hi};
        root["initial"] = to_json(p.initial);
    } else {
        const auto& p = std::get<MackeyGlassProblem>(pf.problem);
        root["equation_class"] = "mackey_glass";
        root["alpha"] = p.params.alpha;
        root["beta"] = p.params.beta;
        root["n"] = p.params.n;
        root["r_spec"] = to_json(p.params.r);
        root["r0"] = p.params.r0;
        root["R"] = p.params.R;
        root["lag"] = to_json(p.params.h);
        if (pf.K_override) root["K_override"] = *pf.K_override;
        root["initial"] = to_json(p.initial);
    }
    root["horizon"] = pf.horizon;
    return root;
}

}  // namespace delaystab
