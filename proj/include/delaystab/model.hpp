#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "delaystab/delay_spec.hpp"
#include "delaystab/errors.hpp"
#include "delaystab/function_spec.hpp"
#include "delaystab/quadrature.hpp"

namespace delaystab {

// ---------------------------------------------------------------------------
// memory kernels for distributed delays
// ---------------------------------------------------------------------------

// A finite atom of the delay measure, placed at relative position p within
// [h(t), t]: s = h(t) + p * (t - h(t)).
struct KernelAtom {
    double position = 1.0;  // in [0, 1]
    double weight = 1.0;    // > 0, atom weights sum to 1
};

struct AtomKernel {
    std::vector<KernelAtom> atoms;
};

// A nonnegative density over [h(t), t], given as a shape in the relative
// coordinate p in [0, 1] and normalized so the kernel integrates to one on
// every interval.
struct DensityKernel {
    ScalarFunctionSpec shape = ConstantSpec{1.0};

    // integral of the shape over [0,1]; the normalized density is shape/Z
    double normalization() const {
        return integrate_spec(shape, 0.0, 1.0, 1.0 / 256.0);
    }
};

using Kernel = std::variant<AtomKernel, DensityKernel>;

inline void validate(const Kernel& k) {
    if (const auto* a = std::get_if<AtomKernel>(&k)) {
        if (a->atoms.empty()) throw PreconditionError("atom kernel has no atoms");
        double sum = 0.0;
        for (const KernelAtom& at : a->atoms) {
            if (!(at.weight > 0.0)) throw PreconditionError("atom weight must be > 0");
            if (at.position < 0.0 || at.position > 1.0)
                throw PreconditionError("atom position must lie in [0, 1]");
            sum += at.weight;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw PreconditionError("atom weights must sum to 1, got " + std::to_string(sum));
    } else {
        const auto& d = std::get<DensityKernel>(k);
        validate(d.shape);
        const double z = d.normalization();
        if (!(z > 0.0)) throw PreconditionError("density shape must have positive mass");
        // the shape itself must be nonnegative
        for (int i = 0; i <= 64; ++i) {
            if (evaluate(d.shape, i / 64.0) < 0.0)
                throw PreconditionError("density shape must be nonnegative");
        }
    }
}

// One distributed term b(t) * \int_{h(t)}^t x(s) dR(t, s).
struct DistributedTerm {
    ScalarFunctionSpec coefficient = ConstantSpec{0.0};
    DelaySpec lower_limit = ConstantLag{0.0};
    Kernel kernel = AtomKernel{{KernelAtom{1.0, 1.0}}};
};

// ---------------------------------------------------------------------------
// initial condition
// ---------------------------------------------------------------------------

// x(t) = history(t) for t < 0, x(0) = value_at_zero.
struct InitialCondition {
    ScalarFunctionSpec history = ConstantSpec{1.0};
    double value_at_zero = 1.0;
};

inline InitialCondition constant_history(double v) { return InitialCondition{ConstantSpec{v}, v}; }

// ---------------------------------------------------------------------------
// linear problems
// ---------------------------------------------------------------------------

struct ConcentratedTerm {
    ScalarFunctionSpec b = ConstantSpec{0.0};
    DelaySpec delay = ConstantLag{0.0};
};

/// x'(t) + a(t) x(t) + sum_k b_k(t) x(h_k(t))
///       + sum_l c_l(t) \int_{g_l(t)}^t x(s) dR_l(t,s) = 0,  t >= 0,
/// with nonnegative coefficients. Immutable value type.
struct LinearDDE {
    ScalarFunctionSpec a = ConstantSpec{0.0};
    std::vector<ConcentratedTerm> concentrated_terms;
    std::vector<DistributedTerm> distributed_terms;
    InitialCondition initial;
};

// ---------------------------------------------------------------------------
// nonlinearity catalog (closed, serializable)
// ---------------------------------------------------------------------------

// f(t, u) = gain * u
struct LinearGain {
    double gain = 1.0;
};

// f(t, y) = r(t) * (alpha / K) * (1 - exp(-y)); vanishes at y = 0.
struct EquilibriumRestoring {
    double alpha = 1.0;
    double K = 1.0;
    ScalarFunctionSpec r = ConstantSpec{1.0};
};

// g(t, y) = beta K^n r(t) [ 1/(K^n + e^{-n y}) - 1/(K^n + 1) ], the delayed
// part of the log-transformed saturating loss; g(t, 0) = 0 and
// g(t, y)/y <= beta n r(t) / 4 for all y.
struct SaturatingFeedback {
    double beta = 1.0;
    double K = 1.0;
    double n = 1.0;
    ScalarFunctionSpec r = ConstantSpec{1.0};
};

// user-supplied sampled shape g(t, u) = table(u), linear in between
struct SampledNonlinearity {
    TabulatedSpec table;
};

using Nonlinearity =
    std::variant<LinearGain, EquilibriumRestoring, SaturatingFeedback, SampledNonlinearity>;

inline double apply(const Nonlinearity& nl, double t, double u) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearGain>) {
                return s.gain * u;
            } else if constexpr (std::is_same_v<T, EquilibriumRestoring>) {
                return evaluate(s.r, t) * (s.alpha / s.K) * (1.0 - std::exp(-u));
            } else if constexpr (std::is_same_v<T, SaturatingFeedback>) {
                const double Kn = std::pow(s.K, s.n);
                return s.beta * Kn * evaluate(s.r, t) *
                       (1.0 / (Kn + std::exp(-s.n * u)) - 1.0 / (Kn + 1.0));
            } else {
                return detail::eval_tabulated(s.table, u, Side::Right);
            }
        },
        nl);
}

// ---------------------------------------------------------------------------
// nonlinear problems
// ---------------------------------------------------------------------------

// One delayed term: concentrated g(t, x(h(t))) unless a kernel is present,
// in which case \int_{h(t)}^t g(t, x(s)) dR(t, s).
struct NonlinearTerm {
    Nonlinearity g = LinearGain{0.0};
    DelaySpec delay = ConstantLag{0.0};
    std::optional<Kernel> kernel;
};

// Declared sector bounds a0 <= f(t,u)/u <= A, 0 <= g_k(t,u)/u <= b_k on the
// state box [x1, x2].
struct SectorBounds {
    double a0 = 1.0;
    double A = 1.0;
    std::vector<double> b_k;
    double x1 = -1.0;
    double x2 = 1.0;

    double b0() const {
        double s = 0.0;
        for (double b : b_k) s += b;
        return s;
    }
};

/// x'(t) + f(t, x(t)) + sum_k g_k(t, x(h_k(t))) = 0 (or the distributed
/// form with g_k inside the kernel integral).
struct NonlinearDDE {
    Nonlinearity f = LinearGain{1.0};
    std::vector<NonlinearTerm> terms;
    SectorBounds sector_bounds;
    double initial_box_lo = -1.0;  // admissible initial range [x1^0, x2^0]
    double initial_box_hi = 1.0;
    InitialCondition initial;
};

// ---------------------------------------------------------------------------
// validation
// ---------------------------------------------------------------------------

namespace detail {

inline void require_nonnegative_sampled(const ScalarFunctionSpec& spec, double horizon,
                                        const char* what) {
    validate(spec);
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
        const double t = horizon * i / n;
        if (evaluate(spec, t) < 0.0)
            throw PreconditionError(std::string(what) + " is negative at t=" +
                                    std::to_string(t));
    }
    for (double b : breakpoints_in(spec, 0.0, horizon)) {
        if (evaluate(spec, b, Side::Right) < 0.0 || evaluate(spec, b, Side::Left) < 0.0)
            throw PreconditionError(std::string(what) + " is negative near breakpoint t=" +
                                    std::to_string(b));
    }
}

}  // namespace detail

/// Sampled validation of the model invariants on [0, horizon].
inline void validate(const LinearDDE& p, double horizon) {
    detail::require_nonnegative_sampled(p.a, horizon, "a(t)");
    for (const auto& term : p.concentrated_terms) {
        detail::require_nonnegative_sampled(term.b, horizon, "b_k(t)");
        validate(term.delay);
    }
    for (const auto& term : p.distributed_terms) {
        detail::require_nonnegative_sampled(term.coefficient, horizon, "distributed b_k(t)");
        validate(term.lower_limit);
        validate(term.kernel);
    }
    validate(p.initial.history);
    if (p.concentrated_terms.empty() && p.distributed_terms.empty()) {
        const auto* c = std::get_if<ConstantSpec>(&p.a);
        if (c && c->value == 0.0) throw PreconditionError("equation has no terms");
    }
}

inline void validate(const NonlinearDDE& p, double horizon) {
    for (const auto& term : p.terms) {
        validate(term.delay);
        if (term.kernel) validate(*term.kernel);
    }
    validate(p.initial.history);
    const auto& sb = p.sector_bounds;
    if (!(sb.a0 > 0.0) || sb.A < sb.a0)
        throw PreconditionError("sector bounds require 0 < a0 <= A");
    if (sb.x1 > 0.0 || sb.x2 < 0.0)
        throw PreconditionError("state box [x1, x2] must contain 0");
    if (p.initial.value_at_zero < p.initial_box_lo ||
        p.initial.value_at_zero > p.initial_box_hi)
        throw PreconditionError("initial value outside the admissible box");
    (void)horizon;
}

/// Numeric check that the declared sector bounds hold for sampled (t, u),
/// u in [x1, x2] \ {0}. Returns the worst violation (0 when clean).
inline double sector_bound_violation(const NonlinearDDE& p, double horizon, int u_samples = 101,
                                     int t_samples = 25) {
    const auto& sb = p.sector_bounds;
    double worst = 0.0;
    for (int j = 0; j <= t_samples; ++j) {
        const double t = horizon * j / t_samples;
        for (int i = 0; i <= u_samples; ++i) {
            const double u = sb.x1 + (sb.x2 - sb.x1) * i / u_samples;
            if (std::abs(u) < 1e-9) continue;
            const double fr = apply(p.f, t, u) / u;
            worst = std::max(worst, sb.a0 - fr);
            worst = std::max(worst, fr - sb.A);
            for (std::size_t k = 0; k < p.terms.size(); ++k) {
                const double gr = apply(p.terms[k].g, t, u) / u;
                const double bk = k < sb.b_k.size() ? sb.b_k[k] : 0.0;
                worst = std::max(worst, -gr);
                worst = std::max(worst, gr - bk);
            }
        }
    }
    return worst;
}

}  // namespace delaystab
