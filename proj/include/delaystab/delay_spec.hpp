#pragma once

#include <cmath>
#include <variant>
#include <vector>

#include "delaystab/errors.hpp"
#include "delaystab/function_spec.hpp"

namespace delaystab {

// h(t) = t - tau
struct ConstantLag {
    double tau = 0.0;
};

// h(t) = floor(t), the maximal integer not exceeding t; lag bound is 1.
struct FloorArgument {};

// h(t) = t - lag(t) with the lag tabulated over the simulation window.
struct TabulatedLag {
    TabulatedSpec lag;  // values must be >= 0
};

/// A delayed argument h(t) <= t together with a certified upper bound on the
/// lag t - h(t).
using DelaySpec = std::variant<ConstantLag, FloorArgument, TabulatedLag>;

/// h(t). Side::Left gives the limit from below (floor jumps at integers).
inline double delay_at(const DelaySpec& spec, double t, Side side = Side::Right) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantLag>) {
                return t - s.tau;
            } else if constexpr (std::is_same_v<T, FloorArgument>) {
                double f = std::floor(t);
                if (side == Side::Left && f == t) return f - 1.0;
                return f;
            } else {
                return t - detail::eval_tabulated(s.lag, t, side);
            }
        },
        spec);
}

/// Certified upper bound on t - h(t).
inline double lag_bound(const DelaySpec& spec) {
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantLag>) {
                return s.tau;
            } else if constexpr (std::is_same_v<T, FloorArgument>) {
                return 1.0;
            } else {
                double m = 0.0;
                for (const Knot& k : s.lag.knots) m = std::max(m, k.value);
                return m;
            }
        },
        spec);
}

/// Throws PreconditionError unless h(t) <= t holds structurally.
inline void validate(const DelaySpec& spec) {
    if (const auto* c = std::get_if<ConstantLag>(&spec)) {
        if (c->tau < 0.0) throw PreconditionError("constant lag must be >= 0");
    } else if (const auto* tab = std::get_if<TabulatedLag>(&spec)) {
        validate(ScalarFunctionSpec{tab->lag});
        for (const Knot& k : tab->lag.knots) {
            if (k.value < 0.0)
                throw PreconditionError("tabulated lag values must be >= 0 (h(t) <= t)");
        }
    }
}

/// Points in (t0, t1] where h itself jumps (integration grid must not
/// straddle them).
inline std::vector<double> delay_breakpoints_in(const DelaySpec& spec, double t0, double t1) {
    std::vector<double> out;
    if (std::holds_alternative<FloorArgument>(spec)) {
        for (double n = std::ceil(t0); n <= t1; n += 1.0) out.push_back(n);
    } else if (const auto* tab = std::get_if<TabulatedLag>(&spec)) {
        if (tab->lag.interpolation == Interpolation::Step) {
            for (const Knot& k : tab->lag.knots)
                if (k.t >= t0 && k.t <= t1) out.push_back(k.t);
        }
    }
    return out;
}

/// Solutions t in (lo, hi] of h(t) = target, used to propagate an initial
/// discontinuity through the delay. Exact for the closed-form variants,
/// scan-and-bisect for tabulated lags.
inline std::vector<double> delay_preimages(const DelaySpec& spec, double target, double lo,
                                           double hi) {
    std::vector<double> out;
    if (const auto* c = std::get_if<ConstantLag>(&spec)) {
        if (c->tau > 0.0) {
            double t = target + c->tau;
            if (t > lo && t <= hi) out.push_back(t);
        }
    } else if (std::holds_alternative<FloorArgument>(spec)) {
        // discontinuities of x(floor(t)) sit on the integers, which the grid
        // already contains; nothing extra propagates between them
    } else if (std::holds_alternative<TabulatedLag>(spec)) {
        // scan for sign changes of h(t) - target, then bisect each bracket
        const int n = 1024;
        double prev_t = lo;
        double prev_v = delay_at(spec, lo) - target;
        for (int i = 1; i <= n; ++i) {
            double t = lo + (hi - lo) * i / n;
            double v = delay_at(spec, t) - target;
            if ((prev_v < 0.0) != (v < 0.0)) {
                double a = prev_t, b = t, fa = prev_v;
                for (int it = 0; it < 80; ++it) {
                    double m = 0.5 * (a + b);
                    double fm = delay_at(spec, m) - target;
                    if ((fm < 0.0) == (fa < 0.0)) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                out.push_back(0.5 * (a + b));
            }
            prev_t = t;
            prev_v = v;
        }
    }
    return out;
}

}  // namespace delaystab
