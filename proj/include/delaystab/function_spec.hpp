#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "delaystab/errors.hpp"

namespace delaystab {

// Which one-sided limit to take when a function jumps at the query point.
// Specs are right-continuous by convention; Side::Left asks for the value
// approached from below, which the integrator uses at the right endpoint of
// a step that ends on a breakpoint.
enum class Side { Right, Left };

enum class Interpolation { Step, Linear };

struct ConstantSpec {
    double value = 0.0;
};

// One half-open piece [from, to) of a periodic piecewise-constant function.
struct Piece {
    double from = 0.0;
    double to = 0.0;
    double value = 0.0;
};

struct PiecewisePeriodicSpec {
    double period = 1.0;
    std::vector<Piece> pieces;  // must partition [0, period)
};

// offset + amplitude * sin(frequency * t)
struct SinusoidAffineSpec {
    double offset = 0.0;
    double amplitude = 0.0;
    double frequency = 1.0;
};

struct Knot {
    double t = 0.0;
    double value = 0.0;
};

struct TabulatedSpec {
    std::vector<Knot> knots;  // strictly increasing in t
    Interpolation interpolation = Interpolation::Linear;
};

/// A declaratively described scalar function of time. Used for coefficients,
/// rates and initial histories; evaluation is deterministic and the set of
/// discontinuity/kink points is known in closed form.
using ScalarFunctionSpec =
    std::variant<ConstantSpec, PiecewisePeriodicSpec, SinusoidAffineSpec, TabulatedSpec>;

namespace detail {

// Edge queries tolerate the round-off of forming t = n*period + edge: a tau
// within edge_tol of a piece boundary counts as on it. Pieces narrower than
// the tolerance are not supported.
inline double piece_edge_tol(double period) { return 1e-9 * std::max(1.0, period); }

inline double wrap_to_period(double t, double period) {
    double tau = t - period * std::floor(t / period);
    if (tau < 0.0) tau += period;
    if (period - tau <= piece_edge_tol(period)) tau = 0.0;
    return tau;
}

inline double eval_piecewise(const PiecewisePeriodicSpec& s, double t, Side side) {
    const double tol = piece_edge_tol(s.period);
    const double tau = wrap_to_period(t, s.period);
    // on an edge the two one-sided values differ: the piece starting there
    // owns the right limit, the piece ending there owns the left one
    for (const Piece& p : s.pieces) {
        if (std::abs(tau - p.from) <= tol) {
            if (side == Side::Right) return p.value;
            const double left_edge = p.from <= tol ? s.period : p.from;
            for (const Piece& q : s.pieces) {
                if (std::abs(q.to - left_edge) <= tol) return q.value;
            }
            return p.value;
        }
    }
    for (const Piece& p : s.pieces) {
        if (tau >= p.from && tau < p.to) return p.value;
    }
    return s.pieces.back().value;  // tau == period up to round-off
}

inline double eval_tabulated(const TabulatedSpec& s, double t, Side side) {
    const auto& k = s.knots;
    const double lo = k.front().t, hi = k.back().t;
    const double slack = 1e-9 * std::max(1.0, hi - lo);
    if (t < lo - slack || t > hi + slack) {
        throw ExtrapolationError("tabulated spec queried at t=" + std::to_string(t) +
                                 " outside knot range [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "]");
    }
    t = std::clamp(t, lo, hi);
    auto it = std::upper_bound(k.begin(), k.end(), t,
                               [](double v, const Knot& kn) { return v < kn.t; });
    std::size_t i = static_cast<std::size_t>(it - k.begin());  // first knot with knot.t > t
    if (i == 0) return k.front().value;
    if (s.interpolation == Interpolation::Step) {
        if (side == Side::Left && i >= 2 && k[i - 1].t == t) return k[i - 2].value;
        return k[i - 1].value;
    }
    if (i == k.size()) return k.back().value;
    const Knot &a = k[i - 1], &b = k[i];
    const double w = (t - a.t) / (b.t - a.t);
    return a.value + w * (b.value - a.value);
}

}  // namespace detail

/// Evaluate a spec at time t. All variants except Tabulated are defined for
/// every real t; Tabulated throws ExtrapolationError outside its knot range.
inline double evaluate(const ScalarFunctionSpec& spec, double t, Side side = Side::Right) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ConstantSpec>) {
                return s.value;
            } else if constexpr (std::is_same_v<T, PiecewisePeriodicSpec>) {
                return detail::eval_piecewise(s, t, side);
            } else if constexpr (std::is_same_v<T, SinusoidAffineSpec>) {
                return s.offset + s.amplitude * std::sin(s.frequency * t);
            } else {
                return detail::eval_tabulated(s, t, side);
            }
        },
        spec);
}

/// Discontinuity and kink points of the spec inside [t0, t1], sorted.
inline std::vector<double> breakpoints_in(const ScalarFunctionSpec& spec, double t0, double t1) {
    std::vector<double> out;
    if (const auto* pw = std::get_if<PiecewisePeriodicSpec>(&spec)) {
        const double P = pw->period;
        for (double base = P * std::floor(t0 / P); base <= t1; base += P) {
            for (const Piece& p : pw->pieces) {
                double b = base + p.from;
                if (b >= t0 && b <= t1) out.push_back(b);
            }
        }
    } else if (const auto* tab = std::get_if<TabulatedSpec>(&spec)) {
        for (const Knot& k : tab->knots) {
            if (k.t >= t0 && k.t <= t1) out.push_back(k.t);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Structural validation; throws PreconditionError on a malformed spec.
inline void validate(const ScalarFunctionSpec& spec) {
    if (const auto* pw = std::get_if<PiecewisePeriodicSpec>(&spec)) {
        if (!(pw->period > 0.0)) throw PreconditionError("piecewise period must be positive");
        if (pw->pieces.empty()) throw PreconditionError("piecewise spec has no pieces");
        std::vector<Piece> sorted = pw->pieces;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Piece& a, const Piece& b) { return a.from < b.from; });
        const double tol = 1e-12 * std::max(1.0, pw->period);
        if (std::abs(sorted.front().from) > tol)
            throw PreconditionError("piecewise pieces must start at 0");
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (!(sorted[i].to > sorted[i].from))
                throw PreconditionError("piecewise piece has nonpositive length");
            const double next = (i + 1 < sorted.size()) ? sorted[i + 1].from : pw->period;
            if (std::abs(sorted[i].to - next) > tol)
                throw PreconditionError("piecewise pieces must partition [0, period) "
                                        "with no gap or overlap");
        }
    } else if (const auto* tab = std::get_if<TabulatedSpec>(&spec)) {
        if (tab->knots.size() < 2) throw PreconditionError("tabulated spec needs >= 2 knots");
        for (std::size_t i = 1; i < tab->knots.size(); ++i) {
            if (!(tab->knots[i].t > tab->knots[i - 1].t))
                throw PreconditionError("tabulated knots must be strictly increasing in t");
        }
    }
}

inline ScalarFunctionSpec constant(double v) { return ConstantSpec{v}; }

}  // namespace delaystab
