#pragma once

#include <cmath>
#include <vector>

#include "delaystab/errors.hpp"
#include "delaystab/trajectory.hpp"

namespace delaystab {

enum class Example1Exact { Baseline, VanishingA, PositiveA };

/// Closed-form values x(0), x(1), ..., x(n) of the destabilization example
/// with x(0) = 1:
///   Baseline    x(k+1) = (1 - b) x(k)            (no non-delay term)
///   VanishingA  x(k+1) = -b (1 - eps) x(k)        with eps = ln(4)/(3b)
///   PositiveA   x(k+1) = 2b (e^{-0.5(1-eps)} - 1) x(k)
inline std::vector<double> example1_exact(double b, Example1Exact variant, int n) {
    if (!(b > 0.0)) throw DomainError("example1_exact: b must be > 0");
    const double eps = std::log(4.0) / (3.0 * b);
    double factor = 0.0;
    switch (variant) {
        case Example1Exact::Baseline: factor = 1.0 - b; break;
        case Example1Exact::VanishingA: factor = -b * (1.0 - eps); break;
        case Example1Exact::PositiveA:
            factor = 2.0 * b * (std::exp(-0.5 * (1.0 - eps)) - 1.0);
            break;
    }
    std::vector<double> out(static_cast<std::size_t>(n) + 1);
    out[0] = 1.0;
    for (int k = 0; k < n; ++k) out[k + 1] = factor * out[k];
    return out;
}

/// Geometric mean of |x(t + period)| / |x(t)| over t = burn_in + k * period.
/// Ratios with an exactly zero endpoint are skipped; all-zero samples give 0.
inline double growth_factor(const Trajectory& traj, double period, double burn_in) {
    if (!(period > 0.0)) throw PreconditionError("growth_factor: period must be > 0");
    if (traj.horizon() < burn_in + 3.0 * period)
        throw PreconditionError("growth_factor: horizon too short for three periods");
    double log_sum = 0.0;
    int count = 0;
    bool any_nonzero = false;
    for (double t = burn_in; t + period <= traj.horizon() + 1e-12; t += period) {
        const double x0 = std::abs(traj.value(t));
        const double x1 = std::abs(traj.value(std::min(t + period, traj.horizon())));
        if (x0 > 0.0 || x1 > 0.0) any_nonzero = true;
        if (x0 == 0.0 || x1 == 0.0) continue;
        log_sum += std::log(x1 / x0);
        ++count;
    }
    if (count == 0) return any_nonzero ? 1.0 : 0.0;
    return std::exp(log_sum / count);
}

namespace detail {

inline double slope_of(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    double mt = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += t[i];
        my += y[i];
    }
    mt /= n;
    my /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (t[i] - mt) * (y[i] - my);
        den += (t[i] - mt) * (t[i] - mt);
    }
    return num / den;
}

}  // namespace detail

/// Empirical exponential rate: the least-squares slope of ln|x(t)| over the
/// post-burn-in native grid samples. Oscillatory solutions (any sign change)
/// are fitted on the peak envelope (local maxima of |x|) instead, since raw
/// logs degenerate near the zeros. Negative means decay.
inline double decay_rate(const Trajectory& traj, double burn_in) {
    if (traj.horizon() < 2.0 * burn_in)
        throw PreconditionError("decay_rate: horizon must be at least twice the burn-in");
    std::vector<double> ts, xs;
    for (const auto& [t, v] : traj.grid_samples()) {
        if (t < burn_in) continue;
        ts.push_back(t);
        xs.push_back(v);
    }
    bool oscillatory = false;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (xs[i - 1] * xs[i] < 0.0) {
            oscillatory = true;
            break;
        }
    }
    std::vector<double> ft, fy;
    if (oscillatory) {
        for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
            const double a = std::abs(xs[i]);
            if (a > std::abs(xs[i - 1]) && a > std::abs(xs[i + 1]) && a > 1e-300) {
                ft.push_back(ts[i]);
                fy.push_back(std::log(a));
            }
        }
    } else {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double a = std::abs(xs[i]);
            if (a > 1e-300) {
                ft.push_back(ts[i]);
                fy.push_back(std::log(a));
            }
        }
    }
    if (ft.size() < 10)
        throw InsufficientDataError("decay_rate: fewer than 10 usable samples after burn-in");
    return detail::slope_of(ft, fy);
}

/// Strict sign alternations of the native grid samples in [from, to]; exact
/// zeros are skipped.
inline int count_sign_changes(const Trajectory& traj, double from, double to) {
    if (!(from < to)) throw PreconditionError("count_sign_changes: need from < to");
    int changes = 0;
    int prev_sign = 0;
    for (const auto& [t, v] : traj.grid_samples()) {
        if (t < from || t > to) continue;
        const int s = (v > 0.0) - (v < 0.0);
        if (s == 0) continue;
        if (prev_sign != 0 && s != prev_sign) ++changes;
        prev_sign = s;
    }
    return changes;
}

}  // namespace delaystab
