#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "delaystab/errors.hpp"
#include "delaystab/model.hpp"

namespace delaystab {

// One integration step [t0, t1] with cubic Hermite dense output built from
// the values and one-sided derivatives at both ends.
struct HermiteSegment {
    double t0, t1;
    double x0, x1;
    double d0, d1;  // x'(t0+), x'(t1-)

    double eval(double t) const {
        const double h = t1 - t0;
        const double s = (t - t0) / h;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * x0 + (s3 - 2 * s2 + s) * h * d0 +
               (-2 * s3 + 3 * s2) * x1 + (s3 - s2) * h * d1;
    }

    double deriv(double t) const {
        const double h = t1 - t0;
        const double s = (t - t0) / h;
        const double s2 = s * s;
        return ((6 * s2 - 6 * s) * x0 + (3 * s2 - 4 * s + 1) * h * d0 +
                (-6 * s2 + 6 * s) * x1 + (3 * s2 - 2 * s) * h * d1) / h;
    }
};

enum class BreakpointKind { Primary, Spec, Delay, Propagated };

inline const char* to_string(BreakpointKind k) {
    switch (k) {
        case BreakpointKind::Primary: return "primary";
        case BreakpointKind::Spec: return "spec";
        case BreakpointKind::Delay: return "delay";
        case BreakpointKind::Propagated: return "propagated";
    }
    return "?";
}

struct Breakpoint {
    double t;
    BreakpointKind kind;
};

/// Dense numerical solution on [0, horizon]. Queries at t <= 0 delegate to
/// the initial history; interior queries interpolate the per-step cubics.
/// Immutable after construction and safe to share across threads.
class Trajectory {
public:
    Trajectory(std::vector<HermiteSegment> segments, InitialCondition initial,
               std::vector<Breakpoint> breakpoints, double step_size,
               std::vector<std::string> warnings = {})
        : segments_(std::move(segments)),
          initial_(std::move(initial)),
          breakpoints_(std::move(breakpoints)),
          step_size_(step_size),
          warnings_(std::move(warnings)) {
        if (segments_.empty()) throw PreconditionError("trajectory has no segments");
    }

    double horizon() const { return segments_.back().t1; }
    double step_size() const { return step_size_; }
    const std::vector<HermiteSegment>& segments() const { return segments_; }
    const std::vector<Breakpoint>& breakpoints() const { return breakpoints_; }
    const InitialCondition& initial() const { return initial_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    double value(double t) const {
        if (t < 0.0) return evaluate(initial_.history, t);
        if (t == 0.0) return initial_.value_at_zero;
        return segment_at(t).eval(std::min(t, horizon()));
    }

    double derivative(double t) const {
        if (t <= 0.0) throw DomainError("trajectory derivative queried at t <= 0");
        return segment_at(t).deriv(std::min(t, horizon()));
    }

    /// Values at the native step grid (segment endpoints), including t = 0.
    std::vector<std::pair<double, double>> grid_samples() const {
        std::vector<std::pair<double, double>> out;
        out.reserve(segments_.size() + 1);
        out.emplace_back(segments_.front().t0, segments_.front().x0);
        for (const auto& s : segments_) out.emplace_back(s.t1, s.x1);
        return out;
    }

private:
    const HermiteSegment& segment_at(double t) const {
        if (t > horizon() + 1e-9 * std::max(1.0, horizon()))
            throw DomainError("trajectory queried beyond horizon at t=" + std::to_string(t));
        auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                                   [](double v, const HermiteSegment& s) { return v < s.t0; });
        if (it != segments_.begin()) --it;
        return *it;
    }

    std::vector<HermiteSegment> segments_;
    InitialCondition initial_;
    std::vector<Breakpoint> breakpoints_;
    double step_size_;
    std::vector<std::string> warnings_;
};

/// Write `t,x` samples at a fixed sampling step (plus the final point).
inline void write_csv(const Trajectory& traj, const std::string& path, double sample_step) {
    if (!(sample_step > 0.0)) throw PreconditionError("sample step must be > 0");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw Error("cannot open " + path + " for writing");
    std::fprintf(f, "t,x\n");
    const double T = traj.horizon();
    for (double t = 0.0; t < T + 0.5 * sample_step; t += sample_step) {
        const double tc = std::min(t, T);
        std::fprintf(f, "%.12g,%.12g\n", tc, traj.value(tc));
        if (tc >= T) break;
    }
    std::fclose(f);
}

/// Write the breakpoint record as `t,kind`.
inline void write_breakpoints_csv(const Trajectory& traj, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw Error("cannot open " + path + " for writing");
    std::fprintf(f, "t,kind\n");
    for (const Breakpoint& b : traj.breakpoints())
        std::fprintf(f, "%.12g,%s\n", b.t, to_string(b.kind));
    std::fclose(f);
}

}  // namespace delaystab
