#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "delaystab/errors.hpp"
#include "delaystab/model.hpp"
#include "delaystab/trajectory.hpp"

namespace delaystab {

struct IntegratorConfig {
    double step_size = 0.01;
    int quadrature_nodes_per_step = 2;  // >= 2, for density kernels
    double horizon = 50.0;
};

namespace detail {

// Smallest backward read distance across concentrated delays; the step must
// stay well below it so stage reads land in committed history.
inline double min_positive_lag(const std::vector<DelaySpec>& delays) {
    double lag = std::numeric_limits<double>::infinity();
    for (const auto& d : delays) {
        if (const auto* c = std::get_if<ConstantLag>(&d)) {
            if (c->tau > 0.0) lag = std::min(lag, c->tau);
        } else if (const auto* tab = std::get_if<TabulatedLag>(&d)) {
            double m = std::numeric_limits<double>::infinity();
            for (const Knot& k : tab->lag.knots) m = std::min(m, k.value);
            if (m > 0.0) lag = std::min(lag, m);
        }
        // FloorArgument reads a committed grid point; no constraint
    }
    return lag;
}

struct GridSpec {
    std::vector<double> nodes;  // strictly increasing, nodes.front()=0, back()=horizon
    std::vector<Breakpoint> breakpoints;
    double effective_step = 0.0;
    std::vector<std::string> warnings;
};

// Breakpoint-aligned step grid: every spec/delay discontinuity becomes a
// node, the initial discontinuity at t=0 is propagated through the delays up
// to generation 3, and the gaps are filled uniformly.
inline GridSpec build_grid(double horizon, double step,
                           const std::vector<const ScalarFunctionSpec*>& coeff_specs,
                           const std::vector<DelaySpec>& delays) {
    if (!(horizon > 0.0)) throw PreconditionError("horizon must be > 0");
    if (!(step > 0.0)) throw PreconditionError("step size must be > 0");

    GridSpec g;
    const double lag = min_positive_lag(delays);
    if (std::isfinite(lag) && step > lag / 10.0) {
        step = lag / 20.0;
        g.warnings.push_back("step size clamped to " + std::to_string(step) +
                             " (a tenth of the smallest lag)");
    }
    g.effective_step = step;

    std::vector<Breakpoint> bps;
    bps.push_back({0.0, BreakpointKind::Primary});
    for (const auto* s : coeff_specs) {
        for (double b : breakpoints_in(*s, 0.0, horizon)) bps.push_back({b, BreakpointKind::Spec});
    }
    for (const auto& d : delays) {
        for (double b : delay_breakpoints_in(d, 0.0, horizon))
            bps.push_back({b, BreakpointKind::Delay});
    }
    // propagate t=0 through the delayed arguments, three generations deep
    std::vector<double> sources = {0.0};
    for (int gen = 0; gen < 3; ++gen) {
        std::vector<double> next;
        for (const auto& d : delays) {
            for (double src : sources) {
                for (double t : delay_preimages(d, src, 0.0, horizon)) {
                    next.push_back(t);
                    bps.push_back({t, BreakpointKind::Propagated});
                }
            }
        }
        if (next.empty()) break;
        sources = std::move(next);
    }

    std::sort(bps.begin(), bps.end(), [](const Breakpoint& a, const Breakpoint& b) {
        return a.t < b.t || (a.t == b.t && static_cast<int>(a.kind) < static_cast<int>(b.kind));
    });
    const double tol = 1e-10 * std::max(1.0, horizon);
    for (const Breakpoint& b : bps) {
        if (b.t < -tol || b.t > horizon + tol) continue;
        if (!g.breakpoints.empty() && b.t - g.breakpoints.back().t < tol) continue;
        g.breakpoints.push_back(b);
    }

    // fill each breakpoint gap with uniform steps
    std::vector<double> anchors;
    for (const Breakpoint& b : g.breakpoints) anchors.push_back(std::max(0.0, b.t));
    if (anchors.empty() || anchors.front() > tol) anchors.insert(anchors.begin(), 0.0);
    if (horizon - anchors.back() > tol) anchors.push_back(horizon);
    for (std::size_t i = 0; i + 1 < anchors.size(); ++i) {
        const double a = anchors[i], b = anchors[i + 1];
        const int m = std::max(1, static_cast<int>(std::ceil((b - a) / step - 1e-9)));
        for (int k = 0; k < m; ++k) g.nodes.push_back(a + (b - a) * k / m);
    }
    g.nodes.push_back(anchors.back());
    return g;
}

// Resolves past states x(s) during a stage evaluation: committed segments,
// the initial history, and the not-yet-committed overlap (t0, ts], which is
// approximated linearly between the step start and the current stage point.
class PastReader {
public:
    PastReader(const std::vector<HermiteSegment>& segments, const InitialCondition& init)
        : segments_(segments), init_(init) {}

    void begin_stage(double t0, double x0, double ts, double xs) {
        t0_ = t0;
        x0_ = x0;
        ts_ = ts;
        xs_ = xs;
    }

    double operator()(double s) const {
        if (s < 0.0) return evaluate(init_.history, s);
        if (s == 0.0) return init_.value_at_zero;
        if (s <= t0_) {
            if (segments_.empty()) return init_.value_at_zero;  // s == t0 == 0 handled above
            auto it = std::upper_bound(segments_.begin(), segments_.end(), s,
                                       [](double v, const HermiteSegment& seg) {
                                           return v < seg.t0;
                                       });
            if (it != segments_.begin()) --it;
            return it->eval(s);
        }
        const double tol = 1e-9 * std::max(1.0, ts_);
        if (s <= ts_ + tol) {
            if (ts_ - t0_ <= 0.0) return xs_;
            const double w = std::clamp((s - t0_) / (ts_ - t0_), 0.0, 1.0);
            return x0_ + w * (xs_ - x0_);
        }
        throw DomainError("delayed argument " + std::to_string(s) + " is ahead of time " +
                          std::to_string(ts_));
    }

    // interior panel edges for quadrature over [lo, hi]: committed segment
    // joints, the history/solution junction and the overlap boundary
    void collect_edges(double lo, double hi, std::vector<double>& out) const {
        if (lo < 0.0 && hi > 0.0) out.push_back(0.0);
        if (lo < 0.0) {
            for (double b : breakpoints_in(init_.history, lo, std::min(hi, 0.0)))
                out.push_back(b);
        }
        auto it = std::upper_bound(segments_.begin(), segments_.end(), lo,
                                   [](double v, const HermiteSegment& seg) {
                                       return v < seg.t0;
                                   });
        for (; it != segments_.end() && it->t0 < hi; ++it) {
            if (it->t0 > lo) out.push_back(it->t0);
        }
        if (t0_ > lo && t0_ < hi) out.push_back(t0_);
    }

private:
    const std::vector<HermiteSegment>& segments_;
    const InitialCondition& init_;
    double t0_ = 0.0, x0_ = 0.0, ts_ = 0.0, xs_ = 0.0;
};

// \int_{h(t)}^t T(x(s)) d_s R(t,s) for a kernel R: an exact weighted sum for
// atom kernels, breakpoint-aligned Gauss panels for densities.
template <typename Transform>
double kernel_state_integral(const Kernel& kernel, const DelaySpec& lower_limit, double t,
                             Side side, const PastReader& past, double max_panel,
                             Transform&& transform) {
    const double lo = delay_at(lower_limit, t, side);
    const double hi = t;
    if (hi - lo <= 0.0) return transform(past(hi));
    if (const auto* atoms = std::get_if<AtomKernel>(&kernel)) {
        double sum = 0.0;
        for (const KernelAtom& a : atoms->atoms)
            sum += a.weight * transform(past(lo + a.position * (hi - lo)));
        return sum;
    }
    const auto& d = std::get<DensityKernel>(kernel);
    const double z = d.normalization();
    const double len = hi - lo;
    std::vector<double> edges;
    past.collect_edges(lo, hi, edges);
    for (double pb : breakpoints_in(d.shape, 0.0, 1.0)) edges.push_back(lo + pb * len);
    return integrate_panels(
        [&](double s) {
            const double p = (s - lo) / len;
            return evaluate(d.shape, p) / (z * len) * transform(past(s));
        },
        lo, hi, edges, max_panel);
}

// Classical 4-stage step over the prescribed grid with cubic Hermite dense
// output. Coefficients and delays are read right-continuously except at the
// step's right endpoint, which uses the limit from below so every step
// integrates the closure of a single smooth piece.
template <typename Rhs>
Trajectory run_steps(Rhs&& rhs, const InitialCondition& init, const GridSpec& grid) {
    std::vector<HermiteSegment> segments;
    segments.reserve(grid.nodes.size());
    PastReader past(segments, init);

    double x = init.value_at_zero;
    auto stage = [&](double t0, double x0, double ts, double xs, Side side) {
        past.begin_stage(t0, x0, ts, xs);
        return rhs(ts, xs, past, side);
    };

    for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i) {
        const double t0 = grid.nodes[i], t1 = grid.nodes[i + 1];
        const double h = t1 - t0;
        const double k1 = stage(t0, x, t0, x, Side::Right);
        const double k2 = stage(t0, x, t0 + 0.5 * h, x + 0.5 * h * k1, Side::Right);
        const double k3 = stage(t0, x, t0 + 0.5 * h, x + 0.5 * h * k2, Side::Right);
        const double k4 = stage(t0, x, t1, x + h * k3, Side::Left);
        const double x1 = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(x1) || std::abs(x1) > 1e300)
            throw OverflowError("solution blew up at t=" + std::to_string(t1), t1);
        const double d1 = stage(t0, x, t1, x1, Side::Left);
        segments.push_back({t0, t1, x, x1, k1, d1});
        x = x1;
    }
    return Trajectory(std::move(segments), init, grid.breakpoints, grid.effective_step,
                      grid.warnings);
}

inline double density_panel(const IntegratorConfig& cfg) {
    return cfg.step_size * 2.0 / std::max(2, cfg.quadrature_nodes_per_step);
}

}  // namespace detail

/// Step size min(0.01, lag/20) and the given horizon.
inline IntegratorConfig default_config(const LinearDDE& p, double horizon) {
    std::vector<DelaySpec> delays;
    for (const auto& t : p.concentrated_terms) delays.push_back(t.delay);
    const double lag = detail::min_positive_lag(delays);
    IntegratorConfig cfg;
    cfg.step_size = std::isfinite(lag) ? std::min(0.01, lag / 20.0) : 0.01;
    cfg.horizon = horizon;
    return cfg;
}

inline IntegratorConfig default_config(const NonlinearDDE& p, double horizon) {
    std::vector<DelaySpec> delays;
    for (const auto& t : p.terms)
        if (!t.kernel) delays.push_back(t.delay);
    const double lag = detail::min_positive_lag(delays);
    IntegratorConfig cfg;
    cfg.step_size = std::isfinite(lag) ? std::min(0.01, lag / 20.0) : 0.01;
    cfg.horizon = horizon;
    return cfg;
}

/// Method-of-steps integration of a linear problem; delayed values are read
/// from the trajectory's own dense interpolant.
inline Trajectory integrate_linear(const LinearDDE& p, const IntegratorConfig& cfg) {
    validate(p, cfg.horizon);
    std::vector<const ScalarFunctionSpec*> specs = {&p.a};
    std::vector<DelaySpec> delays;
    for (const auto& t : p.concentrated_terms) {
        specs.push_back(&t.b);
        delays.push_back(t.delay);
    }
    for (const auto& t : p.distributed_terms) {
        specs.push_back(&t.coefficient);
        delays.push_back(t.lower_limit);
    }
    auto grid = detail::build_grid(cfg.horizon, cfg.step_size, specs, delays);
    const double panel = detail::density_panel(cfg);

    auto rhs = [&](double t, double x, const detail::PastReader& past, Side side) {
        double dx = -evaluate(p.a, t, side) * x;
        for (const auto& term : p.concentrated_terms)
            dx -= evaluate(term.b, t, side) * past(delay_at(term.delay, t, side));
        for (const auto& term : p.distributed_terms) {
            dx -= evaluate(term.coefficient, t, side) *
                  detail::kernel_state_integral(term.kernel, term.lower_limit, t, side, past,
                                                panel, [](double v) { return v; });
        }
        return dx;
    };
    return detail::run_steps(rhs, p.initial, grid);
}

/// Same stepping scheme with a nonlinear right-hand side; when the state
/// leaves the declared box a warning is recorded and integration continues
/// (the sector bounds are no longer certified there).
inline Trajectory integrate_nonlinear(const NonlinearDDE& p, const IntegratorConfig& cfg) {
    validate(p, cfg.horizon);
    std::vector<const ScalarFunctionSpec*> specs;
    auto add_rate_spec = [&](const Nonlinearity& nl) {
        if (const auto* er = std::get_if<EquilibriumRestoring>(&nl)) specs.push_back(&er->r);
        if (const auto* sf = std::get_if<SaturatingFeedback>(&nl)) specs.push_back(&sf->r);
    };
    add_rate_spec(p.f);
    std::vector<DelaySpec> delays;
    std::vector<DelaySpec> concentrated;
    for (const auto& t : p.terms) {
        add_rate_spec(t.g);
        delays.push_back(t.delay);
        if (!t.kernel) concentrated.push_back(t.delay);
    }
    auto grid = detail::build_grid(cfg.horizon, cfg.step_size, specs, delays);
    const double panel = detail::density_panel(cfg);

    auto rhs = [&](double t, double x, const detail::PastReader& past, Side side) {
        double dx = -apply(p.f, t, x);
        for (const auto& term : p.terms) {
            if (term.kernel) {
                dx -= detail::kernel_state_integral(
                    *term.kernel, term.delay, t, side, past, panel,
                    [&](double v) { return apply(term.g, t, v); });
            } else {
                dx -= apply(term.g, t, past(delay_at(term.delay, t, side)));
            }
        }
        return dx;
    };
    Trajectory traj = detail::run_steps(rhs, p.initial, grid);

    std::vector<std::string> warnings = traj.warnings();
    for (const auto& [t, v] : traj.grid_samples()) {
        if (v < p.sector_bounds.x1 || v > p.sector_bounds.x2) {
            warnings.push_back("state left the declared box [" +
                               std::to_string(p.sector_bounds.x1) + ", " +
                               std::to_string(p.sector_bounds.x2) + "] at t=" +
                               std::to_string(t));
            break;
        }
    }
    if (warnings.size() == traj.warnings().size()) return traj;
    return Trajectory(traj.segments(), traj.initial(), traj.breakpoints(), traj.step_size(),
                      std::move(warnings));
}

enum class Example1Variant { VanishingA, PositiveA };

/// The 1-periodic non-delay coefficient of the destabilization example:
/// 3b on [n, n+eps), eps = ln(4)/(3b), then 0 or 0.5 until the next integer.
inline PiecewisePeriodicSpec example1_coefficient(double b, Example1Variant variant) {
    if (!(b > 0.0)) throw DomainError("example1_coefficient: b must be > 0");
    const double eps = std::log(4.0) / (3.0 * b);
    if (eps >= 1.0)
        throw DomainError("example1_coefficient: need b > ln(4)/3 so the spike fits one period");
    PiecewisePeriodicSpec a;
    a.period = 1.0;
    a.pieces = {{0.0, eps, 3.0 * b},
                {eps, 1.0, variant == Example1Variant::PositiveA ? 0.5 : 0.0}};
    return a;
}

/// The destabilization example: x' + a(t) x + b x(floor(t)) = 0 with the
/// 1-periodic a(t) equal to 3b on [n, n+eps) and either 0 (VanishingA) or
/// 0.5 (PositiveA) on [n+eps, n+1), eps = ln(4)/(3b) so that x(n+eps) = 0.
inline Trajectory integrate_example1(double b, Example1Variant variant, int n_periods,
                                     double step = 0.002) {
    LinearDDE p;
    p.a = example1_coefficient(b, variant);
    p.concentrated_terms = {{ConstantSpec{b}, FloorArgument{}}};
    p.initial = constant_history(1.0);

    IntegratorConfig cfg;
    cfg.step_size = step;
    cfg.horizon = static_cast<double>(n_periods);
    Trajectory traj = integrate_linear(p, cfg);
    if (!(b > 1.6 && b < 1.9)) {
        auto warnings = traj.warnings();
        warnings.push_back("b=" + std::to_string(b) +
                           " is outside the 1.6 < b < 1.9 destabilization regime");
        return Trajectory(traj.segments(), traj.initial(), traj.breakpoints(),
                          traj.step_size(), std::move(warnings));
    }
    return traj;
}

/// Reparametrize a solution of x' + a(t) x + b(t) x(h(t)) = 0 to the rescaled
/// time s = \int_0^t a: returns y(s) = x(t(s)). Integrating the transformed
/// equation (unit non-delay coefficient, coefficient b/a, lag in s) must
/// reproduce this trajectory.
inline Trajectory rescale_time(const LinearDDE& p, const Trajectory& x) {
    if (p.concentrated_terms.size() != 1 || !p.distributed_terms.empty())
        throw PreconditionError("rescale_time expects a single concentrated delay");
    const auto& segs = x.segments();
    for (const auto& s : segs) {
        if (!(evaluate(p.a, s.t0, Side::Right) > 0.0) ||
            !(evaluate(p.a, s.t1, Side::Left) > 0.0))
            throw DomainError("rescale_time: a(t) is not bounded away from zero on the grid");
    }
    std::vector<HermiteSegment> out;
    out.reserve(segs.size());
    std::vector<double> s_of_node(segs.size() + 1);
    s_of_node[0] = 0.0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        s_of_node[i + 1] =
            s_of_node[i] + integrate_spec(p.a, segs[i].t0, segs[i].t1, segs[i].t1 - segs[i].t0);
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& seg = segs[i];
        out.push_back({s_of_node[i], s_of_node[i + 1], seg.x0, seg.x1,
                       seg.d0 / evaluate(p.a, seg.t0, Side::Right),
                       seg.d1 / evaluate(p.a, seg.t1, Side::Left)});
    }

    // map breakpoints through s = p(t)
    std::vector<Breakpoint> bps;
    for (const Breakpoint& b : x.breakpoints())
        bps.push_back({integrate_spec(p.a, 0.0, b.t, 0.01), b.kind});

    // history in rescaled time: psi(s) = phi(s / a(0)) (the map is extended
    // backwards with slope a(0))
    InitialCondition init;
    init.value_at_zero = x.initial().value_at_zero;
    if (const auto* c = std::get_if<ConstantSpec>(&x.initial().history)) {
        init.history = *c;
    } else {
        const double a0 = evaluate(p.a, 0.0, Side::Right);
        const double span = lag_bound(p.concentrated_terms[0].delay) *
                                evaluate(p.a, 0.0, Side::Right) +
                            1.0;
        TabulatedSpec tab;
        const int m = 256;
        for (int i = 0; i <= m; ++i) {
            const double s = -span + span * i / m;
            tab.knots.push_back({s, evaluate(x.initial().history, s / a0)});
        }
        init.history = tab;
    }
    return Trajectory(std::move(out), init, bps, x.step_size(), x.warnings());
}

/// The transformed problem in rescaled time: unit non-delay coefficient, a
/// tabulated coefficient b/a and a tabulated lag; exact when a, b and the
/// lag are constant. Returns the problem and its horizon in s.
inline std::pair<LinearDDE, double> build_rescaled_problem(const LinearDDE& p,
                                                           const Trajectory& x) {
    if (p.concentrated_terms.size() != 1 || !p.distributed_terms.empty())
        throw PreconditionError("build_rescaled_problem expects a single concentrated delay");
    const auto& delay = p.concentrated_terms[0].delay;
    const auto& segs = x.segments();

    TabulatedSpec coeff, lag;
    double s_acc = 0.0;
    const double a0 = evaluate(p.a, 0.0, Side::Right);
    auto p_of = [&](double t) {
        if (t <= 0.0) return t * a0;
        return integrate_spec(p.a, 0.0, t, 0.01);
    };
    double last_s = -1.0;
    for (std::size_t i = 0; i <= segs.size(); ++i) {
        const double t = (i == 0) ? segs.front().t0 : segs[i - 1].t1;
        if (i > 0) s_acc += integrate_spec(p.a, segs[i - 1].t0, t, t - segs[i - 1].t0);
        if (s_acc <= last_s) continue;
        last_s = s_acc;
        coeff.knots.push_back({s_acc, evaluate(p.concentrated_terms[0].b, t) /
                                          evaluate(p.a, t)});
        lag.knots.push_back({s_acc, s_acc - p_of(delay_at(delay, t))});
    }
    LinearDDE out;
    out.a = ConstantSpec{1.0};
    out.concentrated_terms = {{coeff, TabulatedLag{lag}}};
    if (const auto* c = std::get_if<ConstantSpec>(&x.initial().history)) {
        out.initial = InitialCondition{*c, x.initial().value_at_zero};
    } else {
        TabulatedSpec hist;
        const double span = lag_bound(delay) * a0 + 1.0;
        const int m = 256;
        for (int i = 0; i <= m; ++i) {
            const double s = -span + span * i / m;
            hist.knots.push_back({s, evaluate(x.initial().history, s / a0)});
        }
        out.initial = InitialCondition{hist, x.initial().value_at_zero};
    }
    return {out, s_acc};
}

}  // namespace delaystab
