#pragma once

// Adaptive integration of the flow: an embedded Dormand-Prince 5(4) pair
// with PI step control, free cubic-Hermite dense output, positivity-aware
// step rejection, and event detection (extinction, blow-up, horizon, step
// budget). Direction limits and extinction-time extrapolation live here too.
//
// Two numerical realities shape the event handling:
//
//   * Near extinction the metric behaves like sqrt(t* - t), so the minimum
//     component squared is locally linear in t. Time steps underflow before
//     the component can cross thresholds much below ~1e-7; when that happens
//     close to the cone boundary the run is closed with an Extinction event
//     whose time extrapolates that linear law instead of failing.
//
//   * An Extinction event's time may therefore exceed the last stored
//     sample's time: the state at extinction itself is not representable
//     (components reach zero). Every other terminal event coincides with
//     the final sample.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "base.hpp"
#include "manifolds.hpp"
#include "ricci.hpp"

namespace ricciflow {

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double t_end = 10.0;
    double norm_cap = 1e9;   // blow-up threshold on ||lambda||
    double ext_eps = 1e-9;   // extinction threshold on min component
    long max_steps = 1000000;
    Orientation orientation = Orientation::AsWritten;
    int sample_stride = 1;   // store every sample_stride-th accepted step
};

inline void validate_config(const IntegratorConfig& cfg) {
    if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0))
        throw ParameterOutOfRange("tolerances must be positive");
    if (!(cfg.t_end > 0.0)) throw ParameterOutOfRange("t_end must be positive");
    if (!(cfg.norm_cap > 1.0)) throw ParameterOutOfRange("norm_cap must exceed 1");
    if (!(cfg.ext_eps > 0.0) || cfg.ext_eps >= 1e-3)
        throw ParameterOutOfRange("ext_eps must lie in (0, 1e-3)");
    if (cfg.max_steps < 1) throw ParameterOutOfRange("max_steps must be at least 1");
    if (cfg.sample_stride < 1) throw ParameterOutOfRange("sample_stride must be at least 1");
}

enum class EventKind { Extinction, BlowUp, DirectionConverged, MaxSteps, ReachedTEnd };

inline std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::Extinction: return "extinction";
        case EventKind::BlowUp: return "blow-up";
        case EventKind::DirectionConverged: return "direction-converged";
        case EventKind::MaxSteps: return "max-steps";
        case EventKind::ReachedTEnd: return "reached-t-end";
    }
    return "?";
}

struct Event {
    EventKind kind;
    double t;
    std::string detail;
    bool terminal;
};

struct Sample {
    double t;
    MetricPoint g;
};

struct StepSizeUnderflow : Error {
    StepSizeUnderflow(double t, const Vec& g, const std::string& msg)
        : Error(msg), t_last(t), g_last(g) {}
    double t_last;
    Vec g_last;
};

struct Trajectory {
    FlagSpace space;
    IntegratorConfig config;
    std::vector<Sample> samples;
    std::vector<Vec> derivs;  // field value at each sample (dense output data)
    std::vector<Event> events;

    const Event* terminal_event() const {
        for (const auto& e : events)
            if (e.terminal) return &e;
        return nullptr;
    }

    // Cubic Hermite interpolation between stored samples.
    MetricPoint at(double t) const {
        if (samples.empty()) throw TooFewSamples("empty trajectory");
        if (t < samples.front().t || t > samples.back().t)
            throw ParameterOutOfRange("interpolation time outside the sampled range");
        auto it = std::lower_bound(samples.begin(), samples.end(), t,
                                   [](const Sample& s, double v) { return s.t < v; });
        std::size_t hi = static_cast<std::size_t>(it - samples.begin());
        if (hi < samples.size() && samples[hi].t == t) return samples[hi].g;
        std::size_t lo = hi - 1;
        double dt = samples[hi].t - samples[lo].t;
        double th = (t - samples[lo].t) / dt;
        double h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        double h10 = th * (1.0 - th) * (1.0 - th);
        double h01 = th * th * (3.0 - 2.0 * th);
        double h11 = th * th * (th - 1.0);
        return h00 * samples[lo].g + (h10 * dt) * derivs[lo] +
               h01 * samples[hi].g + (h11 * dt) * derivs[hi];
    }
};

namespace detail {

// Dormand-Prince 5(4) tableau. The last b-row stage is the FSAL evaluation.
struct Dp5 {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - b_hat: weights of the embedded error estimate.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

inline double scaled_rms(const Vec& v, const Vec& y0, const Vec& y1, double atol, double rtol) {
    double s = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        double q = v[i] / sc;
        s += q * q;
    }
    return std::sqrt(s / v.size());
}

// Starting step size: probe the field once and bound by curvature, then
// shrink until an Euler trial stays inside the positive cone.
inline double initial_step(const FlagSpace& sp, const Vec& y0, const Vec& f0,
                           const IntegratorConfig& cfg) {
    double d0 = scaled_rms(y0, y0, y0, cfg.atol, cfg.rtol);
    double d1 = scaled_rms(f0, y0, y0, cfg.atol, cfg.rtol);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, cfg.t_end);
    for (int tries = 0; tries < 80; ++tries) {
        Vec y1 = y0 + h0 * f0;
        if (y1.all_positive()) break;
        h0 *= 0.5;
    }
    Vec y1 = y0 + h0 * f0;
    if (!y1.all_positive()) return h0;  // pathological start; the main loop copes
    Vec f1 = field_eval(sp, y1, cfg.orientation);
    double d2 = scaled_rms(f1 - f0, y0, y0, cfg.atol, cfg.rtol) / h0;
    double h1;
    if (std::max(d1, d2) <= 1e-15)
        h1 = std::max(1e-6, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, cfg.t_end});
}

}  // namespace detail

struct DirectionLimit {
    Vec direction;   // final sample, normalized
    bool converged;  // stable across horizon-halving windows
};

// Direction of g(t)/||g(t)|| at the end of the trajectory. Convergence is
// declared when the direction at the full horizon, half horizon and quarter
// horizon agree pairwise within ang_tol, which guards against slow drift
// that a single-window test would miss.
inline DirectionLimit direction_limit(const Trajectory& traj, double ang_tol = 1e-6) {
    if (traj.samples.size() < 3)
        throw TooFewSamples("direction_limit needs at least 3 samples");
    double t0 = traj.samples.front().t;
    double tN = traj.samples.back().t;
    Vec d4 = traj.samples.back().g.normalized();
    Vec d2 = traj.at(t0 + (tN - t0) * 0.5).normalized();
    Vec d1 = traj.at(t0 + (tN - t0) * 0.25).normalized();
    bool conv = angle_between(d4, d2) < ang_tol && angle_between(d2, d1) < ang_tol;
    return {d4, conv};
}

inline Trajectory integrate(const FlagSpace& sp, const MetricPoint& g0, const IntegratorConfig& cfg) {
    validate_metric(sp, g0);
    validate_config(cfg);
    using detail::Dp5;

    Trajectory traj;
    traj.space = sp;
    traj.config = cfg;

    auto field = [&](const Vec& y) { return detail::field_eval(sp, y, cfg.orientation); };

    double t = 0.0;
    Vec y = g0;
    Vec k1 = field(y);

    long accepted = 0;
    auto store = [&](double ts, const Vec& ys, const Vec& fs) {
        if (!traj.samples.empty() && !(ts > traj.samples.back().t)) return;
        traj.samples.push_back({ts, ys});
        traj.derivs.push_back(fs);
    };
    store(t, y, k1);

    auto finish = [&](EventKind kind, double te, const std::string& detail_msg) {
        traj.events.push_back({kind, te, detail_msg, true});
    };

    // Degenerate starts: already past a threshold.
    if (y.min() < cfg.ext_eps) {
        finish(EventKind::Extinction, 0.0, "initial metric below the extinction threshold");
        return traj;
    }
    if (y.norm() > cfg.norm_cap) {
        finish(EventKind::BlowUp, 0.0, "initial metric above the blow-up threshold");
        return traj;
    }

    double h = detail::initial_step(sp, y, k1, cfg);
    double err_prev = 1e-4;
    const double safety = 0.9, beta = 0.04, alpha = 0.2 - 0.75 * beta;
    const double fac_min = 0.2, fac_max = 10.0;

    // Last two accepted states, kept independently of sample_stride for the
    // extinction extrapolation.
    double t_prevacc = t;
    Vec y_prevacc = y;

    for (long attempts = 0;; ++attempts) {
        if (attempts >= cfg.max_steps) {
            store(t, y, k1);
            finish(EventKind::MaxSteps, t, "step budget exhausted after " +
                                               std::to_string(accepted) + " accepted steps");
            break;
        }
        double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);
        if (h <= h_floor) {
            // Progress has stalled. Close the run as extinction when the
            // state is pinned near the cone boundary and still shrinking --
            // either outright (every coefficient small) or as a share of the
            // norm (a fiber pinching off while another direction blows up,
            // which stalls the stepper before the norm cap can fire).
            // Anything else is a genuine failure.
            double mn = y.min();
            int arg = y.argmin();
            bool pinned = mn < 1e-3 || mn < 1e-3 * y.norm();
            if (pinned && k1[arg] < 0.0) {
                store(t, y, k1);
                double t_ext = t;
                double mp = y_prevacc.min();
                double slope = (mn * mn - mp * mp) / (t - t_prevacc);
                if (slope < 0.0 && t > t_prevacc) t_ext = t - (mn * mn) / slope;
                finish(EventKind::Extinction, t_ext,
                       "step size underflow near the cone boundary; time extrapolated from the "
                       "squared minimum component");
                break;
            }
            throw StepSizeUnderflow(t, y, "step size underflow at t = " + std::to_string(t));
        }

        double h_try = h;
        bool last_step = false;
        if (t + 1.01 * h_try >= cfg.t_end) {
            h_try = cfg.t_end - t;
            last_step = true;
        }

        // Stages. Any stage or endpoint leaving the positive cone rejects
        // the step outright; the field is singular on the boundary.
        Vec k2, k3, k4, k5, k6, k7, y_new;
        bool positive = true;
        auto stage = [&](const Vec& ys, Vec& out) {
            if (!ys.all_positive()) {
                positive = false;
                return;
            }
            out = field(ys);
        };
        stage(y + (h_try * Dp5::a21) * k1, k2);
        if (positive) stage(y + h_try * (Dp5::a31 * k1 + Dp5::a32 * k2), k3);
        if (positive) stage(y + h_try * (Dp5::a41 * k1 + Dp5::a42 * k2 + Dp5::a43 * k3), k4);
        if (positive)
            stage(y + h_try * (Dp5::a51 * k1 + Dp5::a52 * k2 + Dp5::a53 * k3 + Dp5::a54 * k4), k5);
        if (positive)
            stage(y + h_try * (Dp5::a61 * k1 + Dp5::a62 * k2 + Dp5::a63 * k3 + Dp5::a64 * k4 +
                               Dp5::a65 * k5),
                  k6);
        if (positive) {
            y_new = y + h_try * (Dp5::b1 * k1 + Dp5::b3 * k3 + Dp5::b4 * k4 + Dp5::b5 * k5 +
                                 Dp5::b6 * k6);
            stage(y_new, k7);
        }
        if (!positive) {
            h = 0.5 * h_try;
            continue;
        }

        Vec err_vec = h_try * (Dp5::e1 * k1 + Dp5::e3 * k3 + Dp5::e4 * k4 + Dp5::e5 * k5 +
                               Dp5::e6 * k6 + Dp5::e7 * k7);
        double err = detail::scaled_rms(err_vec, y, y_new, cfg.atol, cfg.rtol);

        if (err > 1.0) {
            h = h_try * std::max(fac_min, safety * std::pow(err, -0.2));
            continue;
        }

        // Accepted. Check thresholds on the new state; crossings are
        // localized by bisecting the Hermite interpolant of this step.
        double t_new = last_step ? cfg.t_end : t + h_try;
        auto hermite = [&](double th) {
            double h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
            double h10 = th * (1.0 - th) * (1.0 - th);
            double h01 = th * th * (3.0 - 2.0 * th);
            double h11 = th * th * (th - 1.0);
            return h00 * y + (h10 * h_try) * k1 + h01 * y_new + (h11 * h_try) * k7;
        };
        auto bisect_crossing = [&](auto below_threshold) {
            double lo = 0.0, hi = 1.0;  // predicate false at lo, true at hi
            for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
                double mid = 0.5 * (lo + hi);
                (below_threshold(hermite(mid)) ? hi : lo) = mid;
            }
            return lo;  // last parameter on the safe side
        };

        if (y_new.min() < cfg.ext_eps) {
            double th = bisect_crossing([&](const Vec& v) { return v.min() < cfg.ext_eps; });
            double t_ev = t + th * h_try;
            Vec y_ev = hermite(th);
            if (t_ev > t && y_ev.all_positive()) store(t_ev, y_ev, field(y_ev));
            finish(EventKind::Extinction, traj.samples.back().t,
                   "minimum component crossed the extinction threshold");
            break;
        }
        if (y_new.norm() > cfg.norm_cap) {
            double th = bisect_crossing([&](const Vec& v) { return v.norm() > cfg.norm_cap; });
            double t_ev = t + th * h_try;
            Vec y_ev = hermite(th);
            if (t_ev > t && y_ev.all_positive()) store(t_ev, y_ev, field(y_ev));
            finish(EventKind::BlowUp, traj.samples.back().t, "norm crossed the blow-up threshold");
            break;
        }

        t_prevacc = t;
        y_prevacc = y;
        t = t_new;
        y = y_new;
        k1 = k7;  // FSAL
        ++accepted;
        if (accepted % cfg.sample_stride == 0) store(t, y, k1);

        if (last_step) {
            store(t, y, k1);  // ensure the endpoint is kept even off-stride
            finish(EventKind::ReachedTEnd, t, "reached the configured horizon");
            break;
        }

        double fac = err == 0.0 ? fac_max
                                : safety * std::pow(err, -alpha) * std::pow(err_prev, beta);
        h = h_try * std::clamp(fac, fac_min, fac_max);
        err_prev = std::max(err, 1e-4);
    }

    // Informational direction-convergence marker, kept ahead of the
    // terminal event so the terminal event stays last.
    if (traj.samples.size() >= 3) {
        DirectionLimit dl = direction_limit(traj);
        if (dl.converged) {
            Event ev{EventKind::DirectionConverged, traj.samples.back().t,
                     "direction stable across horizon-halving windows", false};
            traj.events.insert(traj.events.end() - 1, ev);
        }
    }
    return traj;
}

// Refined extinction time. The squared minimum component is asymptotically
// linear in t near the cone boundary, so extrapolating it to zero from the
// last two samples sharpens the event time by several digits.
inline std::optional<double> extinction_time(const Trajectory& traj) {
    const Event* term = traj.terminal_event();
    if (!term || term->kind != EventKind::Extinction) return std::nullopt;
    if (traj.samples.size() < 2) return term->t;
    const Sample& s1 = traj.samples[traj.samples.size() - 2];
    const Sample& s2 = traj.samples.back();
    double m1 = s1.g.min(), m2 = s2.g.min();
    double slope = (m2 * m2 - m1 * m1) / (s2.t - s1.t);
    if (!(slope < 0.0)) return term->t;
    double t_ext = s2.t - (m2 * m2) / slope;
    return std::max(t_ext, term->t);
}

}  // namespace ricciflow
