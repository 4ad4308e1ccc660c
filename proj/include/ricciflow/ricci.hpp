#pragma once

// The flow vector fields themselves: Ricci components, the ODE right-hand
// sides for the three families, componentwise flow quotients (the Einstein
// ray diagnostic), and central-difference Jacobians.
//
// Sign conventions. The two-summand systems are taken exactly as published
// for the (x, y) plane; AsWritten they expand (both components grow on the
// positive quadrant). The SU(3)/T^2 system is lambda' = -2r with r the Ricci
// components; AsWritten it shrinks near the normal ray. Reversed negates the
// field exactly, which only reverses time along the same trajectories.
// Consequently the two-summand Ricci components are *defined* as the negated
// AsWritten field: the ODE systems are normative, and trajectories are
// insensitive to the constant rescaling this hides.

#include <cmath>

#include "base.hpp"
#include "manifolds.hpp"

namespace ricciflow {

enum class Orientation { AsWritten, Reversed };

inline std::string to_string(Orientation o) {
    return o == Orientation::AsWritten ? "as-written" : "reversed";
}

struct FieldSample {
    Vec value;       // d lambda / dt, one component per summand
    MetricPoint at;  // where it was evaluated
};

namespace detail {

// Right-hand sides in metric order. No validation here; callers own it.
inline Vec field_eval(const FlagSpace& sp, const MetricPoint& g, Orientation o) {
    Vec f;
    if (sp.family == Family::Su3) {
        // r_a = 1/(2 lambda_a) + (lambda_a^2 - lambda_b^2 - lambda_c^2) /
        //       (12 lambda_a lambda_b lambda_c), lambda' = -2 r.
        // The grouping below keeps the expression symmetric in b, c so the
        // field commutes with coordinate permutations to the last bit.
        auto r = [](double a, double b, double c) {
            return 1.0 / (2.0 * a) + (a * a - (b * b + c * c)) / (12.0 * (a * (b * c)));
        };
        f = Vec(-2.0 * r(g[0], g[1], g[2]),
                -2.0 * r(g[1], g[0], g[2]),
                -2.0 * r(g[2], g[0], g[1]));
    } else {
        // (x, y) plane with x = lambda[1], y = lambda[0].
        double y = g[0], x = g[1];
        double dx, dy;
        if (sp.family == Family::So) {
            double m = sp.m, k = sp.k, n = m + k;
            dx = 2.0 * (m - 1.0) / (2.0 * n - 1.0) +
                 (1.0 + 2.0 * k) / (2.0 * (2.0 * n - 1.0)) * (x * x) / (y * y);
            dy = (n + k) / (2.0 * n - 1.0) +
                 (m - 1.0) / (2.0 * (2.0 * n - 1.0)) * (y * y - (x - y) * (x - y)) / (x * y);
        } else {
            double m = sp.m, k = sp.k, n = m + k;
            dx = (2.0 * m + 2.0) / (2.0 * n + 2.0) +
                 2.0 * k / (4.0 * n + 4.0) * (x * x) / (y * y);
            dy = (4.0 * m + 4.0 * k + 3.0) / (4.0 * n + 4.0) -
                 (4.0 * m + 2.0) / (16.0 * n + 16.0) * x / y;
        }
        f = Vec(dy, dx);
    }
    return o == Orientation::AsWritten ? f : -f;
}

}  // namespace detail

inline FieldSample flow_field(const FlagSpace& sp, const MetricPoint& g,
                              Orientation o = Orientation::AsWritten) {
    validate_metric(sp, g);
    return {detail::field_eval(sp, g, o), g};
}

// SU(3)/T^2: the r_ab formulas verbatim. Two-summand: -(AsWritten field),
// per the sign convention in the header comment.
inline Vec ricci_components(const FlagSpace& sp, const MetricPoint& g) {
    validate_metric(sp, g);
    Vec f = detail::field_eval(sp, g, Orientation::AsWritten);
    if (sp.family == Family::Su3) return -0.5 * f;
    return -f;
}

// q_i = F_i / lambda_i. Constant across components exactly on invariant
// rays, which makes the spread of these quotients the Einstein-direction
// test used by the portrait module.
inline Vec flow_quotients(const FlagSpace& sp, const MetricPoint& g,
                          Orientation o = Orientation::AsWritten) {
    validate_metric(sp, g);
    Vec f = detail::field_eval(sp, g, o);
    Vec q = Vec::zero(g.size());
    for (int i = 0; i < g.size(); ++i) q[i] = f[i] / g[i];
    return q;
}

// Central-difference Jacobian, entry (i, j) = dF_i / d lambda_j. The step in
// coordinate j is h * max(|lambda_j|, 1), halved as needed to keep the
// backward evaluation strictly positive.
inline Mat flow_jacobian(const FlagSpace& sp, const MetricPoint& g,
                         Orientation o = Orientation::AsWritten, double h = 1e-6) {
    validate_metric(sp, g);
    if (!(h > 0.0) || h > 1e-3)
        throw ParameterOutOfRange("jacobian step must lie in (0, 1e-3]");
    int n = g.size();
    Mat jac(n);
    for (int j = 0; j < n; ++j) {
        double hj = std::min(h * std::max(std::abs(g[j]), 1.0), g[j] / 2.0);
        if (g[j] + hj == g[j])
            throw StepUnderflow("jacobian step vanished in coordinate " + std::to_string(j));
        Vec gp = g, gm = g;
        gp[j] = g[j] + hj;
        gm[j] = g[j] - hj;
        Vec fp = detail::field_eval(sp, gp, o);
        Vec fm = detail::field_eval(sp, gm, o);
        for (int i = 0; i < n; ++i) jac.at(i, j) = (fp[i] - fm[i]) / (2.0 * hj);
    }
    return jac;
}

}  // namespace ricciflow
