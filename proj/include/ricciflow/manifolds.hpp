#pragma once

// The three flag-manifold families whose homogeneous Ricci flow this library
// studies, reduced to static metadata: the isotropy summand structure, the
// Kaehler ratio criterion, Kaehler reference metrics under constraints, and
// the invariant rays of the flow (its Einstein directions).
//
// Conventions used throughout the library:
//
//   * An invariant metric is one positive scalar per isotropy summand,
//     ordered like FlagSpace::summands: (sigma1, sigma2) for the
//     two-summand families, (sigma12, sigma13, sigma23) for SU(3)/T^2.
//
//   * The two-summand flow systems are written in (x, y) coordinates with
//     x the height-2 scalar, i.e. x = lambda[1] and y = lambda[0] in metric
//     order. The Kaehler ray x = 2y is then lambda_{sigma2} = 2 lambda_{sigma1}.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "base.hpp"

namespace ricciflow {

// SoType:  SO(2(m+k)+1) / (U(k) x SO(2m+1)),  valid for m > 1 and k != 1
// SpType:  Sp(m+k) / (U(m) x Sp(k)),          valid for m >= 1 and k >= 1
// Su3:     SU(3) / T^2                        (no parameters)
enum class Family { So, Sp, Su3 };

enum class Summand { Sigma1, Sigma2, Sigma12, Sigma13, Sigma23 };

inline std::string to_string(Family f) {
    switch (f) {
        case Family::So: return "so";
        case Family::Sp: return "sp";
        case Family::Su3: return "su3";
    }
    return "?";
}

inline Family family_from_string(const std::string& s) {
    if (s == "so") return Family::So;
    if (s == "sp") return Family::Sp;
    if (s == "su3") return Family::Su3;
    throw UnknownFamily("unknown family '" + s + "' (expected so, sp or su3)");
}

inline std::string to_string(Summand s) {
    switch (s) {
        case Summand::Sigma1: return "sigma1";
        case Summand::Sigma2: return "sigma2";
        case Summand::Sigma12: return "sigma12";
        case Summand::Sigma13: return "sigma13";
        case Summand::Sigma23: return "sigma23";
    }
    return "?";
}

inline Summand summand_from_string(const std::string& s) {
    if (s == "sigma1") return Summand::Sigma1;
    if (s == "sigma2") return Summand::Sigma2;
    if (s == "sigma12") return Summand::Sigma12;
    if (s == "sigma13") return Summand::Sigma13;
    if (s == "sigma23") return Summand::Sigma23;
    throw ParseError("unknown summand label '" + s + "'");
}

// One positive scalar per summand, in FlagSpace::summands order.
using MetricPoint = Vec;

// Selects which summand plays the height-2 ("sum") role. Two-summand
// families admit only top = sigma2; SU(3)/T^2 has three choices.
struct ComplexStructureChoice {
    Summand top;
};

struct SummandMeta {
    Summand label;
    int height_under(const ComplexStructureChoice& J) const {
        return label == J.top ? 2 : 1;
    }
};

struct FlagSpace {
    Family family;
    int m = 0;                    // structure parameters; zero for Su3
    int k = 0;
    bool range_override = false;  // true when built outside the published ranges
    std::vector<SummandMeta> summands;

    int n() const { return m + k; }  // two-summand families only
    int count() const { return static_cast<int>(summands.size()); }
    bool two_summand() const { return family != Family::Su3; }

    int index_of(Summand s) const {
        for (int i = 0; i < count(); ++i)
            if (summands[static_cast<std::size_t>(i)].label == s) return i;
        return -1;
    }
    bool has(Summand s) const { return index_of(s) >= 0; }

    std::string name() const {
        if (family == Family::Su3) return "su3";
        return to_string(family) + "(m=" + std::to_string(m) + ",k=" + std::to_string(k) + ")";
    }
};

// allow_out_of_range lifts the family-specific range constraints (the space
// is then tagged range_override so reports can warn); m, k must still be
// positive integers for the formulas to make sense.
inline FlagSpace make_space(Family f, int m = 0, int k = 0, bool allow_out_of_range = false) {
    FlagSpace sp;
    sp.family = f;
    if (f == Family::Su3) {
        if (m != 0 || k != 0)
            throw ParameterOutOfRange("su3 takes no (m,k) parameters");
        sp.summands = {{Summand::Sigma12}, {Summand::Sigma13}, {Summand::Sigma23}};
        return sp;
    }
    if (m < 1) throw ParameterOutOfRange("m must be a positive integer (got " + std::to_string(m) + ")");
    if (k < 1) throw ParameterOutOfRange("k must be a positive integer (got " + std::to_string(k) + ")");
    sp.m = m;
    sp.k = k;
    if (f == Family::So) {
        bool in_range = (m > 1) && (k != 1);
        if (!in_range) {
            if (!allow_out_of_range)
                throw ParameterOutOfRange(m <= 1 ? "so family requires m > 1 (got m=" + std::to_string(m) + ")"
                                                 : "so family requires k != 1");
            sp.range_override = true;
        }
    }
    // sp family: the published range is exactly m >= 1, k >= 1, checked above.
    sp.summands = {{Summand::Sigma1}, {Summand::Sigma2}};
    return sp;
}

inline void validate_metric(const FlagSpace& sp, const MetricPoint& g) {
    if (g.size() != sp.count())
        throw DimensionMismatch("metric has " + std::to_string(g.size()) + " components, space " +
                                sp.name() + " needs " + std::to_string(sp.count()));
    if (!g.all_finite()) throw NonPositiveMetric("metric has non-finite components");
    if (!g.all_positive()) throw NonPositiveMetric("metric components must be strictly positive");
}

inline void validate_structure(const FlagSpace& sp, const ComplexStructureChoice& J) {
    if (!sp.has(J.top))
        throw InvalidStructureChoice("summand " + to_string(J.top) + " does not belong to " + sp.name());
    if (sp.two_summand() && J.top != Summand::Sigma2)
        throw InvalidStructureChoice("two-summand families admit only top = sigma2");
}

// ------------------------------------------------------------------- rays --

struct Ray {
    std::string label;  // "gamma1" .. "gamma4"
    Vec direction;      // unit norm, all components positive here
    bool is_einstein = false;
    bool is_kaehler = false;
    bool is_normal = false;
};

// Slope x/y of the non-Kaehler Einstein ray gamma1 in the (x, y) plane of
// the two-summand systems. The Kaehler ray gamma2 has slope 2 for both
// families. Always below 2 on the valid ranges.
inline double gamma1_slope(const FlagSpace& sp) {
    if (!sp.two_summand()) throw UnsupportedFamily("gamma1_slope: two-summand families only");
    if (sp.family == Family::So) return 2.0 * (sp.m - 1) / (sp.m + 2.0 * sp.k);
    return 4.0 * (sp.m + 1) / (4.0 * sp.k + 2.0 * sp.m + 1);
}

// The invariant rays of the flow. Directions are stored exactly in
// un-normalized integer/surd form and normalized numerically; their
// invariance is checked by tests rather than trusted from any table.
//
// Two-summand families (metric order (lambda_sigma1, lambda_sigma2) = (y, x)):
//   gamma1 ~ (1, s1) with s1 = gamma1_slope: Einstein, not Kaehler.
//   gamma2 ~ (1, 2): the Kaehler-Einstein ray.
//
// SU(3)/T^2: gamma2 is the normal metric (1,1,1)/sqrt(3), an Einstein
// direction; gamma1, gamma3, gamma4 are the permutations of (1, 2+2*sqrt(2), 1),
// each tagged as the Kaehler-Einstein direction associated with the complex
// structure whose top summand carries the large component.
inline std::vector<Ray> invariant_rays(const FlagSpace& sp) {
    std::vector<Ray> rays;
    if (sp.two_summand()) {
        Ray g1{"gamma1", Vec(1.0, gamma1_slope(sp)).normalized(), true, false, false};
        Ray g2{"gamma2", Vec(1.0, 2.0).normalized(), true, true, false};
        rays = {g1, g2};
    } else {
        const double c = 2.0 + 2.0 * std::sqrt(2.0);
        rays = {
            {"gamma1", Vec(1.0, c, 1.0).normalized(), true, true, false},
            {"gamma2", Vec(1.0, 1.0, 1.0).normalized(), true, false, true},
            {"gamma3", Vec(1.0, 1.0, c).normalized(), true, true, false},
            {"gamma4", Vec(c, 1.0, 1.0).normalized(), true, true, false},
        };
    }
    return rays;
}

// --------------------------------------------------------------- Kaehler --

// Ratio criterion: the height-2 scalar equals the sum of its height-1
// constituents (lambda_sigma2 = 2 lambda_sigma1 in the two-summand case,
// lambda_top = sum of the other two for SU(3)/T^2). tol is relative;
// tol = 0 demands exact floating-point equality, which the reference
// constructions below produce on purpose.
inline bool is_kaehler(const FlagSpace& sp, const ComplexStructureChoice& J, const MetricPoint& g,
                       double tol = 0.0) {
    validate_structure(sp, J);
    validate_metric(sp, g);
    int t = sp.index_of(J.top);
    double top = g[t];
    double target = 0.0;
    if (sp.two_summand()) {
        target = 2.0 * g[0];
    } else {
        for (int i = 0; i < 3; ++i)
            if (i != t) target += g[i];
    }
    return std::abs(top - target) <= tol * std::max(std::abs(top), std::abs(target));
}

enum class ConstraintKind { FixAt, UpperBound };

struct KaehlerConstraint {
    ConstraintKind kind;
    double value;
    static KaehlerConstraint fix_at(double v) { return {ConstraintKind::FixAt, v}; }
    static KaehlerConstraint upper_bound(double v) { return {ConstraintKind::UpperBound, v}; }
};

// A Kaehler-w.r.t.-J metric meeting every FixAt exactly and every UpperBound
// as <=, or nothing when the constraints are infeasible. Ties are broken
// deterministically: one remaining degree of freedom picks the center of its
// feasible interval (the interval (0, M] counts as [0, M]); the all-bounds
// SU(3) case, which has two degrees of freedom, picks the symmetric point.
// Constraints are listed in summand order, exactly one per summand.
inline std::optional<MetricPoint> kaehler_reference(const FlagSpace& sp, const ComplexStructureChoice& J,
                                                    const std::vector<KaehlerConstraint>& constraints) {
    validate_structure(sp, J);
    if (static_cast<int>(constraints.size()) != sp.count())
        throw InvalidConstraints("need exactly one constraint per summand (" + std::to_string(sp.count()) +
                                 "), got " + std::to_string(constraints.size()));
    for (const auto& c : constraints)
        if (!(c.value > 0.0) || !std::isfinite(c.value))
            throw InvalidConstraints("constraint bounds must be positive and finite");

    auto fixed = [&](int i) { return constraints[static_cast<std::size_t>(i)].kind == ConstraintKind::FixAt; };
    auto val = [&](int i) { return constraints[static_cast<std::size_t>(i)].value; };

    if (sp.two_summand()) {
        // lambda = (a, 2a); constraint 0 governs a, constraint 1 governs 2a.
        if (fixed(0) && fixed(1))
            return val(1) == 2.0 * val(0) ? std::optional<MetricPoint>(Vec(val(0), val(1))) : std::nullopt;
        if (fixed(0))
            return 2.0 * val(0) <= val(1) ? std::optional<MetricPoint>(Vec(val(0), 2.0 * val(0))) : std::nullopt;
        if (fixed(1))
            return val(1) / 2.0 <= val(0) ? std::optional<MetricPoint>(Vec(val(1) / 2.0, val(1))) : std::nullopt;
        double top = std::min(val(0), val(1) / 2.0);  // a ranges over (0, top]
        return MetricPoint(top / 2.0, top);
    }

    // SU(3)/T^2: lambda_top = u + v with u, v the height-1 scalars.
    int t = sp.index_of(J.top);
    int i = (t == 0) ? 1 : 0;
    int j = (t == 2) ? 1 : 2;
    auto assemble = [&](double top, double u, double v) -> std::optional<MetricPoint> {
        if (!(u > 0.0 && v > 0.0 && top > 0.0)) return std::nullopt;
        Vec g(0.0, 0.0, 0.0);
        g[t] = top;
        g[i] = u;
        g[j] = v;
        return g;
    };

    if (fixed(t)) {
        double top = val(t);
        if (fixed(i) && fixed(j))
            return val(i) + val(j) == top ? assemble(top, val(i), val(j)) : std::nullopt;
        if (fixed(i)) {
            double v = top - val(i);
            return (v > 0.0 && v <= val(j)) ? assemble(top, val(i), v) : std::nullopt;
        }
        if (fixed(j)) {
            double u = top - val(j);
            return (u > 0.0 && u <= val(i)) ? assemble(top, u, val(j)) : std::nullopt;
        }
        // u free in [max(top - bound_j, 0), min(bound_i, top)].
        double lo = std::max(top - val(j), 0.0);
        double hi = std::min(val(i), top);
        if (lo > hi) return std::nullopt;
        double u = (lo + hi) / 2.0;
        double v = top - u;
        if (!(u > 0.0 && v > 0.0 && u <= val(i) && v <= val(j))) return std::nullopt;
        return assemble(top, u, v);
    }

    double cap = val(t);  // lambda_top <= cap
    if (fixed(i) && fixed(j))
        return val(i) + val(j) <= cap ? assemble(val(i) + val(j), val(i), val(j)) : std::nullopt;
    if (fixed(i)) {
        double hi = std::min(val(j), cap - val(i));
        if (hi <= 0.0) return std::nullopt;
        return assemble(val(i) + hi / 2.0, val(i), hi / 2.0);
    }
    if (fixed(j)) {
        double hi = std::min(val(i), cap - val(j));
        if (hi <= 0.0) return std::nullopt;
        return assemble(val(j) + hi / 2.0, hi / 2.0, val(j));
    }
    double s = std::min({val(i), val(j), cap / 2.0});  // u = v = s, symmetric
    return assemble(s, s / 2.0, s / 2.0);
}

}  // namespace ricciflow
