#pragma once

// Stability bookkeeping for equivariant harmonic maps along a flow line.
// A map is described by which isotropy summands carry its energy; the rules
// below compare the evolving metric against Kaehler reference metrics
// (stability certificates) or detect the degenerate normal metric, and a
// timeline traces how the verdict changes along a trajectory, including in
// the projectivized limit.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "base.hpp"
#include "integrate.hpp"
#include "manifolds.hpp"

namespace ricciflow {

// ------------------------------------------------------------------- maps --

struct MapDescriptor {
    std::vector<Summand> subordination;  // summands the map's differential charges
    ComplexStructureChoice J;            // complex structure the certificates refer to
    bool ghh = false;  // holomorphic-horizontal family: subordinated to height 1 only
};

inline void validate_map(const FlagSpace& sp, const MapDescriptor& map) {
    validate_structure(sp, map.J);
    if (map.subordination.empty())
        throw InvalidMapForSpace("map must be subordinated to some summand");
    for (std::size_t i = 0; i < map.subordination.size(); ++i) {
        if (!sp.has(map.subordination[i]))
            throw InvalidMapForSpace("summand " + to_string(map.subordination[i]) +
                                     " does not exist on " + sp.name());
        for (std::size_t j = i + 1; j < map.subordination.size(); ++j)
            if (map.subordination[i] == map.subordination[j])
                throw InvalidMapForSpace("duplicate summand " + to_string(map.subordination[i]));
    }
    if (map.ghh)
        for (Summand s : map.subordination)
            for (const auto& meta : sp.summands)
                if (meta.label == s && meta.height_under(map.J) != 1)
                    throw InvalidMapForSpace(
                        "holomorphic-horizontal maps must be subordinated to height-1 summands; " +
                        to_string(s) + " has height 2");
}

// The distinguished holomorphic-horizontal family each space carries:
// subordinated to every height-1 summand of the standard complex structure.
inline MapDescriptor canonical_ghh_map(const FlagSpace& sp) {
    MapDescriptor map;
    map.ghh = true;
    if (sp.two_summand()) {
        map.J = ComplexStructureChoice{Summand::Sigma2};
        map.subordination = {Summand::Sigma1};
    } else {
        map.J = ComplexStructureChoice{Summand::Sigma12};
        map.subordination = {Summand::Sigma13, Summand::Sigma23};
    }
    return map;
}

// ------------------------------------------------------------------ rules --

enum class StabilityRule { K, S, U, N };

inline std::string to_string(StabilityRule r) {
    switch (r) {
        case StabilityRule::K: return "K";
        case StabilityRule::S: return "S";
        case StabilityRule::U: return "U";
        case StabilityRule::N: return "N";
    }
    return "?";
}

enum class VerdictKind { Stable, Unstable, Unknown, Conflict };

struct StabilityVerdict {
    VerdictKind kind = VerdictKind::Unknown;
    std::optional<StabilityRule> rule;       // rule the verdict is attributed to
    std::vector<StabilityRule> fired;        // every rule that fired, pre-gating
    std::optional<MetricPoint> witness;      // Kaehler reference backing S or U
};

inline bool operator==(const StabilityVerdict& a, const StabilityVerdict& b) {
    return a.kind == b.kind && a.rule == b.rule;
}
inline bool operator!=(const StabilityVerdict& a, const StabilityVerdict& b) { return !(a == b); }

inline std::string to_string(const StabilityVerdict& v) {
    switch (v.kind) {
        case VerdictKind::Stable: return "Stable(" + to_string(*v.rule) + ")";
        case VerdictKind::Unstable: return "Unstable(" + to_string(*v.rule) + ")";
        case VerdictKind::Unknown: return "Unknown";
        case VerdictKind::Conflict: {
            std::string rules;
            for (StabilityRule r : v.fired) {
                if (!rules.empty()) rules += ",";
                rules += to_string(r);
            }
            return "Conflict(" + rules + ")";
        }
    }
    return "?";
}

// Kaehler reference that agrees with g on the height-1 summands (the
// comparison metric behind the instability rule). Always exists.
inline MetricPoint height_one_reference(const FlagSpace& sp, const ComplexStructureChoice& J,
                                        const MetricPoint& g) {
    MetricPoint h = g;
    int top = sp.index_of(J.top);
    double sum = 0.0;
    for (int i = 0; i < g.size(); ++i)
        if (i != top) sum += g[i];
    h[top] = sp.two_summand() ? 2.0 * sum : sum;
    return h;
}

// Evaluate the four rules at a single metric:
//   K - the metric itself is Kaehler (exact).
//   S - some Kaehler metric matches g on the energy summands and does not
//       exceed it elsewhere; that reference metric certifies stability.
//   U - holomorphic-horizontal maps only: the Kaehler reference agreeing on
//       height 1 lies strictly above g on top, so g sits inside the unstable
//       cone of the family.
//   N - su3 only: the normal metric (all coefficients equal to 1e-9
//       relative), whose harmonic maps degenerate outright.
// On su3 the normal metric is a genuine degeneracy, so N firing overrides a
// simultaneous S certificate instead of reporting a conflict; a conflict is
// reserved for S and U (or K) genuinely disagreeing.
inline StabilityVerdict classify_stability(const FlagSpace& sp, const MapDescriptor& map,
                                           const MetricPoint& g) {
    validate_map(sp, map);
    validate_metric(sp, g);
    StabilityVerdict v;

    bool k_fires = is_kaehler(sp, map.J, g);

    std::vector<KaehlerConstraint> constraints;
    for (const auto& meta : sp.summands) {
        bool carries = std::find(map.subordination.begin(), map.subordination.end(), meta.label) !=
                       map.subordination.end();
        double value = g[sp.index_of(meta.label)];
        constraints.push_back(carries ? KaehlerConstraint::fix_at(value)
                                      : KaehlerConstraint::upper_bound(value));
    }
    std::optional<MetricPoint> s_witness = kaehler_reference(sp, map.J, constraints);
    bool s_fires = s_witness.has_value();

    bool u_fires = false;
    std::optional<MetricPoint> u_witness;
    if (map.ghh) {
        MetricPoint h = height_one_reference(sp, map.J, g);
        int top = sp.index_of(map.J.top);
        if (h[top] > g[top]) {
            u_fires = true;
            u_witness = h;
        }
    }

    bool n_fires = false;
    if (sp.family == Family::Su3) n_fires = g.max() <= g.min() * (1.0 + 1e-9);

    if (k_fires) v.fired.push_back(StabilityRule::K);
    if (s_fires) v.fired.push_back(StabilityRule::S);
    if (u_fires) v.fired.push_back(StabilityRule::U);
    if (n_fires) v.fired.push_back(StabilityRule::N);

    bool stable = k_fires || (s_fires && !n_fires);
    bool unstable = u_fires || n_fires;
    if (stable && unstable) {
        v.kind = VerdictKind::Conflict;
    } else if (stable) {
        v.kind = VerdictKind::Stable;
        v.rule = k_fires ? StabilityRule::K : StabilityRule::S;
        if (*v.rule == StabilityRule::S) v.witness = s_witness;
    } else if (unstable) {
        v.kind = VerdictKind::Unstable;
        v.rule = n_fires ? StabilityRule::N : StabilityRule::U;
        if (*v.rule == StabilityRule::U) v.witness = u_witness;
    }
    return v;
}

// --------------------------------------------------------------- timeline --

struct TimelineEntry {
    double t = 0.0;
    MetricPoint g;
    StabilityVerdict verdict;
};

struct Transition {
    double t = 0.0;
    StabilityVerdict from;
    StabilityVerdict to;
    bool at_limit = false;  // verdict change between the final metric and the ray limit
};

// Self-contained record of verdicts along a trajectory: carries the space
// and map so transitions can be re-derived from the timeline alone.
struct StabilityTimeline {
    FlagSpace space;
    MapDescriptor map;
    std::vector<TimelineEntry> entries;
    std::optional<Vec> limit_direction;            // snapped to an invariant ray when close
    std::optional<StabilityVerdict> limit_verdict;
    std::vector<Transition> transitions;           // interior first, then at most one limit
};

// Locate verdict changes between consecutive entries by bisecting the linear
// interpolant of the metric until the switch time is bracketed to t_tol; a
// verdict change between the final entry and the limit is reported as a
// single at-limit record carrying the final sample time.
inline std::vector<Transition> detect_transitions(const StabilityTimeline& tl,
                                                  double t_tol = 1e-8) {
    std::vector<Transition> out;
    for (std::size_t i = 0; i + 1 < tl.entries.size(); ++i) {
        const TimelineEntry& a = tl.entries[i];
        const TimelineEntry& b = tl.entries[i + 1];
        if (a.verdict == b.verdict) continue;
        double lo = a.t, hi = b.t;
        while (hi - lo > t_tol) {
            double mid = lo + (hi - lo) / 2.0;
            double w = (mid - a.t) / (b.t - a.t);
            Vec gm = (1.0 - w) * a.g + w * b.g;
            if (classify_stability(tl.space, tl.map, gm) == a.verdict)
                lo = mid;
            else
                hi = mid;
        }
        out.push_back(Transition{hi, a.verdict, b.verdict, false});
    }
    if (tl.limit_verdict && !tl.entries.empty() &&
        *tl.limit_verdict != tl.entries.back().verdict)
        out.push_back(Transition{tl.entries.back().t, tl.entries.back().verdict,
                                 *tl.limit_verdict, true});
    return out;
}

// Verdicts along a trajectory plus the verdict of its projectivized limit.
// The limit direction is snapped onto the nearest invariant ray when it lies
// within 1e-3 rad of one, so ray-level rules (the normal degeneracy in
// particular) can fire exactly there rather than at a direction a few
// integration ulps away.
inline StabilityTimeline trace_stability(const FlagSpace& sp, const MapDescriptor& map,
                                         const Trajectory& traj) {
    validate_map(sp, map);
    StabilityTimeline tl;
    tl.space = sp;
    tl.map = map;
    for (const auto& s : traj.samples)
        tl.entries.push_back(TimelineEntry{s.t, s.g, classify_stability(sp, map, s.g)});

    if (traj.samples.size() >= 3) {
        Vec dir = direction_limit(traj).direction;
        for (const auto& ray : invariant_rays(sp))
            if (angle_between(dir, ray.direction) < 1e-3) {
                dir = ray.direction;
                break;
            }
        tl.limit_direction = dir;
        tl.limit_verdict = classify_stability(sp, map, dir);
    }
    tl.transitions = detect_transitions(tl);
    return tl;
}

}  // namespace ricciflow
