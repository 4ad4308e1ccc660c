#pragma once

// Phase-portrait analysis. The two-summand flows are scale invariant, so
// everything qualitative lives on the circle/sphere of directions: regions
// cut out by the two invariant rays, equilibria of the projectivized field
// with their spectra, a planar Poincare compactification, basin sampling by
// brute-force integration, and collapse/orientation diagnostics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "base.hpp"
#include "integrate.hpp"
#include "manifolds.hpp"
#include "ricci.hpp"

namespace ricciflow {

// ----------------------------------------------------------------- regions --

enum class RegionLabel { R1, R2, R3, OnGamma1, OnGamma2 };

inline std::string to_string(RegionLabel r) {
    switch (r) {
        case RegionLabel::R1: return "R1";
        case RegionLabel::R2: return "R2";
        case RegionLabel::R3: return "R3";
        case RegionLabel::OnGamma1: return "OnGamma1";
        case RegionLabel::OnGamma2: return "OnGamma2";
    }
    return "?";
}

// Sector of the positive quadrant by the slope x/y = lambda_sigma2/lambda_sigma1:
// R1 below gamma1, R2 between the rays, R3 above the Kaehler ray (slope 2).
// On-ray labels win within relative tolerance 1e-12.
inline RegionLabel classify_region(const FlagSpace& sp, const MetricPoint& g) {
    if (!sp.two_summand()) throw UnsupportedFamily("classify_region: two-summand families only");
    validate_metric(sp, g);
    double ratio = g[1] / g[0];
    double s1 = gamma1_slope(sp);
    if (std::abs(ratio - s1) <= 1e-12 * std::max(ratio, s1)) return RegionLabel::OnGamma1;
    if (std::abs(ratio - 2.0) <= 1e-12 * std::max(ratio, 2.0)) return RegionLabel::OnGamma2;
    if (ratio < s1) return RegionLabel::R1;
    if (ratio < 2.0) return RegionLabel::R2;
    return RegionLabel::R3;
}

// -------------------------------------------------------- ray verification --

struct RayCheck {
    std::string label;
    double max_residual = 0.0;
    std::vector<double> residuals;  // one per scale
};

// Fraction of the field orthogonal to the ray at several scales; zero (to
// roundoff) exactly when the ray is invariant.
inline RayCheck verify_ray(const FlagSpace& sp, const Ray& ray,
                           const std::vector<double>& scales = {0.5, 1.0, 2.0, 10.0}) {
    RayCheck rc;
    rc.label = ray.label;
    Vec d = ray.direction.normalized();
    for (double s : scales) {
        Vec f = flow_field(sp, s * d).value;
        Vec ortho = f - f.dot(d) * d;
        double resid = ortho.norm() / f.norm();
        rc.residuals.push_back(resid);
        rc.max_residual = std::max(rc.max_residual, resid);
    }
    return rc;
}

// ------------------------------------------------- projectivized equilibria --

// Induced dynamics of the direction d = g/||g||: G(d) = F(d) - (F(d).d) d.
// Its zeros on the positive part of the unit sphere are the invariant rays.
inline Vec projectivized_field(const FlagSpace& sp, const Vec& d,
                               Orientation o = Orientation::AsWritten) {
    Vec f = detail::field_eval(sp, d, o);
    return f - f.dot(d) * d;
}

namespace detail {

// Orthonormal basis of the tangent space at unit d.
inline std::vector<Vec> tangent_basis(const Vec& d) {
    if (d.size() == 2) return {Vec(-d[1], d[0])};
    int least = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(d[i]) < std::abs(d[least])) least = i;
    Vec e = Vec::zero(3);
    e[least] = 1.0;
    Vec u1 = (e - e.dot(d) * d).normalized();
    Vec u2 = cross(d, u1);
    return {u1, u2};
}

// Tangent-restricted Jacobian of G at unit d by central differences along
// normalized chords, entry (i, j) = u_i . dG(d; u_j).
inline Mat tangent_jacobian(const FlagSpace& sp, const Vec& d, Orientation o, double h) {
    auto basis = tangent_basis(d);
    int m = static_cast<int>(basis.size());
    Mat jac(m);
    for (int j = 0; j < m; ++j) {
        Vec gp = projectivized_field(sp, (d + h * basis[static_cast<std::size_t>(j)]).normalized(), o);
        Vec gm = projectivized_field(sp, (d - h * basis[static_cast<std::size_t>(j)]).normalized(), o);
        for (int i = 0; i < m; ++i)
            jac.at(i, j) = basis[static_cast<std::size_t>(i)].dot(gp - gm) / (2.0 * h);
    }
    return jac;
}

// Quasi-uniform unit directions in the open positive octant (Fibonacci
// lattice, shrunk slightly away from the boundary where the field blows up).
inline std::vector<Vec> octant_lattice(int count) {
    const double golden = 0.6180339887498949;
    std::vector<Vec> out;
    for (int i = 0; i < count; ++i) {
        double a = 0.02 + 0.96 * (i + 0.5) / count;              // cos(polar)
        double b = 0.02 + 0.96 * std::fmod((i + 0.5) * golden, 1.0);  // azimuth fraction
        double phi = b * 1.5707963267948966;
        double s = std::sqrt(1.0 - a * a);
        out.push_back(Vec(s * std::cos(phi), s * std::sin(phi), a));
    }
    return out;
}

}  // namespace detail

// Eigenvalues of the projectivized linearization restricted to the tangent
// space (1x1 or 2x2 block; closed-form solve).
inline std::vector<std::complex<double>> equilibrium_spectrum(const FlagSpace& sp, const Vec& d,
                                                              Orientation o = Orientation::AsWritten,
                                                              double h = 1e-6) {
    Mat jac = detail::tangent_jacobian(sp, d.normalized(), o, h);
    if (jac.size() == 1) return {std::complex<double>(jac.at(0, 0), 0.0)};
    double tr = jac.at(0, 0) + jac.at(1, 1);
    double det = jac.at(0, 0) * jac.at(1, 1) - jac.at(0, 1) * jac.at(1, 0);
    double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        double rt = std::sqrt(disc);
        return {std::complex<double>((tr - rt) / 2.0, 0.0), std::complex<double>((tr + rt) / 2.0, 0.0)};
    }
    double im = std::sqrt(-disc) / 2.0;
    return {std::complex<double>(tr / 2.0, -im), std::complex<double>(tr / 2.0, im)};
}

enum class EquilibriumClass { Attracting, Repelling, Saddle, Degenerate };

inline std::string to_string(EquilibriumClass c) {
    switch (c) {
        case EquilibriumClass::Attracting: return "attracting";
        case EquilibriumClass::Repelling: return "repelling";
        case EquilibriumClass::Saddle: return "saddle";
        case EquilibriumClass::Degenerate: return "degenerate";
    }
    return "?";
}

inline EquilibriumClass classify_spectrum(const std::vector<std::complex<double>>& eigs) {
    int pos = 0, neg = 0;
    for (const auto& e : eigs) {
        if (std::abs(e.real()) < 1e-9) return EquilibriumClass::Degenerate;
        (e.real() > 0 ? pos : neg) += 1;
    }
    if (neg == static_cast<int>(eigs.size())) return EquilibriumClass::Attracting;
    if (pos == static_cast<int>(eigs.size())) return EquilibriumClass::Repelling;
    return EquilibriumClass::Saddle;
}

struct Equilibrium {
    Vec direction;
    double residual = 0.0;  // ||G|| / ||F|| at the reported direction
    std::vector<std::complex<double>> eigenvalues;
    EquilibriumClass classification = EquilibriumClass::Degenerate;
};

struct EquilibriumSet {
    std::vector<Equilibrium> equilibria;     // sorted by direction, deduplicated
    std::vector<int> seed_iterations;        // Newton iterations per seed; -1 = dropped
};

// Newton iteration on the sphere for zeros of the projectivized field,
// started from quasi-uniform seeds in the open positive orthant. The chart
// at each iterate is its own tangent plane, and steps are halved until the
// new direction stays strictly positive.
inline EquilibriumSet find_equilibria(const FlagSpace& sp, Orientation o = Orientation::AsWritten,
                                      int seeds = 48) {
    if (seeds < 8) throw ParameterOutOfRange("find_equilibria needs at least 8 seeds");
    std::vector<Vec> starts;
    if (sp.two_summand()) {
        for (int i = 0; i < seeds; ++i) {
            double th = (i + 0.5) / seeds * 1.5707963267948966;
            starts.push_back(Vec(std::cos(th), std::sin(th)));
        }
    } else {
        starts = detail::octant_lattice(seeds);
    }

    EquilibriumSet out;
    std::vector<Vec> found;
    for (const Vec& seed : starts) {
        Vec d = seed;
        int iters = -1;
        for (int it = 0; it < 50; ++it) {
            Vec g = projectivized_field(sp, d, o);
            double fnorm = detail::field_eval(sp, d, o).norm();
            if (g.norm() / fnorm < 1e-12) {
                iters = it;
                break;
            }
            auto basis = detail::tangent_basis(d);
            Mat jac = detail::tangent_jacobian(sp, d, o, 1e-6);
            int m = static_cast<int>(basis.size());
            std::vector<double> delta(static_cast<std::size_t>(m));
            if (m == 1) {
                if (std::abs(jac.at(0, 0)) < 1e-14) break;
                delta[0] = -basis[0].dot(g) / jac.at(0, 0);
            } else {
                double det = jac.at(0, 0) * jac.at(1, 1) - jac.at(0, 1) * jac.at(1, 0);
                if (std::abs(det) < 1e-14) break;
                double b0 = -basis[0].dot(g), b1 = -basis[1].dot(g);
                delta[0] = (b0 * jac.at(1, 1) - jac.at(0, 1) * b1) / det;
                delta[1] = (jac.at(0, 0) * b1 - b0 * jac.at(1, 0)) / det;
            }
            // Positivity barrier: halve the step until we stay in the cone.
            bool moved = false;
            for (int half = 0; half < 40; ++half) {
                Vec cand = d;
                for (int j = 0; j < m; ++j)
                    cand = cand + delta[static_cast<std::size_t>(j)] * basis[static_cast<std::size_t>(j)];
                cand = cand.normalized();
                if (cand.min() > 1e-9) {
                    d = cand;
                    moved = true;
                    break;
                }
                for (auto& dj : delta) dj *= 0.5;
            }
            if (!moved) break;
        }
        out.seed_iterations.push_back(iters);
        if (iters < 0) continue;

        bool duplicate = false;
        for (const Vec& f : found)
            if (angle_between(f, d) < 1e-6) duplicate = true;
        if (!duplicate) found.push_back(d);
    }

    std::sort(found.begin(), found.end(), [](const Vec& a, const Vec& b) {
        for (int i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    });
    for (const Vec& d : found) {
        Equilibrium eq;
        eq.direction = d;
        eq.residual = projectivized_field(sp, d, o).norm() / detail::field_eval(sp, d, o).norm();
        eq.eigenvalues = equilibrium_spectrum(sp, d, o);
        eq.classification = classify_spectrum(eq.eigenvalues);
        out.equilibria.push_back(eq);
    }
    return out;
}

// --------------------------------------------------- planar compactification --

struct PoincareChart {
    Vec u;      // Poincare disc coordinates, ||u|| < 1
    Vec field;  // induced (time-rescaled) field at u
};

// Upper-hemisphere Poincare transform of the planar flow, in disc
// coordinates u = p / sqrt(1 + ||p||^2). For the scale-invariant fields here
// the induced field extends continuously to the equator, where it reduces to
// the projectivized field of the direction.
inline PoincareChart poincare_compactify(const FlagSpace& sp, const Vec& p,
                                         Orientation o = Orientation::AsWritten) {
    if (!sp.two_summand())
        throw UnsupportedFamily("poincare_compactify: two-summand families only");
    validate_metric(sp, p);
    double w = std::sqrt(1.0 + p.dot(p));
    Vec u = (1.0 / w) * p;
    Vec f = detail::field_eval(sp, p, o);
    return {u, f - f.dot(u) * u};
}

inline Vec plane_from_chart(const Vec& u) {
    double r2 = u.dot(u);
    if (!(r2 < 1.0)) throw ParameterOutOfRange("chart point must lie inside the unit disc");
    return (1.0 / std::sqrt(1.0 - r2)) * u;
}

// Tangential component of the field on the equator direction
// (cos theta, sin theta), theta in the open (0, pi/2).
inline double equator_field(const FlagSpace& sp, double theta,
                            Orientation o = Orientation::AsWritten) {
    if (!sp.two_summand()) throw UnsupportedFamily("equator_field: two-summand families only");
    if (!(theta > 0.0 && theta < 1.5707963267948966))
        throw ParameterOutOfRange("equator angle must lie in (0, pi/2)");
    Vec d(std::cos(theta), std::sin(theta));
    Vec tau(-d[1], d[0]);
    return tau.dot(detail::field_eval(sp, d, o));
}

// -------------------------------------------------------------- basin maps --

struct Cap {
    Vec center;     // unit direction
    double radius;  // angular radius, radians
};

struct BasinEntry {
    Vec start;  // unit initial direction
    enum class Outcome { Ray, Divergent, Undecided } outcome = Outcome::Undecided;
    std::string ray_label;       // set when outcome == Ray
    double angle_to_ray = 0.0;   // angle between the direction limit and that ray
};

struct BasinMap {
    Orientation orientation;
    int grid = 0;
    std::vector<BasinEntry> entries;
};

// Integrate from unit starts and assign each to the invariant ray its
// direction limit lands on (within 1e-3 rad). Trajectories that blow up or
// head for the boundary of the cone instead are Divergent; everything else
// (including per-sample integration failures) stays Undecided.
inline BasinMap basin_sample(const FlagSpace& sp, Orientation o, int grid, IntegratorConfig cfg,
                             std::optional<Cap> focus = std::nullopt) {
    if (grid < 8) throw ParameterOutOfRange("basin_sample needs a grid of at least 8");
    cfg.orientation = o;

    std::vector<Vec> starts;
    if (sp.two_summand()) {
        if (focus) {
            double th0 = std::atan2(focus->center[1], focus->center[0]);
            for (int i = 0; i < grid; ++i) {
                double th = th0 + focus->radius * (2.0 * (i + 0.5) / grid - 1.0);
                starts.push_back(Vec(std::cos(th), std::sin(th)));
            }
        } else {
            for (int i = 0; i < grid; ++i) {
                double th = (i + 0.5) / grid * 1.5707963267948966;
                starts.push_back(Vec(std::cos(th), std::sin(th)));
            }
        }
    } else if (focus) {
        auto basis = detail::tangent_basis(focus->center.normalized());
        const double golden = 0.6180339887498949;
        for (int i = 0; i < grid; ++i) {
            double r = focus->radius * std::sqrt((i + 0.5) / grid);
            double psi = 6.283185307179586 * std::fmod((i + 0.5) * golden, 1.0);
            Vec d = focus->center + (r * std::cos(psi)) * basis[0] + (r * std::sin(psi)) * basis[1];
            starts.push_back(d.normalized());
        }
    } else {
        starts = detail::octant_lattice(grid);
    }

    BasinMap map;
    map.orientation = o;
    map.grid = grid;
    auto rays = invariant_rays(sp);
    for (const Vec& d : starts) {
        BasinEntry entry;
        entry.start = d;
        try {
            Trajectory traj = integrate(sp, d, cfg);
            Vec limit = direction_limit(traj).direction;
            double best = 1e30;
            const Ray* best_ray = nullptr;
            for (const auto& r : rays) {
                double a = angle_between(limit, r.direction);
                if (a < best) {
                    best = a;
                    best_ray = &r;
                }
            }
            if (best_ray && best < 1e-3) {
                entry.outcome = BasinEntry::Outcome::Ray;
                entry.ray_label = best_ray->label;
                entry.angle_to_ray = best;
            } else {
                const Event* term = traj.terminal_event();
                bool blew_up = term && term->kind == EventKind::BlowUp;
                bool collapsing = limit.min() < 1e-3;
                entry.outcome = (blew_up || collapsing) ? BasinEntry::Outcome::Divergent
                                                        : BasinEntry::Outcome::Undecided;
            }
        } catch (const Error&) {
            entry.outcome = BasinEntry::Outcome::Undecided;
        }
        map.entries.push_back(entry);
    }
    return map;
}

// ------------------------------------------------------------- diagnostics --

struct CollapseReport {
    std::optional<Summand> collapsing;  // summand whose share of the norm vanished
    double min_coefficient = 0.0;       // smallest normalized coefficient at the horizon
};

inline CollapseReport collapse_diagnostic(const Trajectory& traj) {
    if (!traj.space.two_summand())
        throw UnsupportedFamily("collapse_diagnostic: two-summand trajectories only");
    if (traj.samples.empty()) throw TooFewSamples("empty trajectory");
    Vec d = traj.samples.back().g.normalized();
    int arg = d.argmin();
    CollapseReport rep;
    rep.min_coefficient = d[arg];
    if (d[arg] < 1e-3) rep.collapsing = traj.space.summands[static_cast<std::size_t>(arg)].label;
    return rep;
}

// Empirical audit of which time orientation makes each invariant ray
// attracting, against the claim that the distinguished ray (gamma1 for the
// two-summand families, the normal direction for su3) attracts nearby
// trajectories as written. The su3 system fails that check as written: its
// normal direction attracts only in reversed time.
struct RayAudit {
    std::string label;
    std::vector<std::complex<double>> eigenvalues;  // as-written spectrum
    std::optional<Orientation> attracting_in;       // nullopt: saddle either way
};

struct OrientationAudit {
    std::vector<RayAudit> rays;
    std::string claimed_ray;
    std::optional<Orientation> claim_holds_in;
    bool matches_as_written = false;
};

inline OrientationAudit audit_orientation(const FlagSpace& sp) {
    OrientationAudit audit;
    audit.claimed_ray = sp.two_summand() ? "gamma1" : "gamma2";
    for (const auto& ray : invariant_rays(sp)) {
        RayAudit ra;
        ra.label = ray.label;
        ra.eigenvalues = equilibrium_spectrum(sp, ray.direction, Orientation::AsWritten);
        EquilibriumClass cls = classify_spectrum(ra.eigenvalues);
        if (cls == EquilibriumClass::Attracting) ra.attracting_in = Orientation::AsWritten;
        if (cls == EquilibriumClass::Repelling) ra.attracting_in = Orientation::Reversed;
        if (ray.label == audit.claimed_ray) audit.claim_holds_in = ra.attracting_in;
        audit.rays.push_back(ra);
    }
    audit.matches_as_written = audit.claim_holds_in == Orientation::AsWritten;
    return audit;
}

}  // namespace ricciflow
