#ifndef CRITSET_MANIFOLDS_HPP
#define CRITSET_MANIFOLDS_HPP

// Stable/unstable branches of saddles as adaptive polylines, intersection
// and tangency detection, crossing classification, and the first-tangency
// parameter bisection for the Henon family.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "critset/cocycle.hpp"
#include "critset/criticality.hpp"
#include "critset/dynamics.hpp"
#include "critset/geometry.hpp"

namespace critset {

enum class BranchKind { Stable, Unstable };
enum class BranchSide { Plus, Minus };

struct ManifoldBranch {
    PeriodicPoint saddle;
    BranchKind kind = BranchKind::Unstable;
    BranchSide side = BranchSide::Plus;
    std::vector<Vec2> polyline;
    double arclength = 0.0;
    double max_gap = 0.0;
    // exact parameterization: the vertex at params[i] = k + t is the k-th
    // branch-map image of seed_base + seed_vector * seed_eps * seed_lambda^t.
    // Re-evaluating through the seed is the only stable way to recover
    // points (and their orbit segments) on the branch.
    Vec2 seed_base;
    Vec2 seed_vector;
    double seed_eps = 0.0;
    double seed_lambda = 1.0;
    long long eff_period = 1;  // map applications per branch-map step
    StepDirection march = StepDirection::Forward;
    std::vector<double> params;  // one parameter per polyline vertex
};

struct BranchOptions {
    double curvature_tol = 0.2;  // radians of turning per vertex
    double max_gap = 0.05;
    double seed_eps = 1e-5;
    Box domain{-10.0, 10.0, -10.0, 10.0};  // growth stops on exit
    int max_levels = 80;
    size_t max_points = 400000;
};

namespace detail {

// One application of f^{+period} (Unstable) or f^{-period} (Stable).
struct BranchMap {
    const MapDef* map;
    long long period;
    StepDirection dir;

    Vec2 operator()(Vec2 p) const {
        for (long long k = 0; k < period; ++k) p = map->step(p, dir).first;
        return p;
    }
    Vec2 iterate(Vec2 p, long long n) const {
        for (long long k = 0; k < n; ++k) p = (*this)(p);
        return p;
    }
};

}  // namespace detail

// Grows one branch by iterating a fundamental domain of the eigendirection,
// inserting midpoints wherever spacing exceeds max_gap or the local turning
// angle exceeds curvature_tol.  Growth stops at the arclength budget or when
// the curve leaves the computational domain.
inline ManifoldBranch grow_branch(const MapDef& map, const PeriodicPoint& saddle,
                                  BranchKind kind, BranchSide side, double arclength_budget,
                                  const BranchOptions& opt = {}) {
    if (saddle.cls != LinearClass::HyperbolicSaddle) throw not_a_saddle();
    const EigenPair eig = real_eigen(saddle.derivative_at_period);
    if (rp1_distance(eig.major, eig.minor) <= 1e-6) throw eigen_degenerate();

    const bool unstable = kind == BranchKind::Unstable;
    const Direction dir = unstable ? eig.major : eig.minor;
    const double lambda = unstable ? eig.lambda_major : 1.0 / eig.lambda_minor;
    long long eff_period = saddle.period;
    double eff_lambda = lambda;
    if (lambda < 0.0) {  // negative eigenvalue flips sides; double the period
        eff_period *= 2;
        eff_lambda = lambda * lambda;
    }
    const detail::BranchMap phi{&map, eff_period,
                                unstable ? StepDirection::Forward : StepDirection::Backward};
    const double sign = side == BranchSide::Plus ? 1.0 : -1.0;
    const Vec2 u = dir.unit() * sign;
    // geometric parameterization of the fundamental domain [eps, eps*lambda]
    auto seed = [&](double t) { return saddle.location + u * (opt.seed_eps * std::pow(eff_lambda, t)); };

    ManifoldBranch br;
    br.saddle = saddle;
    br.kind = kind;
    br.side = side;
    br.max_gap = opt.max_gap;
    br.seed_base = saddle.location;
    br.seed_vector = u;
    br.seed_eps = opt.seed_eps;
    br.seed_lambda = eff_lambda;
    br.eff_period = eff_period;
    br.march = unstable ? StepDirection::Forward : StepDirection::Backward;

    struct Node {
        double t;
        Vec2 p;
    };
    std::vector<Node> level;
    level.push_back({0.0, seed(0.0)});
    level.push_back({1.0, seed(1.0)});

    auto turning = [](Vec2 a, Vec2 b, Vec2 c) {
        const Vec2 ab = b - a, bc = c - b;
        const double n = ab.norm() * bc.norm();
        if (n == 0.0) return 0.0;
        return std::atan2(std::abs(ab.cross(bc)), ab.dot(bc));
    };

    bool stop = false;
    for (int k = 0; k <= opt.max_levels && !stop; ++k) {
        // adaptive refinement of the current level
        bool changed = true;
        while (changed && level.size() < opt.max_points) {
            changed = false;
            std::vector<Node> refined;
            refined.reserve(level.size() * 2);
            for (size_t i = 0; i < level.size(); ++i) {
                refined.push_back(level[i]);
                if (i + 1 == level.size()) break;
                const double gap = dist(level[i].p, level[i + 1].p);
                bool split = gap > opt.max_gap;
                if (!split && i > 0 && gap > 1e-12)
                    split = turning(level[i - 1].p, level[i].p, level[i + 1].p) > opt.curvature_tol;
                if (!split && i + 2 < level.size() && gap > 1e-12)
                    split = turning(level[i].p, level[i + 1].p, level[i + 2].p) > opt.curvature_tol;
                if (split && level[i + 1].t - level[i].t > 1e-14) {
                    const double tm = 0.5 * (level[i].t + level[i + 1].t);
                    try {
                        refined.push_back({tm, phi.iterate(seed(tm), k)});
                        changed = true;
                    } catch (const escaped&) {
                        // unrefinable: the midpoint orbit leaves the radius
                    }
                }
            }
            level.swap(refined);
        }
        // append this level to the polyline, tracking arclength and domain exit
        for (size_t i = 0; i < level.size(); ++i) {
            if (k > 0 && i == 0) continue;  // t=0 point duplicates previous level's t=1
            const Vec2 p = level[i].p;
            if (!br.polyline.empty()) br.arclength += dist(br.polyline.back(), p);
            br.polyline.push_back(p);
            br.params.push_back(static_cast<double>(k) + level[i].t);
            if (!opt.domain.contains(p) || br.arclength >= arclength_budget) {
                stop = true;
                break;
            }
        }
        if (stop || br.polyline.size() >= opt.max_points) break;
        // march the level forward once
        std::vector<Node> next;
        next.reserve(level.size());
        for (const Node& n : level) {
            try {
                next.push_back({n.t, phi(n.p)});
            } catch (const escaped&) {
                stop = true;
                break;
            }
        }
        if (next.size() < 2) break;
        level.swap(next);
    }
    return br;
}

struct IntersectionEvent {
    Vec2 point;
    double angle = 0.0;  // RP^1 angle between the two local tangents
    size_t segment_a = 0;
    size_t segment_b = 0;
    Direction tangent_a;
    Direction tangent_b;
};

namespace detail {

// Tangent of a polyline at parameter s within segment i, from a quadratic
// chord-length fit through the neighboring vertices.
inline Direction local_tangent(const std::vector<Vec2>& poly, size_t i, Vec2 at) {
    const size_t lo = i > 0 ? i - 1 : i;
    const size_t hi = std::min(i + 2, poly.size() - 1);
    if (hi - lo < 2) return Direction::of_vector(poly[i + 1] - poly[i]);
    // chord-length parameters
    std::vector<double> s(hi - lo + 1, 0.0);
    for (size_t j = lo + 1; j <= hi; ++j) s[j - lo] = s[j - lo - 1] + dist(poly[j - 1], poly[j]);
    double s_at = 0.0;
    for (size_t j = lo; j < i; ++j) s_at += dist(poly[j], poly[j + 1]);
    s_at += dist(poly[i], at);
    // least-squares quadratic fit of x(s), y(s)
    double m0 = 0, m1 = 0, m2 = 0, m3 = 0, m4 = 0;
    double bx0 = 0, bx1 = 0, bx2 = 0, by0 = 0, by1 = 0, by2 = 0;
    for (size_t j = 0; j < s.size(); ++j) {
        const double t = s[j], t2 = t * t;
        m0 += 1;
        m1 += t;
        m2 += t2;
        m3 += t2 * t;
        m4 += t2 * t2;
        const Vec2 p = poly[lo + j];
        bx0 += p.x;
        bx1 += p.x * t;
        bx2 += p.x * t2;
        by0 += p.y;
        by1 += p.y * t;
        by2 += p.y * t2;
    }
    // solve the 3x3 normal equations by Cramer's rule
    const double det = m0 * (m2 * m4 - m3 * m3) - m1 * (m1 * m4 - m2 * m3) +
                       m2 * (m1 * m3 - m2 * m2);
    if (std::abs(det) < 1e-30) return Direction::of_vector(poly[i + 1] - poly[i]);
    auto solve = [&](double b0, double b1, double b2, double& c1, double& c2) {
        const double d1 = m0 * (b1 * m4 - b2 * m3) - b0 * (m1 * m4 - m2 * m3) +
                          m2 * (m1 * b2 - m2 * b1);
        const double d2 = m0 * (m2 * b2 - m3 * b1) - m1 * (m1 * b2 - m2 * b1) +
                          b0 * (m1 * m3 - m2 * m2);
        c1 = d1 / det;
        c2 = d2 / det;
    };
    double cx1, cx2, cy1, cy2;
    solve(bx0, bx1, bx2, cx1, cx2);
    solve(by0, by1, by2, cy1, cy2);
    const Vec2 deriv{cx1 + 2.0 * cx2 * s_at, cy1 + 2.0 * cy2 * s_at};
    if (deriv.norm() < 1e-12) return Direction::of_vector(poly[i + 1] - poly[i]);
    return Direction::of_vector(deriv);
}

inline bool segment_intersection(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1, Vec2& out) {
    const Vec2 r = a1 - a0, s = b1 - b0;
    const double denom = r.cross(s);
    if (denom == 0.0) return false;
    const Vec2 qp = b0 - a0;
    const double t = qp.cross(s) / denom;
    const double w = qp.cross(r) / denom;
    if (t < 0.0 || t > 1.0 || w < 0.0 || w > 1.0) return false;
    out = a0 + r * t;
    return true;
}

// Point of the branch at parameter tau, re-evaluated through the seed.
// For tau < 1 the seed formula alone applies (the offset only shrinks).
inline Vec2 branch_point(const MapDef& map, const ManifoldBranch& br, double tau) {
    const long long k = std::max<long long>(0, static_cast<long long>(std::floor(tau)));
    const double t = tau - static_cast<double>(k);
    Vec2 p = br.seed_base + br.seed_vector * (br.seed_eps * std::pow(br.seed_lambda, t));
    for (long long j = 0; j < k * br.eff_period; ++j) p = map.step(p, br.march).first;
    return p;
}

// f^m image of branch_point(tau), computed by adjusting the seed parameter
// so that the map is only ever applied in the branch's marching direction
// (plus at most one partial level).  Iterating against the marching
// direction would amplify off-manifold round-off exponentially.
inline Vec2 branch_orbit_point(const MapDef& map, const ManifoldBranch& br, double tau,
                               long long m) {
    const long long sign = br.march == StepDirection::Forward ? 1 : -1;
    const long long k = std::max<long long>(0, static_cast<long long>(std::floor(tau)));
    double t = tau - static_cast<double>(k);
    long long total = sign * br.eff_period * k + m;  // net f-steps from the seed point
    while (total != 0 && (total > 0) != (sign > 0)) {
        t -= 1.0;
        total += sign * br.eff_period;
    }
    Vec2 p = br.seed_base + br.seed_vector * (br.seed_eps * std::pow(br.seed_lambda, t));
    const StepDirection dir = total >= 0 ? StepDirection::Forward : StepDirection::Backward;
    for (long long j = 0; j < std::abs(total); ++j) p = map.step(p, dir).first;
    return p;
}

struct RefinedCrossing {
    double tau_a = 0.0;
    double tau_b = 0.0;
    Vec2 point;
};

// Bisects the crossing of the two true curves in parameter space, halving
// both parameter intervals while a chord sub-pair still intersects.
inline RefinedCrossing refine_crossing(const MapDef& map, const ManifoldBranch& a,
                                       const ManifoldBranch& b, const IntersectionEvent& ev) {
    double a0 = a.params[ev.segment_a], a1 = a.params[ev.segment_a + 1];
    double b0 = b.params[ev.segment_b], b1 = b.params[ev.segment_b + 1];
    Vec2 A0 = branch_point(map, a, a0), A1 = branch_point(map, a, a1);
    Vec2 B0 = branch_point(map, b, b0), B1 = branch_point(map, b, b1);
    Vec2 q = ev.point;
    for (int it = 0; it < 80 && std::max(a1 - a0, b1 - b0) > 1e-13; ++it) {
        const double am = 0.5 * (a0 + a1), bm = 0.5 * (b0 + b1);
        const Vec2 Am = branch_point(map, a, am), Bm = branch_point(map, b, bm);
        bool found = false;
        for (int ia = 0; ia < 2 && !found; ++ia) {
            const Vec2 sa0 = ia ? Am : A0, sa1 = ia ? A1 : Am;
            for (int ib = 0; ib < 2 && !found; ++ib) {
                const Vec2 sb0 = ib ? Bm : B0, sb1 = ib ? B1 : Bm;
                Vec2 hit;
                if (!segment_intersection(sa0, sa1, sb0, sb1, hit)) continue;
                q = hit;
                if (ia) a0 = am, A0 = Am; else a1 = am, A1 = Am;
                if (ib) b0 = bm, B0 = Bm; else b1 = bm, B1 = Bm;
                found = true;
            }
        }
        if (!found) break;  // near-tangential: chords separate before 1e-13
    }
    return {0.5 * (a0 + a1), 0.5 * (b0 + b1), q};
}

}  // namespace detail

// All contacts between the two polylines, found by a segment-pair sweep with
// spatial hashing, each with locally refined tangents attached.
inline std::vector<IntersectionEvent> find_intersections(const ManifoldBranch& a,
                                                         const ManifoldBranch& b,
                                                         double refine_tol = 1e-9) {
    std::vector<IntersectionEvent> events;
    const auto& pa = a.polyline;
    const auto& pb = b.polyline;
    if (pa.size() < 2 || pb.size() < 2) return events;
    // cell size: a few times the median segment length of A
    double total = 0.0;
    for (size_t i = 0; i + 1 < pa.size(); ++i) total += dist(pa[i], pa[i + 1]);
    const double cell = std::max(4.0 * total / static_cast<double>(pa.size() - 1), 1e-9);
    auto key = [&](double x, double y) {
        return std::pair<long long, long long>{static_cast<long long>(std::floor(x / cell)),
                                               static_cast<long long>(std::floor(y / cell))};
    };
    std::map<std::pair<long long, long long>, std::vector<size_t>> hash;
    for (size_t i = 0; i + 1 < pa.size(); ++i) {
        const auto [x0, y0] = key(std::min(pa[i].x, pa[i + 1].x), std::min(pa[i].y, pa[i + 1].y));
        const auto [x1, y1] = key(std::max(pa[i].x, pa[i + 1].x), std::max(pa[i].y, pa[i + 1].y));
        for (long long cx = x0; cx <= x1; ++cx)
            for (long long cy = y0; cy <= y1; ++cy) hash[{cx, cy}].push_back(i);
    }
    for (size_t j = 0; j + 1 < pb.size(); ++j) {
        const auto [x0, y0] = key(std::min(pb[j].x, pb[j + 1].x), std::min(pb[j].y, pb[j + 1].y));
        const auto [x1, y1] = key(std::max(pb[j].x, pb[j + 1].x), std::max(pb[j].y, pb[j + 1].y));
        std::vector<size_t> cand;
        for (long long cx = x0; cx <= x1; ++cx)
            for (long long cy = y0; cy <= y1; ++cy) {
                auto it = hash.find({cx, cy});
                if (it != hash.end()) cand.insert(cand.end(), it->second.begin(), it->second.end());
            }
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        for (size_t i : cand) {
            Vec2 q;
            if (!detail::segment_intersection(pa[i], pa[i + 1], pb[j], pb[j + 1], q)) continue;
            const bool dup = std::any_of(events.begin(), events.end(), [&](const IntersectionEvent& e) {
                return dist(e.point, q) < std::max(refine_tol, 1e-12);
            });
            if (dup) continue;
            IntersectionEvent ev;
            ev.point = q;
            ev.segment_a = i;
            ev.segment_b = j;
            ev.tangent_a = detail::local_tangent(pa, i, q);
            ev.tangent_b = detail::local_tangent(pb, j, q);
            ev.angle = rp1_distance(ev.tangent_a, ev.tangent_b);
            events.push_back(ev);
        }
    }
    std::sort(events.begin(), events.end(), [](const IntersectionEvent& x, const IntersectionEvent& y) {
        if (x.point.x != y.point.x) return x.point.x < y.point.x;
        return x.point.y < y.point.y;
    });
    return events;
}

enum class CrossingClass { Crossing, Tangential, OneSided };

// Signed-side test of the unstable polyline against the stable one within
// an arclength band of the event on each side.
inline CrossingClass classify_crossing(const ManifoldBranch& stable,
                                       const ManifoldBranch& unstable,
                                       const IntersectionEvent& x, double band,
                                       double side_tol = 1e-9) {
    const auto& sp = stable.polyline;
    const auto& up = unstable.polyline;
    // the stable curve must separate the local band: it has to extend at
    // least `band` beyond the event on both sides
    double before = 0.0, after = 0.0;
    for (size_t i = 0; i < x.segment_a; ++i) before += dist(sp[i], sp[i + 1]);
    before += dist(sp[x.segment_a], x.point);
    after = dist(x.point, sp[x.segment_a + 1]);
    for (size_t i = x.segment_a + 1; i + 1 < sp.size(); ++i) after += dist(sp[i], sp[i + 1]);
    if (before < band || after < band)
        throw undetermined("stable branch does not span the band around the event");

    auto signed_side = [&](Vec2 p) {
        double best_d = std::numeric_limits<double>::infinity();
        double s = 0.0;
        for (size_t i = 0; i + 1 < sp.size(); ++i) {
            const Vec2 seg = sp[i + 1] - sp[i];
            const double len2 = seg.norm2();
            double t = len2 > 0.0 ? (p - sp[i]).dot(seg) / len2 : 0.0;
            t = std::clamp(t, 0.0, 1.0);
            const Vec2 proj = sp[i] + seg * t;
            const double d = dist(p, proj);
            if (d < best_d) {
                best_d = d;
                s = seg.cross(p - proj);
            }
        }
        return s;
    };

    // collect unstable points within the arclength band of the event
    bool pos = false, neg = false;
    double acc = 0.0;
    for (size_t i = x.segment_b + 1; i < up.size(); ++i) {
        acc += dist(i == x.segment_b + 1 ? x.point : up[i - 1], up[i]);
        if (acc > band) break;
        const double s = signed_side(up[i]);
        if (s > side_tol) pos = true;
        if (s < -side_tol) neg = true;
    }
    acc = 0.0;
    for (size_t i = x.segment_b + 1; i-- > 0;) {
        acc += dist(i == x.segment_b ? x.point : up[i + 1], up[i]);
        if (acc > band) break;
        const double s = signed_side(up[i]);
        if (s > side_tol) pos = true;
        if (s < -side_tol) neg = true;
    }
    if (pos && neg) return CrossingClass::Crossing;
    if (pos || neg) return CrossingClass::OneSided;
    return CrossingClass::Tangential;
}

struct TangencyReport {
    double family_b = 0.0;
    double a_star = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};
    Vec2 tangency_point;
    Direction tangency_direction;
    double min_angle = 0.0;       // minimum intersection angle at a_star
    long long critical_iterate = 0;
    Vec2 critical_point_estimate;
    // stably reconstructed orbit through the tangency point (index 0),
    // past from the unstable seed, future from the stable seed
    Orbit orbit;
    // per-index direction of the (near-)common tangent: tangent to the
    // unstable manifold for negative indices, to the stable one for
    // positive, and the bisector at zero
    std::vector<Direction> orbit_tangents;
    std::vector<double> orbit_log_g;  // g-profile along those tangents, 0 at index 0
    Direction transported_tangent;    // critical direction transported back to index 0
};

struct TangencyOptions {
    double budget_unstable = 80.0;
    double budget_stable = 80.0;
    BranchOptions branch{};
    double min_angle_hi = 0.02;   // transversality floor required at a_hi
    double saddle_local_eps = 1e-2;
    long long max_window = 400;
};

namespace detail {

struct TangencyProbe {
    long long count = 0;
    double min_angle = std::numeric_limits<double>::infinity();
    std::vector<IntersectionEvent> events;
    std::vector<std::pair<size_t, size_t>> event_branches;  // (unstable, stable) index
    std::vector<ManifoldBranch> unstable, stable;
    PeriodicPoint saddle;
};

inline TangencyProbe tangency_probe(double a, double b, const TangencyOptions& opt) {
    const MapDef map = MapDef::henon(a, b);
    const auto fixed = find_periodic_points(map, 1, Box{-10, 10, -10, 10}, 24);
    TangencyProbe pr;
    bool found = false;
    for (const auto& pp : fixed) {
        if (pp.cls == LinearClass::HyperbolicSaddle) {
            pr.saddle = pp;  // lexicographically smallest saddle
            found = true;
            break;
        }
    }
    if (!found) return pr;
    for (BranchSide side : {BranchSide::Plus, BranchSide::Minus}) {
        pr.unstable.push_back(grow_branch(map, pr.saddle, BranchKind::Unstable, side,
                                          opt.budget_unstable, opt.branch));
        pr.stable.push_back(grow_branch(map, pr.saddle, BranchKind::Stable, side,
                                        opt.budget_stable, opt.branch));
    }
    for (size_t ui = 0; ui < pr.unstable.size(); ++ui)
        for (size_t si = 0; si < pr.stable.size(); ++si) {
            auto ev = find_intersections(pr.unstable[ui], pr.stable[si]);
            for (const auto& e : ev) {
                pr.min_angle = std::min(pr.min_angle, e.angle);
                pr.events.push_back(e);
                pr.event_branches.emplace_back(ui, si);
            }
        }
    pr.count = static_cast<long long>(pr.events.size());
    return pr;
}

}  // namespace detail

// Bisects on "the a_hi intersection pattern is still fully present" down to
// bracket width `tol`.  At the located parameter the minimum-angle event is
// the near-tangency; the critical iterate on its orbit comes from the
// cumulative-product split of the g-values along the tangency orbit.
inline TangencyReport first_tangency(double b, std::pair<double, double> a_range, double tol,
                                     const TangencyOptions& opt = {}) {
    if (b == 0.0) throw non_invertible("Henon map with b = 0 has no inverse");
    double lo = a_range.first, hi = a_range.second;
    if (!(lo < hi)) throw bracket_invalid("empty parameter range");
    const detail::TangencyProbe probe_hi = detail::tangency_probe(hi, b, opt);
    if (probe_hi.count == 0)
        throw bracket_invalid("no intersections at the top of the parameter range");
    if (probe_hi.min_angle <= opt.min_angle_hi)
        throw bracket_invalid("intersections at a_hi are not uniformly transversal");
    const long long full_count = probe_hi.count;
    auto present = [&](double a) {
        return detail::tangency_probe(a, b, opt).count >= full_count;
    };
    if (present(lo)) throw bracket_invalid("intersection pattern still present at a_lo");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (present(mid))
            hi = mid;
        else
            lo = mid;
    }
    TangencyReport rep;
    rep.family_b = b;
    rep.bracket = {lo, hi};
    rep.a_star = hi;

    const detail::TangencyProbe probe = detail::tangency_probe(hi, b, opt);
    size_t best = 0;
    for (size_t e = 1; e < probe.events.size(); ++e)
        if (probe.events[e].angle < probe.events[best].angle) best = e;
    const MapDef map = MapDef::henon(hi, b);
    const ManifoldBranch& ub = probe.unstable[probe.event_branches[best].first];
    const ManifoldBranch& sb = probe.stable[probe.event_branches[best].second];
    const detail::RefinedCrossing rc = detail::refine_crossing(map, ub, sb, probe.events[best]);
    rep.tangency_point = rc.point;
    // tangents of the true curves at the refined parameters
    auto curve_tangent = [&](const ManifoldBranch& br, double tau) {
        const double h = 1e-6;
        return Direction::of_vector(detail::branch_point(map, br, tau + h) -
                                    detail::branch_point(map, br, tau - h));
    };
    const Direction tu = curve_tangent(ub, rc.tau_a);
    const Direction ts = curve_tangent(sb, rc.tau_b);
    rep.min_angle = rp1_distance(tu, ts);
    // near the tangency both tangents nearly coincide; use their bisector
    double t0 = tu.theta, t1 = ts.theta;
    if (std::abs(t0 - t1) > kPi / 2) t1 += t1 < t0 ? kPi : -kPi;
    rep.tangency_direction = Direction(0.5 * (t0 + t1));

    // reconstruct the tangency orbit through the seeds: the past through the
    // unstable one, the future through the stable one.  Direct iteration of
    // the crossing point is unstable: its off-manifold round-off grows by
    // the contracting eigenvalue on every backward step.  Window so that
    // both ends are saddle-local, with slack for scoring around any iterate.
    constexpr long long kSlack = 16;
    auto reach = [&](const ManifoldBranch& br, double tau, long long sgn) {
        long long core = opt.max_window;
        for (long long m = 1; m <= opt.max_window; ++m)
            if (dist(detail::branch_orbit_point(map, br, tau, sgn * m), probe.saddle.location) <
                opt.saddle_local_eps) {
                core = m;
                break;
            }
        return core;
    };
    const long long core_back = reach(ub, rc.tau_a, -1);
    const long long core_fwd = reach(sb, rc.tau_b, +1);
    Orbit o;
    o.base = rc.point;
    o.n_back = core_back + kSlack;
    o.n_fwd = core_fwd + kSlack;
    for (long long m = o.n_back; m >= 1; --m)
        o.points.push_back(detail::branch_orbit_point(map, ub, rc.tau_a, -m));
    o.points.push_back(rc.point);
    for (long long m = 1; m <= o.n_fwd; ++m)
        o.points.push_back(detail::branch_orbit_point(map, sb, rc.tau_b, m));
    o.jacobians.reserve(o.points.size());
    for (const Vec2& pt : o.points) o.jacobians.push_back(map.jacobian(pt));

    // The g-profile of the common tangent cannot be obtained by transporting
    // one direction along the orbit: the unstable-manifold tangent family is
    // projectively repelling backward, so round-off leaves it at the rate of
    // the eigenvalue ratio per step.  The per-point manifold tangents are a
    // stable evaluation of the same profile.
    const size_t zero = static_cast<size_t>(o.n_back);
    auto orbit_tangent = [&](const ManifoldBranch& br, double tau, long long m) {
        const double h = 1e-6;
        return Direction::of_vector(detail::branch_orbit_point(map, br, tau + h, m) -
                                    detail::branch_orbit_point(map, br, tau - h, m));
    };
    std::vector<Direction> tangents(o.points.size());
    for (long long n = -o.n_back; n < 0; ++n)
        tangents[zero + n] = orbit_tangent(ub, rc.tau_a, n);
    tangents[zero] = rep.tangency_direction;
    for (long long n = 1; n <= o.n_fwd; ++n)
        tangents[zero + n] = orbit_tangent(sb, rc.tau_b, n);
    std::vector<double> lg(o.points.size(), 0.0);
    for (long long n = 0; n < o.n_fwd; ++n)
        lg[zero + n + 1] =
            lg[zero + n] + std::log(g_step(o.jacobian(n), n == 0 ? ts : tangents[zero + n]));
    for (long long n = -1; n >= -o.n_back; --n)
        lg[zero + n] = lg[zero + n + 1] - std::log(g_step(o.jacobian(n), tangents[zero + n]));
    std::vector<double> gs;
    gs.reserve(static_cast<size_t>(core_back + core_fwd));
    for (long long n = -core_back; n < core_fwd; ++n)
        gs.push_back(std::exp(lg[zero + n + 1] - lg[zero + n]));
    long long split;
    try {
        split = cumulative_min_split(gs);
    } catch (const hypothesis_failed&) {
        // finite-window round-off can push the product just below 1;
        // the argmin prefix index is still the natural split
        double sum = 0.0, bestv = std::numeric_limits<double>::infinity();
        split = 1;
        for (size_t i = 0; i < gs.size(); ++i) {
            sum += std::log(gs[i]);
            if (sum < bestv) {
                bestv = sum;
                split = static_cast<long long>(i) + 1;
            }
        }
        if (bestv > 0.0) split = 0;
    }
    rep.critical_iterate = -core_back + split;
    rep.critical_point_estimate = o.point(rep.critical_iterate);
    // transport the critical direction to index 0 along the stable sense:
    // forward transport attracts toward the unstable tangent (which it is),
    // backward transport attracts toward the stable one
    Direction carried = tangents[zero + rep.critical_iterate];
    for (long long n = rep.critical_iterate; n < 0; ++n)
        carried = g_transport(o.jacobian(n), carried);
    for (long long n = rep.critical_iterate; n > 0; --n)
        carried = g_transport(o.jacobian(n - 1).inverse(), carried);
    rep.transported_tangent = carried;
    rep.orbit_tangents = std::move(tangents);
    rep.orbit_log_g = std::move(lg);
    rep.orbit = std::move(o);
    return rep;
}

}  // namespace critset

#endif
