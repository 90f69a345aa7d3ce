#ifndef CRITSET_DOMINATION_HPP
#define CRITSET_DOMINATION_HPP

// E/F splitting estimation by projective power iteration, the windowed
// domination test (condition (*)), and the invariant cone-field oracle.

#include <algorithm>
#include <cmath>
#include <vector>

#include "critset/cocycle.hpp"
#include "critset/dynamics.hpp"
#include "critset/geometry.hpp"

namespace critset {

struct SplittingEstimate {
    Vec2 base;
    Direction E;  // projective repeller (dominated direction)
    Direction F;  // projective attractor (dominating direction)
    long long transport_horizon = 0;
    double angle = 0.0;  // RP^1 distance between E and F
};

// F is the forward transport, from f^{-T}(p) to p, of the most expanded
// one-step singular direction at f^{-T}(p); E is its time reversal.  When
// domination holds the projective attractor/repeller dichotomy makes both
// transports converge; when it does not, the angle degenerates.
inline SplittingEstimate estimate_splitting(const MapDef& map, Vec2 p, long long T) {
    const Orbit o = orbit(map, p, T, T);
    if (o.escaped_at) throw escaped(*o.escaped_at);
    SplittingEstimate est;
    est.base = p;
    est.transport_horizon = T;
    try {
        Direction f_dir = singular_pair(o.jacobian(-T)).f;
        for (long long n = -T; n < 0; ++n) f_dir = g_transport(o.jacobian(n), f_dir);
        est.F = f_dir;
        // inverse-map one-step Jacobian at f^{T}(p)
        Direction e_dir = singular_pair(o.jacobian(T - 1).inverse()).f;
        for (long long n = T; n > 0; --n) e_dir = g_transport(o.jacobian(n - 1).inverse(), e_dir);
        est.E = e_dir;
    } catch (const conformal_matrix&) {
        throw degenerate_angle();
    }
    est.angle = rp1_distance(est.E, est.F);
    if (est.angle < 1e-8) throw degenerate_angle();
    return est;
}

enum class ViolationTag { ExceededBound, DegenerateAngle, Escaped };

struct ConditionStarViolation {
    Vec2 point;
    long long m = 0;
    double value = 0.0;  // (1/N) log g^N(G^m F) where applicable
    ViolationTag tag = ViolationTag::ExceededBound;
};

struct DominationReport {
    long long samples = 0;
    long long N = 0;
    double delta = 0.0;
    double max_ratio = -std::numeric_limits<double>::infinity();
    bool condition_star_holds = true;
    long long truncated_samples = 0;  // m range clamped by orbit escape
    std::vector<ConditionStarViolation> violations;
};

// Checks log g^N(G^m v) < N log(1+delta) for v = estimated F at each sample
// and 0 <= m <= m_horizon.  F is the canonical witness for the existential
// condition, so only that direction is tested.
inline DominationReport condition_star(const MapDef& map, const std::vector<Vec2>& samples,
                                       long long N, double delta, long long m_horizon,
                                       long long transport_horizon = 30) {
    DominationReport rep;
    rep.samples = static_cast<long long>(samples.size());
    rep.N = N;
    rep.delta = delta;
    const double bound = static_cast<double>(N) * std::log1p(delta);
    for (Vec2 p : samples) {
        Direction v;
        try {
            v = estimate_splitting(map, p, transport_horizon).F;
        } catch (const degenerate_angle&) {
            rep.violations.push_back({p, 0, 0.0, ViolationTag::DegenerateAngle});
            continue;
        } catch (const escaped&) {
            rep.violations.push_back({p, 0, 0.0, ViolationTag::Escaped});
            continue;
        }
        CocycleTrace t = trace(map, p, v, 0, m_horizon + N);
        // in expanding regimes no finite-precision orbit survives the full
        // horizon; test the windows the orbit actually supports
        long long max_m = m_horizon;
        if (t.escaped) {
            if (t.n_fwd < N) {
                rep.violations.push_back({p, 0, 0.0, ViolationTag::Escaped});
                continue;
            }
            max_m = std::min(m_horizon, t.n_fwd - N);
            ++rep.truncated_samples;
        }
        for (long long m = 0; m <= max_m; ++m) {
            const double log_gn = t.log_g_at(m + N) - t.log_g_at(m);
            rep.max_ratio = std::max(rep.max_ratio, log_gn / static_cast<double>(N));
            if (!(log_gn < bound))
                rep.violations.push_back({p, m, log_gn / static_cast<double>(N),
                                          ViolationTag::ExceededBound});
        }
    }
    rep.condition_star_holds = rep.violations.empty();
    return rep;
}

struct ConeField {
    std::vector<Direction> centers;  // one per sample
    double half_width = 0.0;         // radians, in (0, pi/4]
    // optional centers for the complementary (contracting) cones; when the
    // splitting is oblique the complement must sit on the contracting
    // direction, not at center + pi/2, or no growth gap can exist.  Empty
    // means orthogonal complements.
    std::vector<Direction> co_centers;
};

struct ConeFieldReport {
    bool invariant = false;       // every cone maps strictly into its successor
    bool expansion_gap = false;   // g on the complementary cone dominates g on the cone
    double min_margin = 0.0;      // worst inclusion margin, radians
    double min_g_ratio = 0.0;     // worst composed (min g complement)/(max g cone)
    long long edges_checked = 0;

    bool ok() const { return invariant && expansion_gap; }
};

// Independent domination oracle: checks that the Jacobian maps the cone at
// each sample strictly into the cone at the nearest sample to its image,
// and that g composed over the `steps`-edge walk on the complementary cone
// uniformly exceeds the composed g on the cone itself.  A single step is
// not enough for the gap: near a saddle the cone center (the asymptotic
// expanding direction) can sit a sizable angle away from the one-step
// singular axis, and the transient swallows the gap.  Composition washes
// the transient out and the ratio settles at its geometric value.
inline ConeFieldReport verify_cone_field(const MapDef& map, const std::vector<Vec2>& samples,
                                         const ConeField& cone, long long steps,
                                         double mesh_tol = 0.1, double margin = 1e-3,
                                         double ratio_factor = 1.5) {
    if (samples.empty() || cone.centers.size() != samples.size())
        throw validation_error("cone field must provide one center per sample");
    if (!cone.co_centers.empty() && cone.co_centers.size() != samples.size())
        throw validation_error("complement centers must match the sample count");
    if (!(cone.half_width > 0.0 && cone.half_width <= kPi / 4.0))
        throw validation_error("cone half width must lie in (0, pi/4]");
    auto nearest = [&](Vec2 p) {
        size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < samples.size(); ++i) {
            const double d = dist(samples[i], p);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best_d > mesh_tol) throw mesh_too_coarse();
        return best;
    };
    ConeFieldReport rep;
    rep.invariant = true;
    rep.expansion_gap = true;
    rep.min_margin = std::numeric_limits<double>::infinity();
    rep.min_g_ratio = std::numeric_limits<double>::infinity();
    constexpr int kConeSamples = 33;
    for (size_t start = 0; start < samples.size(); ++start) {
        size_t idx = start;
        // tracked direction fans: one inside the cone, one inside the
        // complementary cone, each with its accumulated log g
        std::vector<Direction> cone_dirs(kConeSamples), comp_dirs(kConeSamples);
        std::vector<double> cone_logg(kConeSamples, 0.0), comp_logg(kConeSamples, 0.0);
        {
            const Direction c = cone.centers[start];
            const double co = cone.co_centers.empty() ? c.theta + kPi / 2
                                                      : cone.co_centers[start].theta;
            for (int s = 0; s < kConeSamples; ++s) {
                const double off =
                    -cone.half_width + 2.0 * cone.half_width * s / (kConeSamples - 1);
                cone_dirs[s] = Direction(c.theta + off);
                comp_dirs[s] = Direction(co + off);
            }
        }
        long long walked = 0;
        for (long long k = 0; k < steps; ++k) {
            const Vec2 p = samples[idx];
            const Direction c = cone.centers[idx];
            const Mat2 j = map.jacobian(p);
            Vec2 image;
            try {
                image = map.forward(p);
            } catch (const escaped&) {
                rep.invariant = false;
                break;
            }
            const size_t next = nearest(image);
            const Direction target = cone.centers[next];
            // inclusion: image of the cone is the interval spanned by the
            // images of its endpoints (plus the center as a sanity probe)
            double worst = 0.0;
            for (double off : {-cone.half_width, 0.0, cone.half_width}) {
                const Direction d = g_transport(j, Direction(c.theta + off));
                worst = std::max(worst, rp1_distance(d, target));
            }
            const double m = cone.half_width - worst;
            rep.min_margin = std::min(rep.min_margin, m);
            if (m < margin) rep.invariant = false;
            for (int s = 0; s < kConeSamples; ++s) {
                cone_logg[s] += std::log(g_step(j, cone_dirs[s]));
                cone_dirs[s] = g_transport(j, cone_dirs[s]);
                comp_logg[s] += std::log(g_step(j, comp_dirs[s]));
                comp_dirs[s] = g_transport(j, comp_dirs[s]);
            }
            ++rep.edges_checked;
            ++walked;
            idx = next;
        }
        if (walked == 0) continue;
        // expansion gap over the composed walk: g stays small along cone
        // directions and large along complementary ones
        const double max_cone = *std::max_element(cone_logg.begin(), cone_logg.end());
        const double min_comp = *std::min_element(comp_logg.begin(), comp_logg.end());
        const double ratio = std::exp(min_comp - max_cone);
        rep.min_g_ratio = std::min(rep.min_g_ratio, ratio);
        if (ratio < ratio_factor) rep.expansion_gap = false;
    }
    return rep;
}

}  // namespace critset

#endif
