#ifndef CRITSET_CRITICALITY_HPP
#define CRITSET_CRITICALITY_HPP

// Finite-window criticality detection: per-point max-min scores over RP^1,
// far-from-homothety tests, sample scans, and the recurrence diagnostics.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "critset/cocycle.hpp"
#include "critset/dynamics.hpp"
#include "critset/geometry.hpp"

namespace critset {

namespace detail {

// Precomputed orbit window with the inverse Jacobians cached, so that
// evaluating a direction costs one pass over the window.
struct WindowContext {
    Orbit orb;
    std::vector<Mat2> inv_jacobians;  // inverse of jacobian at n, same indexing

    explicit WindowContext(Orbit o) : orb(std::move(o)) {
        if (orb.escaped_at) throw escaped(*orb.escaped_at);
        inv_jacobians.reserve(orb.jacobians.size());
        for (const auto& j : orb.jacobians) inv_jacobians.push_back(j.inverse());
    }

    WindowContext(const MapDef& map, Vec2 p, long long n_back, long long n_fwd)
        : WindowContext(orbit(map, p, n_back, n_fwd)) {}

    const Mat2& inv_jacobian(long long n) const {
        return inv_jacobians[static_cast<size_t>(n + orb.n_back)];
    }

    // min over n in [-n_back_used, n_fwd_used] of log g^n(theta).
    // Stops early once the running min drops below `cutoff`.
    double min_log_g(Direction v, long long n_back_used, long long n_fwd_used,
                     double cutoff = -std::numeric_limits<double>::infinity()) const {
        double m = 0.0;
        double acc = 0.0;
        Vec2 u = v.unit();
        for (long long n = 0; n < n_fwd_used; ++n) {
            const Mat2& j = orb.jacobian(n);
            const Vec2 w = j.apply(u);
            acc += std::log(std::abs(j.det())) - std::log(w.norm2());
            if (acc < m) {
                m = acc;
                if (m < cutoff) return m;
            }
            u = w / w.norm();
        }
        acc = 0.0;
        u = v.unit();
        for (long long n = 0; n > -n_back_used; --n) {
            const Mat2& j = inv_jacobian(n - 1);
            const Vec2 w = j.apply(u);
            acc += std::log(std::abs(j.det())) - std::log(w.norm2());
            if (acc < m) {
                m = acc;
                if (m < cutoff) return m;
            }
            u = w / w.norm();
        }
        return m;
    }

    std::vector<double> profile(Direction v) const {
        return trace_profile(v).first;
    }

    std::pair<std::vector<double>, std::vector<Direction>> trace_profile(Direction v) const {
        const size_t len = orb.points.size();
        const size_t zero = static_cast<size_t>(orb.n_back);
        std::vector<double> lg(len, 0.0);
        std::vector<Direction> dirs(len);
        dirs[zero] = v;
        for (long long n = 0; n < orb.n_fwd; ++n) {
            const Mat2& j = orb.jacobian(n);
            lg[zero + n + 1] = lg[zero + n] + std::log(g_step(j, dirs[zero + n]));
            dirs[zero + n + 1] = g_transport(j, dirs[zero + n]);
        }
        for (long long n = 0; n > -orb.n_back; --n) {
            const Mat2& j = inv_jacobian(n - 1);
            lg[zero + n - 1] = lg[zero + n] + std::log(g_step(j, dirs[zero + n]));
            dirs[zero + n - 1] = g_transport(j, dirs[zero + n]);
        }
        return {lg, dirs};
    }
};

// Golden-section maximization on [lo, hi] down to bracket width `tol`.
template <class F>
inline double golden_max(F&& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 >= f2 ? x1 : x2;
}

// Dense grid over RP^1 followed by golden-section refinement of the best
// grid cell.  Returns the maximizing angle.
template <class F>
inline double maximize_over_directions(F&& f, int grid, double refine_tol) {
    double best_theta = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid; ++i) {
        const double theta = kPi * i / grid;
        const double v = f(theta);
        if (v > best) {
            best = v;
            best_theta = theta;
        }
    }
    const double h = kPi / grid;
    double refined = golden_max(f, best_theta - h, best_theta + h, refine_tol);
    // keep the grid point when refinement did not actually improve it
    return f(refined) >= best ? refined : best_theta;
}

}  // namespace detail

struct CriticalityReport {
    Vec2 base;
    long long window = 0;
    double score = 0.0;
    Direction best_direction;
    double forward_score = 0.0;
    double backward_score = 0.0;
    std::vector<double> profile;  // log_g trace at best_direction, slot n + window
};

inline CriticalityReport criticality_score(const MapDef& map, Vec2 p, long long window,
                                           int grid = 720, double refine_tol = 1e-6) {
    detail::WindowContext ctx(map, p, window, window);
    auto full = [&](double theta) { return ctx.min_log_g(Direction(theta), window, window); };
    auto fwd = [&](double theta) { return ctx.min_log_g(Direction(theta), 0, window); };
    auto bwd = [&](double theta) { return ctx.min_log_g(Direction(theta), window, 0); };
    CriticalityReport r;
    r.base = p;
    r.window = window;
    const double theta = detail::maximize_over_directions(full, grid, refine_tol);
    r.best_direction = Direction(theta);
    r.score = full(theta);
    r.forward_score = fwd(detail::maximize_over_directions(fwd, grid, refine_tol));
    r.backward_score = bwd(detail::maximize_over_directions(bwd, grid, refine_tol));
    r.profile = ctx.profile(r.best_direction);
    return r;
}

// Same score over an explicitly supplied orbit.  Some orbits (homoclinic
// ones in particular) cannot be regenerated stably by pointwise iteration:
// round-off transverse to the invariant manifolds is amplified by the
// contracting eigenvalue on every backward step.  Callers that can build
// such orbits through stable parameterizations pass them here directly.
inline CriticalityReport criticality_score_on_orbit(Orbit o, int grid = 720,
                                                    double refine_tol = 1e-6) {
    detail::WindowContext ctx(std::move(o));
    const long long nb = ctx.orb.n_back, nf = ctx.orb.n_fwd;
    auto full = [&](double theta) { return ctx.min_log_g(Direction(theta), nb, nf); };
    auto fwd = [&](double theta) { return ctx.min_log_g(Direction(theta), 0, nf); };
    auto bwd = [&](double theta) { return ctx.min_log_g(Direction(theta), nb, 0); };
    CriticalityReport r;
    r.base = ctx.orb.base;
    r.window = std::min(nb, nf);
    const double theta = detail::maximize_over_directions(full, grid, refine_tol);
    r.best_direction = Direction(theta);
    r.score = full(theta);
    r.forward_score = fwd(detail::maximize_over_directions(fwd, grid, refine_tol));
    r.backward_score = bwd(detail::maximize_over_directions(bwd, grid, refine_tol));
    r.profile = ctx.profile(r.best_direction);
    return r;
}

enum class HomothetyVerdict { FarAtThisHorizon, HomothetyLikeWitnessFound };

struct FarFromHomothetyReport {
    Vec2 base;
    double delta = 0.0;
    long long horizon = 0;
    std::optional<Direction> witness_direction;
    HomothetyVerdict verdict = HomothetyVerdict::FarAtThisHorizon;
};

inline FarFromHomothetyReport far_from_homotheties(const MapDef& map, Vec2 p, double delta,
                                                   long long horizon, int grid = 720,
                                                   double refine_tol = 1e-6) {
    detail::WindowContext ctx(map, p, 0, horizon);
    const double hi = std::log1p(delta);
    const double lo = std::log1p(-delta);
    // worst violation of the homothety band along the forward window;
    // a direction keeping it <= 0 witnesses homothety-like behavior
    auto violation = [&](double theta) {
        const std::vector<double> lg = ctx.profile(Direction(theta));
        const size_t zero = static_cast<size_t>(ctx.orb.n_back);
        double worst = -std::numeric_limits<double>::infinity();
        for (long long n = 1; n <= horizon; ++n) {
            const double v = lg[zero + n];
            worst = std::max(worst, std::max(v - n * hi, n * lo - v));
        }
        return worst;
    };
    auto objective = [&](double theta) { return -violation(theta); };
    const double theta = detail::maximize_over_directions(objective, grid, refine_tol);
    FarFromHomothetyReport r;
    r.base = p;
    r.delta = delta;
    r.horizon = horizon;
    if (violation(theta) < -1e-9) {
        r.verdict = HomothetyVerdict::HomothetyLikeWitnessFound;
        r.witness_direction = Direction(theta);
    }
    return r;
}

struct CriticalCandidate {
    Vec2 point;
    Direction direction;
    long long window = 0;
    double score = 0.0;
    std::vector<std::pair<long long, double>> alignment_slopes;  // (n, slope(e_n, direction))
};

struct ScanResult {
    std::vector<CriticalCandidate> candidates;
    long long escaped_samples = 0;
};

inline ScanResult critical_scan(const MapDef& map, const std::vector<Vec2>& samples,
                                long long window, double threshold, int grid = 720,
                                double refine_tol = 1e-6) {
    ScanResult out;
    for (Vec2 p : samples) {
        CriticalityReport rep;
        try {
            rep = criticality_score(map, p, window, grid, refine_tol);
        } catch (const escaped&) {
            ++out.escaped_samples;
            continue;
        }
        if (rep.score < threshold) continue;
        CriticalCandidate c;
        c.point = p;
        c.direction = rep.best_direction;
        c.window = window;
        c.score = rep.score;
        Mat2 product = Mat2::identity();
        Vec2 q = p;
        for (long long n = 1; n <= window; ++n) {
            product = map.jacobian(q) * product;
            q = map.forward(q);
            const double scale = product.max_abs();
            product = product * (1.0 / scale);  // rescaling keeps the directions
            try {
                c.alignment_slopes.emplace_back(
                    n, slope(singular_pair(product).e, c.direction));
            } catch (const conformal_matrix&) {
                // no well-defined contracting direction at this n
            }
        }
        out.candidates.push_back(std::move(c));
    }
    std::sort(out.candidates.begin(), out.candidates.end(),
        [](const CriticalCandidate& a, const CriticalCandidate& b) {
            if (a.score != b.score) return a.score > b.score;
            if (a.point.x != b.point.x) return a.point.x < b.point.x;
            return a.point.y < b.point.y;
        });
    return out;
}

struct RecurrenceRate {
    double value = 0.0;
    bool exact_return = false;  // some iterate returned within 1e-14
    long long argmin_k = 0;
};

// min over 1 <= k <= K of (1/k) log d(f^k(c), c); negative values flag
// exponential recurrence at this horizon.
inline RecurrenceRate recurrence_rate(const MapDef& map, Vec2 c, long long horizon) {
    RecurrenceRate out;
    out.value = std::numeric_limits<double>::infinity();
    Vec2 q = c;
    for (long long k = 1; k <= horizon; ++k) {
        q = map.step(q, StepDirection::Forward).first;  // throws `escaped`
        const double d = dist(q, c);
        if (d < 1e-14) {
            out.exact_return = true;
            out.argmin_k = k;
            out.value = -std::numeric_limits<double>::infinity();
            return out;
        }
        const double rate = std::log(d) / static_cast<double>(k);
        if (rate < out.value) {
            out.value = rate;
            out.argmin_k = k;
        }
    }
    return out;
}

enum class MisiurewiczVerdict { MisiurewiczAtHorizon, RecurrenceWitness, NeverLeft, Escaped };

struct MisiurewiczResult {
    MisiurewiczVerdict verdict = MisiurewiczVerdict::MisiurewiczAtHorizon;
    long long witness_k = 0;   // signed iterate of the first re-entry into V
    long long exit_fwd = 0;    // first forward iterate outside V
    long long exit_back = 0;   // first backward iterate outside V
};

// V is the union of radius-balls around the candidate points; each candidate
// passes when its orbit, once it has left V, never re-enters up to the horizon.
inline std::vector<MisiurewiczResult> misiurewicz_check(
    const MapDef& map, const std::vector<CriticalCandidate>& candidates, double radius,
    long long horizon, long long burn_in = 1) {
    std::vector<MisiurewiczResult> out;
    auto in_v = [&](Vec2 p) {
        return std::any_of(candidates.begin(), candidates.end(),
                           [&](const CriticalCandidate& c) { return dist(c.point, p) <= radius; });
    };
    for (const auto& cand : candidates) {
        MisiurewiczResult res;
        bool done = false;
        for (StepDirection dir : {StepDirection::Forward, StepDirection::Backward}) {
            const int sign = dir == StepDirection::Forward ? 1 : -1;
            long long& exit = dir == StepDirection::Forward ? res.exit_fwd : res.exit_back;
            exit = 0;
            Vec2 q = cand.point;
            try {
                for (long long k = 1; k <= horizon && !done; ++k) {
                    q = map.step(q, dir).first;
                    if (k < burn_in) continue;
                    const bool inside = in_v(q);
                    if (exit == 0) {
                        if (!inside) exit = sign * k;
                    } else if (inside) {
                        res.verdict = MisiurewiczVerdict::RecurrenceWitness;
                        res.witness_k = sign * k;
                        done = true;
                    }
                }
                if (!done && exit == 0) {
                    res.verdict = MisiurewiczVerdict::NeverLeft;
                    done = true;
                }
            } catch (const escaped&) {
                res.verdict = MisiurewiczVerdict::Escaped;
                done = true;
            }
            if (done) break;
        }
        out.push_back(res);
    }
    return out;
}

}  // namespace critset

#endif
