#ifndef CRITSET_DYNAMICS_HPP
#define CRITSET_DYNAMICS_HPP

// Planar diffeomorphism families, orbit computation with escape handling,
// and periodic-point solving.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "critset/geometry.hpp"

namespace critset {

enum class StepDirection { Forward, Backward };

class MapDef;

struct LinearMap {
    Mat2 matrix;
};

// f_{a,b}(x, y) = (x^2 - a - b y, x).  Invertible iff b != 0.
struct HenonMap {
    double a = 0.0;
    double b = 0.0;
};

struct ComposedMap {
    std::vector<MapDef> parts;  // applied left to right
};

class MapDef {
public:
    explicit MapDef(LinearMap m, double escape_radius = 1e6)
        : family_(std::move(m)), escape_radius_(escape_radius) {
        if (std::abs(std::get<LinearMap>(family_).matrix.det()) < kDetFloor)
            throw validation_error("Linear map matrix is not invertible");
    }
    explicit MapDef(HenonMap m, double escape_radius = 1e6)
        : family_(m), escape_radius_(escape_radius) {
        if (m.b == 0.0)
            throw non_invertible("Henon map with b = 0 has no inverse");
    }
    explicit MapDef(ComposedMap m, double escape_radius = 1e6)
        : family_(std::move(m)), escape_radius_(escape_radius) {
        if (std::get<ComposedMap>(family_).parts.empty())
            throw validation_error("Composed map must have at least one part");
    }

    static MapDef linear(const Mat2& m, double escape_radius = 1e6) {
        return MapDef(LinearMap{m}, escape_radius);
    }
    static MapDef henon(double a, double b, double escape_radius = 1e6) {
        return MapDef(HenonMap{a, b}, escape_radius);
    }
    static MapDef composed(std::vector<MapDef> parts, double escape_radius = 1e6) {
        return MapDef(ComposedMap{std::move(parts)}, escape_radius);
    }

    double escape_radius() const { return escape_radius_; }

    const std::variant<LinearMap, HenonMap, ComposedMap>& family() const { return family_; }

    // Image point and Jacobian of the applied map (f or f^-1) at p.
    // Throws `escaped` when the image leaves the escape radius.
    std::pair<Vec2, Mat2> step(Vec2 p, StepDirection dir) const {
        auto [q, j] = apply(p, dir);
        if (q.norm() > escape_radius_ || !q.finite())
            throw escaped(dir == StepDirection::Forward ? 1 : -1);
        return {q, j};
    }

    Vec2 forward(Vec2 p) const { return step(p, StepDirection::Forward).first; }
    Vec2 backward(Vec2 p) const { return step(p, StepDirection::Backward).first; }

    // Jacobian of the forward map at p (no escape check).
    Mat2 jacobian(Vec2 p) const { return apply(p, StepDirection::Forward).second; }

private:
    std::pair<Vec2, Mat2> apply(Vec2 p, StepDirection dir) const {
        return std::visit(
            [&](const auto& fam) { return apply_family(fam, p, dir); }, family_);
    }

    static std::pair<Vec2, Mat2> apply_family(const LinearMap& m, Vec2 p, StepDirection dir) {
        if (dir == StepDirection::Forward) return {m.matrix.apply(p), m.matrix};
        const Mat2 inv = m.matrix.inverse();
        return {inv.apply(p), inv};
    }

    static std::pair<Vec2, Mat2> apply_family(const HenonMap& m, Vec2 p, StepDirection dir) {
        if (dir == StepDirection::Forward) {
            Vec2 q{p.x * p.x - m.a - m.b * p.y, p.x};
            return {q, Mat2{2.0 * p.x, -m.b, 1.0, 0.0}};
        }
        // x = Y, y = (Y^2 - a - X) / b
        Vec2 q{p.y, (p.y * p.y - m.a - p.x) / m.b};
        return {q, Mat2{0.0, 1.0, -1.0 / m.b, 2.0 * p.y / m.b}};
    }

    static std::pair<Vec2, Mat2> apply_family(const ComposedMap& m, Vec2 p, StepDirection dir) {
        Mat2 jac = Mat2::identity();
        Vec2 q = p;
        if (dir == StepDirection::Forward) {
            for (const auto& part : m.parts) {
                auto [r, j] = part.step(q, dir);
                q = r;
                jac = j * jac;
            }
        } else {
            for (auto it = m.parts.rbegin(); it != m.parts.rend(); ++it) {
                auto [r, j] = it->step(q, dir);
                q = r;
                jac = j * jac;
            }
        }
        return {q, jac};
    }

    std::variant<LinearMap, HenonMap, ComposedMap> family_;
    double escape_radius_;
};

inline std::pair<Vec2, Mat2> step(const MapDef& map, Vec2 p, StepDirection dir) {
    return map.step(p, dir);
}

// Orbit window with the forward Jacobian stored at every surviving point.
// Escape is encoded, not thrown: `escaped_at` is the first signed iterate
// whose point left the escape radius, and n_back/n_fwd are the extents that
// were actually computed (so indexing is always valid on [-n_back, n_fwd]).
struct Orbit {
    Vec2 base;
    long long n_back = 0;
    long long n_fwd = 0;
    std::vector<Vec2> points;     // index n stored at slot n + n_back
    std::vector<Mat2> jacobians;  // forward Jacobian at each stored point
    std::optional<long long> escaped_at;

    Vec2 point(long long n) const { return points[static_cast<size_t>(n + n_back)]; }
    const Mat2& jacobian(long long n) const { return jacobians[static_cast<size_t>(n + n_back)]; }
};

inline Orbit orbit(const MapDef& map, Vec2 p, long long n_back, long long n_fwd) {
    Orbit o;
    o.base = p;
    std::vector<Vec2> back_pts;
    Vec2 q = p;
    for (long long k = 1; k <= n_back; ++k) {
        try {
            q = map.step(q, StepDirection::Backward).first;
        } catch (const escaped&) {
            o.escaped_at = -k;
            break;
        }
        back_pts.push_back(q);
    }
    o.n_back = static_cast<long long>(back_pts.size());
    for (auto it = back_pts.rbegin(); it != back_pts.rend(); ++it) o.points.push_back(*it);
    o.points.push_back(p);
    q = p;
    for (long long k = 1; k <= n_fwd; ++k) {
        try {
            q = map.step(q, StepDirection::Forward).first;
        } catch (const escaped&) {
            o.escaped_at = k;
            break;
        }
        o.points.push_back(q);
    }
    o.n_fwd = static_cast<long long>(o.points.size()) - 1 - o.n_back;
    o.jacobians.reserve(o.points.size());
    for (const auto& pt : o.points) o.jacobians.push_back(map.jacobian(pt));
    return o;
}

struct PeriodicPoint {
    Vec2 location;
    long long period = 1;
    Mat2 derivative_at_period;
    LinearClass cls = LinearClass::HyperbolicSaddle;
    std::pair<std::complex<double>, std::complex<double>> eigenvalues;
};

namespace detail {

// f^n and its Jacobian; throws `escaped` if the orbit leaves the radius.
inline std::pair<Vec2, Mat2> iterate(const MapDef& map, Vec2 p, long long n) {
    Vec2 q = p;
    Mat2 jac = Mat2::identity();
    for (long long k = 0; k < n; ++k) {
        auto [r, j] = map.step(q, StepDirection::Forward);
        q = r;
        jac = j * jac;
    }
    return {q, jac};
}

inline std::pair<std::complex<double>, std::complex<double>> eigenvalues_of(const Mat2& m) {
    const std::complex<double> tr{m.trace(), 0.0};
    const std::complex<double> disc = tr * tr - 4.0 * m.det();
    const std::complex<double> root = std::sqrt(disc);
    return {0.5 * (tr + root), 0.5 * (tr - root)};
}

}  // namespace detail

struct Box {
    double x_lo, x_hi, y_lo, y_hi;
    bool contains(Vec2 p) const {
        return p.x >= x_lo && p.x <= x_hi && p.y >= y_lo && p.y <= y_hi;
    }
};

// Newton's method on f^period - id seeded on a grid over the region.
// Candidates whose minimal period divides `period` are reported with the
// minimal period; non-isolated roots (det(Df^p - I) ~ 0 at the minimal
// period) are dropped.  One representative per orbit, lexicographically
// smallest location first.
inline std::vector<PeriodicPoint> find_periodic_points(const MapDef& map, long long period,
                                                       const Box& region, int grid) {
    constexpr int kNewtonCap = 50;
    constexpr double kConvTol = 1e-12;
    std::vector<Vec2> roots;
    auto known = [&](Vec2 p) {
        return std::any_of(roots.begin(), roots.end(),
                           [&](Vec2 r) { return dist(r, p) < 1e-6; });
    };
    // Newton on f^d - id for every divisor d of the requested period: when
    // f^period is close to the identity (e.g. rational rotations) the full-
    // period system is singular everywhere, but the low-period orbits are
    // still isolated roots of their own systems.
    auto sweep = [&](long long d) {
        for (int i = 0; i < grid; ++i) {
            for (int j = 0; j < grid; ++j) {
                Vec2 z{region.x_lo + (region.x_hi - region.x_lo) * (i + 0.5) / grid,
                       region.y_lo + (region.y_hi - region.y_lo) * (j + 0.5) / grid};
                double prev_res = std::numeric_limits<double>::infinity();
                double damping = 1.0;
                bool converged = false;
                for (int it = 0; it < kNewtonCap; ++it) {
                    Vec2 fz;
                    Mat2 jac;
                    try {
                        auto [q, J] = detail::iterate(map, z, d);
                        fz = q;
                        jac = J;
                    } catch (const escaped&) {
                        break;
                    }
                    const Vec2 res = fz - z;
                    if (res.norm() < kConvTol * (1.0 + z.norm())) {
                        converged = true;
                        break;
                    }
                    const Mat2 df{jac.a - 1.0, jac.b, jac.c, jac.d - 1.0};
                    if (std::abs(df.det()) < 1e-14 * (1.0 + jac.max_abs())) break;
                    const Vec2 delta = df.inverse().apply(res);
                    if (res.norm() > prev_res) damping *= 0.5;  // halve on residual increase
                    prev_res = res.norm();
                    z = z - delta * damping;
                    if (!z.finite()) break;
                    if (delta.norm() * damping < kConvTol * (1.0 + z.norm())) {
                        converged = true;
                        break;
                    }
                }
                if (!converged || !region.contains(z) || known(z)) continue;
                try {
                    auto [fz, jac] = detail::iterate(map, z, d);
                    (void)jac;
                    if (dist(fz, z) >= 1e-10 * (1.0 + z.norm())) continue;
                } catch (const escaped&) {
                    continue;
                }
                roots.push_back(z);
            }
        }
    };
    for (long long d = 1; d <= period; ++d)
        if (period % d == 0) sweep(d);

    std::vector<PeriodicPoint> out;
    auto lex_less = [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); };
    for (Vec2 z : roots) {
        // minimal period among the divisors of `period`
        long long min_period = period;
        for (long long d = 1; d < period; ++d) {
            if (period % d != 0) continue;
            try {
                if (dist(detail::iterate(map, z, d).first, z) < 1e-8 * (1.0 + z.norm())) {
                    min_period = d;
                    break;
                }
            } catch (const escaped&) {
            }
        }
        auto [fz, jac] = detail::iterate(map, z, min_period);
        (void)fz;
        const Mat2 df{jac.a - 1.0, jac.b, jac.c, jac.d - 1.0};
        if (std::abs(df.det()) < 1e-8 * (1.0 + jac.max_abs())) continue;  // non-isolated root
        // orbit representative: lexicographically smallest point of the orbit
        Vec2 rep = z;
        Vec2 q = z;
        for (long long k = 1; k < min_period; ++k) {
            q = map.forward(q);
            if (lex_less(q, rep)) rep = q;
        }
        auto [fr, jr] = detail::iterate(map, rep, min_period);
        (void)fr;
        PeriodicPoint pp;
        pp.location = rep;
        pp.period = min_period;
        pp.derivative_at_period = jr;
        pp.cls = classify_linear(jr);
        pp.eigenvalues = detail::eigenvalues_of(jr);
        const bool dup = std::any_of(out.begin(), out.end(), [&](const PeriodicPoint& o) {
            return dist(o.location, pp.location) < 1e-6;
        });
        if (!dup) out.push_back(pp);
    }
    std::sort(out.begin(), out.end(), [&](const PeriodicPoint& a, const PeriodicPoint& b) {
        return lex_less(a.location, b.location);
    });
    return out;
}

}  // namespace critset

#endif
