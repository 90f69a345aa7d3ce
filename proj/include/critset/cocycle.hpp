#ifndef CRITSET_COCYCLE_HPP
#define CRITSET_COCYCLE_HPP

// Windowed products of the projective cocycle in log scale, Lyapunov
// exponents, Pliss times, and the cumulative-product split.
//
// Everything is accumulated in log scale with per-step renormalized
// directions; windows of a few dozen steps on an expanding map would
// overflow in linear scale.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "critset/dynamics.hpp"
#include "critset/geometry.hpp"

namespace critset {

// log g^n(v) and the transported direction G^n(v) for n in [-n_back, n_fwd].
struct CocycleTrace {
    Vec2 base;
    Direction initial;
    long long n_back = 0;
    long long n_fwd = 0;
    std::vector<double> log_g;        // slot n + n_back; log_g at n = 0 is 0
    std::vector<Direction> directions;
    std::optional<long long> escaped;

    double log_g_at(long long n) const { return log_g[static_cast<size_t>(n + n_back)]; }
    Direction direction_at(long long n) const {
        return directions[static_cast<size_t>(n + n_back)];
    }
};

inline CocycleTrace trace(const MapDef& map, Vec2 p, Direction v, long long n_back,
                          long long n_fwd) {
    const Orbit o = orbit(map, p, n_back, n_fwd);
    CocycleTrace t;
    t.base = p;
    t.initial = v;
    t.n_back = o.n_back;
    t.n_fwd = o.n_fwd;
    t.escaped = o.escaped_at;
    const size_t len = o.points.size();
    t.log_g.assign(len, 0.0);
    t.directions.assign(len, Direction{});
    const size_t zero = static_cast<size_t>(o.n_back);
    t.directions[zero] = v;
    for (long long n = 0; n < o.n_fwd; ++n) {
        const Mat2& j = o.jacobian(n);
        const Direction d = t.direction_at(n);
        t.log_g[zero + n + 1] = t.log_g[zero + n] + std::log(g_step(j, d));
        t.directions[zero + n + 1] = g_transport(j, d);
    }
    // backward leg: stepping n -> n-1 applies the inverse of the Jacobian
    // that carried n-1 -> n, so log_g[-n] is log |g^{-n}(v)|
    for (long long n = 0; n > -o.n_back; --n) {
        const Mat2 jinv = o.jacobian(n - 1).inverse();
        const Direction d = t.direction_at(n);
        t.log_g[zero + n - 1] = t.log_g[zero + n] + std::log(g_step(jinv, d));
        t.directions[zero + n - 1] = g_transport(jinv, d);
    }
    return t;
}

struct LyapunovEstimate {
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
    long long horizon = 0;
};

// Forward Lyapunov exponents from the ordered Jacobian product, stabilized
// by QR re-orthonormalization every `renorm_every` steps.  lambda_minus
// comes from the determinant identity.
inline LyapunovEstimate lyapunov(const MapDef& map, Vec2 p, long long horizon,
                                 long long renorm_every = 10) {
    Mat2 q = Mat2::identity();
    Mat2 block = Mat2::identity();
    double sum_major = 0.0;
    double sum_logdet = 0.0;
    Vec2 z = p;
    long long pending = 0;
    auto flush = [&]() {
        if (pending == 0) return;
        // QR of block * q: Gram-Schmidt on the columns
        const Mat2 b = block * q;
        Vec2 c0{b.a, b.c}, c1{b.b, b.d};
        const double r00 = c0.norm();
        c0 = c0 / r00;
        const double r01 = c0.dot(c1);
        c1 = c1 - c0 * r01;
        const double r11 = c1.norm();
        c1 = c1 / r11;
        q = Mat2{c0.x, c1.x, c0.y, c1.y};
        sum_major += std::log(r00);
        block = Mat2::identity();
        pending = 0;
    };
    for (long long n = 0; n < horizon; ++n) {
        auto [zn, j] = map.step(z, StepDirection::Forward);  // throws `escaped`
        z = zn;
        block = j * block;
        sum_logdet += std::log(std::abs(j.det()));
        if (++pending == renorm_every) flush();
    }
    flush();
    LyapunovEstimate est;
    est.horizon = horizon;
    est.lambda_plus = sum_major / static_cast<double>(horizon);
    est.lambda_minus = sum_logdet / static_cast<double>(horizon) - est.lambda_plus;
    if (est.lambda_plus < est.lambda_minus) std::swap(est.lambda_plus, est.lambda_minus);
    return est;
}

struct PlissTimes {
    double gamma0 = 0.0;
    double gamma1 = 0.0;
    double bound_a = 0.0;
    std::vector<long long> times;  // sorted start indices, 0-based
    double density = 0.0;
};

// All indices t such that every block product a_t * ... * a_k (t <= k < n)
// stays strictly below gamma1^{k-t+1}.  This is the canonical maximal set;
// the lemma's existential statement and density bound follow from it.
inline PlissTimes pliss_times(const std::vector<double>& seq, double gamma0, double gamma1,
                              double bound_a) {
    if (!(0.0 < gamma0 && gamma0 < gamma1))
        throw validation_error("pliss_times requires 0 < gamma0 < gamma1");
    if (bound_a <= 1.0) throw validation_error("pliss_times requires bound_a > 1");
    const size_t n = seq.size();
    double total = 0.0;
    for (double a : seq) {
        if (!(a > 1.0 / bound_a && a < bound_a))
            throw validation_error("pliss_times sequence entry outside (1/a, a)");
        total += std::log(a);
    }
    if (!(total < static_cast<double>(n) * std::log(gamma0))) throw empty_hypothesis();

    // S[j] = sum_{i<j} (log a_i - log gamma1); t is a Pliss time iff the
    // partial sums never return to level S[t]:  max_{j>t} S[j] < S[t].
    std::vector<double> s(n + 1, 0.0);
    const double lg1 = std::log(gamma1);
    for (size_t i = 0; i < n; ++i) s[i + 1] = s[i] + std::log(seq[i]) - lg1;
    PlissTimes out;
    out.gamma0 = gamma0;
    out.gamma1 = gamma1;
    out.bound_a = bound_a;
    double tail_max = -std::numeric_limits<double>::infinity();
    for (size_t j = n; j-- > 0;) {
        tail_max = std::max(tail_max, s[j + 1]);
        if (tail_max < s[j]) out.times.push_back(static_cast<long long>(j));
    }
    std::reverse(out.times.begin(), out.times.end());
    out.density = static_cast<double>(out.times.size()) / static_cast<double>(n);
    return out;
}

// Index K (1-based) at which the prefix product of the sequence is minimal
// (smallest index on ties).  When the full product is >= 1 this K satisfies
// both conclusions of the splitting claim: every suffix product starting
// after K and every reversed-prefix inverse product ending at K is >= 1.
// The empty prefix (P_0 = 1) competes in the argmin: without it the Claim's
// conclusions fail whenever every prefix product exceeds 1 (e.g. {4, 1/2, 4}).
// K = 0 then means the split sits before the first factor.  Ties prefer the
// smallest positive index.
inline long long cumulative_min_split(const std::vector<double>& seq) {
    if (seq.empty()) throw validation_error("cumulative_min_split on empty sequence");
    double sum = 0.0, best = std::numeric_limits<double>::infinity();
    long long k = 1;
    for (size_t i = 0; i < seq.size(); ++i) {
        sum += std::log(seq[i]);
        if (sum < best) {
            best = sum;
            k = static_cast<long long>(i) + 1;
        }
    }
    if (sum < -1e-9) throw hypothesis_failed();
    return best <= 0.0 ? k : 0;
}

}  // namespace critset

#endif
