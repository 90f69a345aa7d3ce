#ifndef CRITSET_GEOMETRY_HPP
#define CRITSET_GEOMETRY_HPP

// Exact 2x2 linear algebra and projective-line (RP^1) geometry.
//
// Directions are stored as angles in [0, pi): a direction and its negative
// are the same point of RP^1.  The per-step quantities g and G are the
// fiber derivative and the induced action of a matrix on RP^1:
//
//   G(v) = Mv/|Mv|,   g(v) = |det M| / |Mv|^2.

#include <cmath>
#include <numbers>

#include "critset/errors.hpp"

namespace critset {

inline constexpr double kDetFloor = 1e-300;
inline constexpr double kConformalTol = 1e-12;
inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x, double y) : x(x), y(y) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }

    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double cross(Vec2 o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline double dist(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Mat2 {
    // row-major: [[a, b], [c, d]]
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    Mat2() = default;
    Mat2(double a, double b, double c, double d) : a(a), b(b), c(c), d(d) {}

    static Mat2 identity() { return {1, 0, 0, 1}; }
    static Mat2 diagonal(double p, double q) { return {p, 0, 0, q}; }
    static Mat2 rotation(double angle) {
        const double co = std::cos(angle), si = std::sin(angle);
        return {co, -si, si, co};
    }

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }

    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }

    Mat2 transpose() const { return {a, c, b, d}; }

    Mat2 inverse(double det_floor = kDetFloor) const {
        const double dt = det();
        if (std::abs(dt) < det_floor) throw singular_matrix();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)),
                        std::max(std::abs(c), std::abs(d)));
    }
    bool finite() const {
        return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
    }
};

// A point of RP^1, stored as an angle normalized into [0, pi).
struct Direction {
    double theta = 0.0;

    Direction() = default;
    explicit Direction(double angle) : theta(normalize(angle)) {}

    static double normalize(double angle) {
        double t = std::fmod(angle, kPi);
        if (t < 0) t += kPi;
        if (t >= kPi) t -= kPi;  // fmod round-off at the seam
        return t;
    }

    static Direction of_vector(Vec2 v) { return Direction(std::atan2(v.y, v.x)); }

    Vec2 unit() const { return {std::cos(theta), std::sin(theta)}; }
    Direction orthogonal() const { return Direction(theta + kPi / 2); }
};

// RP^1 metric: angular distance with v ~ -v identified; values in [0, pi/2].
inline double rp1_distance(Direction u, Direction v) {
    double d = std::abs(u.theta - v.theta);
    return std::min(d, kPi - d);
}

// |tan| of the RP^1 angle between the two directions.
inline double slope(Direction u, Direction v) {
    return std::abs(std::tan(rp1_distance(u, v)));
}

enum class LinearClass {
    HyperbolicSaddle,
    NodeTwoRealEigen,
    Homothety,
    Elliptic,
    Parabolic,
};

inline const char* to_string(LinearClass c) {
    switch (c) {
        case LinearClass::HyperbolicSaddle: return "HyperbolicSaddle";
        case LinearClass::NodeTwoRealEigen: return "NodeTwoRealEigen";
        case LinearClass::Homothety: return "Homothety";
        case LinearClass::Elliptic: return "Elliptic";
        case LinearClass::Parabolic: return "Parabolic";
    }
    return "?";
}

// Most contracted (e) and most expanded (f) directions of a matrix,
// with the fiber derivative evaluated there.  g_e * g_f == 1 and g_e >= 1.
struct SingularPair {
    Direction e;
    Direction f;
    double g_e = 1.0;
    double g_f = 1.0;
};

inline double g_step(const Mat2& m, Direction v, double det_floor = kDetFloor) {
    const double dt = std::abs(m.det());
    if (dt < det_floor) throw singular_matrix();
    return dt / m.apply(v.unit()).norm2();
}

inline Direction g_transport(const Mat2& m, Direction v, double det_floor = kDetFloor) {
    if (std::abs(m.det()) < det_floor) throw singular_matrix();
    return Direction::of_vector(m.apply(v.unit()));
}

// Singular values of m, largest first.
inline void singular_values(const Mat2& m, double& s_max, double& s_min) {
    // eigenvalues of the Gram matrix m^T m
    const double p = m.a * m.a + m.c * m.c;
    const double q = m.a * m.b + m.c * m.d;
    const double r = m.b * m.b + m.d * m.d;
    const double mean = 0.5 * (p + r);
    const double h = std::hypot(0.5 * (p - r), q);
    s_max = std::sqrt(std::max(mean + h, 0.0));
    s_min = std::sqrt(std::max(mean - h, 0.0));
}

inline SingularPair singular_pair(const Mat2& m, double det_floor = kDetFloor,
                                  double conformal_tol = kConformalTol) {
    if (std::abs(m.det()) < det_floor) throw singular_matrix();
    const double p = m.a * m.a + m.c * m.c;
    const double q = m.a * m.b + m.c * m.d;
    const double r = m.b * m.b + m.d * m.d;
    double s_max, s_min;
    singular_values(m, s_max, s_min);
    if (s_max - s_min <= conformal_tol * s_max) throw conformal_matrix();
    // eigenvector of the Gram matrix for the larger eigenvalue: most expanded
    const Direction f{0.5 * std::atan2(2.0 * q, p - r)};
    SingularPair sp;
    sp.f = f;
    sp.e = f.orthogonal();
    sp.g_e = s_max / s_min;
    sp.g_f = s_min / s_max;
    return sp;
}

inline LinearClass classify_linear(const Mat2& m, double det_floor = kDetFloor,
                                   double disc_tol = 1e-9) {
    const double dt = m.det();
    if (std::abs(dt) < det_floor) throw singular_matrix();
    const double tr = m.trace();
    const double disc = tr * tr - 4.0 * dt;
    const double scale = tr * tr + std::abs(dt);
    const double scalar_tol = 1e-9 * m.max_abs();
    const bool scalar = std::abs(m.b) <= scalar_tol && std::abs(m.c) <= scalar_tol &&
                        std::abs(m.a - m.d) <= scalar_tol;
    if (disc < -disc_tol * scale) return LinearClass::Elliptic;
    if (disc <= disc_tol * scale)
        return scalar ? LinearClass::Homothety : LinearClass::Parabolic;
    const double root = std::sqrt(disc);
    const double l1 = 0.5 * (tr + root);
    const double l2 = 0.5 * (tr - root);
    if ((std::abs(l1) - 1.0) * (std::abs(l2) - 1.0) < 0.0)
        return LinearClass::HyperbolicSaddle;
    return LinearClass::NodeTwoRealEigen;
}

// Real eigen-directions of a 2x2 matrix with distinct real eigenvalues.
// Returns the eigenvalues largest-modulus first along with their directions.
struct EigenPair {
    double lambda_major = 0.0;  // larger modulus
    double lambda_minor = 0.0;
    Direction major;
    Direction minor;
};

inline EigenPair real_eigen(const Mat2& m, double disc_tol = 1e-12) {
    const double tr = m.trace();
    const double disc = tr * tr - 4.0 * m.det();
    if (disc <= disc_tol * (tr * tr + std::abs(m.det()))) throw eigen_degenerate();
    const double root = std::sqrt(disc);
    double l1 = 0.5 * (tr + root);
    double l2 = 0.5 * (tr - root);
    if (std::abs(l2) > std::abs(l1)) std::swap(l1, l2);
    auto eigendir = [&](double lambda) {
        // (m - lambda I) v = 0; pick the better-conditioned row
        const Vec2 row0{m.a - lambda, m.b};
        const Vec2 row1{m.c, m.d - lambda};
        const Vec2 row = row0.norm2() >= row1.norm2() ? row0 : row1;
        return Direction::of_vector({-row.y, row.x});
    };
    return {l1, l2, eigendir(l1), eigendir(l2)};
}

}  // namespace critset

#endif
