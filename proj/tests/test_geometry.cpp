#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "critset/geometry.hpp"

using namespace critset;

namespace {

std::mt19937_64 rng(20240817);

Mat2 random_invertible() {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (;;) {
        Mat2 m{u(rng), u(rng), u(rng), u(rng)};
        if (std::abs(m.det()) > 0.05) return m;
    }
}

double random_angle() {
    std::uniform_real_distribution<double> u(0.0, kPi);
    return u(rng);
}

// signed RP^1 displacement from a to b, in (-pi/2, pi/2]
double rp1_signed(Direction a, Direction b) {
    double d = b.theta - a.theta;
    while (d > kPi / 2) d -= kPi;
    while (d <= -kPi / 2) d += kPi;
    return d;
}

}  // namespace

TEST_CASE("g_step closed form on simple matrices") {
    CHECK(g_step(Mat2::diagonal(2.0, 0.5), Direction(0.0)) == Catch::Approx(0.25));
    CHECK(g_step(Mat2::rotation(1.234), Direction(random_angle())) == Catch::Approx(1.0));
    // Henon Jacobian at the vertical direction
    const double b = 0.3;
    const Mat2 j{2.0 * 1.7, -b, 1.0, 0.0};
    CHECK(g_step(j, Direction(kPi / 2)) == Catch::Approx(1.0 / b));
}

TEST_CASE("g_step rejects singular matrices") {
    CHECK_THROWS_AS(g_step(Mat2{1, 2, 2, 4}, Direction(0.3)), singular_matrix);
}

TEST_CASE("g_transport on simple matrices") {
    const Direction v(0.7);
    CHECK(g_transport(Mat2::identity(), v).theta == Catch::Approx(0.7));
    CHECK(g_transport(Mat2::diagonal(2.0, 0.5), Direction(kPi / 4)).theta ==
          Catch::Approx(std::atan(0.25)));
    CHECK(g_transport(Mat2::rotation(kPi / 3), Direction(0.0)).theta == Catch::Approx(kPi / 3));
}

TEST_CASE("g_step is the fiber derivative of g_transport") {
    // central finite differences on the projective circle
    const double h = 1e-6;
    for (int i = 0; i < 10000; ++i) {
        const Mat2 m = random_invertible();
        const double theta = random_angle();
        const Direction lo = g_transport(m, Direction(theta - h));
        const Direction hi = g_transport(m, Direction(theta + h));
        const double fd = std::abs(rp1_signed(lo, hi)) / (2.0 * h);
        const double g = g_step(m, Direction(theta));
        CHECK(std::abs(fd - g) <= 1e-5 * g);
    }
}

TEST_CASE("singular_pair identities") {
    SECTION("diagonal") {
        const SingularPair sp = singular_pair(Mat2::diagonal(2.0, 0.5));
        CHECK(sp.e.theta == Catch::Approx(kPi / 2));
        CHECK(sp.f.theta == Catch::Approx(0.0).margin(1e-12));
        CHECK(sp.g_e == Catch::Approx(4.0));
        CHECK(sp.g_f == Catch::Approx(0.25));
    }
    SECTION("shear") {
        const SingularPair sp = singular_pair(Mat2{1, 1, 0, 1});
        const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
        CHECK(sp.g_e == Catch::Approx(phi * phi));
        CHECK(rp1_distance(sp.e, sp.f) == Catch::Approx(kPi / 2));
        CHECK(sp.g_e * sp.g_f == Catch::Approx(1.0).epsilon(1e-10));
    }
    SECTION("conformal rejection") {
        CHECK_THROWS_AS(singular_pair(Mat2::rotation(0.7) * 3.0), conformal_matrix);
    }
}

TEST_CASE("singular pair sandwich and mapped orthogonality") {
    for (int i = 0; i < 50; ++i) {
        Mat2 m = random_invertible();
        SingularPair sp;
        try {
            sp = singular_pair(m);
        } catch (const conformal_matrix&) {
            continue;
        }
        CHECK(sp.g_e * sp.g_f == Catch::Approx(1.0).epsilon(1e-10));
        CHECK(sp.g_e >= 1.0);
        // A(e) is orthogonal to A(f)
        const double mapped = rp1_distance(g_transport(m, sp.e), g_transport(m, sp.f));
        CHECK(std::abs(mapped - kPi / 2) < 1e-9);
        // 1/g_e <= g(w) <= g_e for every direction
        for (int k = 0; k < 1000; ++k) {
            const double g = g_step(m, Direction(random_angle()));
            CHECK(g <= sp.g_e * (1 + 1e-12));
            CHECK(g >= sp.g_f * (1 - 1e-12));
        }
        // g attains its extremes at e and f
        CHECK(g_step(m, sp.e) == Catch::Approx(sp.g_e));
        CHECK(g_step(m, sp.f) == Catch::Approx(sp.g_f));
    }
}

TEST_CASE("classify_linear tags") {
    CHECK(classify_linear(Mat2{1, 1, 0, 1}) == LinearClass::Parabolic);
    CHECK(classify_linear(Mat2::identity() * 0.5) == LinearClass::Homothety);
    CHECK(classify_linear(Mat2::diagonal(2.0, 0.5)) == LinearClass::HyperbolicSaddle);
    CHECK(classify_linear(Mat2::diagonal(2.0, 3.0)) == LinearClass::NodeTwoRealEigen);
    CHECK(classify_linear(Mat2::rotation(0.4)) == LinearClass::Elliptic);
    CHECK_THROWS_AS(classify_linear(Mat2{0, 0, 0, 0}), singular_matrix);
}

TEST_CASE("classify_linear is invariant under rotation conjugation") {
    for (int i = 0; i < 200; ++i) {
        const Mat2 m = random_invertible();
        const double a = random_angle();
        const Mat2 conj = Mat2::rotation(a) * m * Mat2::rotation(-a);
        CHECK(classify_linear(m) == classify_linear(conj));
    }
}

TEST_CASE("RP1 distance and slope") {
    CHECK(rp1_distance(Direction(0.1), Direction(kPi - 0.1)) == Catch::Approx(0.2));
    CHECK(rp1_distance(Direction(0.0), Direction(kPi / 2)) == Catch::Approx(kPi / 2));
    CHECK(slope(Direction(0.0), Direction(kPi / 4)) == Catch::Approx(1.0));
    CHECK(slope(Direction(0.3), Direction(0.3)) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("direction normalization identifies v and -v") {
    for (int i = 0; i < 100; ++i) {
        std::uniform_real_distribution<double> u(-10.0, 10.0);
        const double t = u(rng);
        CHECK(rp1_distance(Direction(t), Direction(t + kPi)) < 1e-12);
        CHECK(Direction(t).theta >= 0.0);
        CHECK(Direction(t).theta < kPi);
    }
}

TEST_CASE("real_eigen returns eigendirections") {
    const Mat2 m{3.0, 1.0, 0.0, 0.5};
    const EigenPair e = real_eigen(m);
    CHECK(e.lambda_major == Catch::Approx(3.0));
    CHECK(e.lambda_minor == Catch::Approx(0.5));
    // m maps each eigendirection to itself
    CHECK(rp1_distance(g_transport(m, e.major), e.major) < 1e-12);
    CHECK(rp1_distance(g_transport(m, e.minor), e.minor) < 1e-12);
    CHECK_THROWS_AS(real_eigen(Mat2::rotation(1.0)), eigen_degenerate);
}
