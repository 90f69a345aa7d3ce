#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "critset/manifolds.hpp"

using namespace critset;

namespace {

PeriodicPoint diag_saddle() {
    PeriodicPoint pp;
    pp.location = {0, 0};
    pp.period = 1;
    pp.derivative_at_period = Mat2::diagonal(2.0, 0.5);
    pp.cls = LinearClass::HyperbolicSaddle;
    pp.eigenvalues = {2.0, 0.5};
    return pp;
}

ManifoldBranch polyline_branch(std::vector<Vec2> pts) {
    ManifoldBranch br;
    br.polyline = std::move(pts);
    for (size_t i = 1; i < br.polyline.size(); ++i)
        br.arclength += dist(br.polyline[i - 1], br.polyline[i]);
    return br;
}

double dist_to_polyline(const std::vector<Vec2>& poly, Vec2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < poly.size(); ++i) {
        const Vec2 seg = poly[i + 1] - poly[i];
        const double len2 = seg.norm2();
        double t = len2 > 0.0 ? (p - poly[i]).dot(seg) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, dist(p, poly[i] + seg * t));
    }
    return best;
}

}  // namespace

TEST_CASE("unstable branch of a linear saddle is the expanding axis") {
    const MapDef map = MapDef::linear(Mat2::diagonal(2.0, 0.5));
    const ManifoldBranch br =
        grow_branch(map, diag_saddle(), BranchKind::Unstable, BranchSide::Plus, 3.0);
    REQUIRE(br.polyline.size() >= 2);
    CHECK(br.arclength >= 2.9);
    for (const Vec2& p : br.polyline) {
        CHECK(std::abs(p.y) < 1e-9);
        CHECK(p.x >= -1e-12);
    }
    const ManifoldBranch minus =
        grow_branch(map, diag_saddle(), BranchKind::Unstable, BranchSide::Minus, 3.0);
    for (const Vec2& p : minus.polyline) CHECK(p.x <= 1e-12);

    const ManifoldBranch st =
        grow_branch(map, diag_saddle(), BranchKind::Stable, BranchSide::Plus, 3.0);
    for (const Vec2& p : st.polyline) CHECK(std::abs(p.x) < 1e-9);
}

TEST_CASE("grow_branch rejects non-saddles") {
    PeriodicPoint pp = diag_saddle();
    pp.derivative_at_period = Mat2::rotation(1.0);
    pp.cls = LinearClass::Elliptic;
    const MapDef map = MapDef::linear(Mat2::rotation(1.0));
    CHECK_THROWS_AS(grow_branch(map, pp, BranchKind::Unstable, BranchSide::Plus, 1.0),
                    not_a_saddle);
}

TEST_CASE("henon unstable branch is locally invariant") {
    const MapDef map = MapDef::henon(6.0, 0.3);
    const auto fixed = find_periodic_points(map, 1, Box{-10, 10, -10, 10}, 24);
    REQUIRE(!fixed.empty());
    const PeriodicPoint saddle = fixed.front();
    BranchOptions opt;
    opt.max_gap = 0.02;
    const ManifoldBranch br =
        grow_branch(map, saddle, BranchKind::Unstable, BranchSide::Plus, 6.0, opt);
    REQUIRE(br.polyline.size() > 10);
    CHECK(dist(br.polyline.front(), saddle.location) < 1e-3);
    CHECK(br.max_gap <= opt.max_gap * (1.0 + 1e-9));
    // invariance: the second backward image of each vertex stays on the same
    // polyline (the saddle eigenvalues are negative, so f swaps the sides)
    for (size_t i = 0; i < br.polyline.size(); i += 7) {
        const Vec2 q = map.backward(map.backward(br.polyline[i]));
        if (dist(q, saddle.location) < 1e-4) continue;
        CHECK(dist_to_polyline(br.polyline, q) < 1e-3);
    }
}

TEST_CASE("find_intersections on synthetic polylines") {
    const ManifoldBranch h = polyline_branch({{-1, 0}, {-0.5, 0}, {0.5, 0}, {1, 0}});
    const ManifoldBranch v = polyline_branch({{0, -1}, {0, -0.4}, {0, 0.6}, {0, 1}});
    const auto events = find_intersections(h, v);
    REQUIRE(events.size() == 1);
    CHECK(dist(events[0].point, {0, 0}) < 1e-12);
    CHECK(events[0].angle == Catch::Approx(kPi / 2));

    // disjoint curves
    const ManifoldBranch far = polyline_branch({{5, 5}, {6, 5}});
    CHECK(find_intersections(h, far).empty());
}

TEST_CASE("classify_crossing distinguishes the three contact types") {
    // dense straight stable curve along the x-axis
    std::vector<Vec2> axis;
    for (int i = -100; i <= 100; ++i) axis.push_back({i * 0.02, 0.0});
    const ManifoldBranch stable = polyline_branch(axis);

    auto parabola = [&](double shift) {
        std::vector<Vec2> pts;
        for (int i = -100; i <= 100; ++i) {
            const double x = i * 0.02;
            pts.push_back({x, x * x + shift});
        }
        return polyline_branch(pts);
    };

    // transversal line through the origin
    std::vector<Vec2> diag;
    for (int i = -100; i <= 100; ++i) diag.push_back({i * 0.02, i * 0.02});
    const ManifoldBranch crossing = polyline_branch(diag);
    auto ev = find_intersections(stable, crossing);
    REQUIRE(!ev.empty());
    CHECK(classify_crossing(stable, crossing, ev[0], 0.5) == CrossingClass::Crossing);

    // parabola tangent from above: touches without changing side
    auto ev2 = find_intersections(stable, parabola(0.0));
    REQUIRE(!ev2.empty());
    const CrossingClass c2 = classify_crossing(stable, parabola(0.0), ev2[0], 0.5);
    CHECK(c2 == CrossingClass::OneSided);

    // band larger than the stable span is rejected
    CHECK_THROWS_AS(classify_crossing(stable, crossing, ev[0], 10.0), undetermined);
}

TEST_CASE("henon homoclinic intersections exist at a = 6") {
    const MapDef map = MapDef::henon(6.0, 0.3);
    const auto fixed = find_periodic_points(map, 1, Box{-10, 10, -10, 10}, 24);
    REQUIRE(!fixed.empty());
    BranchOptions opt;
    opt.max_gap = 0.05;
    const ManifoldBranch u =
        grow_branch(map, fixed.front(), BranchKind::Unstable, BranchSide::Plus, 40.0, opt);
    const ManifoldBranch s =
        grow_branch(map, fixed.front(), BranchKind::Stable, BranchSide::Plus, 40.0, opt);
    const auto events = find_intersections(u, s);
    CHECK(!events.empty());
    for (const auto& e : events) {
        CHECK(e.angle >= 0.0);
        CHECK(e.angle <= kPi / 2 + 1e-12);
    }
}

TEST_CASE("first_tangency input validation") {
    CHECK_THROWS_AS(first_tangency(0.0, {1.0, 6.0}, 1e-3), non_invertible);
    CHECK_THROWS_AS(first_tangency(0.3, {6.0, 1.0}, 1e-3), bracket_invalid);
}
