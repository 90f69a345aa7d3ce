#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "critset/domination.hpp"

using namespace critset;

namespace {

// flatten the orbits of all saddle periodic points of periods 1..max_period:
// a finite f-invariant sample set on the non-escaping locus
std::vector<Vec2> periodic_samples(const MapDef& map, long long max_period) {
    std::vector<Vec2> out;
    for (long long p = 1; p <= max_period; ++p) {
        for (const auto& pp : find_periodic_points(map, p, Box{-4, 4, -4, 4}, 24)) {
            if (pp.period != p) continue;  // already collected at its own period
            Vec2 q = pp.location;
            for (long long k = 0; k < pp.period; ++k) {
                out.push_back(q);
                q = map.forward(q);
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("splitting of a diagonal saddle") {
    const MapDef map = MapDef::linear(Mat2::diagonal(2.0, 0.5));
    const SplittingEstimate est = estimate_splitting(map, {0, 0}, 10);
    CHECK(rp1_distance(est.F, Direction(0.0)) < 1e-9);
    CHECK(rp1_distance(est.E, Direction(kPi / 2)) < 1e-9);
    CHECK(est.angle == Catch::Approx(kPi / 2));
}

TEST_CASE("splitting matches eigendirections at a henon fixed point") {
    const double a = 6.0, b = 0.3;
    const MapDef map = MapDef::henon(a, b);
    const double x = ((1 + b) + std::sqrt((1 + b) * (1 + b) + 4 * a)) / 2;
    const SplittingEstimate est = estimate_splitting(map, {x, x}, 10);
    const EigenPair eig = real_eigen(map.jacobian({x, x}));
    CHECK(rp1_distance(est.F, eig.major) < 1e-6);
    CHECK(rp1_distance(est.E, eig.minor) < 1e-6);
    CHECK(est.angle > 0.1);
}

TEST_CASE("splitting degenerates on conformal maps") {
    CHECK_THROWS_AS(estimate_splitting(MapDef::linear(Mat2::rotation(0.8)), {0, 0}, 10),
                    degenerate_angle);
}

TEST_CASE("condition star on the diagonal saddle") {
    const MapDef map = MapDef::linear(Mat2::diagonal(2.0, 0.5));
    const DominationReport rep = condition_star(map, {{0, 0}}, 10, 0.2, 5, 10);
    CHECK(rep.condition_star_holds);
    CHECK(rep.violations.empty());
    // along F the window ratio is exactly -log 4 per step
    CHECK(rep.max_ratio == Catch::Approx(-std::log(4.0)).margin(1e-9));
}

TEST_CASE("condition star flags conformal degeneracy") {
    const MapDef map = MapDef::linear(Mat2::identity() * 0.5);
    const DominationReport rep = condition_star(map, {{0, 0}}, 10, 0.2, 5, 10);
    CHECK(!rep.condition_star_holds);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].tag == ViolationTag::DegenerateAngle);
}

TEST_CASE("condition star fails without domination") {
    // an elliptic product has no dominated direction: the estimated F is
    // meaningless and the window ratio exceeds the bound somewhere
    const MapDef map = MapDef::linear(Mat2::rotation(1.0) * 1.01);
    CHECK_THROWS_AS(estimate_splitting(map, {0, 0}, 10), degenerate_angle);
}

TEST_CASE("condition star on the henon horseshoe samples") {
    const MapDef map = MapDef::henon(6.0, 0.3);
    const auto samples = periodic_samples(map, 4);
    REQUIRE(samples.size() >= 4);
    const DominationReport rep = condition_star(map, samples, 10, 0.2, 40, 10);
    CHECK(rep.condition_star_holds);
    CHECK(std::log1p(0.2) - rep.max_ratio >= 0.3);
}

TEST_CASE("cone field on the diagonal saddle") {
    const MapDef map = MapDef::linear(Mat2::diagonal(2.0, 0.5));
    const ConeField cone{{Direction(0.0)}, kPi / 8, {}};
    const ConeFieldReport rep = verify_cone_field(map, {{0, 0}}, cone, 5);
    CHECK(rep.invariant);
    CHECK(rep.expansion_gap);
    CHECK(rep.ok());
    CHECK(rep.min_margin > 0.0);
    CHECK(rep.min_g_ratio > 1.5);
}

TEST_CASE("cone field around the contracting direction fails") {
    const MapDef map = MapDef::linear(Mat2::diagonal(2.0, 0.5));
    const ConeField cone{{Direction(kPi / 2)}, kPi / 8, {}};
    const ConeFieldReport rep = verify_cone_field(map, {{0, 0}}, cone, 5);
    CHECK(!rep.ok());
}

TEST_CASE("cone field validation") {
    const MapDef map = MapDef::linear(Mat2::diagonal(2.0, 0.5));
    CHECK_THROWS_AS(verify_cone_field(map, {{0, 0}}, ConeField{{}, kPi / 8, {}}, 3),
                    validation_error);
    CHECK_THROWS_AS(verify_cone_field(map, {{0, 0}}, ConeField{{Direction(0)}, kPi / 2, {}}, 3),
                    validation_error);
    // a sample whose image has no nearby sample trips the mesh check
    const MapDef henon = MapDef::henon(1.4, 0.3);
    CHECK_THROWS_AS(
        verify_cone_field(henon, {{0.5, 0.5}}, ConeField{{Direction(0)}, kPi / 8, {}}, 3, 0.01),
        mesh_too_coarse);
}

TEST_CASE("cone field on the henon horseshoe periodic mesh") {
    const MapDef map = MapDef::henon(6.0, 0.3);
    const auto samples = periodic_samples(map, 4);
    REQUIRE(!samples.empty());
    ConeField cone;
    cone.half_width = kPi / 6;
    for (Vec2 p : samples) {
        const SplittingEstimate est = estimate_splitting(map, p, 10);
        cone.centers.push_back(est.F);
        cone.co_centers.push_back(est.E);  // the splitting is oblique
    }
    const ConeFieldReport rep = verify_cone_field(map, samples, cone, 8, 1e-6);
    CHECK(rep.ok());
    CHECK(rep.edges_checked >= static_cast<long long>(samples.size()));
}
