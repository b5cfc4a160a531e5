#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qcl/errors.hpp"
#include "qcl/polygon.hpp"
#include "qcl/rectangle.hpp"

using namespace qcl;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

Polygon ramp4() { return make_shape(Shape::ramp, 1.0, 4).normalized(); }

}  // namespace

TEST(Polygon, BuildRejectsBadGrids) {
    EXPECT_THROW(Polygon::build({-1.0, -0.4, 0.0}, {1.0, 1.0, 1.0}), DomainError);
    EXPECT_THROW(Polygon::build({-1.0, -0.5}, {1.0, 1.0}), DomainError);
    EXPECT_THROW(Polygon::build({-1.0, 0.0}, {1.0}), DomainError);
    EXPECT_THROW(make_shape(Shape::ramp, 1.0, 0), DomainError);
    EXPECT_THROW(parse_shape("triangle"), DomainError);
}

TEST(Polygon, SegmentsAreContinuous) {
    const Polygon p = make_shape(Shape::random, 1.0, 64, 7);
    EXPECT_LE(p.continuity_residual(), 1e-14);
    for (std::size_t j = 0; j < p.segments(); ++j) {
        const Segment s = p.segment(j);
        EXPECT_LE(std::abs(s.a * s.A + s.b - p.values()[j]), 1e-13);
        EXPECT_LE(std::abs(s.a * s.B + s.b - p.values()[j + 1]), 1e-13);
    }
}

TEST(Polygon, NormIsExact) {
    // Ramp 1 -> 0 on [-1, 0]: int x^2 = 1/3 for any N.
    for (std::size_t n : {1u, 3u, 10u}) {
        std::vector<cplx> v(n + 1);
        for (std::size_t j = 0; j <= n; ++j) v[j] = static_cast<double>(n - j) / static_cast<double>(n);
        EXPECT_NEAR(Polygon::from_values(1.0, v).norm2(), 1.0 / 3.0, 1e-15);
        EXPECT_NEAR(make_shape(Shape::ramp, 1.0, n).norm2(), 1.0, 1e-14);
    }
    EXPECT_NEAR(make_shape(Shape::random, 2.0, 17, 3).normalized().norm2(), 1.0, 1e-14);
}

TEST(Polygon, EndpointClassification) {
    EXPECT_TRUE(make_shape(Shape::half_sine, 1.0, 8).endpoints_vanish());
    EXPECT_FALSE(make_shape(Shape::ramp, 1.0, 8).endpoints_vanish());
    EXPECT_TRUE(make_shape(Shape::random, 1.0, 8, 1, true).endpoints_vanish());
}

TEST(Polygon, ExactMatchesHighPrecisionReference) {
    struct Case {
        double dt, y;
        cplx v;
    };
    const Case cases[] = {
        {0.01, 3.0, {0.016480794311299789, -0.0054180708402382654}},
        {0.01, -0.3, {0.42873292005698988, -0.012395430092687757}},
        {0.001, 5.0, {-0.003122607589722713, 0.0018727353312535262}},
        {0.1, 40.0, {-0.002360210265792646, 0.0047744705361581399}},
    };
    const Polygon p = ramp4();
    for (const auto& c : cases) {
        EXPECT_LE(rel(propagate_polygon(p, c.y, c.dt, {}, Method::exact), c.v), 1e-11) << c.dt << " " << c.y;
        EXPECT_LE(rel(propagate_polygon(p, c.y, c.dt, {}, Method::quadrature), c.v), 1e-9) << c.dt << " " << c.y;
    }
}

TEST(Polygon, ConstantPolygonIsTheRectangle) {
    const Polygon p = make_shape(Shape::constant, 1.0, 5);
    RectangleState r;
    r.left = -1.0;
    r.right = 0.0;
    for (double t : {0.01, 0.3, 2.0}) {
        r.t = t;
        for (double y : {-4.0, -0.5, 0.0, 3.0, 70.0})
            EXPECT_LE(rel(propagate_polygon(p, y, t, {}, Method::exact), propagate_rectangle(r, y)), 1e-11);
    }
}

TEST(Polygon, AsymptoticAgreesInFarField) {
    const Polygon p = make_shape(Shape::random, 1.0, 16, 11);
    const double dt = 0.1;
    for (double y : {60.0, 200.0, -150.0}) {
        const cplx ex = propagate_polygon(p, y, dt, {}, Method::exact);
        const cplx as = propagate_polygon(p, y, dt, {}, Method::asymptotic);
        EXPECT_LE(rel(as, ex), 0.05) << y;
    }
}

TEST(Polygon, AsymptoticRejectsNearField) {
    const Polygon p = ramp4();
    EXPECT_THROW(propagate_polygon(p, 0.5, 0.1, {}, Method::asymptotic), DomainError);
    EXPECT_THROW(boundary_formula(p, -0.5, 0.1, {}), DomainError);
}

TEST(Polygon, SegmentSumTelescopesToBoundary) {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Polygon p = make_shape(Shape::random, 1.0, 32, seed);
        for (double y : {10.0, 100.0, 1e4, -50.0}) worst = std::max(worst, telescoping_residual(p, y, 0.01, {}));
    }
    EXPECT_LE(worst, 1e-10);
    const Polygon hs = make_shape(Shape::half_sine, 1.0, 32);
    EXPECT_LE(std::abs(boundary_formula(hs, 50.0, 0.01, {})), 1e-15);
    EXPECT_LE(telescoping_residual(hs, 50.0, 0.01, {}), 1e-10);
}

TEST(Polygon, FarFieldDensityFallsAsInverseSquare) {
    const Polygon p = ramp4();
    const double d1 = far_field_density(p, 100.0, 0.1, {});
    const double d2 = far_field_density(p, 1000.0, 0.1, {});
    EXPECT_NEAR(d1 / d2, (1001.0 * 1001.0) / (101.0 * 101.0), 1e-9 * d1 / d2);
}

TEST(Polygon, ExactEvolutionConservesShortTimeLimit) {
    // As dt -> 0 the amplitude at an interior point returns the initial value.
    const Polygon p = ramp4();
    const double y = -0.37;
    const cplx v0 = p.values()[1] + (p.values()[2] - p.values()[1]) * ((y + 0.75) / 0.25);
    EXPECT_LE(std::abs(propagate_polygon(p, y, 1e-7, {}, Method::exact) - v0), 1e-3);
}

TEST(Polygon, FarFieldWindowDelta) {
    FarFieldWindow w;
    EXPECT_NEAR(w.effective_delta(5.0), std::sqrt(1e3 / 5.0), 1e-12);
    w.delta = 3.0;
    EXPECT_DOUBLE_EQ(w.effective_delta(5.0), 3.0);
    EXPECT_FALSE(w.contains(-1.0, 0.0, 2.0, 5.0));
}
