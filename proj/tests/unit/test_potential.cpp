#include <gtest/gtest.h>

#include <cmath>

#include "qcl/errors.hpp"
#include "qcl/moments.hpp"
#include "qcl/polygon.hpp"
#include "qcl/potential.hpp"

using namespace qcl;

TEST(Potential, BuiltIns) {
    EXPECT_DOUBLE_EQ(gaussian_potential(2.0).v(1.0), 2.0 * std::exp(-1.0));
    EXPECT_DOUBLE_EQ(well_potential(3.0).v(-0.5), 3.0);
    EXPECT_DOUBLE_EQ(well_potential(3.0).v(0.5), 0.0);
    EXPECT_DOUBLE_EQ(harmonic_clipped_potential(1.0).v(5.0), 1.0);
    EXPECT_DOUBLE_EQ(harmonic_clipped_potential(1.0).v(0.5), 0.25);
    EXPECT_EQ(make_potential("well", 1.0).name, "well");
    EXPECT_THROW(make_potential("coulomb", 1.0), DomainError);
    EXPECT_EQ(parse_convention("literal"), PhaseConvention::literal);
    EXPECT_THROW(parse_convention("other"), DomainError);
}

TEST(Potential, BoundIsChecked) {
    PotentialSpec v{[](double x) { return 5.0 * x; }, 1.0, "line"};
    EXPECT_THROW(v.validate(), DomainError);
    v.bound = 5.0;
    EXPECT_NO_THROW(v.validate());
}

TEST(Potential, ZeroPotentialIsFreeEvolution) {
    const Polygon p = make_shape(Shape::random, 1.0, 8, 3).normalized();
    const PotentialSpec zero{[](double) { return 0.0; }, 0.0, "zero"};
    for (double y : {-0.4, 2.0, 30.0}) {
        const cplx a = propagate_short_time_with_potential(p, zero, 0.05, y);
        const cplx b = propagate_polygon(p, y, 0.05, {}, Method::quadrature);
        EXPECT_EQ(a, b) << y;
    }
}

TEST(Potential, ConstantPotentialIsAGlobalPhase) {
    const Polygon p = make_shape(Shape::ramp, 1.0, 4).normalized();
    const double v0 = 0.8, dt = 0.1;
    const PotentialSpec c{[v0](double) { return v0; }, v0, "const"};
    const cplx free = propagate_polygon(p, 3.0, dt, {}, Method::exact);
    const cplx conv = propagate_short_time_with_potential(p, c, dt, 3.0);
    const cplx lit = propagate_short_time_with_potential(p, c, dt, 3.0, {}, PhaseConvention::literal);
    EXPECT_LE(std::abs(conv - free * std::polar(1.0, -v0 * dt)), 1e-9);
    EXPECT_LE(std::abs(lit - free * std::polar(1.0, v0 * dt)), 1e-9);
}

TEST(Potential, ValidityWindow) {
    const Polygon p = make_shape(Shape::ramp, 1.0, 4);
    EXPECT_THROW(propagate_short_time_with_potential(p, gaussian_potential(2.0), 0.1, 1.0), ValidityError);
    EXPECT_NO_THROW(propagate_short_time_with_potential(p, gaussian_potential(1.0), 0.1, 1.0));
}

TEST(Potential, TailExponentUnchangedForJump) {
    const Polygon p = make_shape(Shape::ramp, 1.0, 8).normalized();
    const PotentialSpec v = gaussian_potential(1.0);
    const auto density = [&](double y) { return std::norm(propagate_short_time_with_potential(p, v, 0.1, y)); };
    const TailFit f = tail_exponent_fit(density, 30.0, 3e3, 40);
    EXPECT_NEAR(f.exponent, -2.0, 0.05);
}
