#include <gtest/gtest.h>

#include <cmath>

#include "qcl/errors.hpp"
#include "qcl/numerics.hpp"
#include "qcl/rectangle.hpp"

using namespace qcl;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

RectangleState at(double t) {
    RectangleState s;
    s.t = t;
    return s;
}

}  // namespace

TEST(Rectangle, MatchesHighPrecisionReference) {
    struct Case {
        double t, y;
        cplx v;
    };
    // mpmath quadrature at 30 digits, see tests/oracles/generate.py.
    const Case cases[] = {
        {1.0, 10.0, {-0.075042673054949038, -0.038035133658225522}},
        {0.01, 0.5, {0.87636319535042133, -0.099928773791597468}},
        {0.1, 2.0, {0.12381831459352878, -0.12811403254382955}},
        {1.0, -3.5, {0.10749096966920619, 0.14617300078164853}},
    };
    for (const auto& c : cases) EXPECT_LE(rel(propagate_rectangle(at(c.t), c.y), c.v), 1e-12) << c.t << " " << c.y;
}

TEST(Rectangle, MatchesOracleAtTen) {
    const RectangleState s = at(1.0);
    const double alpha = s.alpha();
    const cplx q = std::sqrt(cplx(0.0, -alpha / std::numbers::pi)) *
                   oscillatory_quadrature(0.0, 1.0, 0.0, 1.0, 10.0, alpha, QuadTolerance{1e-12, 1 << 26});
    EXPECT_LE(rel(propagate_rectangle(s, 10.0), q), 1e-10);
}

TEST(Rectangle, InitialConditionRecovery) {
    EXPECT_NEAR(std::abs(propagate_rectangle(at(1e-8), 0.5)), 1.0, 1e-3);
    EXPECT_LE(std::abs(propagate_rectangle(at(1e-8), 1.5)), 1e-3);
}

TEST(Rectangle, MirrorSymmetry) {
    const RectangleState s = at(1.0);
    EXPECT_NEAR(std::abs(propagate_rectangle(s, 0.8)), std::abs(propagate_rectangle(s, 0.2)), 1e-14);
}

TEST(Rectangle, InvalidState) {
    EXPECT_THROW(propagate_rectangle(at(0.0), 1.0), DomainError);
    RectangleState s;
    s.left = 1.0;
    s.right = 0.0;
    EXPECT_THROW(propagate_rectangle(s, 1.0), DomainError);
    EXPECT_THROW(propagate_rectangle(at(1.0), NAN), DomainError);
}

TEST(RectangleTail, ErrorDecaysAsInverseSquare) {
    const RectangleState s = at(1.0);
    auto err = [&](double y) { return rel(rectangle_tail(s, y), propagate_rectangle(s, y)); };
    const double e200 = err(200.0), e2000 = err(2000.0);
    EXPECT_LE(e200, 10.0 * e2000 * 100.0);
    EXPECT_LE(e2000, 1e-5);
}

TEST(RectangleTail, EnvelopeBound) {
    const RectangleState s = at(1.0);
    const double bound = (2.0 / (std::numbers::pi * std::numbers::pi)) * 4.0 * 2.0;
    for (double y = 100.0; y < 1e4; y *= 1.013) EXPECT_LE(std::norm(rectangle_tail(s, y)) * y * y, bound);
}

TEST(RectangleTail, ReflectionSwapsPoles) {
    const RectangleState s = at(1.0);
    for (double y : {150.0, 700.0}) {
        const cplx right = rectangle_tail(s, y), left = rectangle_tail(s, 1.0 - y);
        EXPECT_LE(std::abs(right - left), 1e-14 * std::abs(right)) << y;
    }
}

TEST(RectangleTail, NearFieldRejected) {
    const RectangleState s = at(1.0);
    EXPECT_THROW(rectangle_tail(s, 5.0), DomainError);
    EXPECT_THROW(rectangle_tail(s, 0.5), DomainError);
    const double m = rectangle_far_field_margin(s);
    EXPECT_NO_THROW(rectangle_tail(s, 1.0 + m * 1.01));
}

TEST(RectangleNorm, UnitarityOverTimes) {
    for (double t : {0.1, 1.0, 10.0}) {
        const NormResult n = rectangle_norm(at(t));
        EXPECT_NEAR(n.total, 1.0, 1e-8) << t;
        EXPECT_GT(n.remainder, 0.0);
    }
}
