#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qcl/errors.hpp"
#include "qcl/zeno.hpp"

using namespace qcl;

namespace {

double mean(const ComplexField& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.x(i) * std::norm(f.amps[i]);
    return s * f.dx / f.norm2();
}

double variance(const ComplexField& f) {
    const double m = mean(f);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += (f.x(i) - m) * (f.x(i) - m) * std::norm(f.amps[i]);
    return s * f.dx / f.norm2();
}

double max_diff(const ComplexField& a, const ComplexField& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.amps[i] - b.amps[i]));
    return d;
}

MeasurementProtocol protocol(ProjectionMode mode, std::size_t n) {
    MeasurementProtocol p;
    p.mode = mode;
    p.period = p.horizon / static_cast<double>(n);
    return p;
}

}  // namespace

TEST(Field, GridLayout) {
    const ComplexField f = ComplexField::zeros(4.0, 0.25);
    EXPECT_EQ(f.size(), 32u);
    EXPECT_DOUBLE_EQ(f.x(0), -3.875);
    EXPECT_DOUBLE_EQ(f.x(31), 3.875);
    EXPECT_THROW(ComplexField::zeros(4.0, 0.3), DomainError);
    EXPECT_THROW(half_sine_field(1.0, 4.0, 1.0 / 64), DomainError);
}

TEST(Spectral, GaussianSpreading) {
    const double s0 = 1.0, t = 3.0;
    const ComplexField f0 = gaussian_field(0.0, s0, 64.0, 1.0 / 32, 0.7);
    const ComplexField f = spectral_propagate(f0, t);
    const double expected = s0 * s0 * (1.0 + std::pow(t / (2.0 * s0 * s0), 2));
    EXPECT_NEAR(variance(f), expected, 1e-6);
    EXPECT_NEAR(mean(f), 0.7 * t, 1e-6);
}

TEST(Spectral, NormAndComposition) {
    const ComplexField f0 = half_sine_field(1.0, 16.0, 1.0 / 512);
    const ComplexField full = spectral_propagate(f0, 0.02);
    const ComplexField half = spectral_propagate(spectral_propagate(f0, 0.01), 0.01);
    EXPECT_NEAR(full.norm2(), 1.0, 1e-12);
    EXPECT_LE(max_diff(full, half), 1e-12);
}

TEST(Spectral, PaddingMonitor) {
    const ComplexField f0 = gaussian_field(0.0, 0.5, 8.0, 1.0 / 32);
    EXPECT_THROW(spectral_propagate(f0, 20.0), PaddingError);
    EXPECT_NO_THROW(spectral_propagate(f0, 20.0, {}, {1e-8, false}));
    EXPECT_THROW(spectral_propagate(f0, 0.0), DomainError);
}

TEST(Projection, SharpIsIdempotentAndAccountsForLeak) {
    const ComplexField f = spectral_propagate(gaussian_field(-0.5, 0.2, 16.0, 1.0 / 512), 0.05);
    const Projection p1 = project_sharp(f, -1.0, 0.0);
    EXPECT_NEAR(1.0 - p1.retained, f.probability_in(-16.0, -1.0 - 1e-9) + f.probability_in(1e-9, 16.0), 1e-13);
    const Projection p2 = project_sharp(p1.field, -1.0, 0.0);
    EXPECT_NEAR(p2.retained, 1.0, 1e-14);
    EXPECT_LE(max_diff(p1.field, p2.field), 1e-14);
}

TEST(Projection, TaperedWindowShape) {
    const ComplexField f = gaussian_field(-0.5, 2.0, 16.0, 1.0 / 512);
    const double w = 0.125;
    const Projection p = project_tapered(f, -1.0, 0.0, w);
    for (std::size_t i = 0; i < p.field.size(); ++i) {
        const double x = p.field.x(i);
        if (x < -1.0 || x > 0.0) {
            EXPECT_EQ(p.field.amps[i], cplx(0.0)) << x;
        }
    }
    // Cells within one cell of an edge are damped by at most sin^2(pi dx / 2w).
    const std::size_t mid = static_cast<std::size_t>((16.0 - 0.5) / f.dx);
    const double scale = std::abs(p.field.amps[mid] / f.amps[mid]);
    const double edge = std::pow(std::sin(std::numbers::pi * f.dx / (2.0 * w)), 2);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double x = f.x(i);
        if (std::abs(x + 1.0) < f.dx || std::abs(x) < f.dx) {
            EXPECT_LE(std::abs(p.field.amps[i] / f.amps[i]), scale * edge) << x;
        }
    }
    EXPECT_NEAR(p.field.norm2(), 1.0, 1e-13);
    EXPECT_THROW(project_tapered(f, -1.0, 0.0, 0.5), DomainError);
}

TEST(Projection, ZeroTaperIsSharp) {
    const ComplexField f = gaussian_field(-0.3, 0.7, 16.0, 1.0 / 512, 1.3);
    const Projection s = project_sharp(f, -1.0, 0.0);
    const Projection t = project_tapered(f, -1.0, 0.0, 0.0);
    EXPECT_EQ(s.retained, t.retained);
    EXPECT_LE(max_diff(s.field, t.field), 0.0);
    const Projection small = project_tapered(f, -1.0, 0.0, 1e-6);
    EXPECT_LE(max_diff(s.field, small.field), 1e-2);
}

TEST(Projection, ExtinctionIsReported) {
    const ComplexField f = gaussian_field(10.0, 0.1, 16.0, 1.0 / 512);
    try {
        project_sharp(f, -1.0, 0.0);
        FAIL() << "expected ExtinctionError";
    } catch (const ExtinctionError& e) {
        EXPECT_LT(e.retained(), 1e-15);
    }
}

TEST(Protocol, MatchesIndependentReference) {
    // numpy FFT reference on the default grid, see tests/oracles/generate.py.
    const ComplexField init = half_sine_field(1.0);
    const ZenoRun sharp = run_protocol(protocol(ProjectionMode::sharp, 16), init);
    EXPECT_NEAR(sharp.survivals[0], 0.9783809126839282, 1e-10);
    EXPECT_NEAR(sharp.survivals[1], 0.9624163014357671, 1e-10);
    EXPECT_NEAR(sharp.final_survival(), 0.4113612784864191, 1e-9);
    const ZenoRun tap = run_protocol(protocol(ProjectionMode::tapered, 16), init);
    EXPECT_NEAR(tap.survivals[0], 0.9783809126839282, 1e-10);
    EXPECT_NEAR(tap.survivals[1], 0.9662060074091685, 1e-10);
    EXPECT_NEAR(tap.final_survival(), 0.4375333624094819, 1e-9);
    EXPECT_LE(sharp.leak_mismatch, 1e-12);
    EXPECT_EQ(sharp.steps, 16u);
    for (std::size_t k = 0; k < sharp.steps; ++k)
        EXPECT_NEAR(sharp.exterior[k], sharp.boundary_leak[k] + sharp.far_leak[k], 1e-15);
}

TEST(Protocol, ValidatesInputs) {
    MeasurementProtocol p;
    p.period = 0.0;
    EXPECT_THROW(p.validate(), DomainError);
    p.period = 0.1;
    p.taper_width = 0.6;
    p.mode = ProjectionMode::tapered;
    EXPECT_THROW(p.validate(), DomainError);
    const ComplexField off = gaussian_field(-0.5, 0.2, 16.0, 1.0 / 512);
    EXPECT_THROW(run_protocol(protocol(ProjectionMode::sharp, 4), off), DomainError);
    EXPECT_THROW(parse_mode("soft"), DomainError);
}

TEST(Leak, SingleStepMatchesReference) {
    const ComplexField init = half_sine_field(1.0);
    const double dt = 0.5 / 256;
    const ComplexField s = spectral_propagate(project_sharp(init, -1.0, 0.0).field, dt);
    EXPECT_NEAR(1.0 - s.probability_in(-1.0, 0.0), 0.000321056870194506, 1e-12);
    const ComplexField t = spectral_propagate(project_tapered(init, -1.0, 0.0, 0.125).field, dt);
    EXPECT_NEAR(1.0 - t.probability_in(-1.0, 0.0), 0.00010267485203884928, 1e-12);
}

TEST(Leak, SharpScalingExponent) {
    std::vector<MeasurementProtocol> family;
    for (double dt : default_leak_periods(0.5)) {
        MeasurementProtocol p;
        p.period = dt;
        family.push_back(p);
    }
    const LeakScaling ls = leak_scaling(family, half_sine_field(1.0));
    EXPECT_TRUE(ls.conclusive);
    EXPECT_NEAR(ls.fit.exponent, 1.5, 0.02);
    EXPECT_THROW(leak_scaling({family.begin(), family.begin() + 3}, half_sine_field(1.0)), DomainError);
}

TEST(Leak, SyntheticLinearTable) {
    std::vector<double> dts, leaks;
    for (int k = 0; k < 9; ++k) {
        dts.push_back(1e-4 * std::pow(10.0, k / 4.0));
        leaks.push_back(0.37 * dts.back());
    }
    EXPECT_NEAR(power_law_fit(dts, leaks).exponent, 1.0, 1e-12);
}
