#include "qcl/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcl/errors.hpp"

namespace qcl {

void PotentialSpec::validate(double lo, double hi, int samples) const {
    if (!v) throw DomainError("PotentialSpec: empty callable");
    if (!(bound >= 0.0) || !std::isfinite(bound)) throw DomainError("PotentialSpec: bound must be finite and >= 0");
    if (samples < 2 || !(hi > lo)) throw DomainError("PotentialSpec: bad sampling range");
    for (int i = 0; i < samples; ++i) {
        const double x = lo + (hi - lo) * i / (samples - 1);
        const double val = v(x);
        if (!std::isfinite(val) || std::abs(val) > bound * (1.0 + 1e-12))
            throw DomainError("PotentialSpec: |V| exceeds bound at x = " + std::to_string(x));
    }
}

PotentialSpec gaussian_potential(double v0) {
    return {[v0](double x) { return v0 * std::exp(-x * x); }, std::abs(v0), "gaussian"};
}

PotentialSpec well_potential(double v0, double lo, double hi) {
    if (!(hi > lo)) throw DomainError("well_potential: need lo < hi");
    return {[=](double x) { return x >= lo && x <= hi ? v0 : 0.0; }, std::abs(v0), "well"};
}

PotentialSpec harmonic_clipped_potential(double v0) {
    return {[v0](double x) { return v0 * std::min(x * x, 1.0); }, std::abs(v0), "harmonic-clipped"};
}

PotentialSpec make_potential(const std::string& name, double amplitude) {
    if (!std::isfinite(amplitude)) throw DomainError("make_potential: amplitude must be finite");
    if (name == "gaussian") return gaussian_potential(amplitude);
    if (name == "well") return well_potential(amplitude);
    if (name == "harmonic-clipped") return harmonic_clipped_potential(amplitude);
    throw DomainError("unknown potential: " + name);
}

PhaseConvention parse_convention(const std::string& name) {
    if (name == "conventional") return PhaseConvention::conventional;
    if (name == "literal") return PhaseConvention::literal;
    throw DomainError("unknown phase convention: " + name);
}

cplx propagate_short_time_with_potential(const Polygon& poly, const PotentialSpec& v, double dt, double y,
                                         const PhysParams& params, PhaseConvention conv,
                                         const QuadTolerance& tol) {
    params.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("propagate_short_time_with_potential: dt must be positive");
    if (!std::isfinite(y)) throw DomainError("propagate_short_time_with_potential: y must be finite");
    const auto& x = poly.vertices();
    v.validate(x.front(), x.back());
    if (dt * v.bound > 0.1) throw ValidityError("propagate_short_time_with_potential: dt * bound exceeds 0.1");

    const double alpha = params.alpha(dt);
    const double scale = conv == PhaseConvention::conventional ? -dt / params.hbar : params.hbar * dt;
    const Modulation g = [&](double s) { return std::polar(1.0, scale * v.v(s)); };

    ComplexSum sum;
    for (std::size_t j = 0; j < poly.segments(); ++j) {
        const Segment s = poly.segment(j);
        const cplx re = oscillatory_quadrature(s.a.real(), s.b.real(), s.A, s.B, y, alpha, g, tol);
        const cplx im = oscillatory_quadrature(s.a.imag(), s.b.imag(), s.A, s.B, y, alpha, g, tol);
        sum.add(re + cplx(0.0, 1.0) * im);
    }
    return std::sqrt(cplx(0.0, -alpha / std::numbers::pi)) * sum.value();
}

}  // namespace qcl
