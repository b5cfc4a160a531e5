#include "qcl/rectangle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qcl {

namespace {

// sqrt(alpha / (i pi)), the free-kernel prefactor written through alpha.
cplx kernel_prefactor(double alpha) {
    return std::sqrt(cplx(0.0, -alpha / std::numbers::pi));
}

}  // namespace

void RectangleState::validate() const {
    params.validate();
    if (!std::isfinite(left) || !std::isfinite(right) || !(left < right))
        throw DomainError("RectangleState: requires left < right");
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("RectangleState: t must be positive");
}

cplx propagate_rectangle(const RectangleState& state, double y) {
    state.validate();
    if (!std::isfinite(y)) throw DomainError("propagate_rectangle: y must be finite");
    const double alpha = state.alpha();
    return kernel_prefactor(alpha) * linear_gaussian_integral(0.0, 1.0, state.left, state.right, y, alpha);
}

double rectangle_far_field_margin(const RectangleState& state, double min_fresnel) {
    state.validate();
    return std::sqrt(min_fresnel / state.alpha());
}

cplx rectangle_tail(const RectangleState& state, double y, double min_fresnel) {
    state.validate();
    if (!std::isfinite(y)) throw DomainError("rectangle_tail: y must be finite");
    const double alpha = state.alpha();
    const double UL = state.left - y, UR = state.right - y;
    const bool outside = y < state.left || y > state.right;
    if (!outside || alpha * UL * UL < min_fresnel || alpha * UR * UR < min_fresnel)
        throw DomainError("rectangle_tail: y is in the near field; use propagate_rectangle");
    const cplx pref = std::sqrt(cplx(0.0, 1.0 / (4.0 * std::numbers::pi * alpha)));
    return pref * (gaussian_phase(alpha, state.left, y) / UL - gaussian_phase(alpha, state.right, y) / UR);
}

NormResult rectangle_norm(const RectangleState& state, double half_width) {
    state.validate();
    const double L = state.left, R = state.right, width = R - L;
    const double centre = 0.5 * (L + R);
    if (!(half_width > width)) throw DomainError("rectangle_norm: half_width must exceed the interval width");
    const double alpha = state.alpha();
    const double lo = centre - half_width, hi = centre + half_width;

    // Fresnel ripples near the edges have local wavenumber ~ 2 alpha |U|; the
    // tail cross term has wavenumber 2 alpha width.
    const double panel = std::min(0.05, 0.25 / (alpha * std::max(1.0, width)));
    const RealIntegral window = integrate_panels(
        [&](double y) { return std::norm(propagate_rectangle(state, y)); }, lo, hi, panel, 1e-12);

    // Beyond the window |Psi|^2 = kappa [1/UL^2 + 1/UR^2 - 2 cos(phi)/(UL UR)],
    // phi = alpha (UR^2 - UL^2), the cross term integrated by parts three times.
    const double kappa = 1.0 / (4.0 * std::numbers::pi * alpha);
    auto side = [&](double edge_near, double edge_far, double y0, double dir) {
        const double dn = std::abs(y0 - edge_near), df = std::abs(y0 - edge_far);
        const double smooth = kappa * (1.0 / dn + 1.0 / df);
        const double phi = alpha * ((R - y0) * (R - y0) - (L - y0) * (L - y0));
        const double slope = std::abs(2.0 * alpha * width);
        const double g = 1.0 / (dn * df);
        const double sum = 1.0 / dn + 1.0 / df;
        const double curv = sum * sum + 1.0 / (dn * dn) + 1.0 / (df * df);
        const double osc = -2.0 * kappa * g *
                           (dir * std::sin(phi) / slope + sum * std::cos(phi) / (slope * slope) -
                            dir * curv * std::sin(phi) / (slope * slope * slope));
        return smooth + osc;
    };
    // d phi / dy = -2 alpha width on both sides; the boundary term sign follows
    // the direction of integration.
    const double rem = side(R, L, hi, 1.0) + side(L, R, lo, -1.0);
    return {window.value + rem, window.value, rem};
}

}  // namespace qcl
