#pragma once

#include "qcl/numerics.hpp"

namespace qcl {

/// Unit-height rectangle on [left, right] evolved freely for time t.
struct RectangleState {
    double left = 0.0;
    double right = 1.0;
    double t = 1.0;
    PhysParams params{};

    void validate() const;
    double alpha() const { return params.alpha(t); }
};

/// Exact amplitude sqrt(m / 2 pi i hbar t) int_left^right exp{i m (x - y)^2 / 2 hbar t} dx.
cplx propagate_rectangle(const RectangleState& state, double y);

/// Two-pole far-field asymptotic
/// sqrt(i / 4 pi alpha) [E_L / (L - y) - E_R / (R - y)], E = exp{i alpha (edge - y)^2}.
/// Requires alpha (edge - y)^2 >= min_fresnel at both edges and y outside [left, right].
cplx rectangle_tail(const RectangleState& state, double y, double min_fresnel = 1e3);

/// Smallest distance from the interval at which rectangle_tail accepts y.
double rectangle_far_field_margin(const RectangleState& state, double min_fresnel = 1e3);

struct NormResult {
    double total;      ///< numerical window plus analytic remainder
    double window;     ///< integral over the numerical window
    double remainder;  ///< analytic contribution of |y - centre| > half_width
};

/// int |Psi(y, t)|^2 dy: GK15 panels over |y - centre| <= half_width, plus the
/// two-pole tail integrated analytically beyond.
NormResult rectangle_norm(const RectangleState& state, double half_width = 1e3);

}  // namespace qcl
