#pragma once

#include <functional>
#include <string>

#include "qcl/numerics.hpp"
#include "qcl/params.hpp"
#include "qcl/polygon.hpp"

namespace qcl {

/// Bounded potential V(x) with |V| <= bound.
struct PotentialSpec {
    std::function<double(double)> v;
    double bound = 0.0;
    std::string name = "custom";

    /// Checks bound >= 0 and |v| <= bound on `samples` points of [lo, hi].
    void validate(double lo = -1.0, double hi = 0.0, int samples = 257) const;
};

/// V0 exp(-x^2).
PotentialSpec gaussian_potential(double v0);
/// V0 on [lo, hi], 0 elsewhere.
PotentialSpec well_potential(double v0, double lo = -1.0, double hi = 0.0);
/// V0 min(x^2, 1).
PotentialSpec harmonic_clipped_potential(double v0);
/// gaussian | well | harmonic-clipped.
PotentialSpec make_potential(const std::string& name, double amplitude);

enum class PhaseConvention {
    conventional,   ///< exp(-i V dt / hbar)
    literal,  ///< exp(+i hbar dt V)
};
PhaseConvention parse_convention(const std::string& name);

/// Short-time kernel with the potential phase applied inside the integrand,
/// evaluated by the quadrature oracle per segment. Throws ValidityError when
/// dt * bound > 0.1.
cplx propagate_short_time_with_potential(const Polygon& poly, const PotentialSpec& v, double dt, double y,
                                         const PhysParams& params = {},
                                         PhaseConvention conv = PhaseConvention::conventional,
                                         const QuadTolerance& tol = {});

}  // namespace qcl
