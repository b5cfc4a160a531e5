#pragma once

#include <cmath>
#include <cstddef>

#include "qcl/errors.hpp"

namespace qcl {

/// Mass and reduced Planck constant. Dimensionless units (m = hbar = 1) by default.
struct PhysParams {
    double mass = 1.0;
    double hbar = 1.0;

    void validate() const {
        if (!(mass > 0.0) || !std::isfinite(mass)) throw DomainError("PhysParams: mass must be positive");
        if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("PhysParams: hbar must be positive");
    }

    /// Phase scale m / (2 hbar dt) of the free kernel exp{i alpha (x - y)^2}.
    double alpha(double dt) const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("PhysParams::alpha: time step must be positive");
        return mass / (2.0 * hbar * dt);
    }
};

struct QuadTolerance {
    double rel_tol = 1e-10;
    std::size_t max_subdivisions = std::size_t{1} << 26;

    void validate() const {
        if (!(rel_tol > 0.0)) throw DomainError("QuadTolerance: rel_tol must be positive");
        if (max_subdivisions < 1) throw DomainError("QuadTolerance: max_subdivisions must be >= 1");
    }
};

}  // namespace qcl
