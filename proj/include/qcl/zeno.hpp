#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qcl/moments.hpp"
#include "qcl/numerics.hpp"
#include "qcl/params.hpp"

namespace qcl {

/// Wave function sampled at cell centres x_i = -L + (i + 1/2) dx of a periodic box [-L, L).
struct ComplexField {
    double L = 32.0;
    double dx = 1.0 / 2048.0;
    std::vector<cplx> amps;

    /// Zero field; 2L/dx must be an even integer.
    static ComplexField zeros(double L, double dx);

    std::size_t size() const { return amps.size(); }
    double x(std::size_t i) const { return -L + (static_cast<double>(i) + 0.5) * dx; }
    double norm2() const;
    void renormalize();
    /// Probability on cells whose centres lie in [lo, hi].
    double probability_in(double lo, double hi) const;
};

/// Default grid: L = 64a, dx = a/2048.
inline constexpr double kDefaultPadding = 64.0;
inline constexpr double kDefaultCellsPerA = 2048.0;

/// sqrt(2/a) sin(pi x / -a) on [-a, 0], renormalized on the grid.
ComplexField half_sine_field(double a, double L, double dx);
ComplexField half_sine_field(double a);
/// (2 pi sigma0^2)^{-1/4} exp(-(x - x0)^2 / 4 sigma0^2 + i k0 x).
ComplexField gaussian_field(double x0, double sigma0, double L, double dx, double k0 = 0.0);

/// Probability in the outer 1/16 of the box on each side.
double guard_band_probability(const ComplexField& field);

struct PaddingPolicy {
    double tolerance = 1e-8;
    bool enforce = true;
};

/// Exact free evolution on the periodic grid: FFT, multiply by
/// exp(-i hbar k^2 dt / 2m), inverse FFT. Throws PaddingError if the guard
/// band holds more than the tolerance afterwards and the policy enforces it.
ComplexField spectral_propagate(const ComplexField& field, double dt, const PhysParams& params = {},
                                const PaddingPolicy& policy = {});

struct Projection {
    ComplexField field;
    double retained;  ///< probability on [lo, hi] before projection
};

/// Zero outside [lo, hi], renormalize.
Projection project_sharp(const ComplexField& field, double lo, double hi);

/// Multiply by a window that is 1 on [lo + w, hi - w], rises as sin^2 over the
/// first and last w, and is 0 outside; renormalize. w = 0 is the sharp window.
/// retained is the probability on [lo, hi] before windowing.
Projection project_tapered(const ComplexField& field, double lo, double hi, double w);

enum class ProjectionMode { sharp, tapered };
ProjectionMode parse_mode(const std::string& name);
std::string mode_name(ProjectionMode m);

struct MeasurementProtocol {
    double a = 1.0;  ///< interval [-a, 0]
    ProjectionMode mode = ProjectionMode::sharp;
    double taper_width = 1.0 / 8.0;
    double period = 0.5 / 8.0;
    double horizon = 0.5;

    void validate() const;
    std::size_t steps() const;
};

struct ZenoRun {
    std::vector<double> survivals;   ///< q_k
    std::vector<double> cumulative;  ///< prod_{j <= k} q_j
    std::vector<double> exterior;    ///< exterior probability before each projection
    std::vector<double> boundary_leak;  ///< exterior within delta of the interval
    std::vector<double> far_leak;       ///< exterior beyond delta
    std::size_t steps = 0;
    double dt = 0.0;
    double delta = 0.0;
    double guard_max = 0.0;
    double leak_mismatch = 0.0;  ///< max |1 - q_k - exterior_k|

    double final_survival() const { return cumulative.empty() ? 1.0 : cumulative.back(); }
};

ZenoRun run_protocol(const MeasurementProtocol& protocol, const ComplexField& initial, const PhysParams& params = {});

struct LeakScaling {
    std::vector<double> dts;
    std::vector<double> leaks;
    TailFit fit;
    bool conclusive = false;  ///< fit r2 >= 0.99
};

/// The measured state (the initial field projected in the protocol's mode) is
/// propagated once by each period; leak is the exterior probability.
LeakScaling leak_scaling(const std::vector<MeasurementProtocol>& family, const ComplexField& initial,
                         const PhysParams& params = {});

/// Periods (T/256) 10^{-k/4}, k = 0..8.
std::vector<double> default_leak_periods(double horizon);

}  // namespace qcl
