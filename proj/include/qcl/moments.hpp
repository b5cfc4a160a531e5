#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "qcl/polygon.hpp"

namespace qcl {

using Sampler = std::function<double(double)>;

/// Log-log regression of a density envelope.
struct TailFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
    std::size_t bins = 0;
};

/// Ordinary least squares y = slope x + intercept.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double intercept_se = 0.0;
    double r2 = 0.0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// log y vs log x. Non-positive points are rejected with DegenerateFitError.
TailFit power_law_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Samples log-uniformly, keeps the largest sample of each octave-wide bin, and
/// fits log(max) against log(location of max).
TailFit tail_exponent_fit(const Sampler& density, double y_min, double y_max, std::size_t points_per_decade = 400);

enum class Verdict { divergent_log, convergent, inconclusive };
std::string verdict_name(Verdict v);

struct MomentCurve {
    std::vector<double> cutoffs;
    std::vector<double> partials;  ///< M(b_k) = int_delta^{b_k} y density dy
    Verdict verdict = Verdict::inconclusive;
    double delta = 0.0;
    // c ln b + d
    double growth_coeff = 0.0;
    double growth_se = 0.0;
    double log_r2 = 0.0;
    // M_inf - e b^{-q}
    double m_inf = 0.0;
    double sat_coeff = 0.0;
    double sat_coeff_se = 0.0;
    double sat_exponent = 0.0;
    double sat_r2 = 0.0;
    /// q from log(M(b_{k+1}) - M(b_k)) against log b_k.
    double residual_exponent = 0.0;
    double residual_r2 = 0.0;
};

struct MomentOptions {
    std::size_t cutoffs_per_decade = 8;
    double panel_width = 0.25;  ///< must resolve the density's oscillation
    double rel_tol = 1e-11;
    double r2_threshold = 0.999;
    double sigma_margin = 5.0;
};

/// Partial first moments over cutoffs b_max 10^{-decades} .. b_max (clamped at
/// delta) and the log / saturating model verdict.
MomentCurve moment_divergence(const Sampler& density, double delta, double b_max, double decades,
                              const MomentOptions& opts = {});

/// max(1, 10 sqrt(hbar dt / m)).
double default_inner_cutoff(double dt, const PhysParams& params = {});

/// (<x> over [-a, b] at dt - <x> over [-a, b] at 0) / dt, each mean taken with
/// the density normalized on [-a, b]. Uses exact polygon propagation.
double interval_average_speed(const Polygon& poly, double a, double b, double dt, const PhysParams& params = {},
                              double panel_width = 0.0);

/// Phi(p) = (2 pi hbar)^{-1/2} int psi(x) e^{-i p x / hbar} dx for the
/// piecewise-linear state, summed segment by segment in closed form.
cplx momentum_amplitude(const Polygon& poly, double p, const PhysParams& params = {});

/// |Phi(p)|^2.
Sampler momentum_density(const Polygon& poly, const PhysParams& params = {});

/// |Phi(p)|^2 + |Phi(-p)|^2, the density of |p|.
Sampler momentum_abs_density(const Polygon& poly, const PhysParams& params = {});

/// int |Phi|^2 dp over |p| <= P plus the averaged p^{-2} tail beyond.
double momentum_norm(const Polygon& poly, double P, const PhysParams& params = {});

}  // namespace qcl
