#pragma once

#include <complex>
#include <functional>

#include "qcl/params.hpp"

namespace qcl {

using cplx = std::complex<double>;

/// Integral of exp(i x t^2) over t in [0, 1].
cplx fresnel_raw(double x);

struct AsymptoticValue {
    cplx value;
    double error_estimate;  ///< magnitude of the first omitted term
    int terms_used;         ///< after optimal truncation
};

/// Large-x expansion of fresnel_raw: (1/2) sqrt(pi/x) e^{i pi/4} minus
/// (i/2) e^{ix} sum_n (-i)^n Gamma(n+1/2) / (Gamma(1/2) x^{n+1}).
/// The sum stops at the smallest term if n_terms asks for more.
AsymptoticValue fresnel_asymptotic(double x, int n_terms);

/// Tail integral T(x) = int_1^inf exp(i x t^2) dt written as
/// T = i e^{ix} r(x) / (2x). r -> 1 as x -> inf; r - 1 is returned separately
/// so callers can form the difference without cancellation. Requires x >= 0.
struct TailRatio {
    cplx r;
    cplx r_minus_one;
};
TailRatio fresnel_tail_ratio(double x);

/// exp(i k x) with the product k x formed and reduced mod 2 pi in double-double.
cplx product_phase(double k, double x);

/// Closed form of int_A^B (a x + b) exp(i alpha (x - y)^2) dx. Uses
/// U fresnel_raw(alpha U^2) when [A, B] straddles y and the tail ratio otherwise.
cplx linear_gaussian_integral(cplx a, cplx b, double A, double B, double y, double alpha);

/// Neumaier-compensated complex accumulator.
struct ComplexSum {
    double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;
    static void add1(double& s, double& c, double v) {
        const double t = s + v;
        c += std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
        s = t;
    }
    void add(cplx v) {
        add1(re, cre, v.real());
        add1(im, cim, v.imag());
    }
    cplx value() const { return {re + cre, im + cim}; }
};

/// exp(i alpha (x - y)^2). The phase is formed and reduced mod 2 pi in
/// double-double arithmetic, so large arguments keep full relative accuracy.
cplx gaussian_phase(double alpha, double x, double y);

/// int_A^B (coeff_a x + coeff_b) exp(i alpha (x - y)^2) dx by phase-keyed
/// panel splitting and Gauss-Kronrod 21 per panel.
cplx oscillatory_quadrature(double coeff_a, double coeff_b, double A, double B, double y, double alpha,
                            const QuadTolerance& tol = {});

/// Same, with an extra smooth factor g(x) in the integrand.
using Modulation = std::function<cplx(double)>;
cplx oscillatory_quadrature(double coeff_a, double coeff_b, double A, double B, double y, double alpha,
                            const Modulation& g, const QuadTolerance& tol = {});

struct RealIntegral {
    double value;
    double error;
};

/// int_lo^hi f over panels no wider than max_panel, each integrated with
/// adaptive Gauss-Kronrod 15. Panels are evaluated in parallel and summed in order.
RealIntegral integrate_panels(const std::function<double(double)>& f, double lo, double hi, double max_panel,
                              double rel_tol = 1e-11);

}  // namespace qcl
