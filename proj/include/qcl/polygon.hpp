#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qcl/numerics.hpp"

namespace qcl {

/// One side of the polygon: psi(x) = a x + b on [A, B].
struct Segment {
    double A;
    double B;
    cplx a;
    cplx b;
};

/// Piecewise-linear interpolant of samples on the uniform grid
/// x_j = -a + j a / N, j = 0..N.
class Polygon {
public:
    /// Builds from grid positions and samples. The grid must be uniform and end at 0.
    static Polygon build(const std::vector<double>& x, const std::vector<cplx>& values);
    /// Builds from samples taken at x_j = -a + j a / N.
    static Polygon from_values(double a, const std::vector<cplx>& values);

    double half_width() const { return a_; }
    std::size_t segments() const { return values_.size() - 1; }
    double dx() const { return dx_; }
    const std::vector<double>& vertices() const { return x_; }
    const std::vector<cplx>& values() const { return values_; }
    Segment segment(std::size_t j) const;
    cplx slope(std::size_t j) const { return slope_[j]; }
    cplx intercept(std::size_t j) const { return intercept_[j]; }

    cplx left_value() const { return values_.front(); }
    cplx right_value() const { return values_.back(); }
    /// True if both endpoint samples are below 1e-12 of the largest sample.
    bool endpoints_vanish() const;
    bool is_zero() const;

    /// int |psi|^2 over [-a, 0], exact for the piecewise-linear function.
    double norm2() const;
    Polygon normalized() const;
    /// Largest relative mismatch of a_j x_{j+1} + b_j against a_{j+1} x_{j+1} + b_{j+1}.
    double continuity_residual() const;

private:
    double a_ = 1.0;
    double dx_ = 1.0;
    std::vector<double> x_;
    std::vector<cplx> values_;
    std::vector<cplx> slope_;
    std::vector<cplx> intercept_;
};

/// Normalized built-in shapes on [-a, 0].
enum class Shape { constant, ramp, half_sine, random };
Shape parse_shape(const std::string& name);
std::string shape_name(Shape s);
/// For Shape::random the samples are i.i.d. complex; vanishing_endpoints pins
/// psi(-a) = psi(0) = 0.
Polygon make_shape(Shape shape, double a, std::size_t n_segments, std::uint64_t seed = 0,
                   bool vanishing_endpoints = false);

/// Far-field gate: both edge Fresnel parameters alpha (edge - y)^2 >= min_fresnel
/// and distance >= delta from the interval. delta <= 0 means sqrt(min_fresnel / alpha).
struct FarFieldWindow {
    double delta = 0.0;
    double min_fresnel = 1e3;

    double effective_delta(double alpha) const;
    bool contains(double left, double right, double y, double alpha) const;
};

/// Leading boundary brackets of one segment.
struct SegmentTerms {
    cplx S;  ///< x_j E_j / U_j - x_{j+1} E_{j+1} / U_{j+1}
    cplx R;  ///< E_j / U_j - E_{j+1} / U_{j+1}
};
SegmentTerms segment_terms(const Segment& seg, double y, double alpha);

/// b_j sqrt(i hbar dt / 2 m pi) [E_A / (A - y) - E_B / (B - y)].
cplx segment_I0(const Segment& seg, double y, double dt, const PhysParams& params, const FarFieldWindow& ff = {});
/// a_j sqrt(i hbar dt / 2 m pi) [A E_A / (A - y) - B E_B / (B - y)]; the exact
/// Gaussian antiderivative piece is already folded in.
cplx segment_I1(const Segment& seg, double y, double dt, const PhysParams& params, const FarFieldWindow& ff = {});

enum class Method {
    asymptotic,  ///< sum of segment_I0 + segment_I1
    quadrature,  ///< oracle per segment
    exact,       ///< closed form through fresnel_tail_ratio, valid everywhere
};
Method parse_method(const std::string& name);

struct PropagateOptions {
    FarFieldWindow far_field{};
    QuadTolerance tol{};
};

cplx propagate_polygon(const Polygon& poly, double y, double dt, const PhysParams& params, Method method,
                       const PropagateOptions& opts = {});

/// sqrt(i / 4 alpha pi) [psi(-a) E_0 / (x_0 - y) - psi(0) E_N / (x_N - y)].
cplx boundary_formula(const Polygon& poly, double y, double dt, const PhysParams& params,
                      const FarFieldWindow& ff = {});

/// Sum over segments of the leading terms sqrt(i / 4 alpha pi)(a_j S_j + b_j R_j),
/// accumulated with compensated summation.
cplx leading_segment_sum(const Polygon& poly, double y, double dt, const PhysParams& params,
                         const FarFieldWindow& ff = {});

/// |leading_segment_sum - boundary_formula| relative to |boundary_formula|, or
/// to the summed term magnitudes when both endpoints vanish.
double telescoping_residual(const Polygon& poly, double y, double dt, const PhysParams& params,
                            const FarFieldWindow& ff = {});

/// |boundary_formula|^2 if an endpoint value is nonzero, otherwise |exact|^2.
double far_field_density(const Polygon& poly, double y, double dt, const PhysParams& params,
                         const FarFieldWindow& ff = {});

}  // namespace qcl
