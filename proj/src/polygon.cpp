#include "qcl/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace qcl {

namespace {

const cplx kI{0.0, 1.0};

// sqrt(i / (4 pi alpha)) = sqrt(i hbar dt / (2 m pi)).
cplx leading_prefactor(double alpha) {
    return std::sqrt(cplx(0.0, 1.0 / (4.0 * std::numbers::pi * alpha)));
}

void require_far_field(const FarFieldWindow& ff, double left, double right, double y, double alpha,
                       const char* who) {
    if (!ff.contains(left, right, y, alpha))
        throw DomainError(std::string(who) + ": y is in the near field; use the quadrature method");
}

double alpha_for(double dt, const PhysParams& params) {
    params.validate();
    return params.alpha(dt);
}

}  // namespace

Polygon Polygon::build(const std::vector<double>& x, const std::vector<cplx>& values) {
    if (x.size() < 2) throw DomainError("build_polygon: need at least one segment");
    if (x.size() != values.size()) throw DomainError("build_polygon: positions and values differ in length");
    for (double v : x)
        if (!std::isfinite(v)) throw DomainError("build_polygon: non-finite position");
    const double a = -x.front();
    if (!(a > 0.0)) throw DomainError("build_polygon: grid must start at -a < 0");
    const std::size_t n = x.size() - 1;
    const double step = a / static_cast<double>(n);
    const double slack = 1e-9 * a;
    if (std::abs(x.back()) > slack) throw DomainError("build_polygon: grid must end at 0");
    for (std::size_t j = 0; j <= n; ++j) {
        if (std::abs(x[j] - (-a + static_cast<double>(j) * step)) > slack)
            throw DomainError("build_polygon: grid is not uniform");
    }
    return from_values(a, values);
}

Polygon Polygon::from_values(double a, const std::vector<cplx>& values) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("build_polygon: a must be positive");
    if (values.size() < 2) throw DomainError("build_polygon: need at least one segment");
    for (const cplx& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DomainError("build_polygon: non-finite sample");
    Polygon p;
    const std::size_t n = values.size() - 1;
    p.a_ = a;
    p.dx_ = a / static_cast<double>(n);
    p.values_ = values;
    p.x_.resize(n + 1);
    for (std::size_t j = 0; j < n; ++j) p.x_[j] = -a + static_cast<double>(j) * p.dx_;
    p.x_[n] = 0.0;
    p.slope_.resize(n);
    p.intercept_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        p.slope_[j] = (values[j + 1] - values[j]) / p.dx_;
        p.intercept_[j] = values[j] - p.slope_[j] * p.x_[j];
    }
    return p;
}

Segment Polygon::segment(std::size_t j) const {
    if (j >= segments()) throw DomainError("Polygon::segment: index out of range");
    return {x_[j], x_[j + 1], slope_[j], intercept_[j]};
}

bool Polygon::endpoints_vanish() const {
    double peak = 0.0;
    for (const cplx& v : values_) peak = std::max(peak, std::abs(v));
    const double cut = 1e-12 * peak;
    return std::abs(values_.front()) <= cut && std::abs(values_.back()) <= cut;
}

bool Polygon::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](const cplx& v) { return v == 0.0; });
}

double Polygon::norm2() const {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < values_.size(); ++j) {
        const cplx p = values_[j], q = values_[j + 1];
        s += dx_ * (std::norm(p) + std::real(p * std::conj(q)) + std::norm(q)) / 3.0;
    }
    return s;
}

Polygon Polygon::normalized() const {
    const double n2 = norm2();
    if (!(n2 > 0.0)) throw DomainError("Polygon::normalized: zero polygon");
    std::vector<cplx> v = values_;
    const double s = 1.0 / std::sqrt(n2);
    for (auto& z : v) z *= s;
    return from_values(a_, v);
}

double Polygon::continuity_residual() const {
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < slope_.size(); ++j) {
        const double xv = x_[j + 1];
        const cplx lhs = slope_[j] * xv + intercept_[j];
        const cplx rhs = slope_[j + 1] * xv + intercept_[j + 1];
        const double scale = std::max({std::abs(lhs), std::abs(rhs), std::abs(slope_[j] * xv),
                                       std::abs(slope_[j + 1] * xv), std::abs(intercept_[j]),
                                       std::abs(intercept_[j + 1])});
        if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

Shape parse_shape(const std::string& name) {
    if (name == "constant") return Shape::constant;
    if (name == "ramp") return Shape::ramp;
    if (name == "half-sine" || name == "half_sine") return Shape::half_sine;
    if (name == "random") return Shape::random;
    throw DomainError("unknown shape: " + name);
}

std::string shape_name(Shape s) {
    switch (s) {
        case Shape::constant: return "constant";
        case Shape::ramp: return "ramp";
        case Shape::half_sine: return "half-sine";
        case Shape::random: return "random";
    }
    return "?";
}

Polygon make_shape(Shape shape, double a, std::size_t n_segments, std::uint64_t seed, bool vanishing_endpoints) {
    if (n_segments < 1) throw DomainError("make_shape: need at least one segment");
    if (!(a > 0.0)) throw DomainError("make_shape: a must be positive");
    const std::size_t n = n_segments;
    std::vector<cplx> v(n + 1);
    switch (shape) {
        case Shape::constant:
            std::fill(v.begin(), v.end(), cplx(1.0));
            break;
        case Shape::ramp:
            // 1 at -a, 0 at 0: jumps at the left edge only.
            for (std::size_t j = 0; j <= n; ++j) v[j] = static_cast<double>(n - j) / static_cast<double>(n);
            break;
        case Shape::half_sine:
            for (std::size_t j = 1; j < n; ++j)
                v[j] = std::sin(std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
            v[0] = v[n] = 0.0;
            break;
        case Shape::random: {
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            for (auto& z : v) {
                const double re = u(rng);
                const double im = u(rng);
                z = {re, im};
            }
            if (vanishing_endpoints) {
                v[0] = v[n] = 0.0;
            } else {
                // Keep the jumps well away from zero.
                for (std::size_t j : {std::size_t{0}, n})
                    if (std::abs(v[j]) < 0.25) v[j] = std::polar(0.25 + std::abs(v[j]), std::arg(v[j]) + 0.1);
            }
            break;
        }
    }
    return Polygon::from_values(a, v).normalized();
}

double FarFieldWindow::effective_delta(double alpha) const {
    return delta > 0.0 ? delta : std::sqrt(min_fresnel / alpha);
}

bool FarFieldWindow::contains(double left, double right, double y, double alpha) const {
    const double d = effective_delta(alpha);
    if (!(y < left - d || y > right + d)) return false;
    const double ul = left - y, ur = right - y;
    return alpha * ul * ul >= min_fresnel && alpha * ur * ur >= min_fresnel;
}

SegmentTerms segment_terms(const Segment& seg, double y, double alpha) {
    const double UA = seg.A - y, UB = seg.B - y;
    const cplx qa = gaussian_phase(alpha, seg.A, y) / UA;
    const cplx qb = gaussian_phase(alpha, seg.B, y) / UB;
    return {seg.A * qa - seg.B * qb, qa - qb};
}

cplx segment_I0(const Segment& seg, double y, double dt, const PhysParams& params, const FarFieldWindow& ff) {
    const double alpha = alpha_for(dt, params);
    require_far_field(ff, seg.A, seg.B, y, alpha, "segment_I0");
    if (seg.b == 0.0) return 0.0;
    return seg.b * leading_prefactor(alpha) * segment_terms(seg, y, alpha).R;
}

cplx segment_I1(const Segment& seg, double y, double dt, const PhysParams& params, const FarFieldWindow& ff) {
    const double alpha = alpha_for(dt, params);
    require_far_field(ff, seg.A, seg.B, y, alpha, "segment_I1");
    if (seg.a == 0.0) return 0.0;
    return seg.a * leading_prefactor(alpha) * segment_terms(seg, y, alpha).S;
}

Method parse_method(const std::string& name) {
    if (name == "asymptotic") return Method::asymptotic;
    if (name == "quadrature") return Method::quadrature;
    if (name == "exact") return Method::exact;
    throw DomainError("unknown method: " + name);
}

namespace {

cplx propagate_quadrature(const Polygon& poly, double y, double alpha, const QuadTolerance& tol) {
    ComplexSum sum;
    for (std::size_t j = 0; j < poly.segments(); ++j) {
        const Segment s = poly.segment(j);
        const cplx re = oscillatory_quadrature(s.a.real(), s.b.real(), s.A, s.B, y, alpha, tol);
        const cplx im = oscillatory_quadrature(s.a.imag(), s.b.imag(), s.A, s.B, y, alpha, tol);
        sum.add(re + kI * im);
    }
    return std::sqrt(cplx(0.0, -alpha / std::numbers::pi)) * sum.value();
}

// Psi = chi psi(y) - K sum_k E_k [psi_N r_N / U_N d_kN - psi_0 r_0 / U_0 d_k0 + (a_k - a_{k-1})(r_k - 1)]
// with K = sqrt(i / 4 pi alpha), U_k = x_k - y, r_k = r(alpha U_k^2), a_{-1} = a_N = 0.
cplx propagate_exact(const Polygon& poly, double y, double alpha) {
    const auto& x = poly.vertices();
    const auto& v = poly.values();
    const std::size_t n = poly.segments();
    ComplexSum sum;
    for (std::size_t k = 0; k <= n; ++k) {
        const double U = x[k] - y;
        const TailRatio t = fresnel_tail_ratio(alpha * U * U);
        const cplx jump = (k < n ? poly.slope(k) : cplx(0.0)) - (k > 0 ? poly.slope(k - 1) : cplx(0.0));
        cplx bracket = jump * t.r_minus_one;
        if (U != 0.0) {
            if (k == n) bracket += v[n] * t.r / U;
            if (k == 0) bracket -= v[0] * t.r / U;
        }
        if (bracket != 0.0) sum.add(gaussian_phase(alpha, x[k], y) * bracket);
    }
    cplx inside = 0.0;
    if (y > x.front() && y < x.back()) {
        auto j = static_cast<std::size_t>(std::floor((y - x.front()) / poly.dx()));
        j = std::min(j, n - 1);
        inside = poly.slope(j) * y + poly.intercept(j);
    } else if (y == x.front()) {
        inside = 0.5 * v.front();
    } else if (y == x.back()) {
        inside = 0.5 * v.back();
    }
    return inside - leading_prefactor(alpha) * sum.value();
}

}  // namespace

cplx propagate_polygon(const Polygon& poly, double y, double dt, const PhysParams& params, Method method,
                       const PropagateOptions& opts) {
    if (!std::isfinite(y)) throw DomainError("propagate_polygon: y must be finite");
    const double alpha = alpha_for(dt, params);
    switch (method) {
        case Method::asymptotic: {
            require_far_field(opts.far_field, poly.vertices().front(), poly.vertices().back(), y, alpha,
                              "propagate_polygon");
            const cplx pref = leading_prefactor(alpha);
            ComplexSum sum;
            for (std::size_t j = 0; j < poly.segments(); ++j) {
                const Segment s = poly.segment(j);
                const SegmentTerms t = segment_terms(s, y, alpha);
                sum.add(pref * (s.a * t.S + s.b * t.R));
            }
            return sum.value();
        }
        case Method::quadrature:
            return propagate_quadrature(poly, y, alpha, opts.tol);
        case Method::exact:
            return propagate_exact(poly, y, alpha);
    }
    throw DomainError("propagate_polygon: unknown method");
}

cplx boundary_formula(const Polygon& poly, double y, double dt, const PhysParams& params, const FarFieldWindow& ff) {
    const double alpha = alpha_for(dt, params);
    const auto& x = poly.vertices();
    require_far_field(ff, x.front(), x.back(), y, alpha, "boundary_formula");
    const cplx left = poly.left_value() * gaussian_phase(alpha, x.front(), y) / (x.front() - y);
    const cplx right = poly.right_value() * gaussian_phase(alpha, x.back(), y) / (x.back() - y);
    return leading_prefactor(alpha) * (left - right);
}

cplx leading_segment_sum(const Polygon& poly, double y, double dt, const PhysParams& params,
                         const FarFieldWindow& ff) {
    return propagate_polygon(poly, y, dt, params, Method::asymptotic, {ff, {}});
}

double far_field_density(const Polygon& poly, double y, double dt, const PhysParams& params,
                         const FarFieldWindow& ff) {
    const double alpha = alpha_for(dt, params);
    require_far_field(ff, poly.vertices().front(), poly.vertices().back(), y, alpha, "far_field_density");
    if (!poly.endpoints_vanish()) return std::norm(boundary_formula(poly, y, dt, params, ff));
    return std::norm(propagate_exact(poly, y, alpha));
}

}  // namespace qcl

namespace qcl {

double telescoping_residual(const Polygon& poly, double y, double dt, const PhysParams& params,
                            const FarFieldWindow& ff) {
    const double alpha = alpha_for(dt, params);
    const cplx lead = leading_segment_sum(poly, y, dt, params, ff);
    const cplx bound = boundary_formula(poly, y, dt, params, ff);
    double scale = std::abs(bound);
    if (scale == 0.0) {
        const double pref = std::abs(leading_prefactor(alpha));
        for (std::size_t j = 0; j < poly.segments(); ++j) {
            const Segment s = poly.segment(j);
            const SegmentTerms t = segment_terms(s, y, alpha);
            scale += pref * (std::abs(s.a * t.S) + std::abs(s.b * t.R));
        }
    }
    if (scale == 0.0) return 0.0;
    return std::abs(lead - bound) / scale;
}

}  // namespace qcl
