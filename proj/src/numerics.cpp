#include "qcl/numerics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "qcl/parallel.hpp"

namespace qcl {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;
constexpr double kSeriesMax = 4.0;
constexpr double kAsymptoticMin = 45.0;

const cplx kI{0.0, 1.0};
const cplx kEighthTurn = std::polar(1.0, kPi / 4.0);

// (1/2) sqrt(pi/x) e^{i pi/4}: the integral of e^{ixt^2} over [0, inf).
cplx half_line(double x) { return 0.5 * std::sqrt(kPi / x) * kEighthTurn; }

cplx power_series(double x) {
    cplx term = 1.0, sum = 1.0;
    const cplx ix = kI * x;
    for (int n = 1; n < 200; ++n) {
        term *= ix / static_cast<double>(n);
        const cplx add = term / static_cast<double>(2 * n + 1);
        sum += add;
        if (std::abs(add) < 0.25 * kEps * std::abs(sum)) break;
    }
    return sum;
}

// h = (1/2)/(z + 1/(z + (3/2)/(z + ...))), z = e^{-i pi/4} sqrt(x).
TailRatio continued_fraction(double x) {
    const cplx z = std::sqrt(x) * std::conj(kEighthTurn);
    constexpr double tiny = 1e-300;
    cplx f = tiny, C = f, D = 0.0;
    for (int n = 1; n < 5000; ++n) {
        const double an = 0.5 * n;
        D = z + an * D;
        if (D == 0.0) D = tiny;
        C = z + an / C;
        if (C == 0.0) C = tiny;
        D = 1.0 / D;
        const cplx delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < 0.5 * kEps) break;
    }
    const cplx g = z + f;
    return {z / g, -f / g};
}

TailRatio asymptotic_ratio(double x) {
    cplx c = 1.0, tail = 0.0;
    double prev = 1.0;
    for (int n = 1; n < 100000; ++n) {
        c *= -kI * ((n - 0.5) / x);
        const double mag = std::abs(c);
        if (mag > prev) break;
        tail += c;
        prev = mag;
        if (mag < 0.25 * kEps * std::abs(tail)) break;
    }
    return {1.0 + tail, tail};
}

// Error-free transforms.
inline void two_sum(double a, double b, double& s, double& e) {
    s = a + b;
    const double bb = s - a;
    e = (a - (s - bb)) + (b - bb);
}

constexpr double kTwoPiHi = 6.283185307179586232;
constexpr double kTwoPiMid = 2.4492935982947064e-16;
constexpr double kTwoPiLo = -5.9895396194366793e-33;

struct Compensated {
    double sum = 0.0, c = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            c += (sum - t) + v;
        else
            c += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + c; }
};

// Gauss-Kronrod 21 (QUADPACK qk21).
constexpr std::array<double, 5> kWg21 = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};
constexpr std::array<double, 11> kXgk21 = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720, 0.0};
constexpr std::array<double, 11> kWgk21 = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss-Kronrod 15 (QUADPACK qk15).
constexpr std::array<double, 4> kWg15 = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
constexpr std::array<double, 8> kXgk15 = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk15 = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

struct PanelResult {
    cplx kronrod;
    double error;  ///< QUADPACK-scaled Kronrod/Gauss difference
};

PanelResult gk21_panel(double a, double b, double p, double q, double y, double alpha, const Modulation* g) {
    const double c = 0.5 * (p + q), h = 0.5 * (q - p);
    const cplx base = gaussian_phase(alpha, c, y);
    const double lever = 2.0 * (c - y);
    auto f = [&](double s) {
        const double x = c + s;
        const double dphi = alpha * s * (lever + s);
        cplx v = (a * x + b) * base * cplx(std::cos(dphi), std::sin(dphi));
        if (g) v *= (*g)(x);
        return v;
    };
    std::array<cplx, 21> fv;
    fv[20] = f(0.0);
    cplx k = kWgk21[10] * fv[20], gs = 0.0;
    for (int j = 0; j < 10; ++j) {
        const double s = h * kXgk21[j];
        fv[2 * j] = f(-s);
        fv[2 * j + 1] = f(s);
        const cplx pair = fv[2 * j] + fv[2 * j + 1];
        k += kWgk21[j] * pair;
        if (j % 2 == 1) gs += kWg21[j / 2] * pair;
    }
    const cplx mean = 0.5 * k;
    double asc = kWgk21[10] * std::abs(fv[20] - mean);
    for (int j = 0; j < 10; ++j)
        asc += kWgk21[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
    asc *= std::abs(h);
    double err = std::abs(h * (k - gs));
    if (asc > 0.0 && err > 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    return {h * k, err};
}

// Panel edges on [u, v] (same side of y) with equal phase increments of at
// most `budget`.
void phase_panels(double u, double v, double y, double alpha, double budget, std::vector<double>& edges) {
    const double du = std::abs(u - y), dv = std::abs(v - y);
    const double span = alpha * std::abs(dv * dv - du * du);
    const double n = std::max(1.0, std::ceil(span / budget));
    const auto count = static_cast<std::size_t>(n);
    edges.push_back(u);
    const bool right = (u + v) * 0.5 > y;
    const double d0 = right ? du : dv, d1 = right ? dv : du;
    for (std::size_t k = 1; k < count; ++k) {
        const double frac = static_cast<double>(right ? k : count - k) / n;
        const double d = std::sqrt(d0 * d0 + frac * (d1 * d1 - d0 * d0));
        edges.push_back(right ? y + d : y - d);
    }
}

std::size_t phase_panel_count(double u, double v, double y, double alpha, double budget) {
    const double du = std::abs(u - y), dv = std::abs(v - y);
    const double span = alpha * std::abs(dv * dv - du * du);
    const double n = std::max(1.0, std::ceil(span / budget));
    return n > 1e18 ? std::numeric_limits<std::size_t>::max() / 4 : static_cast<std::size_t>(n);
}

cplx quadrature_impl(double a, double b, double A, double B, double y, double alpha, const Modulation* g,
                     const QuadTolerance& tol) {
    if (!std::isfinite(A) || !std::isfinite(B) || !(A < B))
        throw DomainError("oscillatory_quadrature: requires finite A < B");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("oscillatory_quadrature: alpha must be positive");
    if (!std::isfinite(y) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("oscillatory_quadrature: non-finite argument");
    tol.validate();
    if (a == 0.0 && b == 0.0) return 0.0;

    std::vector<std::pair<double, double>> pieces;
    if (A < y && y < B) {
        pieces = {{A, y}, {y, B}};
    } else {
        pieces = {{A, B}};
    }

    double budget = kPi / 4.0;
    cplx best = std::numeric_limits<double>::quiet_NaN();
    double best_err = std::numeric_limits<double>::infinity();
    std::vector<double> edges;
    while (true) {
        std::size_t needed = 0;
        for (auto [u, v] : pieces) needed += phase_panel_count(u, v, y, alpha, budget);
        const bool capped = needed > tol.max_subdivisions;
        const double used_budget = capped ? budget * static_cast<double>(needed) / tol.max_subdivisions : budget;

        Compensated re, im;
        double gk_err = 0.0, sq = 0.0;
        for (auto [u, v] : pieces) {
            edges.clear();
            phase_panels(u, v, y, alpha, used_budget, edges);
            edges.push_back(v);
            for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
                const PanelResult pr = gk21_panel(a, b, edges[i], edges[i + 1], y, alpha, g);
                re.add(pr.kronrod.real());
                im.add(pr.kronrod.imag());
                gk_err += pr.error;
                sq += std::norm(pr.kronrod);
            }
        }
        const cplx total(re.value(), im.value());
        const double floor = 4.0 * kEps * std::sqrt(sq) + 2.0 * kEps * std::abs(total);
        const double mag = std::abs(total);
        const double achieved = mag > 0.0 ? (gk_err + floor) / mag : (gk_err + floor > 0.0 ? 1.0 : 0.0);
        if (achieved < best_err) {
            best = total;
            best_err = achieved;
        }
        if (achieved <= tol.rel_tol) return total;
        if (capped || 2 * needed > tol.max_subdivisions)
            throw AccuracyError("oscillatory_quadrature: subdivision cap reached", best, best_err);
        if (gk_err <= floor)
            throw AccuracyError("oscillatory_quadrature: rounding floor exceeds tolerance", best, best_err);
        budget *= 0.5;
    }
}

}  // namespace

cplx fresnel_raw(double x) {
    if (!std::isfinite(x)) throw DomainError("fresnel_raw: argument must be finite");
    if (x < 0.0) return std::conj(fresnel_raw(-x));
    if (x <= kSeriesMax) return power_series(x);
    const TailRatio t = fresnel_tail_ratio(x);
    return half_line(x) - kI * std::polar(1.0, x) * t.r / (2.0 * x);
}

TailRatio fresnel_tail_ratio(double x) {
    if (!std::isfinite(x) || x < 0.0) throw DomainError("fresnel_tail_ratio: argument must be finite and >= 0");
    if (x == 0.0) return {0.0, -1.0};
    if (x <= kSeriesMax) {
        const cplx tail = half_line(x) - power_series(x);
        const cplx r = -2.0 * kI * x * tail * std::polar(1.0, -x);
        return {r, r - 1.0};
    }
    if (x < kAsymptoticMin) return continued_fraction(x);
    return asymptotic_ratio(x);
}

AsymptoticValue fresnel_asymptotic(double x, int n_terms) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("fresnel_asymptotic: requires finite x > 0");
    if (n_terms < 0) throw DomainError("fresnel_asymptotic: n_terms must be >= 0");
    // Term ratio is (n + 1/2)/x, so terms shrink until n reaches x - 1/2.
    const double smallest = std::ceil(x - 0.5);
    const int used = smallest < n_terms ? static_cast<int>(smallest) : n_terms;

    cplx sum = 0.0, phase = 1.0;
    double mag = 1.0 / x;  // Gamma(n+1/2) / (Gamma(1/2) x^{n+1})
    for (int n = 0; n < used; ++n) {
        sum += phase * mag;
        phase *= -kI;
        mag *= (n + 0.5) / x;
    }
    const cplx value = half_line(x) - 0.5 * kI * std::polar(1.0, x) * sum;
    return {value, 0.5 * mag, used};
}

namespace {

cplx reduced_phase(double q, double q_e) {
    const double k = std::nearbyint(q / (2.0 * kPi));
    double r = std::fma(-k, kTwoPiHi, q);
    r -= k * kTwoPiMid;
    r -= k * kTwoPiLo;
    r += q_e;
    return {std::cos(r), std::sin(r)};
}

}  // namespace

cplx gaussian_phase(double alpha, double x, double y) {
    double u, ue;
    two_sum(x, -y, u, ue);
    const double sq = u * u;
    const double sq_e = std::fma(u, u, -sq) + 2.0 * u * ue;
    const double q = alpha * sq;
    const double q_e = std::fma(alpha, sq, -q) + alpha * sq_e;
    return reduced_phase(q, q_e);
}

cplx product_phase(double k, double x) {
    const double q = k * x;
    return reduced_phase(q, std::fma(k, x, -q));
}

namespace {

// F(x) = -U T(alpha U^2) with U = x - y, the far-side primitive of exp(i alpha U^2).
cplx tail_primitive(double x, double y, double alpha) {
    const double U = x - y;
    if (U == 0.0) return 0.0;
    const TailRatio t = fresnel_tail_ratio(alpha * U * U);
    return -kI * gaussian_phase(alpha, x, y) * t.r / (2.0 * alpha * U);
}

}  // namespace

cplx linear_gaussian_integral(cplx a, cplx b, double A, double B, double y, double alpha) {
    if (!std::isfinite(A) || !std::isfinite(B) || !(A < B))
        throw DomainError("linear_gaussian_integral: requires finite A < B");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("linear_gaussian_integral: alpha must be positive");
    if (!std::isfinite(y)) throw DomainError("linear_gaussian_integral: y must be finite");
    const double UA = A - y, UB = B - y;
    const cplx EA = gaussian_phase(alpha, A, y), EB = gaussian_phase(alpha, B, y);
    const cplx slope_part = a * (EB - EA) / (2.0 * kI * alpha);
    cplx flat;
    if ((UA > 0.0 && UB > 0.0) || (UA < 0.0 && UB < 0.0)) {
        flat = tail_primitive(B, y, alpha) - tail_primitive(A, y, alpha);
    } else {
        flat = UB * fresnel_raw(alpha * UB * UB) - UA * fresnel_raw(alpha * UA * UA);
    }
    return slope_part + (a * y + b) * flat;
}

cplx oscillatory_quadrature(double coeff_a, double coeff_b, double A, double B, double y, double alpha,
                            const QuadTolerance& tol) {
    return quadrature_impl(coeff_a, coeff_b, A, B, y, alpha, nullptr, tol);
}

cplx oscillatory_quadrature(double coeff_a, double coeff_b, double A, double B, double y, double alpha,
                            const Modulation& g, const QuadTolerance& tol) {
    if (!g) throw DomainError("oscillatory_quadrature: empty modulation");
    return quadrature_impl(coeff_a, coeff_b, A, B, y, alpha, &g, tol);
}

namespace {

struct GkReal {
    double value, error, absval;
};

GkReal gk15(const std::function<double(double)>& f, double lo, double hi) {
    const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    std::array<double, 15> fv;
    fv[14] = f(c);
    double k = kWgk15[7] * fv[14], gs = kWg15[3] * fv[14], ab = kWgk15[7] * std::abs(fv[14]);
    for (int j = 0; j < 7; ++j) {
        const double s = h * kXgk15[j];
        fv[2 * j] = f(c - s);
        fv[2 * j + 1] = f(c + s);
        k += kWgk15[j] * (fv[2 * j] + fv[2 * j + 1]);
        ab += kWgk15[j] * (std::abs(fv[2 * j]) + std::abs(fv[2 * j + 1]));
        if (j % 2 == 1) gs += kWg15[j / 2] * (fv[2 * j] + fv[2 * j + 1]);
    }
    const double mean = 0.5 * k;
    double asc = kWgk15[7] * std::abs(fv[14] - mean);
    for (int j = 0; j < 7; ++j) asc += kWgk15[j] * (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
    asc *= std::abs(h);
    double err = std::abs(h * (k - gs));
    if (asc > 0.0 && err > 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    return {h * k, err, std::abs(h) * ab};
}

// Bisects until the Kronrod/Gauss difference fits the absolute budget, which
// is split evenly between the halves.
RealIntegral adaptive_gk15(const std::function<double(double)>& f, double lo, double hi, double budget,
                           int depth) {
    const GkReal r = gk15(f, lo, hi);
    if (depth == 0 || r.error <= std::max(budget, 50.0 * kEps * r.absval)) return {r.value, r.error};
    const double mid = 0.5 * (lo + hi);
    const RealIntegral left = adaptive_gk15(f, lo, mid, 0.5 * budget, depth - 1);
    const RealIntegral right = adaptive_gk15(f, mid, hi, 0.5 * budget, depth - 1);
    return {left.value + right.value, left.error + right.error};
}

}  // namespace

RealIntegral integrate_panels(const std::function<double(double)>& f, double lo, double hi, double max_panel,
                              double rel_tol) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw DomainError("integrate_panels: bad range");
    if (!(max_panel > 0.0)) throw DomainError("integrate_panels: panel width must be positive");
    if (hi == lo) return {0.0, 0.0};
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / max_panel)));
    auto edge = [&](std::size_t i) {
        return i == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    };
    std::vector<GkReal> first(n);
    parallel_for(n, [&](std::size_t i) { first[i] = gk15(f, edge(i), edge(i + 1)); });
    // One absolute budget for the whole range, shared out by width, so panels
    // where f is locally tiny are not refined down to rounding noise.
    double mass = 0.0;
    for (const auto& g : first) mass += g.absval;
    const double budget = rel_tol * mass / static_cast<double>(n);
    std::vector<RealIntegral> parts(n);
    parallel_for(n, [&](std::size_t i) {
        parts[i] = first[i].error <= budget ? RealIntegral{first[i].value, first[i].error}
                                            : adaptive_gk15(f, edge(i), edge(i + 1), budget, 20);
    });
    Compensated v;
    double err = 0.0;
    for (const auto& p : parts) {
        v.add(p.value);
        err += p.error;
    }
    return {v.value(), err};
}

}  // namespace qcl
