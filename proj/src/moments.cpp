#include "qcl/moments.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "qcl/parallel.hpp"

namespace qcl {

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw DegenerateFitError("linear_fit: need at least two paired points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw DegenerateFitError("linear_fit: abscissae are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        sse += r * r;
    }
    f.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    if (n > 2) {
        const double s2 = sse / static_cast<double>(n - 2);
        f.slope_se = std::sqrt(s2 / sxx);
        double sx2 = 0.0;
        for (double v : x) sx2 += v * v;
        f.intercept_se = std::sqrt(s2 * sx2 / (static_cast<double>(n) * sxx));
    }
    return f;
}

TailFit power_law_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DegenerateFitError("power_law_fit: size mismatch");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DegenerateFitError("power_law_fit: non-positive point");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const LinearFit f = linear_fit(lx, ly);
    TailFit t;
    t.exponent = f.slope;
    t.intercept = f.intercept;
    t.r2 = f.r2;
    t.y_min = *std::min_element(x.begin(), x.end());
    t.y_max = *std::max_element(x.begin(), x.end());
    t.bins = x.size();
    return t;
}

TailFit tail_exponent_fit(const Sampler& density, double y_min, double y_max, std::size_t points_per_decade) {
    if (!(y_min > 0.0) || !(y_max > y_min) || !std::isfinite(y_max))
        throw DomainError("tail_exponent_fit: window must satisfy 0 < y_min < y_max");
    if (points_per_decade < 4) throw DomainError("tail_exponent_fit: points_per_decade must be >= 4");
    const double span = std::log10(y_max / y_min);
    const auto n_points = static_cast<std::size_t>(std::ceil(span * static_cast<double>(points_per_decade))) + 1;
    const auto n_bins = static_cast<std::size_t>(std::floor(std::log2(y_max / y_min)));
    if (n_bins < 3) throw DegenerateFitError("tail_exponent_fit: window spans fewer than three octaves");

    std::vector<double> ys(n_points), ds(n_points);
    for (std::size_t i = 0; i < n_points; ++i)
        ys[i] = y_min * std::pow(y_max / y_min, static_cast<double>(i) / static_cast<double>(n_points - 1));
    parallel_for(n_points, [&](std::size_t i) { ds[i] = density(ys[i]); });

    std::vector<double> best(n_bins, -1.0), where(n_bins, 0.0);
    const double log_span = std::log(y_max / y_min);
    for (std::size_t i = 0; i < n_points; ++i) {
        if (!std::isfinite(ds[i])) throw DomainError("tail_exponent_fit: density returned a non-finite value");
        auto b = static_cast<std::size_t>(std::floor(std::log(ys[i] / y_min) / log_span * n_bins));
        b = std::min(b, n_bins - 1);
        if (ds[i] > best[b]) {
            best[b] = ds[i];
            where[b] = ys[i];
        }
    }
    // Sampling can alias against a fast oscillation and miss the crest, so each
    // bin's best sample is polished by a local maximization over one spacing.
    const double step = std::pow(y_max / y_min, 1.0 / static_cast<double>(n_points - 1));
    parallel_for(n_bins, [&](std::size_t b) {
        if (!(best[b] > 0.0)) return;
        const double lo = std::max(y_min, where[b] / step), hi = std::min(y_max, where[b] * step);
        const auto neg = [&](double y) { return -density(y); };
        const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 40);
        if (-r.second > best[b] && std::isfinite(r.second)) {
            best[b] = -r.second;
            where[b] = r.first;
        }
    });
    double peak = 0.0;
    for (double v : best) peak = std::max(peak, v);
    std::vector<double> bx, by;
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (best[b] > 1e-300 && best[b] > 1e-250 * peak) {
            bx.push_back(where[b]);
            by.push_back(best[b]);
        }
    }
    if (!(peak > 1e-300) || bx.size() < 3) throw DegenerateFitError("tail_exponent_fit: density is zero across the window");
    TailFit t = power_law_fit(bx, by);
    t.y_min = y_min;
    t.y_max = y_max;
    return t;
}

std::string verdict_name(Verdict v) {
    switch (v) {
        case Verdict::divergent_log: return "divergent-log";
        case Verdict::convergent: return "convergent";
        case Verdict::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

struct SaturatingFit {
    double q, m_inf, e, e_se, r2;
};

SaturatingFit saturating_at(const std::vector<double>& b, const std::vector<double>& m, double q) {
    std::vector<double> z(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) z[i] = -std::pow(b[i], -q);
    const LinearFit f = linear_fit(z, m);
    return {q, f.intercept, f.slope, f.slope_se, f.r2};
}

constexpr double kQMin = 0.1, kQMax = 10.0;

}  // namespace

MomentCurve moment_divergence(const Sampler& density, double delta, double b_max, double decades,
                              const MomentOptions& opts) {
    if (!(delta > 0.0) || !(b_max > delta) || !std::isfinite(b_max))
        throw DomainError("moment_divergence: requires 0 < delta < b_max");
    if (!(decades > 0.0)) throw DomainError("moment_divergence: decades must be positive");
    if (b_max / delta < 1e3 * (1.0 - 1e-12))
        throw DomainError("moment_divergence: b_max / delta must span at least three decades");
    if (opts.cutoffs_per_decade < 2) throw DomainError("moment_divergence: need >= 2 cutoffs per decade");

    MomentCurve mc;
    mc.delta = delta;
    const double lo = std::max(delta, b_max * std::pow(10.0, -decades));
    const double span = std::log10(b_max / lo);
    const auto K = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::llround(span * static_cast<double>(opts.cutoffs_per_decade))) + 1);
    for (std::size_t k = 0; k < K; ++k)
        mc.cutoffs.push_back(lo * std::pow(b_max / lo, static_cast<double>(k) / static_cast<double>(K - 1)));
    mc.cutoffs.back() = b_max;

    const Sampler weighted = [&](double y) { return y * density(y); };
    double acc = 0.0;
    double prev = delta;
    for (double b : mc.cutoffs) {
        if (b > prev) acc += integrate_panels(weighted, prev, b, opts.panel_width, opts.rel_tol).value;
        mc.partials.push_back(acc);
        prev = b;
    }

    std::vector<double> lb(K);
    for (std::size_t k = 0; k < K; ++k) lb[k] = std::log(mc.cutoffs[k]);
    const LinearFit lf = linear_fit(lb, mc.partials);
    mc.growth_coeff = lf.slope;
    mc.growth_se = lf.slope_se;
    mc.log_r2 = lf.r2;

    const auto loss = [&](double q) { return 1.0 - saturating_at(mc.cutoffs, mc.partials, q).r2; };
    const auto best = boost::math::tools::brent_find_minima(loss, kQMin, kQMax, 40);
    const SaturatingFit sf = saturating_at(mc.cutoffs, mc.partials, best.first);
    mc.sat_exponent = sf.q;
    mc.m_inf = sf.m_inf;
    mc.sat_coeff = sf.e;
    mc.sat_coeff_se = sf.e_se;
    mc.sat_r2 = sf.r2;

    std::vector<double> bk, dm;
    bool positive = true;
    for (std::size_t k = 0; k + 1 < K; ++k) {
        const double d = mc.partials[k + 1] - mc.partials[k];
        if (!(d > 0.0)) positive = false;
        bk.push_back(mc.cutoffs[k]);
        dm.push_back(d);
    }
    if (positive) {
        const TailFit rf = power_law_fit(bk, dm);
        mc.residual_exponent = -rf.exponent;
        mc.residual_r2 = rf.r2;
    } else {
        mc.residual_exponent = std::numeric_limits<double>::quiet_NaN();
        mc.residual_r2 = 0.0;
    }

    const double thr = opts.r2_threshold, margin = opts.sigma_margin;
    const bool q_interior = sf.q > kQMin * 1.01 && sf.q < kQMax * 0.99;
    const bool log_ok = lf.r2 >= thr && lf.slope > 0.0 && lf.slope > margin * lf.slope_se;
    const bool sat_ok = sf.r2 >= thr && sf.e > margin * sf.e_se && q_interior;
    if (log_ok && (lf.r2 >= sf.r2 || !q_interior))
        mc.verdict = Verdict::divergent_log;
    else if (sat_ok && sf.r2 > lf.r2)
        mc.verdict = Verdict::convergent;
    else
        mc.verdict = Verdict::inconclusive;
    return mc;
}

double default_inner_cutoff(double dt, const PhysParams& params) {
    params.validate();
    if (!(dt > 0.0)) throw DomainError("default_inner_cutoff: dt must be positive");
    return std::max(1.0, 10.0 * std::sqrt(params.hbar * dt / params.mass));
}

namespace {

// int x |psi|^2 and int |psi|^2 over the polygon support; Simpson is exact for these cubics.
std::pair<double, double> polygon_moments(const Polygon& poly) {
    double m0 = 0.0, m1 = 0.0;
    const auto& x = poly.vertices();
    for (std::size_t j = 0; j < poly.segments(); ++j) {
        const double h = x[j + 1] - x[j], xm = 0.5 * (x[j] + x[j + 1]);
        const Segment s = poly.segment(j);
        const double d0 = std::norm(s.a * x[j] + s.b), dm = std::norm(s.a * xm + s.b),
                     d1 = std::norm(s.a * x[j + 1] + s.b);
        m0 += h / 6.0 * (d0 + 4.0 * dm + d1);
        m1 += h / 6.0 * (x[j] * d0 + 4.0 * xm * dm + x[j + 1] * d1);
    }
    return {m0, m1};
}

}  // namespace

double interval_average_speed(const Polygon& poly, double a, double b, double dt, const PhysParams& params,
                              double panel_width) {
    params.validate();
    if (!(dt > 0.0)) throw DomainError("interval_average_speed: dt must be positive");
    if (a < poly.half_width() * (1.0 - 1e-12)) throw DomainError("interval_average_speed: [-a, b] must cover the polygon");
    if (!(b > -a)) throw DomainError("interval_average_speed: requires b > -a");
    const double alpha = params.alpha(dt);
    const double width = poly.half_width();
    const double panel = panel_width > 0.0 ? panel_width : std::min(0.25, 0.5 / (alpha * width));
    const Sampler dens = [&](double y) { return std::norm(propagate_polygon(poly, y, dt, params, Method::exact)); };
    const double n_dt = integrate_panels(dens, -a, b, panel).value;
    const double m_dt = integrate_panels([&](double y) { return y * dens(y); }, -a, b, panel).value;
    const auto [n0, m0] = polygon_moments(poly);
    if (!(n0 > 0.0) || !(n_dt > 0.0)) throw DomainError("interval_average_speed: zero density on the interval");
    return (m_dt / n_dt - m0 / n0) / dt;
}

cplx momentum_amplitude(const Polygon& poly, double p, const PhysParams& params) {
    params.validate();
    const double k = p / params.hbar;
    const auto& x = poly.vertices();
    cplx sum = 0.0;
    for (std::size_t j = 0; j < poly.segments(); ++j) {
        const double h = x[j + 1] - x[j], xm = 0.5 * (x[j] + x[j + 1]);
        const Segment s = poly.segment(j);
        const cplx fm = s.a * xm + s.b;
        const double th = 0.5 * k * h;
        double sinc, g;  // sin(th)/th and (cos th - sin th / th) / th
        if (std::abs(th) < 1e-3) {
            const double t2 = th * th;
            sinc = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
            g = th * (-1.0 / 3.0 + t2 / 30.0 - t2 * t2 / 840.0);
        } else {
            sinc = std::sin(th) / th;
            g = (std::cos(th) - sinc) / th;
        }
        const cplx local = fm * h * sinc + s.a * cplx(0.0, 0.5 * h * h * g);
        sum += product_phase(-k, xm) * local;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * params.hbar);
}

Sampler momentum_density(const Polygon& poly, const PhysParams& params) {
    params.validate();
    return [poly, params](double p) { return std::norm(momentum_amplitude(poly, p, params)); };
}

Sampler momentum_abs_density(const Polygon& poly, const PhysParams& params) {
    params.validate();
    return [poly, params](double p) {
        return std::norm(momentum_amplitude(poly, p, params)) + std::norm(momentum_amplitude(poly, -p, params));
    };
}

double momentum_norm(const Polygon& poly, double P, const PhysParams& params) {
    params.validate();
    if (!(P > 0.0)) throw DomainError("momentum_norm: P must be positive");
    const double hbar = params.hbar, width = poly.half_width();
    const double panel = std::min(0.5, 0.5 * hbar / width);
    const Sampler dens = momentum_density(poly, params);
    const double window = integrate_panels(dens, -P, P, panel, 1e-13).value;
    // Beyond |p| = P: |Phi|^2 ~ hbar |psi_N e^{-ipx_N/hbar} - psi_0 e^{-ipx_0/hbar}|^2 / (2 pi p^2).
    const cplx l = poly.left_value(), r = poly.right_value();
    const double w = width / hbar;
    const double smooth = hbar * (std::norm(l) + std::norm(r)) / (std::numbers::pi * P);
    const double osc = 2.0 * hbar / std::numbers::pi * std::real(r * std::conj(l)) * std::sin(w * P) / (w * P * P);
    return window + smooth + osc;
}

}  // namespace qcl
