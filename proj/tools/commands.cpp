#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "io.hpp"
#include "qcl/errors.hpp"
#include "qcl/moments.hpp"
#include "qcl/numerics.hpp"
#include "qcl/parallel.hpp"
#include "qcl/polygon.hpp"
#include "qcl/potential.hpp"
#include "qcl/rectangle.hpp"
#include "qcl/zeno.hpp"

namespace qcl::cli {

namespace {

constexpr double kDiscontinuousExponent = -2.0;
constexpr double kDiscontinuousTol = 0.05;
constexpr double kContinuousExponent = -6.0;
constexpr double kContinuousTol = 0.3;
constexpr double kFitR2 = 0.999;

PhysParams params_of(const Common& c) {
    PhysParams p{c.mass, c.hbar};
    p.validate();
    return p;
}

std::vector<double> log_points(double lo, double hi, std::size_t per_decade) {
    const double span = std::log10(hi / lo);
    const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(span * static_cast<double>(per_decade))) + 1);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    ys.back() = hi;
    return ys;
}

json tail_json(const TailFit& f) {
    return {{"exponent", f.exponent}, {"intercept", f.intercept}, {"r2", f.r2},
            {"y_min", f.y_min},       {"y_max", f.y_max},         {"bins", f.bins}};
}

json moment_json(const MomentCurve& m) {
    return {{"verdict", verdict_name(m.verdict)},
            {"delta", m.delta},
            {"cutoffs", m.cutoffs},
            {"partials", m.partials},
            {"growth_coeff", m.growth_coeff},
            {"growth_se", m.growth_se},
            {"log_r2", m.log_r2},
            {"m_inf", m.m_inf},
            {"sat_coeff", m.sat_coeff},
            {"sat_coeff_se", m.sat_coeff_se},
            {"sat_exponent", m.sat_exponent},
            {"sat_r2", m.sat_r2},
            {"residual_exponent", m.residual_exponent},
            {"residual_r2", m.residual_r2}};
}

std::string tail_class(double exponent) {
    if (std::abs(exponent - kDiscontinuousExponent) <= kDiscontinuousTol) return "discontinuous";
    if (std::abs(exponent - kContinuousExponent) <= kContinuousTol) return "continuous";
    return "unclassified";
}

Polygon polygon_from(const std::string& shape, const std::string& samples, double a, std::size_t n,
                     std::uint64_t seed, bool vanishing) {
    if (!samples.empty()) {
        std::vector<double> x;
        std::vector<cplx> v;
        read_samples(samples, x, v);
        return Polygon::build(x, v).normalized();
    }
    return make_shape(parse_shape(shape), a, n, seed, vanishing);
}

void moment_csv(Artifacts& out, const std::string& name, const MomentCurve& m) {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < m.cutoffs.size(); ++k) rows.push_back({m.cutoffs[k], m.partials[k]});
    out.csv(name, {"b", "M"}, rows);
}

void print_status(const std::string& cmd, int code) {
    fmt::print("{}: {}\n", cmd, code == kOk ? "ok" : code == kMismatch ? "verdict mismatch" : "error");
}

}  // namespace

int cmd_rectangle(const Common& c, const RectangleConfig& cfg) {
    const PhysParams params = params_of(c);
    RectangleState st{cfg.left, cfg.right, cfg.t, params};
    st.validate();
    const auto [lo, hi] = parse_window(cfg.window);
    if (cfg.ppd < 4 || cfg.curve_ppd < 1) throw DomainError("rectangle: points per decade too small");

    Artifacts out(c.out);
    const Sampler density = [&](double y) { return std::norm(propagate_rectangle(st, y)); };

    const TailFit tail = tail_exponent_fit(density, lo, hi, cfg.ppd);

    const auto ys = log_points(lo, hi, cfg.curve_ppd);
    std::vector<std::vector<double>> rows(ys.size());
    parallel_for(ys.size(), [&](std::size_t i) {
        const cplx v = propagate_rectangle(st, ys[i]);
        rows[i] = {ys[i], v.real(), v.imag(), std::norm(v)};
    });
    out.csv("rectangle_density.csv", {"y", "re", "im", "density"}, rows);

    const double width = cfg.right - cfg.left;
    const double alpha = st.alpha();
    const double delta = std::min(default_inner_cutoff(cfg.t, params), hi / 1e3);
    MomentOptions mo;
    mo.panel_width = std::min(0.25, 0.5 / (alpha * std::max(1.0, width)));
    // Moments are taken on the far side of the right edge.
    const Sampler shifted = [&](double u) { return density(cfg.right + u); };
    const MomentCurve mc = moment_divergence(shifted, delta, hi, std::log10(hi / lo), mo);
    moment_csv(out, "rectangle_moments.csv", mc);

    const NormResult norm = rectangle_norm(st);

    if (c.svg) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : rows) pts.emplace_back(r[0], r[3]);
        out.svg("rectangle_density.svg", "|Psi(y,t)|^2", {{"density", pts}}, true, true);
    }

    const bool tail_ok = std::abs(tail.exponent - kDiscontinuousExponent) <= kDiscontinuousTol && tail.r2 >= kFitR2;
    const bool moment_ok = mc.verdict == Verdict::divergent_log;
    const int code = tail_ok && moment_ok ? kOk : kMismatch;

    json config = {{"left", cfg.left}, {"right", cfg.right}, {"t", cfg.t},     {"window", cfg.window},
                   {"ppd", cfg.ppd},   {"curve_ppd", cfg.curve_ppd},           {"mass", c.mass},
                   {"hbar", c.hbar},   {"svg", c.svg}};
    json results = {{"tail", tail_json(tail)},
                    {"moment", moment_json(mc)},
                    {"norm", {{"total", norm.total}, {"window", norm.window}, {"remainder", norm.remainder}}}};
    json verdicts = {{"tail_exponent", {{"expected", kDiscontinuousExponent}, {"tolerance", kDiscontinuousTol},
                                        {"pass", tail_ok}}},
                     {"moment", {{"expected", "divergent-log"}, {"got", verdict_name(mc.verdict)}, {"pass", moment_ok}}}};
    write_report(out, "rectangle", config, results, verdicts, code);
    fmt::print("tail exponent {:.4f} (r2 {:.6f}), moment verdict {}, norm {:.12f}\n", tail.exponent, tail.r2,
               verdict_name(mc.verdict), norm.total);
    print_status("rectangle", code);
    return code;
}

int cmd_polygon(const Common& c, const PolygonConfig& cfg) {
    const PhysParams params = params_of(c);
    if (!(cfg.dt > 0.0)) throw DomainError("polygon: dt must be positive");
    if (!(cfg.tol > 0.0) || cfg.tol >= 1e-2) throw DomainError("polygon: tol must lie in (0, 1e-2)");
    if (cfg.compare_points < 1 || cfg.ppd < 4) throw DomainError("polygon: point counts too small");
    const auto [lo, hi] = parse_window(cfg.window);
    const Polygon poly = polygon_from(cfg.shape, cfg.samples, cfg.a, cfg.n_segments, cfg.seed, cfg.vanishing);
    const double alpha = params.alpha(cfg.dt);
    const double edge = poly.vertices().back();

    Artifacts out(c.out);
    PropagateOptions opts;
    opts.tol.rel_tol = cfg.tol;

    std::vector<double> cmp_y;
    if (cfg.compare_points == 1) {
        cmp_y = {lo};
    } else {
        for (std::size_t i = 0; i < cfg.compare_points; ++i)
            cmp_y.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(cfg.compare_points - 1)));
        cmp_y.back() = hi;
    }
    std::vector<std::vector<double>> rows(cmp_y.size());
    double max_asym_err = 0.0, max_tele = 0.0;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < cmp_y.size(); ++i) {
        const double y = edge + cmp_y[i];
        const cplx q = propagate_polygon(poly, y, cfg.dt, params, Method::quadrature, opts);
        const cplx e = propagate_polygon(poly, y, cfg.dt, params, Method::exact, opts);
        cplx as(NAN, NAN);
        double tele = NAN;
        if (opts.far_field.contains(poly.vertices().front(), edge, y, alpha)) {
            as = propagate_polygon(poly, y, cfg.dt, params, Method::asymptotic, opts);
            tele = telescoping_residual(poly, y, cfg.dt, params, opts.far_field);
            max_tele = std::max(max_tele, tele);
            max_asym_err = std::max(max_asym_err, std::abs(as - q) / std::abs(q));
        } else {
            ++skipped;
        }
        rows[i] = {y, as.real(), as.imag(), q.real(), q.imag(), e.real(), e.imag(),
                   std::abs(as - q) / std::abs(q), std::abs(e - q) / std::abs(q), tele};
    }
    out.csv("polygon_compare.csv",
            {"y", "asym_re", "asym_im", "quad_re", "quad_im", "exact_re", "exact_im", "rel_err_asym", "rel_err_exact",
             "telescoping_residual"},
            rows);

    const Sampler density = [&](double u) {
        return std::norm(propagate_polygon(poly, edge + u, cfg.dt, params, Method::exact));
    };
    const TailFit tail = tail_exponent_fit(density, lo, hi, cfg.ppd);

    std::vector<std::vector<double>> vrows;
    for (std::size_t j = 0; j < poly.values().size(); ++j)
        vrows.push_back({poly.vertices()[j], poly.values()[j].real(), poly.values()[j].imag()});
    out.csv("polygon_vertices.csv", {"x", "re", "im"}, vrows);

    if (c.svg) {
        std::vector<std::pair<double, double>> pts;
        for (double u : log_points(lo, hi, 50)) pts.emplace_back(u, density(u));
        out.svg("polygon_density.svg", "|Psi(y,dt)|^2 beyond the right edge", {{"exact", pts}}, true, true);
    }

    const bool continuous = poly.endpoints_vanish();
    const double expected = continuous ? kContinuousExponent : kDiscontinuousExponent;
    const double tol = continuous ? kContinuousTol : kDiscontinuousTol;
    const bool tail_ok = std::abs(tail.exponent - expected) <= tol && tail.r2 >= kFitR2;
    const bool tele_ok = max_tele <= 1e-12;
    const int code = tail_ok && tele_ok ? kOk : kMismatch;

    json config = {{"shape", cfg.samples.empty() ? cfg.shape : "samples"},
                   {"samples", cfg.samples},
                   {"a", cfg.a},
                   {"n_segments", poly.segments()},
                   {"seed", cfg.seed},
                   {"vanishing", cfg.vanishing},
                   {"dt", cfg.dt},
                   {"window", cfg.window},
                   {"ppd", cfg.ppd},
                   {"compare_points", cfg.compare_points},
                   {"tol", cfg.tol},
                   {"mass", c.mass},
                   {"hbar", c.hbar},
                   {"svg", c.svg}};
    json results = {{"tail", tail_json(tail)},
                    {"endpoints_vanish", continuous},
                    {"max_rel_err_asymptotic", max_asym_err},
                    {"max_telescoping_residual", max_tele},
                    {"near_field_points", skipped}};
    json verdicts = {{"tail_exponent", {{"expected", expected}, {"tolerance", tol}, {"pass", tail_ok}}},
                     {"telescoping", {{"threshold", 1e-12}, {"pass", tele_ok}}}};
    write_report(out, "polygon", config, results, verdicts, code);
    fmt::print("tail exponent {:.4f} (r2 {:.6f}, expected {}), telescoping residual {:.3e}\n", tail.exponent,
               tail.r2, expected, max_tele);
    print_status("polygon", code);
    return code;
}

int cmd_zeno(const Common& c, const ZenoConfig& cfg) {
    const PhysParams params = params_of(c);
    if (!(cfg.a > 0.0) || !(cfg.horizon > 0.0)) throw DomainError("zeno: a and horizon must be positive");
    if (cfg.padding < 8.0) throw DomainError("zeno: padding must be >= 8 (L >= 8a)");
    if (!(cfg.cells_per_a >= 16.0)) throw DomainError("zeno: cells-per-a must be >= 16");
    if (cfg.mode != "both" && cfg.mode != "sharp" && cfg.mode != "tapered")
        throw DomainError("zeno: mode must be sharp, tapered or both");
    if (cfg.dt < 0.0 || cfg.dt > cfg.horizon) throw DomainError("zeno: need 0 < dt <= horizon");
    if (cfg.ladder_min < 1 || cfg.ladder_max < cfg.ladder_min) throw DomainError("zeno: bad ladder");
    const double w = cfg.taper_width < 0.0 ? cfg.a / 8.0 : cfg.taper_width;

    std::vector<ProjectionMode> modes;
    if (cfg.mode != "tapered") modes.push_back(ProjectionMode::sharp);
    if (cfg.mode != "sharp") modes.push_back(ProjectionMode::tapered);

    const ComplexField init = half_sine_field(cfg.a, cfg.padding * cfg.a, cfg.a / cfg.cells_per_a);
    auto protocol = [&](ProjectionMode m, double period) {
        MeasurementProtocol p;
        p.a = cfg.a;
        p.mode = m;
        p.taper_width = w;
        p.period = period;
        p.horizon = cfg.horizon;
        p.validate();
        return p;
    };

    std::vector<std::size_t> ladder;
    if (cfg.dt > 0.0) {
        ladder.push_back(static_cast<std::size_t>(std::max(1.0, std::round(cfg.horizon / cfg.dt))));
    } else {
        for (std::size_t n = cfg.ladder_min; n <= cfg.ladder_max; n *= 2) ladder.push_back(n);
    }

    Artifacts out(c.out);
    json results = json::object(), verdicts = json::object();
    bool ok = true;
    std::vector<std::vector<double>> finals(ladder.size());
    for (std::size_t i = 0; i < ladder.size(); ++i) finals[i] = {static_cast<double>(ladder[i]), cfg.horizon / ladder[i]};
    std::vector<std::vector<double>> leak_rows;
    std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> plot;
    double exponents[2] = {NAN, NAN};
    double r2s[2] = {NAN, NAN};

    for (ProjectionMode m : modes) {
        const std::string name = mode_name(m);
        std::vector<std::vector<double>> rows;
        std::vector<double> survival;
        json runs = json::array();
        for (std::size_t i = 0; i < ladder.size(); ++i) {
            const ZenoRun run = run_protocol(protocol(m, cfg.horizon / static_cast<double>(ladder[i])), init, params);
            for (std::size_t k = 0; k < run.steps; ++k)
                rows.push_back({static_cast<double>(ladder[i]), static_cast<double>(k + 1),
                                run.dt * static_cast<double>(k + 1), run.survivals[k], run.cumulative[k],
                                run.exterior[k], run.boundary_leak[k], run.far_leak[k]});
            survival.push_back(run.final_survival());
            finals[i].push_back(run.final_survival());
            runs.push_back({{"steps", run.steps},
                            {"dt", run.dt},
                            {"final_survival", run.final_survival()},
                            {"first_leak", run.exterior.front()},
                            {"first_boundary_leak", run.boundary_leak.front()},
                            {"first_far_leak", run.far_leak.front()},
                            {"delta", run.delta},
                            {"guard_max", run.guard_max},
                            {"leak_mismatch", run.leak_mismatch}});
        }
        out.csv("zeno_" + name + ".csv", {"n", "step", "t", "q", "cumulative", "exterior", "boundary_leak", "far_leak"},
                rows);
        json mres = {{"runs", runs}};

        if (ladder.size() > 1) {
            std::vector<MeasurementProtocol> fam;
            for (double d : default_leak_periods(cfg.horizon)) fam.push_back(protocol(m, d));
            const LeakScaling ls = leak_scaling(fam, init, params);
            if (leak_rows.empty())
                for (double d : ls.dts) leak_rows.push_back({d});
            for (std::size_t k = 0; k < ls.leaks.size(); ++k) leak_rows[k].push_back(ls.leaks[k]);
            mres["leak_exponent"] = ls.fit.exponent;
            mres["leak_r2"] = ls.fit.r2;
            mres["leak_conclusive"] = ls.conclusive;
            exponents[m == ProjectionMode::tapered] = ls.fit.exponent;
            r2s[m == ProjectionMode::tapered] = ls.fit.r2;

            std::vector<std::pair<double, double>> pts;
            for (std::size_t i = 0; i < ladder.size(); ++i) pts.emplace_back(static_cast<double>(ladder[i]), survival[i]);
            plot.emplace_back(name, pts);

            if (m == ProjectionMode::tapered) {
                bool inc = true;
                for (std::size_t i = 1; i < survival.size(); ++i) inc = inc && survival[i] > survival[i - 1];
                verdicts["tapered_zeno"] = {{"expected", "strictly increasing survival"},
                                            {"finest_survival", survival.back()},
                                            {"pass", inc}};
                ok = ok && inc;
            } else {
                const double last_step = survival.back() - survival[survival.size() - 2];
                const bool flat = last_step <= 1e-4;
                verdicts["sharp_no_zeno"] = {{"expected", "non-increasing or flat within 1e-4 on the finest rungs"},
                                             {"finest_step_change", last_step},
                                             {"pass", flat}};
                ok = ok && flat;
            }
        }
        results[name] = mres;
    }

    std::vector<std::string> hdr = {"n", "dt"};
    for (ProjectionMode m : modes) hdr.push_back(mode_name(m) + "_survival");
    out.csv("zeno_ladder.csv", hdr, finals);
    if (!leak_rows.empty()) {
        std::vector<std::string> lh = {"dt"};
        for (ProjectionMode m : modes) lh.push_back(mode_name(m) + "_leak");
        out.csv("zeno_leak.csv", lh, leak_rows);
    }
    if (modes.size() == 2 && ladder.size() > 1) {
        const double gap = exponents[1] - exponents[0];
        const bool gap_ok = gap >= 1.0 && r2s[0] >= 0.99 && r2s[1] >= 0.99;
        verdicts["leak_exponent_gap"] = {{"gap", gap}, {"threshold", 1.0}, {"pass", gap_ok}};
        ok = ok && gap_ok;
    }
    if (c.svg && !plot.empty()) out.svg("zeno_survival.svg", "survival at T vs measurements", plot, true, false);

    const int code = ok ? kOk : kMismatch;
    json config = {{"a", cfg.a},
                   {"horizon", cfg.horizon},
                   {"taper_width", w},
                   {"mode", cfg.mode},
                   {"dt", cfg.dt},
                   {"ladder", ladder},
                   {"padding", cfg.padding},
                   {"cells_per_a", cfg.cells_per_a},
                   {"mass", c.mass},
                   {"hbar", c.hbar},
                   {"svg", c.svg}};
    write_report(out, "zeno", config, results, verdicts, code);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        std::string line = fmt::format("n={:4d}", ladder[i]);
        for (std::size_t k = 0; k < modes.size(); ++k) line += fmt::format("  {} {:.6f}", mode_name(modes[k]), finals[i][2 + k]);
        fmt::print("{}\n", line);
    }
    if (ladder.size() > 1) {
        fmt::print("summary: tapered {}, sharp {}\n",
                   verdicts.contains("tapered_zeno") ? (verdicts["tapered_zeno"]["pass"].get<bool>() ? "zeno" : "no-zeno") : "n/a",
                   verdicts.contains("sharp_no_zeno") ? (verdicts["sharp_no_zeno"]["pass"].get<bool>() ? "no-zeno" : "zeno") : "n/a");
    }
    print_status("zeno", code);
    return code;
}

int cmd_potential(const Common& c, const PotentialConfig& cfg) {
    const PhysParams params = params_of(c);
    if (!(cfg.dt > 0.0)) throw DomainError("potential: dt must be positive");
    const auto [lo, hi] = parse_window(cfg.window);
    const PotentialSpec v = make_potential(cfg.potential, cfg.amplitude);
    const PhaseConvention conv = parse_convention(cfg.convention);
    const Polygon poly = make_shape(parse_shape(cfg.shape), cfg.a, cfg.n_segments, cfg.seed, false);
    QuadTolerance tol;
    tol.rel_tol = cfg.tol;
    tol.validate();
    const double edge = poly.vertices().back();

    Artifacts out(c.out);
    const Sampler with_v = [&](double u) {
        return std::norm(propagate_short_time_with_potential(poly, v, cfg.dt, edge + u, params, conv, tol));
    };
    const Sampler free = [&](double u) { return std::norm(propagate_polygon(poly, edge + u, cfg.dt, params, Method::exact)); };
    const TailFit fv = tail_exponent_fit(with_v, lo, hi, cfg.ppd);
    const TailFit ff = tail_exponent_fit(free, lo, hi, cfg.ppd);

    const auto ys = log_points(lo, hi, 10);
    std::vector<std::vector<double>> rows(ys.size());
    parallel_for(ys.size(), [&](std::size_t i) { rows[i] = {ys[i] + edge, with_v(ys[i]), free(ys[i])}; });
    out.csv("potential_density.csv", {"y", "density_v", "density_free"}, rows);
    if (c.svg) {
        std::vector<std::pair<double, double>> a, b;
        for (std::size_t i = 0; i < ys.size(); ++i) {
            a.emplace_back(ys[i], rows[i][1]);
            b.emplace_back(ys[i], rows[i][2]);
        }
        out.svg("potential_density.svg", "tail with and without V", {{"with V", a}, {"free", b}}, true, true);
    }

    const std::string expected = poly.endpoints_vanish() ? "continuous" : "discontinuous";
    const std::string cls_v = tail_class(fv.exponent), cls_f = tail_class(ff.exponent);
    const bool same = cls_v == cls_f;
    const bool match = cls_v == expected;
    const int code = same && match ? kOk : kMismatch;

    json config = {{"potential", cfg.potential}, {"amplitude", cfg.amplitude}, {"convention", cfg.convention},
                   {"shape", cfg.shape},         {"a", cfg.a},                 {"n_segments", cfg.n_segments},
                   {"seed", cfg.seed},           {"dt", cfg.dt},               {"window", cfg.window},
                   {"ppd", cfg.ppd},             {"tol", cfg.tol},             {"mass", c.mass},
                   {"hbar", c.hbar},             {"svg", c.svg}};
    json results = {{"with_potential", tail_json(fv)}, {"free", tail_json(ff)}, {"dt_times_bound", cfg.dt * v.bound}};
    json verdicts = {{"class_with_potential", cls_v},
                     {"class_free", cls_f},
                     {"expected_class", expected},
                     {"invariant", {{"pass", same}}},
                     {"expected", {{"pass", match}}}};
    write_report(out, "potential", config, results, verdicts, code);
    fmt::print("exponent with V {:.4f} ({}), free {:.4f} ({}), expected {}\n", fv.exponent, cls_v, ff.exponent, cls_f,
               expected);
    print_status("potential", code);
    return code;
}

int cmd_fresnel_check(const Common& c, const FresnelConfig& cfg) {
    if (!(cfg.x_max >= 1e4) || cfg.per_decade < 1) throw DomainError("fresnel-check: need x-max >= 1e4");
    Artifacts out(c.out);
    std::vector<double> xs = {0.0};
    for (double x : log_points(1.0, cfg.x_max, cfg.per_decade)) xs.push_back(x);
    for (double x : {1e2, 1e3, 1e4})
        if (std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    std::sort(xs.begin(), xs.end());

    std::vector<std::vector<double>> rows;
    bool conj_ok = true;
    std::vector<double> fit_x, fit_err[4];
    for (double x : xs) {
        const cplx raw = fresnel_raw(x);
        const cplx neg = fresnel_raw(-x);
        const bool conj = neg == std::conj(raw);
        conj_ok = conj_ok && conj;
        std::vector<double> row = {x, raw.real(), raw.imag()};
        const bool fit_point = x == 1e2 || x == 1e3 || x == 1e4;
        if (fit_point) fit_x.push_back(x);
        for (int n = 0; n < 4; ++n) {
            if (x >= 1.0) {
                const AsymptoticValue av = fresnel_asymptotic(x, n);
                const double err = std::abs(av.value - raw) / std::abs(raw);
                row.push_back(err);
                row.push_back(av.error_estimate / std::abs(raw));
                if (fit_point) fit_err[n].push_back(err);
            } else {
                row.push_back(NAN);
                row.push_back(NAN);
            }
        }
        row.push_back(conj ? 1.0 : 0.0);
        rows.push_back(row);
    }
    out.csv("fresnel_check.csv",
            {"x", "raw_re", "raw_im", "rel_err_n0", "est_n0", "rel_err_n1", "est_n1", "rel_err_n2", "est_n2",
             "rel_err_n3", "est_n3", "conjugate_ok"},
            rows);

    json slopes = json::object();
    double slope2 = NAN;
    for (int n = 0; n < 4; ++n) {
        const TailFit f = power_law_fit(fit_x, fit_err[n]);
        slopes[fmt::format("n{}", n)] = {{"slope", f.exponent}, {"r2", f.r2}};
        if (n == 2) slope2 = f.exponent;
    }
    if (c.svg) {
        std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>> series;
        for (int n = 0; n < 4; ++n) {
            std::vector<std::pair<double, double>> pts;
            for (const auto& r : rows)
                if (r[0] >= 1.0) pts.emplace_back(r[0], r[3 + 2 * n]);
            series.emplace_back(fmt::format("n_terms={}", n), pts);
        }
        out.svg("fresnel_check.svg", "relative error of the asymptotic series", series, true, true);
    }

    const bool zero_ok = fresnel_raw(0.0) == cplx(1.0, 0.0);
    const bool slope_ok = slope2 <= -3.0 + 0.2;
    const int code = zero_ok && slope_ok && conj_ok ? kOk : kMismatch;
    json config = {{"x_max", cfg.x_max}, {"per_decade", cfg.per_decade}};
    json results = {{"slopes", slopes}, {"x0_value", {fresnel_raw(0.0).real(), fresnel_raw(0.0).imag()}}};
    json verdicts = {{"x0_exact", {{"pass", zero_ok}}},
                     {"slope_n2", {{"slope", slope2}, {"threshold", -2.8}, {"pass", slope_ok}}},
                     {"conjugate_symmetry", {{"pass", conj_ok}}}};
    write_report(out, "fresnel-check", config, results, verdicts, code);
    fmt::print("n_terms=2 slope {:.4f} (threshold -2.8), conjugate symmetry {}\n", slope2, conj_ok ? "ok" : "FAILED");
    print_status("fresnel-check", code);
    return code;
}

int cmd_moments(const Common& c, const MomentsConfig& cfg) {
    const PhysParams params = params_of(c);
    if (cfg.source != "position" && cfg.source != "momentum") throw DomainError("moments: source must be position or momentum");
    if (!(cfg.dt > 0.0)) throw DomainError("moments: dt must be positive");
    if (cfg.delta < 0.0 || cfg.decades < 0.0) throw DomainError("moments: delta and decades must be >= 0");
    if (!(cfg.speed_threshold >= 0.0)) throw DomainError("moments: speed threshold must be >= 0");
    const bool momentum = cfg.source == "momentum";
    const double decades = cfg.decades > 0.0 ? cfg.decades : momentum ? 2.0 : 3.0;

    std::vector<double> speed_b;
    {
        std::stringstream ss(cfg.speed_cutoffs);
        for (std::string tok; std::getline(ss, tok, ',');) {
            if (tok.empty()) continue;
            try {
                speed_b.push_back(std::stod(tok));
            } catch (const std::logic_error&) {
                throw DomainError("moments: bad speed cutoff '" + tok + "'");
            }
        }
    }

    // The rectangle is the constant polygon on [left, right]; shifting the
    // position axis keeps every density one-sided beyond the right edge.
    const bool rect = cfg.shape == "rectangle";
    const Polygon poly = rect ? make_shape(Shape::constant, 1.0, 1, 0, false)
                              : make_shape(parse_shape(cfg.shape), cfg.a, cfg.n_segments, cfg.seed, false);
    const RectangleState st{0.0, 1.0, cfg.dt, params};
    const double alpha = params.alpha(cfg.dt);
    const double width = rect ? 1.0 : poly.half_width();
    const double edge = rect ? 1.0 : 0.0;

    Sampler density;
    MomentOptions mo;
    mo.cutoffs_per_decade = cfg.cutoffs_per_decade;
    double delta = cfg.delta;
    if (momentum) {
        density = momentum_abs_density(poly, params);
        mo.panel_width = std::min(0.25, 0.5 / width);
        if (delta == 0.0) delta = 1.0;
    } else if (rect) {
        density = [&](double u) { return std::norm(propagate_rectangle(st, edge + u)); };
        mo.panel_width = std::min(0.25, 0.5 / (alpha * width));
        if (delta == 0.0) delta = default_inner_cutoff(cfg.dt, params);
    } else {
        density = [&](double u) { return std::norm(propagate_polygon(poly, u, cfg.dt, params, Method::exact)); };
        mo.panel_width = std::min(0.25, 0.5 / (alpha * width));
        if (delta == 0.0) delta = default_inner_cutoff(cfg.dt, params);
    }
    const MomentCurve mc = moment_divergence(density, delta, cfg.b_max, decades, mo);

    Artifacts out(c.out);
    moment_csv(out, "moments_curve.csv", mc);

    json speeds = json::array();
    if (!momentum && !rect && !speed_b.empty()) {
        std::vector<std::vector<double>> rows;
        for (double b : speed_b) {
            const double s = interval_average_speed(poly, poly.half_width(), b, cfg.dt, params);
            rows.push_back({b, s});
            json entry = {{"b", b}, {"speed", s}};
            if (cfg.speed_threshold > 0.0) entry["exceeds_threshold"] = std::abs(s) > cfg.speed_threshold;
            speeds.push_back(entry);
        }
        out.csv("moments_speed.csv", {"b", "speed"}, rows);
    }
    if (c.svg) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t k = 0; k < mc.cutoffs.size(); ++k) pts.emplace_back(mc.cutoffs[k], mc.partials[k]);
        out.svg("moments_curve.svg", "partial first moment M(b)", {{"M(b)", pts}}, true, false);
    }

    const bool continuous = !rect && poly.endpoints_vanish();
    const Verdict expected = continuous ? Verdict::convergent : Verdict::divergent_log;
    const int code = mc.verdict == expected ? kOk : kMismatch;
    json config = {{"source", cfg.source},
                   {"shape", cfg.shape},
                   {"a", cfg.a},
                   {"n_segments", rect ? 1 : cfg.n_segments},
                   {"seed", cfg.seed},
                   {"dt", cfg.dt},
                   {"delta", delta},
                   {"b_max", cfg.b_max},
                   {"decades", decades},
                   {"cutoffs_per_decade", cfg.cutoffs_per_decade},
                   {"speed_cutoffs", speed_b},
                   {"speed_threshold", cfg.speed_threshold},
                   {"mass", c.mass},
                   {"hbar", c.hbar},
                   {"svg", c.svg}};
    json results = {{"moment", moment_json(mc)}, {"speeds", speeds}};
    json verdicts = {{"moment", {{"expected", verdict_name(expected)},
                                 {"got", verdict_name(mc.verdict)},
                                 {"pass", mc.verdict == expected}}}};
    write_report(out, "moments", config, results, verdicts, code);
    fmt::print("{} moment verdict {} (expected {}), log r2 {:.6f}, sat r2 {:.6f}, q {:.3f}\n", cfg.source,
               verdict_name(mc.verdict), verdict_name(expected), mc.log_r2, mc.sat_r2, mc.sat_exponent);
    print_status("moments", code);
    return code;
}

}  // namespace qcl::cli
