#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"
#include "qcl/errors.hpp"

using namespace qcl::cli;

namespace {

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--out", c.out, "Output directory")->capture_default_str();
    sub->add_flag("--svg", c.svg, "Also write SVG plots");
    sub->add_option("--mass", c.mass, "Particle mass")->capture_default_str();
    sub->add_option("--hbar", c.hbar, "Reduced Planck constant")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free propagation of truncated wave functions: tails, moments and repeated measurement"};
    app.require_subcommand(1);

    Common common;
    RectangleConfig rect;
    PolygonConfig poly;
    ZenoConfig zeno;
    PotentialConfig pot;
    FresnelConfig fres;
    MomentsConfig mom;

    auto* r = app.add_subcommand("rectangle", "Propagate the unit rectangle; tail fit and moment verdict");
    add_common(r, common);
    r->add_option("--left", rect.left)->capture_default_str();
    r->add_option("--right", rect.right)->capture_default_str();
    r->add_option("--t,--dt", rect.t, "Time since truncation")->capture_default_str();
    r->add_option("--window", rect.window, "Tail window lo:hi")->capture_default_str();
    r->add_option("--ppd", rect.ppd, "Tail samples per decade")->capture_default_str();
    r->add_option("--curve-ppd", rect.curve_ppd, "Density curve points per decade")->capture_default_str();

    auto* p = app.add_subcommand("polygon", "Piecewise-linear state: asymptotic vs oracle, telescoping, tail");
    add_common(p, common);
    p->add_option("--shape", poly.shape)->check(CLI::IsMember({"constant", "ramp", "half-sine", "random"}))->capture_default_str();
    p->add_option("--samples", poly.samples, "CSV of x,re[,im] samples (overrides --shape)");
    p->add_option("--a", poly.a)->capture_default_str();
    p->add_option("--n-segments", poly.n_segments)->capture_default_str();
    p->add_option("--seed", poly.seed)->capture_default_str();
    p->add_flag("--vanishing", poly.vanishing, "Random shape with zero endpoints");
    p->add_option("--dt", poly.dt)->capture_default_str();
    p->add_option("--window", poly.window)->capture_default_str();
    p->add_option("--ppd", poly.ppd)->capture_default_str();
    p->add_option("--compare-points", poly.compare_points)->capture_default_str();
    p->add_option("--tol", poly.tol, "Oracle relative tolerance")->capture_default_str();

    auto* z = app.add_subcommand("zeno", "Repeated measurement ladder in sharp and tapered modes");
    add_common(z, common);
    z->add_option("--a", zeno.a)->capture_default_str();
    z->add_option("--horizon", zeno.horizon)->capture_default_str();
    z->add_option("--taper-width", zeno.taper_width, "Default a/8");
    z->add_option("--mode", zeno.mode)->check(CLI::IsMember({"sharp", "tapered", "both"}))->capture_default_str();
    z->add_option("--dt", zeno.dt, "Single period instead of the ladder");
    z->add_option("--ladder-min", zeno.ladder_min)->capture_default_str();
    z->add_option("--ladder-max", zeno.ladder_max)->capture_default_str();
    z->add_option("--padding", zeno.padding, "Half-width L in units of a")->capture_default_str();
    z->add_option("--cells-per-a", zeno.cells_per_a)->capture_default_str();

    auto* v = app.add_subcommand("potential", "Short-time kernel with a bounded potential");
    add_common(v, common);
    v->add_option("--potential", pot.potential)->check(CLI::IsMember({"gaussian", "well", "harmonic-clipped"}))->capture_default_str();
    v->add_option("--amplitude", pot.amplitude)->capture_default_str();
    v->add_option("--convention", pot.convention)->check(CLI::IsMember({"conventional", "literal"}))->capture_default_str();
    v->add_option("--shape", pot.shape)->check(CLI::IsMember({"constant", "ramp", "half-sine", "random"}))->capture_default_str();
    v->add_option("--a", pot.a)->capture_default_str();
    v->add_option("--n-segments", pot.n_segments)->capture_default_str();
    v->add_option("--seed", pot.seed)->capture_default_str();
    v->add_option("--dt", pot.dt)->capture_default_str();
    v->add_option("--window", pot.window)->capture_default_str();
    v->add_option("--ppd", pot.ppd)->capture_default_str();
    v->add_option("--tol", pot.tol)->capture_default_str();

    auto* f = app.add_subcommand("fresnel-check", "Error of the asymptotic series against the reference");
    add_common(f, common);
    f->add_option("--x-max", fres.x_max)->capture_default_str();
    f->add_option("--per-decade", fres.per_decade)->capture_default_str();

    auto* m = app.add_subcommand("moments", "Partial first moments of position or momentum densities");
    add_common(m, common);
    m->add_option("--source", mom.source)->check(CLI::IsMember({"position", "momentum"}))->capture_default_str();
    m->add_option("--shape", mom.shape)
        ->check(CLI::IsMember({"rectangle", "constant", "ramp", "half-sine", "random"}))
        ->capture_default_str();
    m->add_option("--a", mom.a)->capture_default_str();
    m->add_option("--n-segments", mom.n_segments)->capture_default_str();
    m->add_option("--seed", mom.seed)->capture_default_str();
    m->add_option("--dt", mom.dt)->capture_default_str();
    m->add_option("--delta", mom.delta, "Inner cutoff, 0 for automatic")->capture_default_str();
    m->add_option("--b-max", mom.b_max)->capture_default_str();
    m->add_option("--decades", mom.decades, "0: 3 for position, 2 for momentum")->capture_default_str();
    m->add_option("--cutoffs-per-decade", mom.cutoffs_per_decade)->capture_default_str();
    m->add_option("--speed-cutoffs", mom.speed_cutoffs, "Comma list of b for interval speeds")->capture_default_str();
    m->add_option("--speed-threshold", mom.speed_threshold, "Flag interval speeds above this value, 0 to skip")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*r) return cmd_rectangle(common, rect);
        if (*p) return cmd_polygon(common, poly);
        if (*z) return cmd_zeno(common, zeno);
        if (*v) return cmd_potential(common, pot);
        if (*f) return cmd_fresnel_check(common, fres);
        if (*m) return cmd_moments(common, mom);
    } catch (const qcl::ExtinctionError& e) {
        fmt::print(stderr, "extinction: {} (retained {})\n", e.what(), e.retained());
        return kExtinction;
    } catch (const qcl::ParseError& e) {
        fmt::print(stderr, "parse error: {}\n", e.what());
        return kUsage;
    } catch (const qcl::DomainError& e) {
        fmt::print(stderr, "usage error: {}\n", e.what());
        return kUsage;
    } catch (const qcl::ValidityError& e) {
        fmt::print(stderr, "usage error: {}\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return kUsage;
}
