#include "qcl/zeno.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <limits>
#include <numbers>

#include "qcl/errors.hpp"
#include "qcl/parallel.hpp"

namespace qcl {

namespace {

constexpr double kExtinction = 1e-15;

// FFTW planning is not thread safe; execution with fftw_execute_dft on
// fftw_malloc'd buffers is.
struct Plans {
    fftw_plan fwd;
    fftw_plan bwd;
};

Plans plans_for(int n) {
    static std::mutex m;
    static std::map<int, Plans> cache;
    std::lock_guard<std::mutex> lock(m);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(n)));
    Plans p{fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE),
            fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE)};
    fftw_free(buf);
    cache.emplace(n, p);
    return p;
}

struct FftwDeleter {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

void check_grid(const ComplexField& f) {
    if (f.amps.empty()) throw DomainError("ComplexField: empty grid");
    if (!(f.dx > 0.0) || !(f.L > 0.0)) throw DomainError("ComplexField: L and dx must be positive");
    if (std::abs(2.0 * f.L - f.dx * static_cast<double>(f.size())) > 1e-9 * f.L)
        throw DomainError("ComplexField: amps do not span [-L, L)");
}

void check_interval(const ComplexField& f, double lo, double hi) {
    if (!(hi > lo)) throw DomainError("projection: interval must have positive length");
    if (lo <= -f.L || hi >= f.L) throw DomainError("projection: interval leaves the grid");
}

double window(double x, double lo, double hi, double w) {
    if (x < lo || x > hi) return 0.0;
    if (w <= 0.0) return 1.0;
    if (x < lo + w) {
        const double s = std::sin(std::numbers::pi * (x - lo) / (2.0 * w));
        return s * s;
    }
    if (x > hi - w) {
        const double s = std::sin(std::numbers::pi * (hi - x) / (2.0 * w));
        return s * s;
    }
    return 1.0;
}

Projection apply_window(const ComplexField& field, double lo, double hi, double w) {
    check_grid(field);
    check_interval(field, lo, hi);
    const double total = field.norm2();
    if (!(total > 0.0)) throw ExtinctionError("projection: field is zero", 0.0);
    Projection out{field, field.probability_in(lo, hi) / total};
    if (out.retained < kExtinction) throw ExtinctionError("projection: retained probability below 1e-15", out.retained);
    for (std::size_t i = 0; i < out.field.size(); ++i) out.field.amps[i] *= window(out.field.x(i), lo, hi, w);
    if (!(out.field.norm2() > 0.0)) throw ExtinctionError("projection: window removed the whole field", 0.0);
    out.field.renormalize();
    return out;
}

}  // namespace

ComplexField ComplexField::zeros(double L, double dx) {
    if (!(L > 0.0) || !(dx > 0.0) || !std::isfinite(L)) throw DomainError("ComplexField: L and dx must be positive");
    const double cells = 2.0 * L / dx;
    const auto n = static_cast<std::size_t>(std::llround(cells));
    if (std::abs(cells - static_cast<double>(n)) > 1e-9 * cells || n % 2 != 0 || n < 2)
        throw DomainError("ComplexField: 2L/dx must be an even integer");
    ComplexField f;
    f.L = L;
    f.dx = dx;
    f.amps.assign(n, cplx(0.0, 0.0));
    return f;
}

double ComplexField::norm2() const {
    double s = 0.0;
    for (const auto& v : amps) s += std::norm(v);
    return s * dx;
}

void ComplexField::renormalize() {
    const double n = norm2();
    if (!(n > 0.0)) throw ExtinctionError("ComplexField::renormalize: zero field", 0.0);
    const double s = 1.0 / std::sqrt(n);
    for (auto& v : amps) v *= s;
}

double ComplexField::probability_in(double lo, double hi) const {
    double s = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double xi = x(i);
        if (xi >= lo && xi <= hi) s += std::norm(amps[i]);
    }
    return s * dx;
}

ComplexField half_sine_field(double a, double L, double dx) {
    if (!(a > 0.0)) throw DomainError("half_sine_field: a must be positive");
    if (L < 8.0 * a) throw DomainError("half_sine_field: padding requires L >= 8a");
    ComplexField f = ComplexField::zeros(L, dx);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double xi = f.x(i);
        if (xi >= -a && xi <= 0.0) f.amps[i] = std::sin(std::numbers::pi * (-xi) / a);
    }
    f.renormalize();
    return f;
}

ComplexField half_sine_field(double a) { return half_sine_field(a, kDefaultPadding * a, a / kDefaultCellsPerA); }

ComplexField gaussian_field(double x0, double sigma0, double L, double dx, double k0) {
    if (!(sigma0 > 0.0)) throw DomainError("gaussian_field: sigma0 must be positive");
    ComplexField f = ComplexField::zeros(L, dx);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double u = f.x(i) - x0;
        f.amps[i] = std::exp(-u * u / (4.0 * sigma0 * sigma0)) * std::polar(1.0, k0 * f.x(i));
    }
    f.renormalize();
    return f;
}

double guard_band_probability(const ComplexField& field) {
    const double band = field.L / 16.0;
    double s = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const double xi = field.x(i);
        if (xi < -field.L + band || xi > field.L - band) s += std::norm(field.amps[i]);
    }
    return s * field.dx;
}

ComplexField spectral_propagate(const ComplexField& field, double dt, const PhysParams& params,
                                const PaddingPolicy& policy) {
    params.validate();
    check_grid(field);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("spectral_propagate: dt must be positive");
    const std::size_t n = field.size();
    if (n > static_cast<std::size_t>(std::numeric_limits<int>::max()))
        throw DomainError("spectral_propagate: grid too large");
    const Plans plans = plans_for(static_cast<int>(n));

    std::unique_ptr<fftw_complex, FftwDeleter> buf(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
    auto* data = reinterpret_cast<cplx*>(buf.get());
    std::copy(field.amps.begin(), field.amps.end(), data);
    fftw_execute_dft(plans.fwd, buf.get(), buf.get());

    // Cell centres are offset from the FFT origin; the offset is a pure
    // translation and commutes with the free multiplier.
    const double dk = 2.0 * std::numbers::pi / (static_cast<double>(n) * field.dx);
    const double c = params.hbar * dt / (2.0 * params.mass);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double m = j < n / 2 ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
        const double k = m * dk;
        data[j] *= std::polar(inv_n, -c * k * k);
    }
    fftw_execute_dft(plans.bwd, buf.get(), buf.get());

    ComplexField out;
    out.L = field.L;
    out.dx = field.dx;
    out.amps.assign(data, data + n);

    if (policy.enforce) {
        const double band = guard_band_probability(out);
        if (band > policy.tolerance)
            throw PaddingError("spectral_propagate: probability in the guard band exceeds tolerance", band);
    }
    return out;
}

Projection project_sharp(const ComplexField& field, double lo, double hi) { return apply_window(field, lo, hi, 0.0); }

Projection project_tapered(const ComplexField& field, double lo, double hi, double w) {
    if (!(w >= 0.0) || !(w < 0.5 * (hi - lo))) throw DomainError("project_tapered: taper width must lie in [0, a/2)");
    return apply_window(field, lo, hi, w);
}

ProjectionMode parse_mode(const std::string& name) {
    if (name == "sharp") return ProjectionMode::sharp;
    if (name == "tapered") return ProjectionMode::tapered;
    throw DomainError("unknown projection mode: " + name);
}

std::string mode_name(ProjectionMode m) { return m == ProjectionMode::sharp ? "sharp" : "tapered"; }

void MeasurementProtocol::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("MeasurementProtocol: a must be positive");
    if (!(period > 0.0) || !(period <= horizon * (1.0 + 1e-12)) || !std::isfinite(horizon))
        throw DomainError("MeasurementProtocol: need 0 < period <= horizon");
    if (mode == ProjectionMode::tapered && !(taper_width >= 0.0 && taper_width < 0.5 * a))
        throw DomainError("MeasurementProtocol: taper width must lie in [0, a/2)");
}

std::size_t MeasurementProtocol::steps() const {
    validate();
    return static_cast<std::size_t>(std::max(1.0, std::round(horizon / period)));
}

namespace {

Projection project(const MeasurementProtocol& p, const ComplexField& f) {
    return p.mode == ProjectionMode::sharp ? project_sharp(f, -p.a, 0.0) : project_tapered(f, -p.a, 0.0, p.taper_width);
}

// Padding is enforced only for continuous windows; a sharp cut puts a k^-2
// spectrum on the grid that reaches the guard band in any period, so it is
// reported instead.
PaddingPolicy policy_for(const MeasurementProtocol& p) {
    PaddingPolicy pol;
    pol.enforce = p.mode == ProjectionMode::tapered && p.taper_width > 0.0;
    return pol;
}

}  // namespace

ZenoRun run_protocol(const MeasurementProtocol& protocol, const ComplexField& initial, const PhysParams& params) {
    protocol.validate();
    params.validate();
    check_grid(initial);
    if (initial.L < 8.0 * protocol.a) throw DomainError("run_protocol: padding requires L >= 8a");
    if (std::abs(initial.norm2() - 1.0) > 1e-9) throw DomainError("run_protocol: initial field must be normalized");
    if (initial.probability_in(-protocol.a, 0.0) < 1.0 - 1e-12)
        throw DomainError("run_protocol: initial field must be supported in [-a, 0]");

    ZenoRun run;
    run.steps = protocol.steps();
    run.dt = protocol.period;
    run.delta = default_inner_cutoff(run.dt, params);
    const double a = protocol.a, d = run.delta;
    const PaddingPolicy pol = policy_for(protocol);

    ComplexField psi = initial;
    double cum = 1.0;
    for (std::size_t k = 0; k < run.steps; ++k) {
        psi = spectral_propagate(psi, run.dt, params, pol);
        run.guard_max = std::max(run.guard_max, guard_band_probability(psi));
        const double total = psi.norm2();
        double ext = 0.0, near = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double xi = psi.x(i);
            if (xi >= -a && xi <= 0.0) continue;
            const double p = std::norm(psi.amps[i]);
            ext += p;
            if (xi >= -a - d && xi <= d) near += p;
        }
        ext *= psi.dx / total;
        near *= psi.dx / total;

        Projection pr = project(protocol, psi);
        psi = std::move(pr.field);
        cum *= pr.retained;
        run.survivals.push_back(pr.retained);
        run.cumulative.push_back(cum);
        run.exterior.push_back(ext);
        run.boundary_leak.push_back(near);
        run.far_leak.push_back(ext - near);
        run.leak_mismatch = std::max(run.leak_mismatch, std::abs(1.0 - pr.retained - ext));
    }
    return run;
}

LeakScaling leak_scaling(const std::vector<MeasurementProtocol>& family, const ComplexField& initial,
                         const PhysParams& params) {
    params.validate();
    if (family.size() < 5) throw DomainError("leak_scaling: need at least 5 periods");
    double lo = family.front().period, hi = lo;
    for (const auto& p : family) {
        p.validate();
        lo = std::min(lo, p.period);
        hi = std::max(hi, p.period);
    }
    if (hi / lo < 100.0 * (1.0 - 1e-12)) throw DomainError("leak_scaling: periods must span two decades");

    LeakScaling out;
    out.dts.resize(family.size());
    out.leaks.resize(family.size());
    parallel_for(family.size(), [&](std::size_t i) {
        const MeasurementProtocol& p = family[i];
        const ComplexField measured = project(p, initial).field;
        const ComplexField psi = spectral_propagate(measured, p.period, params, policy_for(p));
        double ext = 0.0;
        for (std::size_t j = 0; j < psi.size(); ++j) {
            const double xj = psi.x(j);
            if (xj < -p.a || xj > 0.0) ext += std::norm(psi.amps[j]);
        }
        out.dts[i] = p.period;
        out.leaks[i] = ext * psi.dx / psi.norm2();
    });
    out.fit = power_law_fit(out.dts, out.leaks);
    out.conclusive = out.fit.r2 >= 0.99;
    return out;
}

std::vector<double> default_leak_periods(double horizon) {
    if (!(horizon > 0.0)) throw DomainError("default_leak_periods: horizon must be positive");
    std::vector<double> out;
    for (int k = 0; k <= 8; ++k) out.push_back(horizon / 256.0 * std::pow(10.0, -k / 4.0));
    return out;
}

}  // namespace qcl
