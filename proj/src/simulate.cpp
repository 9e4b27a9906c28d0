#include "ulln/simulate.hpp"

#include <cmath>

#include "ulln/format.hpp"
#include "ulln/quadrature.hpp"

namespace ulln {

double intensity_at(const IntensityModel& model, double t0, double u) {
    const double v = model.w(t0, u);
    if (!(v >= 0.0))
        throw NumericError("IntensityExceedsBound",
                           "w(" + format_double(t0) + ", " + format_double(u) + ") = "
                               + format_double(v) + " is negative");
    if (v > model.sup_bound)
        throw NumericError("IntensityExceedsBound",
                           "w(" + format_double(t0) + ", " + format_double(u) + ") = "
                               + format_double(v) + " exceeds declared bound "
                               + format_double(model.sup_bound));
    return v;
}

double omega_of(const IntensityModel& model, double s, double t) {
    if (model.omega)
        return model.omega(s, t);
    const double scale = std::max(1.0, model.sup_bound * (t - s));
    return integrate([&](double u) { return model.w(s, u); }, s, t, 1e-10 * scale);
}

namespace {

void check_family(double horizon, bool coeffs_ok) {
    if (!(horizon > 0.0))
        throw ValidationError("NonpositiveHorizon", "intensity horizon must be positive");
    if (!coeffs_ok)
        throw ValidationError("DomainViolation", "intensity coefficients must be >= 0");
}

} // namespace

IntensityModel intensity_constant(double a, double horizon) {
    check_family(horizon, a >= 0.0);
    IntensityModel m;
    m.horizon = horizon;
    m.w = [a](double, double) { return a; };
    m.omega = [a](double s, double t) { return a * (t - s); };
    m.sup_bound = a;
    m.name = "constant(" + format_double(a) + ")";
    return m;
}

IntensityModel intensity_last_linear(double a, double b, double horizon) {
    check_family(horizon, a >= 0.0 && b >= 0.0);
    IntensityModel m;
    m.horizon = horizon;
    m.w = [a, b](double t0, double) { return a + b * t0; };
    m.omega = [a, b](double s, double t) { return (a + b * s) * (t - s); };
    m.sup_bound = a + b * horizon;
    m.name = "last-linear(" + format_double(a) + "," + format_double(b) + ")";
    return m;
}

IntensityModel intensity_time_ramp(double a, double b, double horizon) {
    check_family(horizon, a >= 0.0 && b >= 0.0);
    IntensityModel m;
    m.horizon = horizon;
    m.w = [a, b](double, double u) { return a + b * u; };
    m.omega = [a, b](double s, double t) { return a * (t - s) + 0.5 * b * (t * t - s * s); };
    m.sup_bound = a + b * horizon;
    m.name = "time-ramp(" + format_double(a) + "," + format_double(b) + ")";
    return m;
}

IntensityModel intensity_product(double a, double b, double c, double horizon) {
    check_family(horizon, a >= 0.0 && b >= 0.0 && c >= 0.0);
    IntensityModel m;
    m.horizon = horizon;
    m.w = [a, b, c](double t0, double u) { return a * (1.0 + b * t0) * (1.0 + c * u); };
    m.omega = [a, b, c](double s, double t) {
        return a * (1.0 + b * s) * ((t - s) + 0.5 * c * (t * t - s * s));
    };
    m.sup_bound = a * (1.0 + b * horizon) * (1.0 + c * horizon);
    m.name = "product(" + format_double(a) + "," + format_double(b) + "," + format_double(c) + ")";
    return m;
}

ProcessSpec poisson_process(double lambda, double horizon) {
    if (lambda < 0.0 || !(horizon > 0.0))
        throw ValidationError("DomainViolation", "poisson process needs lambda >= 0, T > 0");
    ProcessSpec spec;
    spec.kind = ProcessSpec::Kind::PoissonConst;
    spec.horizon = horizon;
    spec.lambda = lambda;
    return spec;
}

ProcessSpec poisson_rate_process(IntensityModel rate) {
    ProcessSpec spec;
    spec.kind = ProcessSpec::Kind::PoissonRate;
    spec.horizon = rate.horizon;
    spec.intensity = std::move(rate);
    return spec;
}

ProcessSpec latd_process(IntensityModel intensity) {
    ProcessSpec spec;
    spec.kind = ProcessSpec::Kind::Latd;
    spec.horizon = intensity.horizon;
    spec.intensity = std::move(intensity);
    return spec;
}

StepPath sample_poisson(const ProcessSpec& spec, rng::Xoshiro256& gen) {
    StepPath path;
    path.horizon = spec.horizon;
    if (spec.kind == ProcessSpec::Kind::PoissonConst) {
        if (spec.lambda == 0.0)
            return path;
        double t = 0.0;
        for (;;) {
            t += gen.exponential(spec.lambda);
            if (t > spec.horizon)
                break;
            path.jumps.push_back(t);
        }
        return path;
    }
    if (spec.kind != ProcessSpec::Kind::PoissonRate)
        throw ValidationError("DomainViolation", "sample_poisson needs a Poisson spec");
    const IntensityModel& rate = spec.intensity;
    if (rate.sup_bound == 0.0)
        return path;
    double t = 0.0;
    for (;;) {
        t += gen.exponential(rate.sup_bound);
        if (t > spec.horizon)
            break;
        const double v = intensity_at(rate, 0.0, t);
        if (gen.uniform01() * rate.sup_bound < v)
            path.jumps.push_back(t);
    }
    return path;
}

StepPath sample_latd(const IntensityModel& model, rng::Xoshiro256& gen) {
    StepPath path;
    path.horizon = model.horizon;
    if (model.sup_bound == 0.0)
        return path;
    double t = 0.0;
    double last = 0.0;
    for (;;) {
        t += gen.exponential(model.sup_bound);
        if (t > model.horizon)
            break;
        const double v = intensity_at(model, last, t);
        if (gen.uniform01() * model.sup_bound < v) {
            path.jumps.push_back(t);
            last = t;
        }
    }
    return path;
}

StepPath sample_path(const ProcessSpec& spec, rng::Xoshiro256& gen) {
    switch (spec.kind) {
    case ProcessSpec::Kind::PoissonConst:
    case ProcessSpec::Kind::PoissonRate:
        return sample_poisson(spec, gen);
    case ProcessSpec::Kind::Latd:
        return sample_latd(spec.intensity, gen);
    }
    throw ValidationError("DomainViolation", "unknown process kind");
}

SampleBatch sample_batch(const ProcessSpec& spec, std::int64_t n_paths, std::uint64_t master_seed) {
    if (n_paths < 1)
        throw ValidationError("EmptyBatch", "n_paths must be >= 1");
    SampleBatch batch;
    batch.horizon = spec.horizon;
    batch.master_seed = master_seed;
    batch.paths.reserve(static_cast<std::size_t>(n_paths));
    batch.substream_ids.reserve(static_cast<std::size_t>(n_paths));
    for (std::int64_t i = 0; i < n_paths; ++i) {
        const std::uint64_t sid = rng::substream_id(master_seed, static_cast<std::uint64_t>(i));
        batch.substream_ids.push_back(sid);
        rng::Xoshiro256 gen(sid);
        batch.paths.push_back(sample_path(spec, gen));
    }
    return batch;
}

} // namespace ulln
