#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "ulln/domain.hpp"
#include "ulln/rng.hpp"

namespace ulln {

// Intensity surface w(t0, u) on Delta: the hazard at time u given that the
// last arrival happened at t0. sup_bound must dominate w on all of Delta;
// it is user-declared and checked at every sampled point.
struct IntensityModel {
    double horizon = 1.0;
    std::function<double(double, double)> w;
    // Closed-form Omega(s,t) = int_s^t w(s,u) du when available; adaptive
    // Simpson fallback otherwise (diagnostics only, never the sampler).
    std::function<double(double, double)> omega;
    double sup_bound = 0.0;
    std::string name;
};

// Evaluates w(t0,u), enforcing 0 <= w <= sup_bound. Throws
// IntensityExceedsBound when the declared bound is broken.
double intensity_at(const IntensityModel& model, double t0, double u);
double omega_of(const IntensityModel& model, double s, double t);

// Built-in families (all coefficients must be >= 0 so w stays nonnegative).
IntensityModel intensity_constant(double a, double horizon);
IntensityModel intensity_last_linear(double a, double b, double horizon); // a + b*t0
IntensityModel intensity_time_ramp(double a, double b, double horizon);   // a + b*u
IntensityModel intensity_product(double a, double b, double c, double horizon); // a(1+b t0)(1+c u)

struct ProcessSpec {
    enum class Kind { PoissonConst, PoissonRate, Latd };
    Kind kind = Kind::PoissonConst;
    double horizon = 1.0;
    double lambda = 0.0;      // PoissonConst
    IntensityModel intensity; // PoissonRate (rate u -> w(0,u)) and Latd
};

ProcessSpec poisson_process(double lambda, double horizon);
ProcessSpec poisson_rate_process(IntensityModel rate);
ProcessSpec latd_process(IntensityModel intensity);

// Homogeneous Poisson: exponential gaps. Inhomogeneous: thinning of a
// dominating homogeneous proposal (Lewis-Shedler).
StepPath sample_poisson(const ProcessSpec& spec, rng::Xoshiro256& gen);

// Last-arrival-time dependent process: thinning against the constant
// dominating rate sup_bound, accepting a proposal at u with probability
// w(last_arrival, u)/sup_bound. Exact for continuous w below the bound.
StepPath sample_latd(const IntensityModel& model, rng::Xoshiro256& gen);

StepPath sample_path(const ProcessSpec& spec, rng::Xoshiro256& gen);

// n_paths independent paths; path i uses the generator seeded with
// substream_id(master_seed, i), so the batch is bit-identical across runs
// and worker counts.
SampleBatch sample_batch(const ProcessSpec& spec, std::int64_t n_paths, std::uint64_t master_seed);

} // namespace ulln
