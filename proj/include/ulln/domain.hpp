#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ulln/errors.hpp"

namespace ulln {

// A point of the closed triangle {(t1,t2) : 0 <= t1 <= t2 <= T}.
struct DeltaPoint {
    double t1 = 0.0;
    double t2 = 0.0;
};

bool in_delta(DeltaPoint p, double horizon);
void require_in_delta(DeltaPoint p, double horizon); // throws DomainViolation

// Non-decreasing, right-continuous counting path on [0,T], stored as sorted
// jump times in (0,T]. Repeated times are simultaneous unit jumps, so
// superposed processes need no special casing.
struct StepPath {
    double horizon = 1.0;
    std::vector<double> jumps;
};

// Validates and sorts. Throws NonpositiveHorizon / JumpOutOfRange.
StepPath make_step_path(double horizon, std::vector<double> jumps);

// Z(t) = #{jump times u : u <= t}.
std::int64_t count_at(const StepPath& path, double t);

// Z(t2) - Z(t1), i.e. the number of jumps in the half-open interval (t1, t2].
std::int64_t increment(const StepPath& path, DeltaPoint p);

// N independent paths sharing one horizon, plus the seed record that
// produced them (empty substream list for hand-built batches).
struct SampleBatch {
    double horizon = 1.0;
    std::vector<StepPath> paths;
    std::uint64_t master_seed = 0;
    std::vector<std::uint64_t> substream_ids;
};

SampleBatch make_batch(double horizon, std::vector<StepPath> paths);

// (1/N) sum_i increment(path_i, p). Throws EmptyBatch.
double average_increment(const SampleBatch& batch, DeltaPoint p);

// A continuous element m of D: non-increasing in t1, non-decreasing in t2,
// m(t,t) = 0, with user-declared Hoelder data
//   |m(t1,t2) - m(s1,s2)| <= holder_c * (|t1-s1|^r + |t2-s2|^r).
// The declared constants are spot-checked by tests, not certified.
struct MeanModel {
    double horizon = 1.0;
    std::function<double(double, double)> eval;
    double holder_r = 1.0;
    double holder_c = 0.0;
    double top_value = 0.0; // m(0,T), cached
    std::string name;
};

double mean_eval(const MeanModel& model, DeltaPoint p);

// Built-in mean families.
MeanModel poisson_mean(double lambda, double horizon);  // lambda * (t2 - t1)
MeanModel power_mean(double beta, double horizon);      // t2^beta - t1^beta
MeanModel zero_mean(double horizon);

// Piecewise-linear interpolant of a tabulated non-decreasing t -> g(t) with
// g(0) = 0; induces m(t1,t2) = g(t2) - g(t1). Linear interpolation of
// monotone data keeps the result in D; the Lipschitz constant is the
// largest table slope.
MeanModel tabulated_mean(std::vector<double> grid_t, std::vector<double> grid_g, std::string name);

// Batch files: one header line {"T":..,"N":..,"seed":..}, then one JSON
// array of jump times per line. Floats carry 17 significant digits.
std::string batch_to_string(const SampleBatch& batch);
void write_batch(const std::string& file, const SampleBatch& batch);
SampleBatch read_batch(const std::string& file);

} // namespace ulln
