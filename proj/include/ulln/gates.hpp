#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ulln/domain.hpp"

namespace ulln {

// Which boundary of a monotone level set to locate:
//   FirstAtOrBelow / FirstBelow   expect f non-increasing,
//   FirstAtOrAbove / FirstAbove   expect f non-decreasing.
enum class CrossingMode { AtOrBelow, Below, AtOrAbove, Above };

// inf{s in [lo,hi] : f(s) crosses threshold in the given mode}, located by
// bisection to absolute tolerance tol. Returns a value > hi (hi plus one
// tolerance step) when the set is empty. Throws NonmonotoneDetected when
// sampled values contradict the expected monotonicity.
double monotone_inf_solve(const std::function<double(double)>& f, double threshold,
                          CrossingMode mode, double lo, double hi, double tol);

// The finite gate set Delta*_n = Delta*_+ u Delta*_- u {(0,T)} of the
// two inductive constructions, built on the mean normalized by
// rho = max(m(0,T), 1) so that the normalized top value is <= 1.
struct GateSet {
    int level = 1;                 // n
    std::vector<DeltaPoint> gates; // deduplicated
    std::size_t size_k = 0;        // K = |gates|
    double normalization = 1.0;    // rho; 0 for the identically-zero mean
    double holder_c_norm = 0.0;    // Hoelder constant of the normalized mean
    double holder_r = 1.0;
    double horizon = 1.0;
    double tol = 0.0;              // root tolerance used by the construction
    std::string source;            // name of the mean model
};

// tol <= 0 selects the default 1e-10 * T. The identically-zero mean yields
// the trivial single-gate set {(0,T)} with normalization 0.
GateSet build_gate_set(const MeanModel& model, int level, double tol = 0.0);

// (2n-1) T (C n)^(1/r) + 1 with C the normalized Hoelder constant.
double gate_size_limit(int level, double horizon, double holder_c_norm, double holder_r);

bool verify_gate_size(const GateSet& gs, const MeanModel& model);

// max over gates of |y - m| plus the slack (2/n + 2 C tol^r) * rho; an upper
// bound for sup over Delta of |y - m| for any y in D. The tol term absorbs
// the root-finding perturbation of the gates.
double gate_sup_bound(const GateSet& gs, const std::function<double(double, double)>& y,
                      const MeanModel& model);
double gate_sup_bound(const GateSet& gs, const StepPath& path, const MeanModel& model);
double gate_sup_bound(const GateSet& gs, const SampleBatch& batch, const MeanModel& model);

// {"n":..,"K":..,"normalization":..,"gates":[[t1,t2],..]}
std::string gateset_to_json(const GateSet& gs);

} // namespace ulln
