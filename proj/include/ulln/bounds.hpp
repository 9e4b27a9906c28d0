#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ulln/simulate.hpp"

namespace ulln {

// Inputs of the moment bounds: q > 2 (real), Hoelder exponent r > 0, horizon
// T, moment scale M, averaged Hoelder coefficient wbar, sample count N.
// gamma/p are only used by the fluctuation-order form. Only the product
// M*wbar enters the hypotheses; both are kept for readability.
struct BoundParams {
    double q = 4.0;
    double r = 1.0;
    double T = 1.0;
    double M = 1.0;
    double wbar = 1.0;
    std::int64_t N = 1;
    std::optional<double> gamma;
    std::optional<double> p;
};

// C_q = (1/2 (4k)^q + 2k/(2k-q) (8k)^q)^(1/q), k the smallest integer > q/2.
double cq_constant(double q);
double cq_constant_pow_q(double q); // C_q^q without the q-th root round trip

// Decay exponents of the main bound.
double n0_exponent(double q, double r);   // q r / (2qr + 2r + 2)
double rate_exponent(double q, double r); // q^2 r / (2qr + 2r + 2)

// Smallest integer N with N^(qr/(2qr+2r+2)) >= 2.
std::int64_t n0_threshold(double q, double r);

// (q^2 - 2q - 2) r > 2, the condition for the complete LLN.
bool complete_lln_condition(double q, double r);

// M^q 2^(q-1) N^(-q^2 r/(2qr+2r+2)) (C_q^q (2 T wbar^(1/r) + 1) + 2^(2q)).
// Only asserted for N >= N0; throws BelowN0 otherwise.
double main_bound_rhs(const BoundParams& params);

// q(p, gamma) = 3 v ((r+1)/r)(2 gamma/(1-2 gamma)) v p.
double choose_q(double p, double gamma, double r);

// (M/N^gamma) 2^(1-1/q) (C_q^q (2T wbar^(1/r) + 1) + 2^(2q))^(1/q), an
// L^p-norm-scale bound with q from choose_q.
double main2_bound_rhs(const BoundParams& params);

// C_q M / sqrt(N), the scalar q-th moment LLN bound for independent sums.
double scalar_lln_bound(double q, double M, std::int64_t N);

// 2^(q-1) K sup_pointwise_moment + 2^(q-1) (2/n)^q top_moment. K and n are
// integers in the statement; reals are accepted so the proof's continuous
// substitutions can be assembled verbatim in tests.
double discretization_bound_rhs(double K, double n, double q,
                                double sup_pointwise_moment, double top_moment);

// (2CT)^q + (2q)^q; the factorial-moment route needs integer q.
double latd_moment_bound(double C, double T, int q);

// E[Z(Q)^q] for Q ~ Poisson(mu), via Stirling numbers of the second kind.
double poisson_raw_moment(double mu, int q);

// sum_{k > k_max} lambda^k / k!, the tail that bounds series truncation.
double poisson_tail_bound(double lambda, int k_max);

struct SeriesResult {
    double value = 0.0;
    double tail_bound = 0.0;
    int terms = 0;
};

// Truncated series for E[Z(t) - Z(s)] of the LATD process: the k-th term is
// the probability that the k-th arrival lands in (s, t], computed by layered
// quadrature of the nested-integral densities. Throws TailNotConverged when
// the Poisson tail bound at k_max exceeds tol.
SeriesResult latd_mean_series(const IntensityModel& model, double s, double t,
                              int k_max, double tol);

// |e^{-Omega(0,t)} + sum_k P(tau_k <= t < tau_{k+1}) - 1| truncated at k_max.
double latd_normalization_residual(const IntensityModel& model, double t, int k_max,
                                   double tol = 1e-8);

// C (t - s): the mean-increment bound that yields the Hoelder data (r = 1)
// for the LATD process.
double latd_mean_increment_bound(double C, double s, double t);

// E[Z(t)] tabulated on a uniform grid over [0,T] (interval count rounded up
// to even); the node positions are linspace(0, T, result.size()). Feeds
// tabulated_mean for studies where the mean has no closed form.
std::vector<double> latd_mean_table(const IntensityModel& model, int grid_intervals,
                                    int k_max, double tol);

} // namespace ulln
