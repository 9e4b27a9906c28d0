#include "ulln/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "ulln/format.hpp"

namespace ulln {

namespace {

void require_q_above_2(double q) {
    if (!(q > 2.0))
        throw ValidationError("QOutOfRange", "q must be > 2, got " + format_double(q));
}

void require_positive_r(double r) {
    if (!(r > 0.0))
        throw ValidationError("DomainViolation", "r must be > 0, got " + format_double(r));
}

} // namespace

double cq_constant_pow_q(double q) {
    require_q_above_2(q);
    const double k = std::floor(q / 2.0) + 1.0; // smallest integer > q/2
    return 0.5 * std::pow(4.0 * k, q) + (2.0 * k) / (2.0 * k - q) * std::pow(8.0 * k, q);
}

double cq_constant(double q) {
    return std::pow(cq_constant_pow_q(q), 1.0 / q);
}

double n0_exponent(double q, double r) {
    require_q_above_2(q);
    require_positive_r(r);
    return q * r / (2.0 * q * r + 2.0 * r + 2.0);
}

double rate_exponent(double q, double r) {
    return q * n0_exponent(q, r);
}

std::int64_t n0_threshold(double q, double r) {
    const double e = n0_exponent(q, r);
    // ceil(2^(1/e)), nudged so that an exact integer power (e.g. 8^(1/3) = 2)
    // is not pushed up by floating-point rounding.
    const double x = std::exp2(1.0 / e);
    auto n0 = static_cast<std::int64_t>(std::ceil(x * (1.0 - 1e-13)));
    return std::max<std::int64_t>(n0, 1);
}

bool complete_lln_condition(double q, double r) {
    require_q_above_2(q);
    require_positive_r(r);
    return (q * q - 2.0 * q - 2.0) * r > 2.0;
}

double main_bound_rhs(const BoundParams& params) {
    require_q_above_2(params.q);
    require_positive_r(params.r);
    if (!(params.M > 0.0) || params.wbar < 0.0 || !(params.T > 0.0))
        throw ValidationError("DomainViolation", "main bound needs M > 0, wbar >= 0, T > 0");
    const std::int64_t n0 = n0_threshold(params.q, params.r);
    if (params.N < n0)
        throw NumericError("BelowN0",
                           "N = " + std::to_string(params.N) + " is below N0 = "
                               + std::to_string(n0) + "; the bound is only asserted for N >= N0");
    const double q = params.q;
    const double inner = cq_constant_pow_q(q)
                             * (2.0 * params.T * std::pow(params.wbar, 1.0 / params.r) + 1.0)
                         + std::exp2(2.0 * q);
    return std::pow(params.M, q) * std::exp2(q - 1.0)
         * std::pow(static_cast<double>(params.N), -rate_exponent(q, params.r)) * inner;
}

double choose_q(double p, double gamma, double r) {
    if (!(gamma > 0.0) || !(gamma < 0.5))
        throw ValidationError("GammaOutOfRange", "gamma must lie in (0, 1/2)");
    if (!(p > 0.0))
        throw ValidationError("DomainViolation", "p must be > 0");
    require_positive_r(r);
    const double middle = (r + 1.0) / r * (2.0 * gamma / (1.0 - 2.0 * gamma));
    return std::max({3.0, middle, p});
}

double main2_bound_rhs(const BoundParams& params) {
    if (!params.gamma || !params.p)
        throw ValidationError("DomainViolation", "main2 bound needs gamma and p");
    const double q = choose_q(*params.p, *params.gamma, params.r);
    const std::int64_t n0 = n0_threshold(q, params.r);
    if (params.N < n0)
        throw NumericError("BelowN0",
                           "N = " + std::to_string(params.N) + " is below N0(r, q(p,gamma)) = "
                               + std::to_string(n0));
    const double inner = cq_constant_pow_q(q)
                             * (2.0 * params.T * std::pow(params.wbar, 1.0 / params.r) + 1.0)
                         + std::exp2(2.0 * q);
    return params.M * std::pow(static_cast<double>(params.N), -*params.gamma)
         * std::exp2(1.0 - 1.0 / q) * std::pow(inner, 1.0 / q);
}

double scalar_lln_bound(double q, double M, std::int64_t N) {
    require_q_above_2(q);
    if (N < 1)
        throw ValidationError("DomainViolation", "N must be >= 1");
    return cq_constant(q) * M / std::sqrt(static_cast<double>(N));
}

double discretization_bound_rhs(double K, double n, double q,
                                double sup_pointwise_moment, double top_moment) {
    if (!(K >= 1.0) || !(n >= 1.0) || !(q >= 1.0))
        throw ValidationError("DomainViolation", "discretization bound needs K, n, q >= 1");
    const double front = std::exp2(q - 1.0);
    return front * K * sup_pointwise_moment + front * std::pow(2.0 / n, q) * top_moment;
}

double latd_moment_bound(double C, double T, int q) {
    if (C < 0.0 || q < 1)
        throw ValidationError("DomainViolation", "latd moment bound needs C >= 0 and integer q >= 1");
    return std::pow(2.0 * C * T, q) + std::pow(2.0 * q, q);
}

double poisson_raw_moment(double mu, int q) {
    if (q < 0 || q > 60)
        throw ValidationError("QOutOfRange", "poisson moment supports 0 <= q <= 60");
    // E[X^q] = sum_j S(q,j) mu^j with Stirling numbers of the second kind.
    std::vector<double> stirling(static_cast<std::size_t>(q) + 1, 0.0);
    stirling[0] = 1.0;
    for (int row = 1; row <= q; ++row) {
        for (int j = row; j >= 1; --j)
            stirling[static_cast<std::size_t>(j)] =
                j * stirling[static_cast<std::size_t>(j)] + stirling[static_cast<std::size_t>(j) - 1];
        stirling[0] = 0.0;
    }
    double sum = 0.0;
    double mu_pow = 1.0;
    for (int j = 0; j <= q; ++j) {
        sum += stirling[static_cast<std::size_t>(j)] * mu_pow;
        mu_pow *= mu;
    }
    return sum;
}

double poisson_tail_bound(double lambda, int k_max) {
    if (lambda <= 0.0)
        return 0.0;
    double term = 1.0;
    for (int k = 1; k <= k_max + 1; ++k)
        term *= lambda / k;
    double tail = 0.0;
    for (int k = k_max + 1; k < k_max + 400; ++k) {
        tail += term;
        term *= lambda / (k + 1);
        if (term < 1e-300)
            break;
    }
    return tail;
}

namespace {

// Node grid over [0, t] with an exact node at the split point s (so that
// int_s^t needs no interpolation). Each piece is uniform.
struct SeriesGrid {
    std::vector<double> nodes;
    std::size_t split = 0; // index of s; 0 when s == 0
};

SeriesGrid make_series_grid(double s, double t, int total_intervals) {
    SeriesGrid grid;
    auto even_count = [](double want) {
        auto n = static_cast<int>(std::lround(want));
        n = std::max(n, 2);
        return n % 2 == 0 ? n : n + 1;
    };
    if (s <= 0.0) {
        const int n = even_count(total_intervals);
        grid.nodes.reserve(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i)
            grid.nodes.push_back(t * i / n);
        grid.split = 0;
        return grid;
    }
    const int n1 = even_count(total_intervals * s / t);
    const int n2 = even_count(total_intervals * (t - s) / t);
    grid.nodes.reserve(static_cast<std::size_t>(n1 + n2) + 1);
    for (int i = 0; i <= n1; ++i)
        grid.nodes.push_back(s * i / n1);
    for (int i = 1; i <= n2; ++i)
        grid.nodes.push_back(s + (t - s) * i / n2);
    grid.split = static_cast<std::size_t>(n1);
    return grid;
}

// Composite Newton-Cotes over consecutive equally spaced values[a..b].
double uniform_quad(const std::vector<double>& values, std::size_t a, std::size_t b, double h) {
    const std::size_t n = b - a;
    if (n == 0)
        return 0.0;
    if (n == 1)
        return 0.5 * h * (values[a] + values[b]);
    double sum = 0.0;
    std::size_t end = b;
    if (n % 2 != 0) {
        // Simpson 3/8 on the last three intervals, plain Simpson on the rest.
        end = b - 3;
        sum += 3.0 * h / 8.0
             * (values[end] + 3.0 * values[end + 1] + 3.0 * values[end + 2] + values[b]);
    }
    for (std::size_t i = a; i + 2 <= end; i += 2)
        sum += h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
    return sum;
}

// Integral of tabulated values over nodes[a..b], respecting the piece split.
double grid_quad(const SeriesGrid& grid, const std::vector<double>& values,
                 std::size_t a, std::size_t b) {
    if (b <= a)
        return 0.0;
    double sum = 0.0;
    if (grid.split > 0 && a < grid.split) {
        const double h1 = grid.nodes[1] - grid.nodes[0];
        const std::size_t stop = std::min(b, grid.split);
        sum += uniform_quad(values, a, stop, h1);
        a = stop;
    }
    if (b > a) {
        const double h2 = grid.nodes[grid.split + 1] - grid.nodes[grid.split];
        sum += uniform_quad(values, a, b, h2);
    }
    return sum;
}

void require_series_inputs(const IntensityModel& model, double s, double t, int k_max) {
    if (!(0.0 <= s) || !(s <= t) || !(t <= model.horizon))
        throw ValidationError("DomainViolation", "series needs 0 <= s <= t <= T");
    if (k_max < 1)
        throw ValidationError("DomainViolation", "k_max must be >= 1");
    if (model.sup_bound < 0.0 || !std::isfinite(model.sup_bound))
        throw ValidationError("DomainViolation", "sup_bound must be finite and nonnegative");
}

void require_tail(double tail, double tol, int k_max) {
    if (tail > tol)
        throw NumericError("TailNotConverged",
                           "Poisson tail bound " + format_double(tail) + " at k_max = "
                               + std::to_string(k_max) + " exceeds tol " + format_double(tol));
}

// Density of the k-th arrival, tabulated layer by layer:
//   f_1(u) = w(0,u) e^{-Omega(0,u)},
//   f_{k+1}(u) = int_0^u f_k(v) w(v,u) e^{-Omega(v,u)} dv.
std::vector<double> first_layer(const IntensityModel& model, const SeriesGrid& grid) {
    std::vector<double> f(grid.nodes.size());
    for (std::size_t j = 0; j < grid.nodes.size(); ++j) {
        const double u = grid.nodes[j];
        f[j] = model.w(0.0, u) * std::exp(-omega_of(model, 0.0, u));
    }
    return f;
}

std::vector<double> next_layer(const IntensityModel& model, const SeriesGrid& grid,
                               const std::vector<double>& f) {
    const std::size_t n = grid.nodes.size();
    std::vector<double> out(n, 0.0);
    std::vector<double> g(n);
    for (std::size_t j = 1; j < n; ++j) {
        const double u = grid.nodes[j];
        for (std::size_t v = 0; v <= j; ++v)
            g[v] = f[v] * model.w(grid.nodes[v], u) * std::exp(-omega_of(model, grid.nodes[v], u));
        out[j] = grid_quad(grid, g, 0, j);
    }
    return out;
}

constexpr int kSeriesIntervals = 1024;

} // namespace

SeriesResult latd_mean_series(const IntensityModel& model, double s, double t,
                              int k_max, double tol) {
    require_series_inputs(model, s, t, k_max);
    SeriesResult result;
    result.terms = k_max;
    if (t == s || model.sup_bound == 0.0)
        return result;
    result.tail_bound = poisson_tail_bound(model.sup_bound * t, k_max);
    require_tail(result.tail_bound, tol, k_max);

    const SeriesGrid grid = make_series_grid(s, t, kSeriesIntervals);
    std::vector<double> layer = first_layer(model, grid);
    double sum = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        sum += grid_quad(grid, layer, grid.split, grid.nodes.size() - 1);
        if (k < k_max)
            layer = next_layer(model, grid, layer);
    }
    result.value = sum;
    return result;
}

double latd_normalization_residual(const IntensityModel& model, double t, int k_max,
                                   double tol) {
    require_series_inputs(model, 0.0, t, k_max);
    if (t == 0.0 || model.sup_bound == 0.0)
        return 0.0;
    require_tail(poisson_tail_bound(model.sup_bound * t, k_max), tol, k_max);

    const SeriesGrid grid = make_series_grid(0.0, t, kSeriesIntervals);
    const std::size_t n = grid.nodes.size();
    std::vector<double> layer = first_layer(model, grid);
    std::vector<double> g(n);
    double lhs = std::exp(-omega_of(model, 0.0, t));
    for (int k = 1; k <= k_max; ++k) {
        // P(tau_k <= t < tau_{k+1}) = int_0^t f_k(v) e^{-Omega(v,t)} dv.
        for (std::size_t v = 0; v < n; ++v)
            g[v] = layer[v] * std::exp(-omega_of(model, grid.nodes[v], t));
        lhs += grid_quad(grid, g, 0, n - 1);
        if (k < k_max)
            layer = next_layer(model, grid, layer);
    }
    return std::abs(lhs - 1.0);
}

double latd_mean_increment_bound(double C, double s, double t) {
    if (C < 0.0 || !(s <= t))
        throw ValidationError("DomainViolation", "needs C >= 0 and s <= t");
    return C * (t - s);
}

std::vector<double> latd_mean_table(const IntensityModel& model, int grid_intervals,
                                    int k_max, double tol) {
    if (grid_intervals < 2)
        throw ValidationError("DomainViolation", "grid_intervals must be >= 2");
    require_series_inputs(model, 0.0, model.horizon, k_max);
    require_tail(poisson_tail_bound(model.sup_bound * model.horizon, k_max), tol, k_max);

    SeriesGrid grid = make_series_grid(0.0, model.horizon, grid_intervals);
    const std::size_t n = grid.nodes.size();
    std::vector<double> table(n, 0.0);
    if (model.sup_bound == 0.0)
        return table;
    std::vector<double> layer = first_layer(model, grid);
    for (int k = 1; k <= k_max; ++k) {
        for (std::size_t j = 1; j < n; ++j)
            table[j] += grid_quad(grid, layer, 0, j);
        if (k < k_max)
            layer = next_layer(model, grid, layer);
    }
    // Interpolation must be monotone; clamp the (tiny) quadrature wiggles.
    for (std::size_t j = 1; j < n; ++j)
        table[j] = std::max(table[j], table[j - 1]);
    return table;
}

} // namespace ulln
