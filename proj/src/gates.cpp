#include "ulln/gates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ulln/format.hpp"

namespace ulln {

namespace {

bool satisfied(double value, double threshold, CrossingMode mode) {
    switch (mode) {
    case CrossingMode::AtOrBelow: return value <= threshold;
    case CrossingMode::Below:     return value < threshold;
    case CrossingMode::AtOrAbove: return value >= threshold;
    case CrossingMode::Above:     return value > threshold;
    }
    return false;
}

bool expects_nonincreasing(CrossingMode mode) {
    return mode == CrossingMode::AtOrBelow || mode == CrossingMode::Below;
}

void spot_check_monotone(const std::function<double(double)>& f, CrossingMode mode,
                         double lo, double hi) {
    constexpr int kProbes = 9;
    double prev = 0.0;
    double scale = 0.0;
    for (int i = 0; i < kProbes; ++i) {
        const double s = lo + (hi - lo) * i / (kProbes - 1);
        const double v = f(s);
        scale = std::max(scale, std::abs(v));
        if (i > 0) {
            const double slack = 1e-9 * scale + 1e-12;
            const bool bad = expects_nonincreasing(mode) ? v > prev + slack : v < prev - slack;
            if (bad)
                throw NumericError("NonmonotoneDetected",
                                   "sampled values violate monotonicity near s = "
                                       + format_double(s));
        }
        prev = v;
    }
}

} // namespace

double monotone_inf_solve(const std::function<double(double)>& f, double threshold,
                          CrossingMode mode, double lo, double hi, double tol) {
    if (!(tol > 0.0))
        throw ValidationError("DomainViolation", "tol must be > 0");
    if (!(lo <= hi))
        throw ValidationError("DomainViolation", "need lo <= hi");
    spot_check_monotone(f, mode, lo, hi);
    if (satisfied(f(lo), threshold, mode))
        return lo;
    if (!satisfied(f(hi), threshold, mode))
        return hi + tol; // empty set: hi-side sentinel
    double a = lo;
    double b = hi;
    for (int it = 0; it < 200 && b - a > tol; ++it) {
        const double mid = 0.5 * (a + b);
        if (satisfied(f(mid), threshold, mode))
            b = mid;
        else
            a = mid;
    }
    return b;
}

double gate_size_limit(int level, double horizon, double holder_c_norm, double holder_r) {
    return (2.0 * level - 1.0) * horizon * std::pow(holder_c_norm * level, 1.0 / holder_r) + 1.0;
}

GateSet build_gate_set(const MeanModel& model, int level, double tol) {
    if (level < 1)
        throw ValidationError("DomainViolation", "gate level n must be >= 1");
    const double T = model.horizon;
    if (!(T > 0.0))
        throw ValidationError("NonpositiveHorizon", "mean horizon must be positive");
    if (tol <= 0.0)
        tol = 1e-10 * T;

    GateSet gs;
    gs.level = level;
    gs.horizon = T;
    gs.holder_r = model.holder_r;
    gs.tol = tol;
    gs.source = model.name;

    const double mtop = model.top_value;
    if (mtop == 0.0) {
        // DegenerateMean: the trivial single-gate set. sup|y - m| = y(0,T)
        // exactly, so the slack is zero (normalization 0).
        gs.gates = {DeltaPoint{0.0, T}};
        gs.size_k = 1;
        gs.normalization = 0.0;
        gs.holder_c_norm = model.holder_c;
        return gs;
    }

    const double rho = std::max(mtop, 1.0);
    const double c_norm = model.holder_c / rho;
    const double r = model.holder_r;
    if (!(c_norm > 0.0))
        throw ValidationError("DomainViolation",
                              "a nonzero mean needs a positive Hoelder constant");
    const double min_gap = std::pow(c_norm * level, -1.0 / r);
    if (tol >= 0.25 * min_gap)
        throw ValidationError("ToleranceTooCoarse",
                              "tol " + format_double(tol) + " >= (C n)^(-1/r)/4 = "
                                  + format_double(0.25 * min_gap));

    gs.normalization = rho;
    gs.holder_c_norm = c_norm;

    auto m = [&](double t1, double t2) { return model.eval(t1, t2) / rho; };
    const double n = level;
    const double top = mtop / rho; // in (0, 1]
    const auto cap =
        static_cast<std::size_t>(std::ceil(T * std::pow(c_norm * n, 1.0 / r))) + 8;

    std::vector<DeltaPoint> gates;

    // Delta*_+ : for each occupied band i, walk the staircase between the
    // level sets m = (i-1)/n and m = i/n, from t2 = T down to t1 = 0. Each
    // stair corner (t_{k,1}, t_{k,2}) sits on the lower level set.
    const int i_max_plus = static_cast<int>(std::ceil(n * top)) - 1;
    for (int i = 1; i <= i_max_plus; ++i) {
        const double theta_hi = i / n;
        const double theta_lo = (i - 1) / n;
        double t2_prev = T;
        for (std::size_t k = 0;; ++k) {
            if (k >= cap)
                throw NumericError("GateBudgetExceeded",
                                   "staircase for level " + std::to_string(i)
                                       + " exceeded its length bound; declared Hoelder data"
                                         " is likely inconsistent with the mean");
            const double t2_fix = t2_prev;
            const double t1 = monotone_inf_solve(
                [&](double s) { return m(s, t2_fix); }, theta_hi, CrossingMode::AtOrBelow,
                0.0, t2_fix, tol);
            double t2 = monotone_inf_solve(
                [&](double s) { return m(t1, s); }, theta_lo, CrossingMode::Above,
                t1, t2_fix, tol);
            if (t2 > t2_fix)
                t2 = t2_fix;
            gates.push_back({t1, t2});
            if (t1 <= tol)
                break;
            if (t2 >= t2_prev)
                break; // no descent; cannot happen for consistent Hoelder data
            t2_prev = t2;
        }
    }

    // Delta*_- : the mirrored staircase between m = (i+1)/n and m = (i+2)/n,
    // with corners on the upper level set.
    const int i_max_minus = static_cast<int>(std::floor(n * top));
    for (int i = 0; i + 2 <= i_max_minus; ++i) {
        const double theta_top = (i + 2) / n;
        const double theta_mid = (i + 1) / n;
        double t2_cur = T;
        double t1_cur = 0.0;
        for (std::size_t k = 0;; ++k) {
            if (k >= cap)
                throw NumericError("GateBudgetExceeded",
                                   "staircase for level " + std::to_string(i)
                                       + " exceeded its length bound; declared Hoelder data"
                                         " is likely inconsistent with the mean");
            if (k > 0) {
                const double t1_fix = t1_cur;
                const double t2_next = monotone_inf_solve(
                    [&](double s) { return m(t1_fix, s); }, theta_mid, CrossingMode::AtOrAbove,
                    t1_fix, t2_cur, tol);
                if (t2_next > t2_cur)
                    break;
                t2_cur = t2_next;
            }
            const double t2_fix = t2_cur;
            t1_cur = monotone_inf_solve(
                [&](double s) { return m(s, t2_fix); }, theta_top, CrossingMode::Below,
                0.0, t2_fix, tol);
            gates.push_back({t1_cur, t2_cur});
            if (t1_cur <= tol)
                break;
        }
    }

    gates.push_back({0.0, T});

    // Deduplicate within 2*tol (roots are only located to tol); the
    // lexicographically first representative survives, so exact boundary
    // gates like (0,T) win over their perturbed twins. K only shrinks.
    std::sort(gates.begin(), gates.end(), [](DeltaPoint a, DeltaPoint b) {
        return a.t1 < b.t1 || (a.t1 == b.t1 && a.t2 < b.t2);
    });
    std::vector<DeltaPoint> dedup;
    for (const auto& g : gates) {
        bool dup = false;
        for (auto it = dedup.rbegin(); it != dedup.rend(); ++it) {
            if (g.t1 - it->t1 > 2.0 * tol)
                break;
            if (std::abs(g.t1 - it->t1) <= 2.0 * tol && std::abs(g.t2 - it->t2) <= 2.0 * tol) {
                dup = true;
                break;
            }
        }
        if (!dup)
            dedup.push_back(g);
    }

    gs.gates = std::move(dedup);
    gs.size_k = gs.gates.size();
    return gs;
}

bool verify_gate_size(const GateSet& gs, const MeanModel& model) {
    const double rho = std::max(model.top_value, 1.0);
    const double c_norm = model.holder_c / rho;
    return static_cast<double>(gs.size_k)
        <= gate_size_limit(gs.level, model.horizon, c_norm, model.holder_r);
}

double gate_sup_bound(const GateSet& gs, const std::function<double(double, double)>& y,
                      const MeanModel& model) {
    if (gs.horizon != model.horizon)
        throw ValidationError("HorizonMismatch", "gate set and mean horizons differ");
    double best = 0.0;
    for (const auto& g : gs.gates)
        best = std::max(best, std::abs(y(g.t1, g.t2) - model.eval(g.t1, g.t2)));
    double slack = 0.0;
    if (gs.normalization > 0.0)
        slack = (2.0 / gs.level + 2.0 * gs.holder_c_norm * std::pow(gs.tol, gs.holder_r))
              * gs.normalization;
    return best + slack;
}

double gate_sup_bound(const GateSet& gs, const StepPath& path, const MeanModel& model) {
    if (path.horizon != gs.horizon)
        throw ValidationError("HorizonMismatch", "path and gate set horizons differ");
    return gate_sup_bound(
        gs,
        [&](double t1, double t2) {
            return static_cast<double>(increment(path, DeltaPoint{t1, t2}));
        },
        model);
}

double gate_sup_bound(const GateSet& gs, const SampleBatch& batch, const MeanModel& model) {
    if (batch.horizon != gs.horizon)
        throw ValidationError("HorizonMismatch", "batch and gate set horizons differ");
    return gate_sup_bound(
        gs, [&](double t1, double t2) { return average_increment(batch, DeltaPoint{t1, t2}); },
        model);
}

std::string gateset_to_json(const GateSet& gs) {
    std::ostringstream out;
    out << "{\"n\": " << gs.level << ", \"K\": " << gs.size_k
        << ", \"normalization\": " << format_double(gs.normalization) << ", \"gates\": [";
    for (std::size_t i = 0; i < gs.gates.size(); ++i) {
        if (i)
            out << ", ";
        out << '[' << format_double(gs.gates[i].t1) << ", " << format_double(gs.gates[i].t2)
            << ']';
    }
    out << "]}";
    return out.str();
}

} // namespace ulln
