#include "ulln/deviation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ulln {

namespace {

void require_same_horizon(const SampleBatch& batch, const MeanModel& model) {
    if (batch.horizon != model.horizon)
        throw ValidationError("HorizonMismatch", "batch and mean horizons differ");
}

struct Pooled {
    std::vector<double> jumps;  // all jump times, sorted, multiplicity kept
    std::vector<double> lows;   // segment i is constant on [lows[i], his[i])
    std::vector<double> his;    // (closure used for corner evaluation)
    std::vector<double> values; // Z-pooled value on segment i
};

Pooled pool_batch(const SampleBatch& batch) {
    Pooled p;
    for (const auto& path : batch.paths)
        p.jumps.insert(p.jumps.end(), path.jumps.begin(), path.jumps.end());
    std::sort(p.jumps.begin(), p.jumps.end());

    p.lows.push_back(0.0);
    p.values.push_back(0.0);
    std::size_t i = 0;
    while (i < p.jumps.size()) {
        std::size_t j = i;
        while (j < p.jumps.size() && p.jumps[j] == p.jumps[i])
            ++j;
        p.his.push_back(p.jumps[i]);
        p.lows.push_back(p.jumps[i]);
        p.values.push_back(static_cast<double>(j));
        i = j;
    }
    p.his.push_back(batch.horizon);
    return p;
}

double pooled_average(const Pooled& p, double n_paths, double t1, double t2) {
    const auto z1 = std::upper_bound(p.jumps.begin(), p.jumps.end(), t1) - p.jumps.begin();
    const auto z2 = std::upper_bound(p.jumps.begin(), p.jumps.end(), t2) - p.jumps.begin();
    return static_cast<double>(z2 - z1) / n_paths;
}

struct Best {
    double value = -1.0;
    DeltaPoint witness{0.0, 0.0};

    void offer(double v, double t1, double t2) {
        if (v > value || (v == value && (t1 < witness.t1 || (t1 == witness.t1 && t2 < witness.t2)))) {
            value = v;
            witness = {t1, t2};
        }
    }
};

} // namespace

DeviationResult sup_deviation_exact(const SampleBatch& batch, const MeanModel& model,
                                    ScanMode mode) {
    require_same_horizon(batch, model);
    if (batch.paths.empty())
        throw ValidationError("EmptyBatch", "deviation over zero paths");

    const Pooled p = pool_batch(batch);
    const double n_paths = static_cast<double>(batch.paths.size());
    const std::size_t segs = p.lows.size();
    if (mode == ScanMode::Auto)
        mode = p.jumps.size() > 5000 ? ScanMode::RowSweep : ScanMode::Direct;

    Best best;
    std::size_t cells = 0;

    if (mode == ScanMode::Direct) {
        for (std::size_t i = 0; i < segs; ++i) {
            for (std::size_t j = i; j < segs; ++j) {
                ++cells;
                const double c = (p.values[j] - p.values[i]) / n_paths;
                // m is largest at (lows[i], his[j]) and smallest at
                // (his[i], lows[j]) over the closed cell.
                best.offer(std::abs(c - model.eval(p.lows[i], p.his[j])), p.lows[i], p.his[j]);
                if (i < j)
                    best.offer(std::abs(c - model.eval(p.his[i], p.lows[j])), p.his[i], p.lows[j]);
                else
                    best.offer(std::abs(c), p.lows[i], p.lows[i]);
            }
        }
    } else {
        // Row sweep: row i needs m(lows[i], his[j]) and m(his[i], lows[j]);
        // with his[i] = lows[i+1] and lows[j] = his[j-1], the second family
        // is row i+1's first family shifted by one, so two rolling rows of
        // corner values cover every cell with one evaluation each.
        std::vector<double> row(segs), row_below(segs);
        for (std::size_t ii = segs; ii-- > 0;) {
            for (std::size_t j = ii; j < segs; ++j)
                row[j] = model.eval(p.lows[ii], p.his[j]);
            for (std::size_t j = ii; j < segs; ++j) {
                ++cells;
                const double c = (p.values[j] - p.values[ii]) / n_paths;
                best.offer(std::abs(c - row[j]), p.lows[ii], p.his[j]);
                if (ii < j) {
                    const double m_min = (j == ii + 1)
                                             ? model.eval(p.his[ii], p.lows[j])
                                             : row_below[j - 1];
                    best.offer(std::abs(c - m_min), p.his[ii], p.lows[j]);
                } else {
                    best.offer(std::abs(c), p.lows[ii], p.lows[ii]);
                }
            }
            std::swap(row, row_below);
        }
    }

    DeviationResult result;
    result.value = best.value;
    result.witness = best.witness;
    result.method = "exact";
    result.cells_examined = cells;
    const double at_witness =
        std::abs(pooled_average(p, n_paths, best.witness.t1, best.witness.t2)
                 - model.eval(best.witness.t1, best.witness.t2));
    result.approached = at_witness != best.value;
    return result;
}

DeviationResult sup_deviation_grid(const SampleBatch& batch, const MeanModel& model,
                                   int grid_points) {
    require_same_horizon(batch, model);
    if (grid_points < 2)
        throw ValidationError("DomainViolation", "grid_points must be >= 2");
    if (batch.paths.empty())
        throw ValidationError("EmptyBatch", "deviation over zero paths");

    const Pooled p = pool_batch(batch);
    const double n_paths = static_cast<double>(batch.paths.size());
    const double T = batch.horizon;

    std::vector<double> ts;
    ts.reserve(static_cast<std::size_t>(grid_points) + 2 * p.jumps.size() + 2);
    for (int i = 0; i < grid_points; ++i)
        ts.push_back(T * i / (grid_points - 1));
    for (double u : p.jumps) {
        ts.push_back(u);
        const double left = std::nextafter(u, -std::numeric_limits<double>::infinity());
        if (left >= 0.0)
            ts.push_back(left);
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    Best best;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = i; j < ts.size(); ++j) {
            ++cells;
            const double y = pooled_average(p, n_paths, ts[i], ts[j]);
            best.offer(std::abs(y - model.eval(ts[i], ts[j])), ts[i], ts[j]);
        }
    }

    DeviationResult result;
    result.value = best.value;
    result.witness = best.witness;
    result.method = "grid";
    result.cells_examined = cells;
    result.approached = false; // grid values are attained by construction
    return result;
}

} // namespace ulln
