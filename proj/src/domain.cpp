#include "ulln/domain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"

#include "ulln/format.hpp"

namespace ulln {

bool in_delta(DeltaPoint p, double horizon) {
    return std::isfinite(p.t1) && std::isfinite(p.t2)
        && 0.0 <= p.t1 && p.t1 <= p.t2 && p.t2 <= horizon;
}

void require_in_delta(DeltaPoint p, double horizon) {
    if (!in_delta(p, horizon))
        throw ValidationError("DomainViolation",
                              "(" + format_double(p.t1) + ", " + format_double(p.t2)
                                  + ") outside the triangle with T = " + format_double(horizon));
}

StepPath make_step_path(double horizon, std::vector<double> jumps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("NonpositiveHorizon", "horizon must be a positive finite time");
    std::sort(jumps.begin(), jumps.end());
    for (double u : jumps) {
        if (!std::isfinite(u) || u <= 0.0 || u > horizon)
            throw ValidationError("JumpOutOfRange",
                                  "jump at " + format_double(u) + " outside (0, "
                                      + format_double(horizon) + "]");
    }
    return StepPath{horizon, std::move(jumps)};
}

std::int64_t count_at(const StepPath& path, double t) {
    return std::upper_bound(path.jumps.begin(), path.jumps.end(), t) - path.jumps.begin();
}

std::int64_t increment(const StepPath& path, DeltaPoint p) {
    require_in_delta(p, path.horizon);
    return count_at(path, p.t2) - count_at(path, p.t1);
}

SampleBatch make_batch(double horizon, std::vector<StepPath> paths) {
    if (!(horizon > 0.0))
        throw ValidationError("NonpositiveHorizon", "horizon must be positive");
    if (paths.empty())
        throw ValidationError("EmptyBatch", "a batch needs at least one path");
    for (const auto& p : paths) {
        if (p.horizon != horizon)
            throw ValidationError("HorizonMismatch", "all paths must share the batch horizon");
    }
    return SampleBatch{horizon, std::move(paths), 0, {}};
}

double average_increment(const SampleBatch& batch, DeltaPoint p) {
    if (batch.paths.empty())
        throw ValidationError("EmptyBatch", "average over zero paths");
    require_in_delta(p, batch.horizon);
    std::int64_t total = 0;
    for (const auto& path : batch.paths)
        total += increment(path, p);
    return static_cast<double>(total) / static_cast<double>(batch.paths.size());
}

double mean_eval(const MeanModel& model, DeltaPoint p) {
    require_in_delta(p, model.horizon);
    return model.eval(p.t1, p.t2);
}

MeanModel poisson_mean(double lambda, double horizon) {
    if (lambda < 0.0 || !(horizon > 0.0))
        throw ValidationError("DomainViolation", "poisson mean needs lambda >= 0, T > 0");
    MeanModel m;
    m.horizon = horizon;
    m.eval = [lambda](double t1, double t2) { return lambda * (t2 - t1); };
    m.holder_r = 1.0;
    m.holder_c = lambda;
    m.top_value = lambda * horizon;
    m.name = "poisson(" + format_double(lambda) + ")";
    return m;
}

MeanModel power_mean(double beta, double horizon) {
    if (!(beta > 0.0) || !(horizon > 0.0))
        throw ValidationError("DomainViolation", "power mean needs beta > 0, T > 0");
    MeanModel m;
    m.horizon = horizon;
    m.eval = [beta](double t1, double t2) { return std::pow(t2, beta) - std::pow(t1, beta); };
    // |t^b - s^b| <= |t-s|^b for b <= 1; for b > 1 it is Lipschitz with
    // constant b*T^(b-1) on [0,T].
    m.holder_r = std::min(beta, 1.0);
    m.holder_c = beta <= 1.0 ? 1.0 : beta * std::pow(horizon, beta - 1.0);
    m.top_value = std::pow(horizon, beta);
    m.name = "power(" + format_double(beta) + ")";
    return m;
}

MeanModel zero_mean(double horizon) {
    MeanModel m;
    m.horizon = horizon;
    m.eval = [](double, double) { return 0.0; };
    m.holder_r = 1.0;
    m.holder_c = 0.0;
    m.top_value = 0.0;
    m.name = "zero";
    return m;
}

MeanModel tabulated_mean(std::vector<double> grid_t, std::vector<double> grid_g, std::string name) {
    if (grid_t.size() < 2 || grid_t.size() != grid_g.size())
        throw ValidationError("DomainViolation", "tabulated mean needs >= 2 matching nodes");
    if (grid_t.front() != 0.0)
        throw ValidationError("DomainViolation", "tabulated mean must start at t = 0");
    double max_slope = 0.0;
    for (std::size_t i = 0; i + 1 < grid_t.size(); ++i) {
        const double dt = grid_t[i + 1] - grid_t[i];
        const double dg = grid_g[i + 1] - grid_g[i];
        if (!(dt > 0.0))
            throw ValidationError("DomainViolation", "tabulated nodes must be strictly increasing");
        if (dg < 0.0)
            throw ValidationError("DomainViolation", "tabulated values must be non-decreasing");
        max_slope = std::max(max_slope, dg / dt);
    }
    const double horizon = grid_t.back();
    const double base = grid_g.front();
    auto ts = std::make_shared<std::vector<double>>(std::move(grid_t));
    auto gs = std::make_shared<std::vector<double>>(std::move(grid_g));
    auto interp = [ts, gs](double t) {
        auto it = std::upper_bound(ts->begin(), ts->end(), t);
        if (it == ts->begin())
            return gs->front();
        if (it == ts->end())
            return gs->back();
        const std::size_t i = static_cast<std::size_t>(it - ts->begin()) - 1;
        const double a = (*ts)[i], b = (*ts)[i + 1];
        const double w = (t - a) / (b - a);
        return (*gs)[i] * (1.0 - w) + (*gs)[i + 1] * w;
    };
    MeanModel m;
    m.horizon = horizon;
    m.eval = [interp](double t1, double t2) { return interp(t2) - interp(t1); };
    m.holder_r = 1.0;
    m.holder_c = max_slope;
    m.top_value = gs->back() - base;
    m.name = std::move(name);
    return m;
}

std::string batch_to_string(const SampleBatch& batch) {
    std::ostringstream out;
    out << "{\"T\": " << format_double(batch.horizon)
        << ", \"N\": " << batch.paths.size()
        << ", \"seed\": " << batch.master_seed << "}\n";
    for (const auto& path : batch.paths) {
        out << '[';
        for (std::size_t i = 0; i < path.jumps.size(); ++i) {
            if (i)
                out << ", ";
            out << format_double(path.jumps[i]);
        }
        out << "]\n";
    }
    return out.str();
}

void write_batch(const std::string& file, const SampleBatch& batch) {
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw ValidationError("IoError", "cannot open " + file + " for writing");
    out << batch_to_string(batch);
    if (!out)
        throw ValidationError("IoError", "failed writing " + file);
}

SampleBatch read_batch(const std::string& file) {
    std::ifstream in(file);
    if (!in)
        throw ValidationError("IoError", "cannot open " + file);
    std::string line;
    if (!std::getline(in, line))
        throw ValidationError("IoError", "empty batch file " + file);
    nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.contains("T") || !header.contains("N"))
        throw ValidationError("IoError", "malformed batch header in " + file);
    SampleBatch batch;
    batch.horizon = header.at("T").get<double>();
    batch.master_seed = header.value("seed", 0ull);
    const std::size_t n = header.at("N").get<std::size_t>();
    batch.paths.reserve(n);
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        nlohmann::json arr = nlohmann::json::parse(line, nullptr, false);
        if (arr.is_discarded() || !arr.is_array())
            throw ValidationError("IoError", "malformed path line in " + file);
        batch.paths.push_back(make_step_path(batch.horizon, arr.get<std::vector<double>>()));
    }
    if (batch.paths.size() != n)
        throw ValidationError("IoError", "batch header N does not match path count in " + file);
    return batch;
}

} // namespace ulln
