#include "ulln/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "ulln/format.hpp"
#include "ulln/rng.hpp"
#include "ulln/specs.hpp"

namespace ulln {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string canonical_config(const StudyConfig& config) {
    std::ostringstream out;
    out << "{\"process\": " << process_to_string(config.process)
        << ", \"mean\": \"" << config.mean.name << "\", \"q_list\": [";
    for (std::size_t i = 0; i < config.q_list.size(); ++i)
        out << (i ? ", " : "") << format_double(config.q_list[i]);
    out << "], \"n_grid\": [";
    for (std::size_t i = 0; i < config.n_grid.size(); ++i)
        out << (i ? ", " : "") << config.n_grid[i];
    out << "], \"replications\": " << config.replications
        << ", \"master_seed\": " << config.master_seed
        << ", \"r\": " << format_double(config.holder_r) << ", \"M\": "
        << (config.moment_scale ? format_double(*config.moment_scale) : std::string("null"))
        << ", \"wbar\": " << (config.wbar ? format_double(*config.wbar) : std::string("null"))
        << "}";
    return out.str();
}

// Replications of one batch size, parallel over a worker pool. sups[j] is a
// pure function of (master_seed, N, j), so any worker count produces the
// same vector.
std::vector<double> replicate(const StudyConfig& config, std::int64_t n, int workers) {
    const int reps = config.replications;
    std::vector<double> sups(static_cast<std::size_t>(reps), 0.0);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    auto work = [&] {
        try {
            for (;;) {
                const int j = next.fetch_add(1);
                if (j >= reps)
                    break;
                const std::uint64_t batch_seed =
                    rng::substream_id(config.master_seed, static_cast<std::uint64_t>(n),
                                      static_cast<std::uint64_t>(j));
                const SampleBatch batch = sample_batch(config.process, n, batch_seed);
                sups[static_cast<std::size_t>(j)] =
                    sup_deviation_exact(batch, config.mean).value;
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure)
                failure = std::current_exception();
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return sups;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ValidationError("IoError", "cannot open " + path.string() + " for writing");
    out << content;
    if (!out)
        throw ValidationError("IoError", "failed writing " + path.string());
}

std::string raw_csv_from(const StudyConfig& config,
                         const std::map<std::int64_t, std::vector<double>>& sups_by_n) {
    std::ostringstream out;
    out << "q,N,replication,sup_dev\n";
    for (double q : config.q_list)
        for (const auto& [n, sups] : sups_by_n)
            for (std::size_t j = 0; j < sups.size(); ++j)
                out << format_double(q) << ',' << n << ',' << j << ','
                    << format_double(sups[j]) << '\n';
    return out.str();
}

void flush_partial(const StudyConfig& config, const std::string& hash,
                   const std::map<std::int64_t, std::vector<double>>& sups_by_n) {
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "raw.csv", raw_csv_from(config, sups_by_n));
    std::ostringstream state;
    state << "{\"config_hash\": \"" << hash << "\", \"completed\": [";
    bool first = true;
    for (const auto& [n, sups] : sups_by_n) {
        state << (first ? "" : ", ") << n;
        first = false;
    }
    state << "]}\n";
    write_file(dir / "state.json", state.str());
}

std::map<std::int64_t, std::vector<double>> try_resume(const StudyConfig& config,
                                                       const std::string& hash) {
    std::map<std::int64_t, std::vector<double>> done;
    const std::filesystem::path dir(config.output_dir);
    std::ifstream state_in(dir / "state.json");
    if (!state_in)
        return done;
    nlohmann::json state = nlohmann::json::parse(state_in, nullptr, false);
    if (state.is_discarded() || state.value("config_hash", std::string()) != hash)
        return done; // different or corrupt config: start fresh
    std::vector<std::int64_t> completed =
        state.value("completed", std::vector<std::int64_t>{});

    std::ifstream raw_in(dir / "raw.csv");
    if (!raw_in)
        return done;
    std::string line;
    std::getline(raw_in, line); // header
    std::map<std::int64_t, std::map<int, double>> by_n;
    while (std::getline(raw_in, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string q_s, n_s, j_s, v_s;
        if (!std::getline(row, q_s, ',') || !std::getline(row, n_s, ',')
            || !std::getline(row, j_s, ',') || !std::getline(row, v_s))
            return {};
        const auto n = static_cast<std::int64_t>(std::strtoll(n_s.c_str(), nullptr, 10));
        const int j = static_cast<int>(std::strtol(j_s.c_str(), nullptr, 10));
        by_n[n].emplace(j, std::strtod(v_s.c_str(), nullptr));
    }
    for (auto n : completed) {
        auto it = by_n.find(n);
        if (it == by_n.end()
            || it->second.size() != static_cast<std::size_t>(config.replications))
            continue;
        std::vector<double> sups;
        sups.reserve(it->second.size());
        for (const auto& [j, v] : it->second)
            sups.push_back(v);
        done.emplace(n, std::move(sups));
    }
    return done;
}

std::string svg_plot(const StudyResult& result) {
    // log-log scatter of the estimates with the bound curve per q.
    const double width = 640.0, height = 440.0, margin = 56.0;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& row : result.rows) {
        if (row.mean_supq <= 0.0)
            continue;
        xmin = std::min(xmin, std::log10(static_cast<double>(row.n)));
        xmax = std::max(xmax, std::log10(static_cast<double>(row.n)));
        ymin = std::min(ymin, std::log10(row.mean_supq));
        ymax = std::max(ymax, std::log10(row.mean_supq));
        if (row.has_bound)
            ymax = std::max(ymax, std::log10(row.bound_rhs));
    }
    if (xmax <= xmin) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax <= ymin) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    auto px = [&](double lx) {
        return margin + (lx - xmin) / (xmax - xmin) * (width - 2 * margin);
    };
    auto py = [&](double ly) {
        return height - margin - (ly - ymin) / (ymax - ymin) * (height - 2 * margin);
    };
    auto coord = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << coord(margin) << "\" y1=\"" << coord(height - margin) << "\" x2=\""
        << coord(width - margin) << "\" y2=\"" << coord(height - margin)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << coord(margin) << "\" y1=\"" << coord(margin) << "\" x2=\""
        << coord(margin) << "\" y2=\"" << coord(height - margin) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << coord(width / 2) << "\" y=\"" << coord(height - 12)
        << "\" font-size=\"12\" text-anchor=\"middle\">log10 N</text>\n";
    out << "<text x=\"14\" y=\"" << coord(height / 2)
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << coord(height / 2) << ")\">log10 E[sup^q]</text>\n";
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::size_t color_idx = 0;
    std::vector<double> qs;
    for (const auto& row : result.rows)
        if (std::find(qs.begin(), qs.end(), row.q) == qs.end())
            qs.push_back(row.q);
    for (double q : qs) {
        const char* color = colors[color_idx++ % 4];
        std::ostringstream est, bound;
        for (const auto& row : result.rows) {
            if (row.q != q || row.mean_supq <= 0.0)
                continue;
            const double x = px(std::log10(static_cast<double>(row.n)));
            est << coord(x) << ',' << coord(py(std::log10(row.mean_supq))) << ' ';
            out << "<circle cx=\"" << coord(x) << "\" cy=\""
                << coord(py(std::log10(row.mean_supq))) << "\" r=\"3\" fill=\"" << color
                << "\"/>\n";
            if (row.has_bound)
                bound << coord(x) << ',' << coord(py(std::log10(row.bound_rhs))) << ' ';
        }
        out << "<polyline points=\"" << est.str() << "\" fill=\"none\" stroke=\"" << color
            << "\"/>\n";
        if (!bound.str().empty())
            out << "<polyline points=\"" << bound.str() << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-dasharray=\"6 3\"/>\n";
        out << "<text x=\"" << coord(width - margin + 4) << "\" y=\""
            << coord(margin + 14 * static_cast<double>(color_idx)) << "\" font-size=\"11\" fill=\""
            << color << "\">q=" << format_double(q) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace

HypothesisData derive_hypothesis(const ProcessSpec& process, double q, double r, double horizon,
                                 std::optional<double> m_override,
                                 std::optional<double> wbar_override) {
    if (m_override && wbar_override)
        return {*m_override, *wbar_override};
    if (!(r > 0.0) || r > 1.0)
        throw ValidationError("DomainViolation",
                              "hypothesis data can only be derived for 0 < r <= 1; supply M and"
                              " wbar explicitly otherwise");
    const auto qi = static_cast<int>(std::llround(q));
    if (std::abs(q - qi) > 1e-12 || qi < 1)
        throw ValidationError("DomainViolation",
                              "hypothesis data can only be derived for integer q; supply M and"
                              " wbar explicitly");
    double moment = 0.0;   // E[Z(0,T)^q]
    double lipschitz = 0.0; // |dE[Z]| <= lipschitz * dt
    switch (process.kind) {
    case ProcessSpec::Kind::PoissonConst:
        moment = poisson_raw_moment(process.lambda * horizon, qi);
        lipschitz = process.lambda;
        break;
    case ProcessSpec::Kind::PoissonRate:
        moment = poisson_raw_moment(omega_of(process.intensity, 0.0, horizon), qi);
        lipschitz = process.intensity.sup_bound;
        break;
    case ProcessSpec::Kind::Latd:
        moment = latd_moment_bound(process.intensity.sup_bound, horizon, qi);
        lipschitz = process.intensity.sup_bound;
        break;
    }
    HypothesisData data;
    data.M = m_override ? *m_override : std::pow(moment, 1.0 / q);
    data.wbar = wbar_override
                    ? *wbar_override
                    : (data.M > 0.0 ? lipschitz * std::pow(horizon, 1.0 - r) / data.M : 0.0);
    return data;
}

LineFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw ValidationError("DomainViolation", "rate fit needs at least 3 points");
    double sx = 0.0, sy = 0.0;
    for (const auto& [n, est] : points) {
        if (!(n > 0.0) || !(est > 0.0))
            throw ValidationError("NonpositiveEstimate",
                                  "rate fit needs positive N and estimates");
        sx += std::log(n);
        sy += std::log(est);
    }
    const double count = static_cast<double>(points.size());
    const double xbar = sx / count, ybar = sy / count;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& [n, est] : points) {
        const double dx = std::log(n) - xbar;
        const double dy = std::log(est) - ybar;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0)
        throw ValidationError("DomainViolation", "rate fit needs at least two distinct N");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

std::string study_config_hash(const StudyConfig& config) {
    return hex64(fnv1a(canonical_config(config)));
}

StudyResult run_lln_study(const StudyConfig& config, int workers) {
    if (config.q_list.empty() || config.n_grid.empty())
        throw ValidationError("DomainViolation", "study needs q_list and n_grid");
    if (config.replications < 2)
        throw ValidationError("DomainViolation", "replications must be >= 2");
    if (config.mean.horizon != config.process.horizon)
        throw ValidationError("HorizonMismatch", "study mean and process horizons differ");

    StudyResult result;
    result.config_hash = study_config_hash(config);
    result.seed = config.master_seed;

    for (double q : config.q_list) {
        // The bound only applies for q > 2; for smaller q a hypothesis row is
        // still recorded when derivable, but a failure there is not an error.
        try {
            const HypothesisData hyp = derive_hypothesis(config.process, q, config.holder_r,
                                                         config.process.horizon,
                                                         config.moment_scale, config.wbar);
            result.hypothesis.push_back({q, hyp.M, hyp.wbar});
        } catch (const ValidationError&) {
            if (q > 2.0)
                throw;
            result.hypothesis.push_back({q, 0.0, 0.0});
        }
    }

    auto sups_by_n = try_resume(config, result.config_hash);
    for (std::int64_t n : config.n_grid) {
        if (sups_by_n.count(n))
            continue;
        sups_by_n.emplace(n, replicate(config, n, workers));
        flush_partial(config, result.config_hash, sups_by_n);
    }

    const auto reps = static_cast<double>(config.replications);
    for (std::size_t qi = 0; qi < config.q_list.size(); ++qi) {
        const double q = config.q_list[qi];
        const HypothesisRow& hyp = result.hypothesis[qi];
        std::vector<std::pair<double, double>> fit_points;
        for (std::int64_t n : config.n_grid) {
            const auto& sups = sups_by_n.at(n);
            double mean = 0.0;
            for (double s : sups)
                mean += std::pow(s, q);
            mean /= reps;
            double var = 0.0;
            for (double s : sups) {
                const double d = std::pow(s, q) - mean;
                var += d * d;
            }
            var /= (reps - 1.0);

            StudyRow row;
            row.q = q;
            row.n = n;
            row.mean_supq = mean;
            row.std_err = std::sqrt(var / reps);
            if (q > 2.0 && hyp.M > 0.0) {
                row.n0 = n0_threshold(q, config.holder_r);
                row.exponent = rate_exponent(q, config.holder_r);
                if (n >= row.n0) {
                    BoundParams params;
                    params.q = q;
                    params.r = config.holder_r;
                    params.T = config.process.horizon;
                    params.M = hyp.M;
                    params.wbar = hyp.wbar;
                    params.N = n;
                    row.bound_rhs = main_bound_rhs(params);
                    row.has_bound = true;
                }
            }
            result.rows.push_back(row);
            for (std::size_t j = 0; j < sups.size(); ++j)
                result.raw.push_back({q, n, static_cast<int>(j), sups[j]});
            fit_points.emplace_back(static_cast<double>(n), mean);
        }
        const bool fittable = fit_points.size() >= 3
                              && std::all_of(fit_points.begin(), fit_points.end(),
                                             [](const auto& p) { return p.second > 0.0; });
        if (fittable)
            result.fits.push_back({q, fit_rate(fit_points)});

        bool decay_ok = true;
        const std::size_t base = result.rows.size() - config.n_grid.size();
        for (std::size_t i = base; i + 1 < result.rows.size(); ++i) {
            const auto& a = result.rows[i];
            const auto& b = result.rows[i + 1];
            if (b.mean_supq > a.mean_supq + 3.0 * (a.std_err + b.std_err))
                decay_ok = false;
        }
        result.soft_checks.push_back({q, decay_ok});
    }
    return result;
}

std::string raw_csv(const StudyResult& result) {
    std::ostringstream out;
    out << "q,N,replication,sup_dev\n";
    for (const auto& row : result.raw)
        out << format_double(row.q) << ',' << row.n << ',' << row.replication << ','
            << format_double(row.sup_dev) << '\n';
    return out.str();
}

std::string summary_csv(const StudyResult& result) {
    std::ostringstream out;
    out << "q,N,mean_supq,stderr,bound_rhs,n0\n";
    for (const auto& row : result.rows) {
        out << format_double(row.q) << ',' << row.n << ',' << format_double(row.mean_supq)
            << ',' << format_double(row.std_err) << ',';
        if (row.has_bound)
            out << format_double(row.bound_rhs);
        out << ',';
        if (row.n0 >= 0)
            out << row.n0;
        out << '\n';
    }
    return out.str();
}

std::string study_json(const StudyResult& result) {
    std::ostringstream out;
    out << "{\n  \"config_hash\": \"" << result.config_hash << "\",\n  \"seed\": " << result.seed
        << ",\n  \"hypothesis\": [";
    for (std::size_t i = 0; i < result.hypothesis.size(); ++i) {
        const auto& h = result.hypothesis[i];
        out << (i ? ", " : "") << "{\"q\": " << format_double(h.q)
            << ", \"M\": " << format_double(h.M) << ", \"wbar\": " << format_double(h.wbar)
            << "}";
    }
    out << "],\n  \"rows\": [";
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& row = result.rows[i];
        out << (i ? ",\n    " : "\n    ") << "{\"q\": " << format_double(row.q)
            << ", \"N\": " << row.n << ", \"mean_supq\": " << format_double(row.mean_supq)
            << ", \"stderr\": " << format_double(row.std_err)
            << ", \"ci3\": " << format_double(3.0 * row.std_err) << ", \"bound_rhs\": ";
        if (row.has_bound)
            out << format_double(row.bound_rhs);
        else
            out << "null";
        out << ", \"n0\": ";
        if (row.n0 >= 0)
            out << row.n0;
        else
            out << "null";
        out << ", \"exponent\": ";
        if (row.n0 >= 0)
            out << format_double(row.exponent);
        else
            out << "null";
        out << "}";
    }
    out << "\n  ],\n  \"fits\": [";
    for (std::size_t i = 0; i < result.fits.size(); ++i) {
        const auto& f = result.fits[i];
        out << (i ? ", " : "") << "{\"q\": " << format_double(f.q)
            << ", \"slope\": " << format_double(f.fit.slope)
            << ", \"intercept\": " << format_double(f.fit.intercept)
            << ", \"r_squared\": " << format_double(f.fit.r_squared) << "}";
    }
    out << "],\n  \"soft_checks\": [";
    for (std::size_t i = 0; i < result.soft_checks.size(); ++i) {
        const auto& s = result.soft_checks[i];
        out << (i ? ", " : "") << "{\"q\": " << format_double(s.q)
            << ", \"monotone_decay\": " << (s.monotone_decay ? "true" : "false") << "}";
    }
    out << "]\n}\n";
    return out.str();
}

void export_results(const StudyResult& result, const StudyConfig& config,
                    const std::string& dir) {
    const std::filesystem::path base(dir);
    std::filesystem::create_directories(base);
    write_file(base / "raw.csv", raw_csv(result));
    write_file(base / "summary.csv", summary_csv(result));
    write_file(base / "study.json", study_json(result));
    if (config.emit_svg)
        write_file(base / "plot.svg", svg_plot(result));
}

} // namespace ulln
