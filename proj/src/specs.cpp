#include "ulln/specs.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ulln/bounds.hpp"
#include "ulln/format.hpp"

namespace ulln {

namespace {

[[noreturn]] void bad_spec(const std::string& what) {
    throw ValidationError("MalformedSpec", what);
}

double need_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        bad_spec(std::string("missing numeric field \"") + key + "\"");
    return j.at(key).get<double>();
}

std::string need_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string())
        bad_spec(std::string("missing string field \"") + key + "\"");
    return j.at(key).get<std::string>();
}

} // namespace

IntensityModel parse_intensity_spec(const nlohmann::json& j, double horizon) {
    const std::string family = need_string(j, "w");
    IntensityModel model;
    if (family == "constant") {
        model = intensity_constant(need_number(j, "a"), horizon);
    } else if (family == "last-linear") {
        model = intensity_last_linear(need_number(j, "a"), need_number(j, "b"), horizon);
    } else if (family == "time-ramp") {
        model = intensity_time_ramp(need_number(j, "a"), need_number(j, "b"), horizon);
    } else if (family == "product") {
        model = intensity_product(need_number(j, "a"), need_number(j, "b"),
                                  need_number(j, "c"), horizon);
    } else {
        bad_spec("unknown intensity family \"" + family + "\"");
    }
    if (j.contains("sup_bound")) {
        const double s = need_number(j, "sup_bound");
        if (s < model.sup_bound)
            bad_spec("sup_bound " + format_double(s) + " is below the family supremum "
                     + format_double(model.sup_bound));
        model.sup_bound = s;
    }
    return model;
}

ProcessSpec parse_process_spec(const nlohmann::json& j) {
    const std::string kind = need_string(j, "kind");
    const double horizon = need_number(j, "T");
    if (kind == "poisson")
        return poisson_process(need_number(j, "lambda"), horizon);
    if (kind == "poisson-fn")
        return poisson_rate_process(parse_intensity_spec(j, horizon));
    if (kind == "latd")
        return latd_process(parse_intensity_spec(j, horizon));
    bad_spec("unknown process kind \"" + kind + "\"");
}

MeanModel parse_mean_spec(const nlohmann::json& j) {
    const std::string kind = need_string(j, "kind");
    if (kind == "poisson")
        return poisson_mean(need_number(j, "lambda"), need_number(j, "T"));
    if (kind == "power")
        return power_mean(need_number(j, "beta"), need_number(j, "T"));
    if (kind == "zero")
        return zero_mean(need_number(j, "T"));
    if (kind == "latd-series") {
        if (!j.contains("process"))
            bad_spec("latd-series mean needs a \"process\" object");
        const ProcessSpec process = parse_process_spec(j.at("process"));
        if (process.kind != ProcessSpec::Kind::Latd)
            bad_spec("latd-series mean needs a latd process");
        const int grid = j.value("grid", 256);
        const int kmax = j.value("kmax", 20);
        const double tol = j.value("tol", 1e-8);
        const auto table = latd_mean_table(process.intensity, grid, kmax, tol);
        std::vector<double> nodes(table.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
            nodes[i] = process.horizon * static_cast<double>(i)
                     / static_cast<double>(nodes.size() - 1);
        return tabulated_mean(std::move(nodes), table,
                              "latd-series(" + process.intensity.name + ")");
    }
    bad_spec("unknown mean kind \"" + kind + "\"");
}

// Mean derived from the process itself ("mean": "auto" in study configs).
static MeanModel auto_mean(const ProcessSpec& process, const nlohmann::json& j) {
    switch (process.kind) {
    case ProcessSpec::Kind::PoissonConst:
        return poisson_mean(process.lambda, process.horizon);
    case ProcessSpec::Kind::PoissonRate: {
        // Integrated rate: m(t1,t2) = Lambda(t2) - Lambda(t1).
        const IntensityModel rate = process.intensity;
        MeanModel m;
        m.horizon = process.horizon;
        m.eval = [rate](double t1, double t2) {
            return omega_of(rate, 0.0, t2) - omega_of(rate, 0.0, t1);
        };
        m.holder_r = 1.0;
        m.holder_c = rate.sup_bound;
        m.top_value = omega_of(rate, 0.0, process.horizon);
        m.name = "integrated-rate(" + rate.name + ")";
        return m;
    }
    case ProcessSpec::Kind::Latd: {
        const int grid = j.value("latd_mean_grid", 256);
        const int kmax = j.value("latd_kmax", 20);
        const double tol = j.value("latd_tol", 1e-8);
        const auto table = latd_mean_table(process.intensity, grid, kmax, tol);
        std::vector<double> nodes(table.size());
        for (std::size_t i = 0; i < nodes.size(); ++i)
            nodes[i] = process.horizon * static_cast<double>(i)
                     / static_cast<double>(nodes.size() - 1);
        return tabulated_mean(std::move(nodes), table,
                              "latd-series(" + process.intensity.name + ")");
    }
    }
    bad_spec("unsupported process kind for auto mean");
}

StudyConfig parse_study_config(const nlohmann::json& j) {
    if (!j.contains("process"))
        bad_spec("study config needs a \"process\" object");
    StudyConfig config;
    config.process = parse_process_spec(j.at("process"));

    if (!j.contains("mean") || (j.at("mean").is_string() && j.at("mean") == "auto"))
        config.mean = auto_mean(config.process, j);
    else
        config.mean = parse_mean_spec(j.at("mean"));
    if (config.mean.horizon != config.process.horizon)
        bad_spec("mean and process horizons differ");

    if (!j.contains("q_list") || !j.at("q_list").is_array() || j.at("q_list").empty())
        bad_spec("study config needs a nonempty \"q_list\"");
    config.q_list = j.at("q_list").get<std::vector<double>>();
    std::sort(config.q_list.begin(), config.q_list.end());
    config.q_list.erase(std::unique(config.q_list.begin(), config.q_list.end()),
                        config.q_list.end());

    if (!j.contains("n_grid") || !j.at("n_grid").is_array() || j.at("n_grid").empty())
        bad_spec("study config needs a nonempty \"n_grid\"");
    config.n_grid = j.at("n_grid").get<std::vector<std::int64_t>>();
    std::sort(config.n_grid.begin(), config.n_grid.end());
    config.n_grid.erase(std::unique(config.n_grid.begin(), config.n_grid.end()),
                        config.n_grid.end());
    for (auto n : config.n_grid)
        if (n < 1)
            bad_spec("all N in n_grid must be >= 1");

    config.replications = j.value("replications", 200);
    if (config.replications < 2)
        bad_spec("replications must be >= 2 (standard errors need at least 2)");
    config.master_seed = j.value("master_seed", 0ull);
    config.output_dir = j.value("output_dir", std::string("out"));
    config.holder_r = j.value("r", 1.0);
    if (!(config.holder_r > 0.0))
        bad_spec("r must be > 0");
    if (j.contains("M"))
        config.moment_scale = need_number(j, "M");
    if (j.contains("wbar"))
        config.wbar = need_number(j, "wbar");
    config.emit_svg = j.value("svg", false);
    return config;
}

nlohmann::json load_spec_arg(const std::string& arg) {
    std::string text;
    if (!arg.empty() && arg.front() == '{') {
        text = arg;
    } else {
        std::ifstream in(arg);
        if (!in)
            throw ValidationError("IoError", "cannot open spec file " + arg);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded())
        bad_spec("invalid JSON in \"" + arg + "\"");
    return j;
}

MeanModel mean_from_arg(const std::string& arg) { return parse_mean_spec(load_spec_arg(arg)); }

ProcessSpec process_from_arg(const std::string& arg) {
    return parse_process_spec(load_spec_arg(arg));
}

StudyConfig study_config_from_file(const std::string& path) {
    return parse_study_config(load_spec_arg(path));
}

std::string process_to_string(const ProcessSpec& spec) {
    std::ostringstream out;
    switch (spec.kind) {
    case ProcessSpec::Kind::PoissonConst:
        out << "{\"kind\": \"poisson\", \"lambda\": " << format_double(spec.lambda)
            << ", \"T\": " << format_double(spec.horizon) << "}";
        break;
    case ProcessSpec::Kind::PoissonRate:
        out << "{\"kind\": \"poisson-fn\", \"w\": \"" << spec.intensity.name
            << "\", \"T\": " << format_double(spec.horizon) << "}";
        break;
    case ProcessSpec::Kind::Latd:
        out << "{\"kind\": \"latd\", \"w\": \"" << spec.intensity.name
            << "\", \"sup_bound\": " << format_double(spec.intensity.sup_bound)
            << ", \"T\": " << format_double(spec.horizon) << "}";
        break;
    }
    return out.str();
}

} // namespace ulln
