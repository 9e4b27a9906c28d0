#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "ulln/bounds.hpp"
#include "ulln/deviation.hpp"
#include "ulln/format.hpp"
#include "ulln/gates.hpp"
#include "ulln/specs.hpp"
#include "ulln/study.hpp"

namespace {

void emit(const std::string& text, const std::string& out_file) {
    if (out_file.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(out_file, std::ios::binary);
    if (!out)
        throw ulln::ValidationError("IoError", "cannot open " + out_file + " for writing");
    out << text << '\n';
}

std::string deviation_json(const ulln::DeviationResult& r) {
    std::string s = "{\"value\": " + ulln::format_double(r.value) + ", \"witness\": ["
                  + ulln::format_double(r.witness.t1) + ", " + ulln::format_double(r.witness.t2)
                  + "], \"approached\": " + (r.approached ? "true" : "false") + ", \"method\": \""
                  + r.method + "\", \"cells_examined\": " + std::to_string(r.cells_examined)
                  + "}";
    return s;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ulln: doubly-uniform LLN simulation and bound-verification toolkit"};
    app.require_subcommand(1);

    // gates
    auto* gates_cmd = app.add_subcommand("gates", "build the finite gate set for a mean");
    std::string gates_mean, gates_out;
    int gates_n = 1;
    double gates_tol = 0.0;
    gates_cmd->add_option("--mean", gates_mean, "mean spec (inline JSON or file)")->required();
    gates_cmd->add_option("--n", gates_n, "gate level n >= 1")->required();
    gates_cmd->add_option("--tol", gates_tol, "root tolerance (default 1e-10*T)");
    gates_cmd->add_option("--out", gates_out, "output file (default stdout)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "sample a batch of counting paths");
    std::string sim_spec, sim_out;
    std::int64_t sim_n = 1;
    std::uint64_t sim_seed = 0;
    sim_cmd->add_option("--spec", sim_spec, "process spec (inline JSON or file)")->required();
    sim_cmd->add_option("--N", sim_n, "number of paths")->required();
    sim_cmd->add_option("--seed", sim_seed, "master seed")->required();
    sim_cmd->add_option("--out", sim_out, "batch file (default stdout)");

    // deviation
    auto* dev_cmd = app.add_subcommand("deviation", "sup |Y_N - m| for a batch file");
    std::string dev_batch, dev_mean;
    int dev_grid = 0;
    dev_cmd->add_option("--batch", dev_batch, "batch file")->required();
    dev_cmd->add_option("--mean", dev_mean, "mean spec (inline JSON or file)")->required();
    dev_cmd->add_option("--grid", dev_grid, "grid points (0 = exact cell scan)");

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "evaluate the explicit constants and bounds");
    ulln::BoundParams bp;
    double bounds_gamma = -1.0, bounds_p = -1.0;
    bounds_cmd->add_option("--q", bp.q, "moment order q > 2")->required();
    bounds_cmd->add_option("--r", bp.r, "Hoelder exponent r > 0")->required();
    bounds_cmd->add_option("--T", bp.T, "horizon")->required();
    bounds_cmd->add_option("--M", bp.M, "moment scale M")->required();
    bounds_cmd->add_option("--wbar", bp.wbar, "averaged Hoelder coefficient")->required();
    bounds_cmd->add_option("--N", bp.N, "sample count")->required();
    bounds_cmd->add_option("--gamma", bounds_gamma, "target rate in (0,1/2) for the L^p form");
    bounds_cmd->add_option("--p", bounds_p, "output moment order for the L^p form");

    // study
    auto* study_cmd = app.add_subcommand("study", "run a Monte Carlo rate study");
    std::string study_config;
    int study_workers = 1;
    study_cmd->add_option("--config", study_config, "study config file")->required();
    study_cmd->add_option("--workers", study_workers, "worker threads (output is identical)");

    // oracle-mean
    auto* oracle_cmd = app.add_subcommand("oracle-mean", "series oracles for the LATD mean");
    std::string oracle_spec;
    double oracle_s = 0.0, oracle_t = 0.0, oracle_tol = 1e-8;
    int oracle_kmax = 20;
    bool oracle_norm = false;
    oracle_cmd->add_option("--spec", oracle_spec, "latd process spec (inline JSON or file)")
        ->required();
    oracle_cmd->add_option("--s", oracle_s, "interval start");
    oracle_cmd->add_option("--t", oracle_t, "interval end")->required();
    oracle_cmd->add_option("--kmax", oracle_kmax, "series truncation order");
    oracle_cmd->add_option("--tol", oracle_tol, "tail tolerance");
    oracle_cmd->add_flag("--normalization", oracle_norm,
                         "report the normalization-identity residual at t instead");

    try {
        app.parse(argc, argv);

        if (*gates_cmd) {
            const ulln::MeanModel mean = ulln::mean_from_arg(gates_mean);
            const ulln::GateSet gs = ulln::build_gate_set(mean, gates_n, gates_tol);
            emit(ulln::gateset_to_json(gs), gates_out);
        } else if (*sim_cmd) {
            const ulln::ProcessSpec spec = ulln::process_from_arg(sim_spec);
            const ulln::SampleBatch batch = ulln::sample_batch(spec, sim_n, sim_seed);
            if (sim_out.empty())
                std::cout << ulln::batch_to_string(batch);
            else
                ulln::write_batch(sim_out, batch);
        } else if (*dev_cmd) {
            const ulln::SampleBatch batch = ulln::read_batch(dev_batch);
            const ulln::MeanModel mean = ulln::mean_from_arg(dev_mean);
            const ulln::DeviationResult result =
                dev_grid > 0 ? ulln::sup_deviation_grid(batch, mean, dev_grid)
                             : ulln::sup_deviation_exact(batch, mean);
            std::cout << deviation_json(result) << '\n';
        } else if (*bounds_cmd) {
            // evaluate everything before printing so a failure emits no
            // partial report
            std::string rhs2 = "null";
            if (bounds_gamma > 0.0 && bounds_p > 0.0) {
                bp.gamma = bounds_gamma;
                bp.p = bounds_p;
                rhs2 = ulln::format_double(ulln::main2_bound_rhs(bp));
            }
            const std::string cq = ulln::format_double(ulln::cq_constant(bp.q));
            const std::string n0 = std::to_string(ulln::n0_threshold(bp.q, bp.r));
            const std::string exponent = ulln::format_double(ulln::rate_exponent(bp.q, bp.r));
            const bool condition = ulln::complete_lln_condition(bp.q, bp.r);
            const std::string rhs_main = ulln::format_double(ulln::main_bound_rhs(bp));
            std::cout << "{\"cq\": " << cq << ", \"n0\": " << n0 << ", \"exponent\": " << exponent
                      << ", \"condition\": " << (condition ? "true" : "false")
                      << ", \"rhs_main\": " << rhs_main << ", \"rhs_main2\": " << rhs2 << "}\n";
        } else if (*study_cmd) {
            ulln::StudyConfig config = ulln::study_config_from_file(study_config);
            if (const char* env_seed = std::getenv("ULLN_SEED"))
                config.master_seed = std::strtoull(env_seed, nullptr, 10);
            const ulln::StudyResult result = ulln::run_lln_study(config, study_workers);
            ulln::export_results(result, config, config.output_dir);
            std::cout << "study " << result.config_hash << " -> " << config.output_dir << '\n';
            for (const auto& fit : result.fits)
                std::cout << "q = " << ulln::format_double(fit.q)
                          << ": slope = " << ulln::format_double(fit.fit.slope)
                          << ", r^2 = " << ulln::format_double(fit.fit.r_squared) << '\n';
            for (const auto& soft : result.soft_checks)
                if (!soft.monotone_decay)
                    std::cout << "note: q = " << ulln::format_double(soft.q)
                              << " estimates are not monotone in N beyond 3-SE bands\n";
        } else if (*oracle_cmd) {
            const ulln::ProcessSpec spec = ulln::process_from_arg(oracle_spec);
            if (spec.kind != ulln::ProcessSpec::Kind::Latd)
                throw ulln::ValidationError("MalformedSpec", "oracle-mean needs a latd process");
            if (oracle_norm) {
                const double res = ulln::latd_normalization_residual(spec.intensity, oracle_t,
                                                                     oracle_kmax, oracle_tol);
                std::cout << "{\"residual\": " << ulln::format_double(res) << "}\n";
            } else {
                const ulln::SeriesResult series = ulln::latd_mean_series(
                    spec.intensity, oracle_s, oracle_t, oracle_kmax, oracle_tol);
                std::cout << "{\"value\": " << ulln::format_double(series.value)
                          << ", \"tail_bound\": " << ulln::format_double(series.tail_bound)
                          << "}\n";
            }
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ulln::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ulln::NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
