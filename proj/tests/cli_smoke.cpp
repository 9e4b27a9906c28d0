// End-to-end checks of the CLI surface: every subcommand, the documented
// exit codes (0 success, 2 validation, 3 numeric contract), and the
// ULLN_SEED override. argv[1] is the path to the ulln binary.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "ulln/bounds.hpp"
#include "ulln/domain.hpp"
#include "ulln/rng.hpp"
#include "ulln/simulate.hpp"
#include "ulln/study.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        std::cerr << "FAIL: " << what << '\n';
        ++g_failures;
    }
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1)
        return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_smoke <path-to-ulln>\n";
        return 1;
    }
    const std::string cli = std::string("\"") + argv[1] + "\"";
    const fs::path dir = fs::temp_directory_path() / "ulln_cli_smoke";
    fs::remove_all(dir);
    fs::create_directories(dir);

    // gates -> JSON file with the hand-checked K
    const auto gates_file = dir / "gates.json";
    expect(run(cli + " gates --mean '{\"kind\":\"poisson\",\"lambda\":1,\"T\":1}' --n 2 --out \""
               + gates_file.string() + "\"")
               == 0,
           "gates exits 0");
    {
        const auto j = nlohmann::json::parse(slurp(gates_file), nullptr, false);
        expect(!j.is_discarded() && j.at("n") == 2 && j.at("K") == 3, "gates JSON has n=2, K=3");
    }

    // simulate -> batch file, then deviation on it (exact and grid)
    const auto batch_file = dir / "batch.jsonl";
    expect(run(cli + " simulate --spec '{\"kind\":\"poisson\",\"lambda\":2,\"T\":1}' --N 5"
               + " --seed 77 --out \"" + batch_file.string() + "\"")
               == 0,
           "simulate exits 0");
    {
        const auto loaded = ulln::read_batch(batch_file.string());
        const auto expected = ulln::sample_batch(ulln::poisson_process(2.0, 1.0), 5, 77);
        expect(ulln::batch_to_string(loaded) == ulln::batch_to_string(expected),
               "simulate output matches the library sampler byte for byte");
    }
    const auto dev_out = dir / "dev.json";
    expect(run(cli + " deviation --batch \"" + batch_file.string()
               + "\" --mean '{\"kind\":\"poisson\",\"lambda\":2,\"T\":1}' > \""
               + dev_out.string() + "\"")
               == 0,
           "deviation exits 0");
    {
        const auto j = nlohmann::json::parse(slurp(dev_out), nullptr, false);
        expect(!j.is_discarded() && j.at("method") == "exact" && j.at("value").get<double>() >= 0,
               "deviation emits an exact DeviationResult");
    }
    expect(run(cli + " deviation --batch \"" + batch_file.string()
               + "\" --mean '{\"kind\":\"zero\",\"T\":1}' --grid 50 > \"" + dev_out.string()
               + "\"")
               == 0,
           "grid deviation exits 0");
    {
        const auto j = nlohmann::json::parse(slurp(dev_out), nullptr, false);
        expect(!j.is_discarded() && j.at("method") == "grid", "deviation honors --grid");
    }

    // bounds report
    const auto bounds_out = dir / "bounds.json";
    expect(run(cli + " bounds --q 4 --r 1 --T 1 --M 1 --wbar 1 --N 16 > \""
               + bounds_out.string() + "\"")
               == 0,
           "bounds exits 0");
    {
        const auto j = nlohmann::json::parse(slurp(bounds_out), nullptr, false);
        expect(!j.is_discarded() && j.at("n0") == 8 && j.at("condition") == true
                   && std::abs(j.at("cq").get<double>() - std::pow(1005696.0, 0.25)) < 1e-9,
               "bounds report fields");
    }

    // oracle-mean value and normalization residual
    const auto oracle_out = dir / "oracle.json";
    expect(run(cli + " oracle-mean --spec '{\"kind\":\"latd\",\"w\":\"constant\",\"a\":1,\"T\":1}'"
               + " --s 0 --t 1 --kmax 20 > \"" + oracle_out.string() + "\"")
               == 0,
           "oracle-mean exits 0");
    {
        const auto j = nlohmann::json::parse(slurp(oracle_out), nullptr, false);
        expect(!j.is_discarded() && std::abs(j.at("value").get<double>() - 1.0) < 1e-8,
               "oracle-mean telescopes for w == 1");
    }
    expect(run(cli + " oracle-mean --spec '{\"kind\":\"latd\",\"w\":\"constant\",\"a\":1,\"T\":1}'"
               + " --t 1 --normalization > \"" + oracle_out.string() + "\"")
               == 0,
           "oracle-mean --normalization exits 0");
    {
        const auto j = nlohmann::json::parse(slurp(oracle_out), nullptr, false);
        expect(!j.is_discarded() && j.at("residual").get<double>() <= 1e-8,
               "normalization residual is reported small");
    }

    // exit code 2: validation failures
    expect(run(cli + " bounds --q 1 --r 1 --T 1 --M 1 --wbar 1 --N 16 2> /dev/null") == 2,
           "q <= 2 is a validation error (exit 2)");
    expect(run(cli + " gates --mean '{\"kind\":\"nope\"}' --n 2 2> /dev/null") == 2,
           "malformed mean spec is a validation error (exit 2)");
    expect(run(cli + " deviation --batch /nonexistent --mean '{\"kind\":\"zero\",\"T\":1}'"
               " 2> /dev/null")
               == 2,
           "missing batch file is a validation error (exit 2)");

    // exit code 3: numeric-contract failures
    expect(run(cli + " bounds --q 4 --r 1 --T 1 --M 1 --wbar 1 --N 7 2> /dev/null") == 3,
           "N below N0 is a numeric-contract failure (exit 3)");
    expect(run(cli + " oracle-mean --spec '{\"kind\":\"latd\",\"w\":\"constant\",\"a\":30,\"T\":1}'"
               + " --s 0 --t 1 --kmax 3 2> /dev/null")
               == 3,
           "unconverged series tail is a numeric-contract failure (exit 3)");

    // ULLN_SEED overrides the config seed
    const auto cfg = dir / "study.json";
    const auto out_env = dir / "env_run";
    const auto out_plain = dir / "plain_run";
    {
        std::ofstream out(cfg);
        out << "{\"process\": {\"kind\": \"poisson\", \"lambda\": 1.0, \"T\": 1.0},\n"
            << " \"mean\": \"auto\", \"q_list\": [4], \"n_grid\": [8, 16],\n"
            << " \"replications\": 4, \"master_seed\": 1,\n"
            << " \"output_dir\": \"" << out_env.string() << "\"}\n";
    }
    expect(run("ULLN_SEED=555 " + cli + " study --config \"" + cfg.string()
               + "\" > /dev/null")
               == 0,
           "study with ULLN_SEED exits 0");
    {
        std::ofstream out(cfg);
        out << "{\"process\": {\"kind\": \"poisson\", \"lambda\": 1.0, \"T\": 1.0},\n"
            << " \"mean\": \"auto\", \"q_list\": [4], \"n_grid\": [8, 16],\n"
            << " \"replications\": 4, \"master_seed\": 555,\n"
            << " \"output_dir\": \"" << out_plain.string() << "\"}\n";
    }
    expect(run(cli + " study --config \"" + cfg.string() + "\" > /dev/null") == 0,
           "study with the seed inline exits 0");
    expect(slurp(out_env / "raw.csv") == slurp(out_plain / "raw.csv")
               && !slurp(out_env / "raw.csv").empty(),
           "ULLN_SEED=555 matches master_seed=555 byte for byte");

    fs::remove_all(dir);
    if (g_failures == 0)
        std::cout << "cli smoke: all checks passed\n";
    return g_failures;
}
