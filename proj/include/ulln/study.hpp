#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ulln/bounds.hpp"
#include "ulln/deviation.hpp"
#include "ulln/simulate.hpp"

namespace ulln {

// Declarative Monte Carlo experiment: estimate E[sup^q deviation] over an
// N-grid and compare against the theoretical bound.
struct StudyConfig {
    ProcessSpec process;
    MeanModel mean;                     // resolved (closed form or tabulated series)
    std::vector<double> q_list;
    std::vector<std::int64_t> n_grid;   // sorted ascending, deduplicated
    int replications = 200;
    std::uint64_t master_seed = 0;
    std::string output_dir = "out";
    double holder_r = 1.0;              // r used for the bound rows
    std::optional<double> moment_scale; // M override
    std::optional<double> wbar;         // wbar override
    bool emit_svg = false;
};

// M and wbar for the bound, derived for the built-in processes at integer q
// (Poisson moments via Stirling numbers, LATD via the factorial-moment
// bound), with w scaled so hypothesis (ii) holds with equality at the given
// r <= 1. Explicit overrides win.
struct HypothesisData {
    double M = 1.0;
    double wbar = 0.0;
};
HypothesisData derive_hypothesis(const ProcessSpec& process, double q, double r, double horizon,
                                 std::optional<double> m_override,
                                 std::optional<double> wbar_override);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Ordinary least squares of log(estimate) on log(N); r_squared is the
// squared correlation (1 for a constant sequence, which fits exactly).
LineFit fit_rate(const std::vector<std::pair<double, double>>& points);

struct RawRow {
    double q = 0.0;
    std::int64_t n = 0;
    int replication = 0;
    double sup_dev = 0.0;
};

struct StudyRow {
    double q = 0.0;
    std::int64_t n = 0;
    double mean_supq = 0.0;
    double std_err = 0.0;
    bool has_bound = false;
    double bound_rhs = 0.0;
    std::int64_t n0 = -1;
    double exponent = 0.0;
};

struct FitRow {
    double q = 0.0;
    LineFit fit;
};

struct HypothesisRow {
    double q = 0.0;
    double M = 0.0;
    double wbar = 0.0;
};

// Soft diagnostic, reported but never asserted: estimates non-increasing in
// N up to 3-SE noise bands.
struct SoftCheckRow {
    double q = 0.0;
    bool monotone_decay = true;
};

struct StudyResult {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<HypothesisRow> hypothesis;
    std::vector<RawRow> raw;    // sorted by (q, N, replication)
    std::vector<StudyRow> rows; // sorted by (q, N)
    std::vector<FitRow> fits;   // one per q with >= 3 positive estimates
    std::vector<SoftCheckRow> soft_checks;
};

std::string study_config_hash(const StudyConfig& config);

// Runs the study: replication j of size N uses the batch seed
// substream_id(master_seed, N, j), so the result is a pure function of the
// config for any worker count. Completed N values are flushed to
// output_dir (raw.csv + state.json) and are reloaded on a rerun with the
// same config hash, making long studies resumable.
StudyResult run_lln_study(const StudyConfig& config, int workers = 1);

// raw.csv, summary.csv, study.json and (optionally) plot.svg.
void export_results(const StudyResult& result, const StudyConfig& config, const std::string& dir);

std::string raw_csv(const StudyResult& result);
std::string summary_csv(const StudyResult& result);
std::string study_json(const StudyResult& result);

} // namespace ulln
