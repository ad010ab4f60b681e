#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lnt/exponent.hpp"
#include "lnt/report.hpp"
#include "lnt/shooting.hpp"
#include "lnt/singular.hpp"
#include "lnt/spectral.hpp"

namespace lnt {

enum class Command { Singular, Shoot, Branch, FindExponent, Continuity, Morse, Hardy, VerifyAll };

std::string to_string(Command c);
Command command_from_string(const std::string& s);

enum class OutputFormat { Csv, Json };

struct SweepSpec {
    std::vector<int> Ns;
    std::vector<double> ps;
    std::vector<double> gammas;
    std::vector<std::size_t> is;
};

struct RunConfig {
    Command command = Command::Singular;
    ProblemParams params{5, 20.0, std::nullopt};
    Tolerances tol{1e-11, 1e-11};

    // singular / shoot
    double r_end = 5.0;
    bool check_bounds = false;
    double gamma = 10.0;
    // branch
    std::size_t i = 1;
    std::vector<double> gamma_list{5.0, 10.0, 20.0, 40.0};
    PRange p_bracket{4.0, 40.0};
    // find-exponent
    double p_lo = 6.0;
    double p_cap = 1e4;
    // continuity
    std::vector<double> p_grid;                  // coarse grid
    std::optional<std::vector<double>> p_grid_fine;
    // morse
    std::vector<double> deltas{1e-2, 1e-3, 1e-4};
    std::vector<std::size_t> grids{1u << 18, 1u << 19};
    GridKind grid_kind = GridKind::Uniform;
    // hardy
    double eps0 = 0.35;
    int j_max = 5;

    std::optional<OutputFormat> emit;
    OutputFormat format = OutputFormat::Json;
    bool full = false;
    std::filesystem::path out_dir = "lnt-out";
    unsigned jobs = 0;  // 0 = hardware concurrency
    std::optional<SweepSpec> sweep;
};

/// Throws DomainError for configurations that must not execute.
void validate(const RunConfig& config);

/// Canonical JSON of every field that influences numerical output.
json config_json(const RunConfig& config);
/// 16 hex digits of FNV-1a over config_json(config).dump().
std::string config_hash(const RunConfig& config);
std::filesystem::path run_directory(const RunConfig& config);

/// Executes one command. Module errors become FAIL checks; the bundle and any
/// trajectories are written below run_directory(config).
ReportBundle run(const RunConfig& config);

/// Runs config.command at every point of config.sweep with at most `jobs`
/// concurrent workers. Points already recorded in a persisted bundle of the
/// same configuration are reused. Trend checks over incomplete grids are INFO.
ReportBundle sweep(const RunConfig& config);

/// One line per check: "PASS name [anchor] message".
std::string summary(const ReportBundle& bundle);

}  // namespace lnt
