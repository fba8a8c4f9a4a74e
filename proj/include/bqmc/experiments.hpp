#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bqmc/config.hpp"

namespace bqmc {

// One CSV line of a results table.
struct TableRow {
    HestonParams model;
    double strike = 0.0;
    BarrierSpec barrier;
    EstimatorResult result;
    double ratio = 0.0;  // MC std / method std
    std::uint64_t seed = 0;
};

inline constexpr const char* kTableHeader =
    "v0,theta,sigma,rho,s0,k_strike,b1,b2,method,ratio_pct,price,std_err,n,shifts,seed";

/// Runs every method of one (grid-free) config. MC is always run, as the
/// baseline of the variance ratios, and is reported only when requested.
std::vector<TableRow> run_experiment(const ExperimentConfig& config, int threads = 1);

/// Every grid tuple of `config`, in grid order.
std::vector<TableRow> run_table(const ExperimentConfig& config, int threads = 1);

void write_table(std::ostream& out, std::span<const TableRow> rows);
std::string format_table_row(const TableRow& row);

/// Per-method std_of_means over prefixes of one long run (largest n in n_list).
std::map<Method, std::vector<ConvergencePoint>> run_convergence(const ExperimentConfig& config,
                                                                std::span<const std::size_t> n_list,
                                                                int threads = 1);

// Writes <dir>/<tag>_CONV_<MC|LT|CS|RF>.txt, two whitespace-separated columns
// "N std". Returns the paths written.
std::vector<std::filesystem::path> write_convergence(const std::filesystem::path& dir, const std::string& tag,
                                                     const std::map<Method, std::vector<ConvergencePoint>>& data);

/// Powers of two from `lo` to `hi` inclusive, from "64..8192" or a comma list.
std::vector<std::size_t> parse_n_list(const std::string& text);

std::string config_hash(const ExperimentConfig& config);  // FNV-1a over the serialized form

/// Writes <path> as JSON: command, config hash and text, seed, library
/// version, active SIMD kernel and the output files.
void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const ExperimentConfig& config, std::span<const std::filesystem::path> outputs);

const char* library_version();

}  // namespace bqmc
