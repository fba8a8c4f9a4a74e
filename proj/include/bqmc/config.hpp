#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "bqmc/pricing.hpp"

namespace bqmc {

// One line of a [grid] block: the listed keys take their values jointly,
// tuple by tuple; several lines cross-multiply.
struct GridAxis {
    std::vector<std::string> keys;
    std::vector<std::vector<std::string>> tuples;
};

/// One experiment, read from flat `dotted.key = value` text:
///
///   tag = UOC1
///   model.s0 = 110
///   barrier.kind = up_out
///   methods = mc, qmc_lt, qmc_lt_cs, qmc_lt_cs_rf
///   [grid]
///   model.v0, model.theta, model.sigma = 0.2 0.2 0.2 | 0.3 0.3 0.3
///
/// '#' starts a comment. See known_keys() for the full key set.
struct ExperimentConfig {
    std::string tag = "experiment";
    HestonParams model;
    std::size_t steps = 250;
    PayoffSpec payoff;
    BarrierSpec barrier;
    std::vector<Method> methods{Method::MC, Method::QMC_LT, Method::QMC_LT_CS, Method::QMC_LT_CS_RF};
    PointKind point_kind = PointKind::Sobol;
    std::size_t points = 1024;  // per shift; MC uses the same count per batch
    std::size_t shifts = 30;
    std::string direction_file;  // empty: bundled table
    std::string lattice_file;
    bool rootfind = false;  // adds QMC_LT_CS_RF next to QMC_LT_CS
    std::uint64_t seed = 20240601;
    std::filesystem::path output_dir = ".";
    bool has_grid = false;
    std::vector<GridAxis> grid;

    // Sets one scalar key; throws ConfigError naming the field.
    void set(const std::string& key, const std::string& value);
    std::string get(const std::string& key) const;
    static const std::vector<std::string>& known_keys();

    GridSpec time_grid() const { return GridSpec::uniform(model.maturity, steps); }
    PricingProblem problem() const;
    std::vector<Method> effective_methods() const;
    PointSetSpec qmc_points() const;
    PointSetSpec mc_points() const;
    PointSet make_qmc_points() const;
    PointSet make_mc_points() const;

    void validate() const;

    // The grid's cross product as standalone configs (without grid). A config
    // without a [grid] block yields itself; an empty [grid] block yields none.
    std::vector<ExperimentConfig> expand() const;
};

ExperimentConfig parse_config(std::string_view text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize(const ExperimentConfig& config);

}  // namespace bqmc
