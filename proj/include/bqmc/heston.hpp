#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bqmc {

struct HestonParams {
    double s0 = 100.0;
    double v0 = 0.04;
    double r = 0.0;
    double kappa = 1.0;
    double theta = 0.04;
    double sigma = 0.2;
    double rho = 0.0;
    double maturity = 1.0;

    // Throws ConfigError on a violated hard invariant.
    void validate() const;
    bool feller() const { return 2.0 * kappa * theta >= sigma * sigma; }
    double rho_bar() const;
};

struct GridSpec {
    std::size_t steps = 1;
    double dt = 1.0;

    static GridSpec uniform(double maturity, std::size_t steps);
};

// Discretized path. z is the driving vector (Z1_1, Z2_1, Z1_2, Z2_2, ...).
// spot[k] is the simulated price; log_spot[k] its logarithm (NaN where a
// plain-Euler price went non-positive, see negative_price).
struct PathState {
    std::vector<double> log_spot;
    std::vector<double> spot;
    std::vector<double> variance;
    std::vector<double> z;
    bool negative_price = false;
};

inline double truncated(double v) { return v > 0.0 ? v : 0.0; }

/// Log-price Euler scheme with full truncation: max(V,0) replaces V under every
/// square root and in the -V/2 drift; the variance recursion itself keeps the
/// untruncated value in its mean-reversion drift.
PathState simulate_log(const HestonParams& p, const GridSpec& g, std::span<const double> z);
void simulate_log(const HestonParams& p, const GridSpec& g, std::span<const double> z, PathState& out);

/// Plain-price Euler scheme. Non-positive prices are kept and flagged.
PathState simulate_plain(const HestonParams& p, const GridSpec& g, std::span<const double> z);
void simulate_plain(const HestonParams& p, const GridSpec& g, std::span<const double> z, PathState& out);

// Variance recursion alone, driven by the Z1 entries of an interleaved z.
// Writes steps+1 values.
void simulate_variance(const HestonParams& p, const GridSpec& g, std::span<const double> z,
                       std::span<double> variance);

}  // namespace bqmc
