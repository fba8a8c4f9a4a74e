#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "bqmc/heston.hpp"
#include "bqmc/options.hpp"

namespace bqmc {

enum class LtScheme { LogLT, PlainLT };

enum class SignConvention { FirstColumnPositiveEven, LargestEntryPositive };

/// Orthogonal 2m x 2m path-construction matrix, stored row-major. Row 2k
/// (0-based) drives Z1_{k+1}, row 2k+1 drives Z2_{k+1}.
class TransformMatrix {
public:
    TransformMatrix() = default;
    TransformMatrix(std::size_t n, std::vector<double> row_major, bool constrained);

    static TransformMatrix identity(std::size_t n);

    std::size_t size() const { return n_; }
    double operator()(std::size_t row, std::size_t col) const { return q_[row * n_ + col]; }
    std::span<const double> data() const { return q_; }
    std::vector<double> column(std::size_t col) const;

    bool constrained() const { return constrained_; }
    SignConvention first_column_convention() const { return SignConvention::FirstColumnPositiveEven; }
    SignConvention later_column_convention() const { return SignConvention::LargestEntryPositive; }

    // Columns whose optimal direction vanished and were replaced by an
    // arbitrary unit vector of the orthogonal complement.
    const std::vector<std::size_t>& fallback_columns() const { return fallback_columns_; }
    void set_fallback_columns(std::vector<std::size_t> cols) { fallback_columns_ = std::move(cols); }

    // max |Q^T Q - I|
    double orthogonality_error() const;

    // Z = Q z.
    void apply(std::span<const double> z, std::span<double> out) const;

    // Row-major CSV with 17 significant digits.
    void write_csv(const std::filesystem::path& path) const;

private:
    std::size_t n_ = 0;
    std::vector<double> q_;
    bool constrained_ = false;
    std::vector<std::size_t> fallback_columns_;
};

/// Coefficients of the q_l in the unrolled recursion
///   F_{k+1} = a_k F_k + b_k q_k,   G_{k+1} = c_k G_k + d_k q_k + e_k F_k,
/// with F_0 = G_0 = 0, for the weighted combination sum_j w_j F_j and
/// sum_j w_j G_j over j = 1..K. `tail[l]` is sum_j w_j prod_{i=l+1}^{j-1} c_i,
/// the multiplier of any extra d'_l q'_l term entering G. All vectors have
/// length K; weights default to the single final index (w_K = 1).
struct RecursionExpansion {
    std::vector<double> f_coef;
    std::vector<double> g_coef;
    std::vector<double> tail;
};

RecursionExpansion expand_recursion(std::span<const double> a, std::span<const double> b,
                                    std::span<const double> c, std::span<const double> d,
                                    std::span<const double> e, std::span<const double> weights = {});

/// Gradient of the linearized payoff (terminal price, or arithmetic average
/// for Asian payoffs) with respect to the interleaved Z, for a path produced
/// by simulate_log. O(m).
std::vector<double> log_lt_direction(const HestonParams& p, const GridSpec& g, PayoffKind kind,
                                     const PathState& path);

/// As log_lt_direction, for paths produced by simulate_plain.
std::vector<double> plain_lt_direction(const HestonParams& p, const GridSpec& g, PayoffKind kind,
                                       const PathState& path);

/// Column-by-column LT construction with expansion points (1,...,1,0,...,0).
/// With constrained = true (LogLT only) the first column has zero entries in
/// every Z1 row.
TransformMatrix build_matrix(const HestonParams& p, const GridSpec& g, PayoffKind kind, LtScheme scheme,
                             bool constrained);

}  // namespace bqmc
