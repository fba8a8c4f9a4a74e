#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "bqmc/heston.hpp"
#include "bqmc/lt.hpp"
#include "bqmc/options.hpp"

namespace bqmc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Admissible region (lo, hi) for z1 and its standard normal mass.
struct Z1Interval {
    double lo = -kInf;
    double hi = kInf;
    double weight = 1.0;

    static Z1Interval make(double lo, double hi);  // normalizes empty intervals to lo == hi
    static Z1Interval whole() { return {}; }
    static Z1Interval empty_at(double x) { return {x, x, 0.0}; }

    bool empty() const { return !(lo < hi); }
    Z1Interval intersect(const Z1Interval& other) const;
};

/// Log-prices along a path as affine functions of z1 with z2..z2m held fixed:
///   log S_{k+1}(z1) = offset[k] + slope[k] * z1,   k = 0..m-1.
/// Valid for a constrained matrix, where the variance path does not depend on z1.
/// Built in O(m) from Z_rest = Q[:, 2:2m] z_{2:2m}.
class ConditionalPath {
public:
    void build(const HestonParams& p, const GridSpec& g, std::span<const double> first_column,
               std::span<const double> z_rest_image);

    std::size_t steps() const { return offset_.size(); }
    std::span<const double> offset() const { return offset_; }
    std::span<const double> slope() const { return slope_; }
    std::span<const double> variance() const { return variance_; }

    // Gamma_k(level): the z1 at which log S_{k+1} reaches log(level).
    double gamma(std::size_t k, double level) const;
    void gammas(double level, std::span<double> out) const;
    double min_gamma(double level) const;
    double max_gamma(double level) const;

    double log_spot(std::size_t k, double z1) const { return offset_[k] + slope_[k] * z1; }

private:
    std::vector<double> offset_;
    std::vector<double> slope_;
    std::vector<double> variance_;
};

/// Gamma_k evaluated straight from its closed form (O(k m)); reference for
/// ConditionalPath. `variance` is the untruncated variance path V_0..V_m,
/// `z_rest` holds z_2..z_2m. Throws DegenerateError on a zero denominator.
double gamma_k(double level, std::size_t k, std::span<const double> variance, const TransformMatrix& q,
               std::span<const double> z_rest, const HestonParams& p, const GridSpec& g);

/// Barrier constraint on z1 for all-positive Z2-weights in the first column.
/// `gamma_level` holds Gamma_k(level) for every k; `gamma_lower` those for the
/// lower barrier B2 of the combined kinds (ignored otherwise).
Z1Interval barrier_interval(const BarrierSpec& spec, std::span<const double> gamma_level,
                            std::span<const double> gamma_lower = {});

/// Positive-payout constraint for calls (z1 > Gamma) and puts (z1 < Gamma),
/// given Gamma at the strike for the final step. Throws ConfigError for
/// payoffs without a closed form.
Z1Interval payout_interval(PayoffKind kind, double gamma_at_strike);

/// Sub-interval of `interval` on which a payout that is monotone in z1 is
/// strictly positive, bracketed to width `tol`. Infinite ends are probed at
/// +-kRootProbe, beyond which the normal mass is below double precision.
inline constexpr double kRootProbe = 40.0;
Z1Interval root_find_z1(const std::function<double(double)>& payoff, const Z1Interval& interval,
                        double tol = 1e-10, int max_iterations = 200);

struct RescaledZ1 {
    double z1 = 0.0;
    double weight = 0.0;
};

/// Maps u1 in (0,1) onto the conditional normal distribution on `interval`:
/// z1 = Phi^{-1}(Phi(lo) + u1 (Phi(hi) - Phi(lo))), strictly inside (lo, hi).
/// An empty interval returns weight 0 (z1 = lo).
RescaledZ1 rescale_u1(double u1, const Z1Interval& interval);

}  // namespace bqmc
