#include "bqmc/condsample.hpp"

#include <algorithm>
#include <cmath>

#include "bqmc/error.hpp"
#include "bqmc/normal.hpp"

namespace bqmc {

Z1Interval Z1Interval::make(double lo, double hi) {
    if (!(lo < hi)) return empty_at(std::isnan(lo) ? hi : lo);
    return {lo, hi, norm_interval_mass(lo, hi)};
}

Z1Interval Z1Interval::intersect(const Z1Interval& other) const {
    if (empty()) return *this;
    if (other.empty()) return other;
    return make(std::max(lo, other.lo), std::min(hi, other.hi));
}

void ConditionalPath::build(const HestonParams& p, const GridSpec& g, std::span<const double> first_column,
                            std::span<const double> z_rest_image) {
    const std::size_t m = g.steps;
    if (first_column.size() != 2 * m || z_rest_image.size() != 2 * m)
        throw DomainError("conditional path: vectors must have length 2m");
    offset_.resize(m);
    slope_.resize(m);
    variance_.resize(m + 1);
    const double sdt = std::sqrt(g.dt);
    const double rb = p.rho_bar();

    double v = p.v0;
    double a = std::log(p.s0);
    double d = 0.0;
    variance_[0] = v;
    for (std::size_t k = 0; k < m; ++k) {
        const double vp = truncated(v);
        const double sv = std::sqrt(vp) * sdt;
        const double z1 = z_rest_image[2 * k];
        a += (p.r - 0.5 * vp) * g.dt + sv * (p.rho * z1 + rb * z_rest_image[2 * k + 1]);
        d += sv * rb * first_column[2 * k + 1];
        offset_[k] = a;
        slope_[k] = d;
        v = v + (p.theta - v) * p.kappa * g.dt + p.sigma * sv * z1;
        variance_[k + 1] = v;
    }
}

double ConditionalPath::gamma(std::size_t k, double level) const {
    const double num = std::log(level) - offset_[k];
    const double den = slope_[k];
    if (den > 0.0) return num / den;
    // log S_{k+1} does not move with z1: the level is either never or always reached.
    return num > 0.0 ? kInf : -kInf;
}

void ConditionalPath::gammas(double level, std::span<double> out) const {
    for (std::size_t k = 0; k < offset_.size(); ++k) out[k] = gamma(k, level);
}

double ConditionalPath::min_gamma(double level) const {
    double g = kInf;
    for (std::size_t k = 0; k < offset_.size(); ++k) g = std::min(g, gamma(k, level));
    return g;
}

double ConditionalPath::max_gamma(double level) const {
    double g = -kInf;
    for (std::size_t k = 0; k < offset_.size(); ++k) g = std::max(g, gamma(k, level));
    return g;
}

double gamma_k(double level, std::size_t k, std::span<const double> variance, const TransformMatrix& q,
               std::span<const double> z_rest, const HestonParams& p, const GridSpec& g) {
    const std::size_t n = 2 * g.steps;
    if (k >= g.steps || variance.size() < k + 1 || z_rest.size() != n - 1 || q.size() != n)
        throw DomainError("gamma_k: inconsistent dimensions");
    const double sdt = std::sqrt(g.dt);
    const double rb = p.rho_bar();
    double num = std::log(level / p.s0) - p.r * static_cast<double>(k + 1) * g.dt;
    double den = 0.0;
    for (std::size_t l = 0; l <= k; ++l) {
        const double vp = truncated(variance[l]);
        num += g.dt * vp / 2.0;
        double mix = 0.0;
        for (std::size_t col = 1; col < n; ++col)
            mix += (p.rho * q(2 * l, col) + rb * q(2 * l + 1, col)) * z_rest[col - 1];
        num -= std::sqrt(vp) * sdt * mix;
        den += std::sqrt(vp) * q(2 * l + 1, 0);
    }
    den *= sdt * rb;
    if (den == 0.0) throw DegenerateError("gamma_k: zero denominator");
    return num / den;
}

Z1Interval barrier_interval(const BarrierSpec& spec, std::span<const double> gamma_level,
                            std::span<const double> gamma_lower) {
    auto lo_of = [](std::span<const double> g) { return *std::min_element(g.begin(), g.end()); };
    auto hi_of = [](std::span<const double> g) { return *std::max_element(g.begin(), g.end()); };
    if (spec.kind != BarrierKind::None && gamma_level.empty()) throw DomainError("barrier_interval: no gammas");
    if (spec.two_level() && gamma_lower.empty()) throw DomainError("barrier_interval: no lower-barrier gammas");
    switch (spec.kind) {
        case BarrierKind::None: return Z1Interval::whole();
        case BarrierKind::UpOut: return Z1Interval::make(-kInf, lo_of(gamma_level));
        case BarrierKind::DownOut: return Z1Interval::make(hi_of(gamma_level), kInf);
        case BarrierKind::UpIn: return Z1Interval::make(lo_of(gamma_level), kInf);
        case BarrierKind::DownIn: return Z1Interval::make(-kInf, hi_of(gamma_level));
        case BarrierKind::UpOutDownOut: return Z1Interval::make(hi_of(gamma_lower), lo_of(gamma_level));
        case BarrierKind::UpOutDownIn:
            return Z1Interval::make(-kInf, std::min(hi_of(gamma_lower), lo_of(gamma_level)));
    }
    return Z1Interval::whole();
}

Z1Interval payout_interval(PayoffKind kind, double gamma_at_strike) {
    switch (kind) {
        case PayoffKind::Call: return Z1Interval::make(gamma_at_strike, kInf);
        case PayoffKind::Put: return Z1Interval::make(-kInf, gamma_at_strike);
        case PayoffKind::AsianCall: break;
    }
    throw ConfigError("payout_interval: no closed form for " + to_string(kind) + "; use root finding");
}

Z1Interval root_find_z1(const std::function<double(double)>& payoff, const Z1Interval& interval, double tol,
                        int max_iterations) {
    if (interval.empty()) return interval;
    const double a0 = std::max(interval.lo, -kRootProbe);
    const double b0 = std::min(interval.hi, kRootProbe);
    if (!(a0 < b0)) return interval;  // entirely beyond the probe range: no measurable mass to refine
    const double fa0 = payoff(a0);
    const double fb0 = payoff(b0);
    if (fa0 > 0.0 && fb0 > 0.0) return interval;
    if (fa0 <= 0.0 && fb0 <= 0.0) return Z1Interval::empty_at(interval.lo);

    // Illinois (modified regula falsi) with a bisection step whenever the
    // bracket fails to halve; keeps f(neg) <= 0 < f(pos).
    const bool increasing = fb0 > 0.0;
    double neg = increasing ? a0 : b0, pos = increasing ? b0 : a0;
    double fneg = increasing ? fa0 : fb0, fpos = increasing ? fb0 : fa0;
    const double fmin = std::min(fa0, fb0), fmax = std::max(fa0, fb0);
    double gneg = fneg, gpos = fpos;  // Illinois-scaled copies
    int side = 0;
    double width = std::abs(pos - neg);
    double checkpoint = width;
    for (int it = 0; it < max_iterations && width > tol; ++it) {
        double x = pos - gpos * (pos - neg) / (gpos - gneg);
        const double lo = std::min(neg, pos), hi = std::max(neg, pos);
        bool bisect = !(x > lo && x < hi);
        if (it % 3 == 2) {
            bisect = bisect || width > 0.5 * checkpoint;
            checkpoint = width;
        }
        if (bisect) x = 0.5 * (neg + pos);
        const double fx = payoff(x);
        if (fx < fmin - 1e-12 * std::abs(fmin) || fx > fmax + 1e-12 * std::abs(fmax))
            throw NonMonotoneError("root_find_z1: payout leaves the range of its endpoint values");
        if (fx > 0.0) {
            pos = x;
            fpos = gpos = fx;
            if (side == 1) gneg *= 0.5;
            side = 1;
        } else {
            neg = x;
            fneg = gneg = fx;
            if (side == -1) gpos *= 0.5;
            side = -1;
        }
        width = std::abs(pos - neg);
    }
    if (width > tol) throw NonMonotoneError("root_find_z1: no convergence within the iteration limit");
    // Keep only the side where the payout is known to be positive.
    return increasing ? Z1Interval::make(pos, interval.hi) : Z1Interval::make(interval.lo, pos);
}

RescaledZ1 rescale_u1(double u1, const Z1Interval& interval) {
    if (interval.empty()) return {interval.lo, 0.0};
    if (!(u1 > 0.0 && u1 < 1.0)) throw DomainError("rescale_u1: u1 must lie in (0,1)");
    const double lo = interval.lo, hi = interval.hi;
    const double w = norm_interval_mass(lo, hi);
    double z;
    if (lo >= 0.0) {
        // Upper tail: work with complements to keep relative precision.
        const double target = norm_cdf(-lo) - u1 * w;
        z = (target > 0.0 && target < 1.0) ? -inv_norm_cdf(target) : lo;
    } else {
        const double target = norm_cdf(lo) + u1 * w;
        z = (target > 0.0 && target < 1.0) ? inv_norm_cdf(target) : (std::isfinite(hi) ? hi : lo);
    }
    if (!(z > lo)) z = std::nextafter(lo, kInf);
    if (!(z < hi)) z = std::nextafter(hi, -kInf);
    if (!(z > lo)) z = 0.5 * (lo + hi);  // interval narrower than two ulps
    return {z, w};
}

}  // namespace bqmc
