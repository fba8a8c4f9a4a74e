#include "bqmc/heston.hpp"

#include <cmath>
#include <limits>

#include "bqmc/error.hpp"

namespace bqmc {

void HestonParams::validate() const {
    auto positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string("model.") + name + " must be positive");
    };
    positive(s0, "s0");
    positive(v0, "v0");
    positive(kappa, "kappa");
    positive(theta, "theta");
    positive(sigma, "sigma");
    positive(maturity, "t");
    if (!std::isfinite(r)) throw ConfigError("model.r must be finite");
    if (!(std::abs(rho) < 1.0)) throw ConfigError("model.rho must lie in (-1, 1)");
}

double HestonParams::rho_bar() const { return std::sqrt(1.0 - rho * rho); }

GridSpec GridSpec::uniform(double maturity, std::size_t steps) {
    if (steps < 1) throw ConfigError("time grid needs at least one step");
    if (!(maturity > 0.0)) throw ConfigError("maturity must be positive");
    return GridSpec{steps, maturity / static_cast<double>(steps)};
}

namespace {

void check_input(const GridSpec& g, std::span<const double> z) {
    if (z.size() != 2 * g.steps)
        throw DomainError("driving vector has length " + std::to_string(z.size()) + ", expected " +
                          std::to_string(2 * g.steps));
}

void resize(PathState& out, std::size_t m, std::span<const double> z) {
    out.log_spot.resize(m + 1);
    out.spot.resize(m + 1);
    out.variance.resize(m + 1);
    out.z.assign(z.begin(), z.end());
    out.negative_price = false;
}

}  // namespace

void simulate_variance(const HestonParams& p, const GridSpec& g, std::span<const double> z,
                       std::span<double> variance) {
    const double sdt = std::sqrt(g.dt);
    double v = p.v0;
    variance[0] = v;
    for (std::size_t k = 0; k < g.steps; ++k) {
        v = v + (p.theta - v) * p.kappa * g.dt + p.sigma * std::sqrt(truncated(v)) * sdt * z[2 * k];
        variance[k + 1] = v;
    }
}

void simulate_log(const HestonParams& p, const GridSpec& g, std::span<const double> z, PathState& out) {
    check_input(g, z);
    const std::size_t m = g.steps;
    resize(out, m, z);
    const double sdt = std::sqrt(g.dt);
    const double rb = p.rho_bar();

    double x = std::log(p.s0);
    double v = p.v0;
    out.log_spot[0] = x;
    out.spot[0] = p.s0;
    out.variance[0] = v;
    for (std::size_t k = 0; k < m; ++k) {
        const double vp = truncated(v);
        const double sv = std::sqrt(vp) * sdt;
        const double z1 = z[2 * k];
        const double z2 = z[2 * k + 1];
        x = x + (p.r - 0.5 * vp) * g.dt + sv * (p.rho * z1 + rb * z2);
        v = v + (p.theta - v) * p.kappa * g.dt + p.sigma * sv * z1;
        out.log_spot[k + 1] = x;
        out.spot[k + 1] = std::exp(x);
        out.variance[k + 1] = v;
    }
}

PathState simulate_log(const HestonParams& p, const GridSpec& g, std::span<const double> z) {
    PathState out;
    simulate_log(p, g, z, out);
    return out;
}

void simulate_plain(const HestonParams& p, const GridSpec& g, std::span<const double> z, PathState& out) {
    check_input(g, z);
    const std::size_t m = g.steps;
    resize(out, m, z);
    const double sdt = std::sqrt(g.dt);
    const double rb = p.rho_bar();

    double s = p.s0;
    double v = p.v0;
    out.spot[0] = s;
    out.log_spot[0] = std::log(s);
    out.variance[0] = v;
    for (std::size_t k = 0; k < m; ++k) {
        const double sv = std::sqrt(truncated(v)) * sdt;
        const double z1 = z[2 * k];
        const double z2 = z[2 * k + 1];
        s = s * (1.0 + p.r * g.dt + sv * (p.rho * z1 + rb * z2));
        v = v + (p.theta - v) * p.kappa * g.dt + p.sigma * sv * z1;
        out.spot[k + 1] = s;
        if (s > 0.0) {
            out.log_spot[k + 1] = std::log(s);
        } else {
            out.log_spot[k + 1] = std::numeric_limits<double>::quiet_NaN();
            out.negative_price = true;
        }
        out.variance[k + 1] = v;
    }
}

PathState simulate_plain(const HestonParams& p, const GridSpec& g, std::span<const double> z) {
    PathState out;
    simulate_plain(p, g, z, out);
    return out;
}

}  // namespace bqmc
