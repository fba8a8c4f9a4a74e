#include "bqmc/lt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "bqmc/error.hpp"

namespace bqmc {

TransformMatrix::TransformMatrix(std::size_t n, std::vector<double> row_major, bool constrained)
    : n_(n), q_(std::move(row_major)), constrained_(constrained) {
    if (q_.size() != n_ * n_) throw ConfigError("transform matrix storage does not match its size");
}

TransformMatrix TransformMatrix::identity(std::size_t n) {
    std::vector<double> q(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) q[i * n + i] = 1.0;
    return TransformMatrix(n, std::move(q), false);
}

std::vector<double> TransformMatrix::column(std::size_t col) const {
    std::vector<double> c(n_);
    for (std::size_t i = 0; i < n_; ++i) c[i] = q_[i * n_ + col];
    return c;
}

double TransformMatrix::orthogonality_error() const {
    double worst = 0.0;
    for (std::size_t a = 0; a < n_; ++a) {
        for (std::size_t b = a; b < n_; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n_; ++i) s += q_[i * n_ + a] * q_[i * n_ + b];
            worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
        }
    }
    return worst;
}

void TransformMatrix::apply(std::span<const double> z, std::span<double> out) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const double* row = q_.data() + i * n_;
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += row[j] * z[j];
        out[i] = s;
    }
}

void TransformMatrix::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << std::setprecision(17);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            if (j) out << ',';
            out << q_[i * n_ + j];
        }
        out << '\n';
    }
}

RecursionExpansion expand_recursion(std::span<const double> a, std::span<const double> b,
                                    std::span<const double> c, std::span<const double> d,
                                    std::span<const double> e, std::span<const double> weights) {
    const std::size_t K = a.size();
    if (b.size() != K || c.size() != K || d.size() != K || e.size() != K)
        throw DomainError("expand_recursion: coefficient vectors must have equal length");
    if (!weights.empty() && weights.size() != K) throw DomainError("expand_recursion: weight vector length");
    RecursionExpansion out;
    if (K == 0) return out;
    out.f_coef.resize(K);
    out.g_coef.resize(K);
    out.tail.resize(K);

    auto w = [&](std::size_t idx) { return weights.empty() ? (idx + 1 == K ? 1.0 : 0.0) : weights[idx]; };
    double cw = w(K - 1);  // tail C_l
    double aw = w(K - 1);  // weighted product of a's
    double h = 0.0;        // sum_t e_t C_t prod a
    for (std::size_t l = K; l-- > 0;) {
        if (l + 1 < K) {
            h = e[l + 1] * cw + a[l + 1] * h;
            cw = w(l) + c[l + 1] * cw;
            aw = w(l) + a[l + 1] * aw;
        }
        out.tail[l] = cw;
        out.f_coef[l] = b[l] * aw;
        out.g_coef[l] = d[l] * cw + b[l] * h;
    }
    return out;
}

namespace {

// Payoff weights on S_1..S_m of the linearized payoff; puts share the call's
// direction up to sign.
std::vector<double> payoff_weights(PayoffKind kind, std::size_t m) {
    std::vector<double> w(m, 0.0);
    if (kind == PayoffKind::AsianCall) {
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(m));
    } else {
        w[m - 1] = 1.0;
    }
    return w;
}

void check_path(const GridSpec& g, const PathState& path) {
    const std::size_t m = g.steps;
    if (path.variance.size() != m + 1 || path.spot.size() != m + 1 || path.z.size() != 2 * m)
        throw DomainError("path does not match the time grid");
}

}  // namespace

std::vector<double> log_lt_direction(const HestonParams& p, const GridSpec& g, PayoffKind kind,
                                     const PathState& path) {
    check_path(g, path);
    const std::size_t m = g.steps;
    const double sdt = std::sqrt(g.dt);
    const double rb = p.rho_bar();

    // a = f3, b = f4 drive dV; c = 1, d = rho f2, e = f1 drive d log S.
    std::vector<double> a(m), b(m), c(m, 1.0), d(m), e(m), f2(m);
    for (std::size_t l = 0; l < m; ++l) {
        const double v = path.variance[l];
        const double z1 = path.z[2 * l];
        const double xi = p.rho * z1 + rb * path.z[2 * l + 1];
        const double sv = std::sqrt(truncated(v));
        f2[l] = sv * sdt;
        b[l] = p.sigma * sv * sdt;
        d[l] = p.rho * f2[l];
        // Derivatives of sqrt(max(V,0)) vanish where the variance is truncated.
        if (v > 0.0) {
            e[l] = sdt / (2.0 * sv) * xi - 0.5 * g.dt;
            a[l] = 1.0 - p.kappa * g.dt + p.sigma * sdt / (2.0 * sv) * z1;
        } else {
            e[l] = 0.0;
            a[l] = 1.0 - p.kappa * g.dt;
        }
    }
    // dS_j = S_j d log S_j, so the weights on the log-price recursion carry S_j.
    auto w = payoff_weights(kind, m);
    for (std::size_t j = 0; j < m; ++j) w[j] *= path.spot[j + 1];

    const auto ex = expand_recursion(a, b, c, d, e, w);
    std::vector<double> v(2 * m);
    for (std::size_t l = 0; l < m; ++l) {
        v[2 * l] = ex.g_coef[l];
        v[2 * l + 1] = rb * f2[l] * ex.tail[l];
    }
    return v;
}

std::vector<double> plain_lt_direction(const HestonParams& p, const GridSpec& g, PayoffKind kind,
                                       const PathState& path) {
    check_path(g, path);
    const std::size_t m = g.steps;
    const double sdt = std::sqrt(g.dt);
    const double rb = p.rho_bar();

    // a = f4, b = f5 drive dV; c = f1, d = rho f3, e = f2 drive dS.
    std::vector<double> a(m), b(m), c(m), d(m), e(m), f3(m);
    for (std::size_t l = 0; l < m; ++l) {
        const double v = path.variance[l];
        const double s = path.spot[l];
        const double z1 = path.z[2 * l];
        const double xi = p.rho * z1 + rb * path.z[2 * l + 1];
        const double sv = std::sqrt(truncated(v));
        c[l] = 1.0 + p.r * g.dt + sv * sdt * xi;
        f3[l] = s * sv * sdt;
        d[l] = p.rho * f3[l];
        b[l] = p.sigma * sv * sdt;
        if (v > 0.0) {
            e[l] = s * sdt / (2.0 * sv) * xi;
            a[l] = 1.0 - p.kappa * g.dt + p.sigma * sdt / (2.0 * sv) * z1;
        } else {
            e[l] = 0.0;
            a[l] = 1.0 - p.kappa * g.dt;
        }
    }
    const auto ex = expand_recursion(a, b, c, d, e, payoff_weights(kind, m));
    std::vector<double> v(2 * m);
    for (std::size_t l = 0; l < m; ++l) {
        v[2 * l] = ex.g_coef[l];
        v[2 * l + 1] = rb * f3[l] * ex.tail[l];
    }
    return v;
}

namespace {

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

void project_out(std::vector<double>& v, const std::vector<std::vector<double>>& basis) {
    // Modified Gram-Schmidt, applied twice.
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : basis) {
            const double c = dot(v, q);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
        }
    }
}

// Unit vector of the orthogonal complement, from the canonical basis vector
// with the largest residual.
std::vector<double> complement_vector(std::size_t n, const std::vector<std::vector<double>>& basis) {
    std::vector<double> best;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = 1.0;
        project_out(e, basis);
        const double r = norm(e);
        if (r > best_norm) {
            best_norm = r;
            best = std::move(e);
        }
        if (best_norm > 0.5) break;
    }
    if (!(best_norm > 0.0)) throw DegenerateError("no orthogonal complement left");
    for (double& x : best) x /= best_norm;
    return best;
}

}  // namespace

TransformMatrix build_matrix(const HestonParams& p, const GridSpec& g, PayoffKind kind, LtScheme scheme,
                             bool constrained) {
    if (constrained && scheme != LtScheme::LogLT)
        throw ConfigError("the first-column constraint requires the log-price construction");
    const std::size_t m = g.steps;
    const std::size_t n = 2 * m;

    std::vector<std::vector<double>> cols;
    cols.reserve(n);
    std::vector<std::size_t> fallbacks;
    std::vector<double> expansion(n, 0.0);  // Q * (1,...,1,0,...,0)
    PathState path;

    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> v;
        if (scheme == LtScheme::LogLT) {
            simulate_log(p, g, expansion, path);
            v = log_lt_direction(p, g, kind, path);
        } else {
            simulate_plain(p, g, expansion, path);
            v = plain_lt_direction(p, g, kind, path);
        }
        if (k == 0 && constrained)
            for (std::size_t l = 0; l < m; ++l) v[2 * l] = 0.0;

        const double raw = norm(v);
        project_out(v, cols);
        const double len = norm(v);
        if (!std::isfinite(len) || len < 1e-14 * std::max(1.0, raw) || len == 0.0) {
            v = complement_vector(n, cols);
            fallbacks.push_back(k);
        } else {
            for (double& x : v) x /= len;
        }

        if (k == 0) {
            double even = 0.0;
            for (std::size_t l = 0; l < m; ++l) even += v[2 * l + 1];
            if (even < 0.0)
                for (double& x : v) x = -x;
        } else {
            std::size_t arg = 0;
            for (std::size_t i = 1; i < n; ++i)
                if (std::abs(v[i]) > std::abs(v[arg])) arg = i;
            if (v[arg] < 0.0)
                for (double& x : v) x = -x;
        }
        for (std::size_t i = 0; i < n; ++i) expansion[i] += v[i];
        cols.push_back(std::move(v));
    }

    std::vector<double> q(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) q[i * n + j] = cols[j][i];
    TransformMatrix out(n, std::move(q), constrained);
    out.set_fallback_columns(std::move(fallbacks));
    return out;
}

}  // namespace bqmc
