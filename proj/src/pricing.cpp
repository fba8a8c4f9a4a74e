#include "bqmc/pricing.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "bqmc/condsample.hpp"
#include "bqmc/error.hpp"
#include "bqmc/normal.hpp"
#include "bqmc/simd/kernels.hpp"

namespace bqmc {

std::string to_string(Method method) {
    switch (method) {
        case Method::MC: return "mc";
        case Method::QMC_LT: return "qmc_lt";
        case Method::QMC_LT_CS: return "qmc_lt_cs";
        case Method::QMC_LT_CS_RF: return "qmc_lt_cs_rf";
    }
    return "?";
}

std::string short_tag(Method method) {
    switch (method) {
        case Method::MC: return "MC";
        case Method::QMC_LT: return "LT";
        case Method::QMC_LT_CS: return "CS";
        case Method::QMC_LT_CS_RF: return "RF";
    }
    return "?";
}

std::string display_name(Method method) {
    switch (method) {
        case Method::MC: return "MC";
        case Method::QMC_LT: return "QMC+LT";
        case Method::QMC_LT_CS: return "QMC+LT+CS";
        case Method::QMC_LT_CS_RF: return "QMC+LT+CS+RF";
    }
    return "?";
}

Method parse_method(const std::string& text) {
    for (auto m : {Method::MC, Method::QMC_LT, Method::QMC_LT_CS, Method::QMC_LT_CS_RF})
        if (text == to_string(m) || text == short_tag(m) || text == display_name(m)) return m;
    throw ConfigError("unknown method '" + text + "'");
}

void PricingProblem::validate() const {
    model.validate();
    if (grid.steps < 1 || !(grid.dt > 0.0)) throw ConfigError("time grid needs at least one step");
    if (std::abs(grid.dt * static_cast<double>(grid.steps) - model.maturity) > 1e-12 * model.maturity)
        throw ConfigError("time grid does not span the maturity");
    payoff.validate();
    barrier.validate(model.s0);
}

double PricingProblem::discount() const { return std::exp(-model.r * model.maturity); }

double EstimatorResult::std_error() const {
    return shifts > 0 ? std_of_means / std::sqrt(static_cast<double>(shifts)) : 0.0;
}

EstimatorResult EstimatorResult::from_shift_means(Method method, std::vector<double> means, std::size_t n) {
    EstimatorResult r;
    r.method = method;
    r.n = n;
    r.shifts = means.size();
    double sum = 0.0;
    for (double x : means) sum += x;
    r.mean = means.empty() ? 0.0 : sum / static_cast<double>(means.size());
    double ss = 0.0;
    for (double x : means) ss += (x - r.mean) * (x - r.mean);
    r.std_of_means = means.size() > 1 ? std::sqrt(ss / static_cast<double>(means.size() - 1)) : 0.0;
    r.per_shift_means = std::move(means);
    return r;
}

double evaluate_payoff(const PathState& path, const PayoffSpec& payoff, const BarrierSpec& barrier) {
    const std::size_t m = path.spot.size() - 1;
    double hi = -kInf, lo = kInf, sum = 0.0;
    for (std::size_t k = 1; k <= m; ++k) {
        const double s = path.spot[k];
        hi = std::max(hi, s);
        lo = std::min(lo, s);
        sum += s;
    }
    bool alive = true;
    switch (barrier.kind) {
        case BarrierKind::None: break;
        case BarrierKind::UpOut: alive = hi < barrier.level; break;
        case BarrierKind::DownOut: alive = lo > barrier.level; break;
        case BarrierKind::UpIn: alive = !(hi < barrier.level); break;
        case BarrierKind::DownIn: alive = !(lo > barrier.level); break;
        case BarrierKind::UpOutDownOut: alive = hi < barrier.level && lo > barrier.lower; break;
        case BarrierKind::UpOutDownIn: alive = hi < barrier.level && !(lo > barrier.lower); break;
    }
    if (!alive) return 0.0;
    double intrinsic = 0.0;
    switch (payoff.kind) {
        case PayoffKind::Call: intrinsic = path.spot[m] - payoff.strike; break;
        case PayoffKind::Put: intrinsic = payoff.strike - path.spot[m]; break;
        case PayoffKind::AsianCall: intrinsic = sum / static_cast<double>(m) - payoff.strike; break;
    }
    return std::max(intrinsic, 0.0);
}

double variance_ratio(const EstimatorResult& mc, const EstimatorResult& other) {
    if (other.std_of_means == 0.0) return std::numeric_limits<double>::infinity();
    return mc.std_of_means / other.std_of_means;
}

namespace {

enum MatrixKey { kLogConstrained = 0, kPlain = 1 };

inline double safe_uniform(double u) { return u > 0.0 ? u : 0x1.0p-33; }

bool is_conditional(Method m) { return m == Method::QMC_LT_CS || m == Method::QMC_LT_CS_RF; }

// Intrinsic value along log S_{k+1} = offset_k + slope_k z1.
double affine_intrinsic(const ConditionalPath& cp, const PayoffSpec& payoff, double z1) {
    const std::size_t m = cp.steps();
    switch (payoff.kind) {
        case PayoffKind::Call: return std::exp(cp.log_spot(m - 1, z1)) - payoff.strike;
        case PayoffKind::Put: return payoff.strike - std::exp(cp.log_spot(m - 1, z1));
        case PayoffKind::AsianCall: {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += std::exp(cp.log_spot(k, z1));
            return s / static_cast<double>(m) - payoff.strike;
        }
    }
    return 0.0;
}

#ifndef NDEBUG
bool barrier_holds(const ConditionalPath& cp, const BarrierSpec& b, double z1) {
    if (b.kind == BarrierKind::None) return true;
    double hi = -kInf, lo = kInf;
    for (std::size_t k = 0; k < cp.steps(); ++k) {
        hi = std::max(hi, cp.log_spot(k, z1));
        lo = std::min(lo, cp.log_spot(k, z1));
    }
    const double eps = 1e-9;
    const double up = std::log(b.level), down = std::log(b.two_level() ? b.lower : b.level);
    switch (b.kind) {
        case BarrierKind::None: return true;
        case BarrierKind::UpOut: return hi < up + eps;
        case BarrierKind::DownOut: return lo > up - eps;
        case BarrierKind::UpIn: return hi > up - eps;
        case BarrierKind::DownIn: return lo < up + eps;
        case BarrierKind::UpOutDownOut: return hi < up + eps && lo > down - eps;
        case BarrierKind::UpOutDownIn: return hi < up + eps && lo < down + eps;
    }
    return true;
}
#endif

struct Scratch {
    std::vector<double> u, x, y, z;
    std::vector<double> gam, gam_lower;
    PathState path;
    ConditionalPath cp;
};

}  // namespace

Engine::Engine(PricingProblem problem) : problem_(std::move(problem)) { problem_.validate(); }

const TransformMatrix& Engine::matrix(Method method) const {
    if (method == Method::MC) throw ConfigError("the MC method uses no transform matrix");
    const int key = is_conditional(method) ? kLogConstrained : kPlain;
    std::lock_guard lock(mutex_);
    auto& slot = matrices_[key];
    if (!slot) {
        const auto& p = problem_;
        slot = std::make_shared<const TransformMatrix>(
            key == kLogConstrained ? build_matrix(p.model, p.grid, p.payoff.kind, LtScheme::LogLT, true)
                                   : build_matrix(p.model, p.grid, p.payoff.kind, LtScheme::PlainLT, false));
    }
    return *slot;
}

std::vector<std::vector<double>> Engine::shift_scores(std::span<const Method> methods, const PointSet& points,
                                                      std::size_t shift, std::size_t count) const {
    const auto& pb = problem_;
    const std::size_t m = pb.grid.steps;
    const std::size_t n = 2 * m;
    if (points.dimension() != n)
        throw ConfigError("point set dimension " + std::to_string(points.dimension()) + " does not match 2m = " +
                          std::to_string(n));

    bool want_mc = false, want_lt = false, want_cs = false, want_rf = false;
    for (Method meth : methods) {
        want_mc |= meth == Method::MC;
        want_lt |= meth == Method::QMC_LT;
        want_cs |= meth == Method::QMC_LT_CS;
        want_rf |= meth == Method::QMC_LT_CS_RF;
    }
    const TransformMatrix* q_plain = want_lt ? &matrix(Method::QMC_LT) : nullptr;
    const TransformMatrix* q_log = (want_cs || want_rf) ? &matrix(Method::QMC_LT_CS) : nullptr;
    if (q_log && !q_log->constrained()) throw ConfigError("conditional sampling needs the constrained matrix");

    std::vector<double> mc(want_mc ? count : 0), lt(want_lt ? count : 0), cs(want_cs ? count : 0),
        rf(want_rf ? count : 0);

    const std::size_t nb = simd::kPanelWidth;
    const double disc = pb.discount();
    std::vector<double> q0 = q_log ? q_log->column(0) : std::vector<double>{};

    Scratch s;
    s.u.resize(nb * n);
    s.x.assign(n * nb, 0.0);
    s.y.resize(n * nb);
    s.z.resize(n);
    s.gam.resize(m);
    s.gam_lower.resize(m);

    for (std::size_t i0 = 0; i0 < count; i0 += nb) {
        const std::size_t len = std::min(nb, count - i0);
        points.fill(shift, i0, len, s.u);
        for (std::size_t p = 0; p < nb; ++p) {
            for (std::size_t j = 0; j < n; ++j)
                s.x[j * nb + p] = p < len ? inv_norm_cdf(safe_uniform(s.u[p * n + j])) : 0.0;
        }

        if (want_mc) {
            for (std::size_t p = 0; p < len; ++p) {
                for (std::size_t j = 0; j < n; ++j) s.z[j] = s.x[j * nb + p];
                simulate_log(pb.model, pb.grid, s.z, s.path);
                mc[i0 + p] = disc * evaluate_payoff(s.path, pb.payoff, pb.barrier);
            }
        }

        if (want_lt) {
            simd::gemm_panel(q_plain->data().data(), n, n, n, s.x.data(), nb, s.y.data());
            for (std::size_t p = 0; p < len; ++p) {
                for (std::size_t j = 0; j < n; ++j) s.z[j] = s.y[j * nb + p];
                simulate_plain(pb.model, pb.grid, s.z, s.path);
                lt[i0 + p] = disc * evaluate_payoff(s.path, pb.payoff, pb.barrier);
            }
        }

        if (q_log) {
            // Z_rest = Q[:, 2:2m] z_{2:2m}
            simd::gemm_panel(q_log->data().data() + 1, n, n - 1, n, s.x.data() + nb, nb, s.y.data());
            for (std::size_t p = 0; p < len; ++p) {
                for (std::size_t j = 0; j < n; ++j) s.z[j] = s.y[j * nb + p];
                s.cp.build(pb.model, pb.grid, q0, s.z);
                Z1Interval region = Z1Interval::whole();
                if (pb.barrier.kind != BarrierKind::None) {
                    s.cp.gammas(pb.barrier.level, s.gam);
                    if (pb.barrier.two_level()) s.cp.gammas(pb.barrier.lower, s.gam_lower);
                    region = barrier_interval(pb.barrier, s.gam, s.gam_lower);
                }
                const double u1 = safe_uniform(s.u[p * n]);

                auto score = [&](const Z1Interval& iv) {
                    if (iv.empty()) return 0.0;
                    const auto r = rescale_u1(u1, iv);
                    assert(barrier_holds(s.cp, pb.barrier, r.z1));
                    return disc * r.weight * std::max(affine_intrinsic(s.cp, pb.payoff, r.z1), 0.0);
                };

                if (want_cs) cs[i0 + p] = score(region);
                if (want_rf) {
                    Z1Interval positive;
                    if (pb.payoff.kind == PayoffKind::AsianCall) {
                        positive = root_find_z1(
                            [&](double z1) { return affine_intrinsic(s.cp, pb.payoff, z1); }, region);
                    } else {
                        positive = region.intersect(
                            payout_interval(pb.payoff.kind, s.cp.gamma(m - 1, pb.payoff.strike)));
                    }
                    rf[i0 + p] = score(positive);
                }
            }
        }
    }

    std::vector<std::vector<double>> out;
    out.reserve(methods.size());
    for (Method meth : methods) {
        switch (meth) {
            case Method::MC: out.push_back(mc); break;
            case Method::QMC_LT: out.push_back(lt); break;
            case Method::QMC_LT_CS: out.push_back(cs); break;
            case Method::QMC_LT_CS_RF: out.push_back(rf); break;
        }
    }
    return out;
}

std::vector<std::vector<std::vector<double>>> Engine::all_scores(std::span<const Method> methods,
                                                                 const PointSet& points, int threads) const {
    const std::size_t shifts = points.spec().shifts;
    const std::size_t count = points.spec().count;
    // Matrices are built up front so workers never serialize on construction.
    for (Method meth : methods)
        if (meth != Method::MC) (void)matrix(meth);

    std::vector<std::vector<std::vector<double>>> slots(shifts);
    const std::size_t workers = std::clamp<std::size_t>(threads > 0 ? threads : 1, 1, shifts);
    if (workers == 1) {
        for (std::size_t s = 0; s < shifts; ++s) slots[s] = shift_scores(methods, points, s, count);
        return slots;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t s = next++; s < shifts; s = next++) {
                    try {
                        slots[s] = shift_scores(methods, points, s, count);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return slots;
}

namespace {

double prefix_mean(const std::vector<double>& scores, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += scores[i];
    return sum / static_cast<double>(n);
}

}  // namespace

EstimatorResult Engine::run(Method method, const PointSet& points, int threads) const {
    const Method one[] = {method};
    const auto slots = all_scores(one, points, threads);
    std::vector<double> means;
    means.reserve(slots.size());
    for (const auto& shift : slots) means.push_back(prefix_mean(shift[0], points.spec().count));
    return EstimatorResult::from_shift_means(method, std::move(means), points.spec().count);
}

std::vector<EstimatorResult> Engine::run_many(std::span<const Method> methods, const PointSet& qmc_points,
                                              const PointSet& mc_points, int threads) const {
    std::vector<Method> qmc;
    for (Method meth : methods)
        if (meth != Method::MC) qmc.push_back(meth);
    std::vector<EstimatorResult> out;
    std::map<Method, EstimatorResult> by_method;
    if (!qmc.empty()) {
        const auto slots = all_scores(qmc, qmc_points, threads);
        for (std::size_t i = 0; i < qmc.size(); ++i) {
            std::vector<double> means;
            for (const auto& shift : slots) means.push_back(prefix_mean(shift[i], qmc_points.spec().count));
            by_method[qmc[i]] = EstimatorResult::from_shift_means(qmc[i], std::move(means), qmc_points.spec().count);
        }
    }
    for (Method meth : methods) {
        if (meth == Method::MC && !by_method.count(Method::MC)) by_method[Method::MC] = run(Method::MC, mc_points, threads);
        out.push_back(by_method.at(meth));
    }
    return out;
}

std::map<Method, std::vector<ConvergencePoint>> Engine::convergence(std::span<const Method> methods,
                                                                    const PointSet& qmc_points,
                                                                    const PointSet& mc_points,
                                                                    std::span<const std::size_t> n_list,
                                                                    int threads) const {
    std::map<Method, std::vector<ConvergencePoint>> out;
    auto collect = [&](std::span<const Method> group, const PointSet& points) {
        if (group.empty()) return;
        for (std::size_t n : n_list)
            if (n < 1 || n > points.spec().count)
                throw ConfigError("convergence size " + std::to_string(n) + " exceeds the point set size " +
                                  std::to_string(points.spec().count));
        const auto slots = all_scores(group, points, threads);
        for (std::size_t i = 0; i < group.size(); ++i) {
            auto& series = out[group[i]];
            for (std::size_t n : n_list) {
                std::vector<double> means;
                for (const auto& shift : slots) means.push_back(prefix_mean(shift[i], n));
                const auto r = EstimatorResult::from_shift_means(group[i], std::move(means), n);
                series.push_back({n, r.std_of_means, r.mean});
            }
        }
    };
    std::vector<Method> qmc, mc;
    for (Method meth : methods) (meth == Method::MC ? mc : qmc).push_back(meth);
    collect(qmc, qmc_points);
    collect(mc, mc_points);
    return out;
}

EstimatorResult run_estimator(Method method, const PricingProblem& problem, const PointSet& points,
                              bool use_rootfind, int threads) {
    if (method == Method::QMC_LT_CS && use_rootfind) method = Method::QMC_LT_CS_RF;
    if (method == Method::MC && points.spec().kind != PointKind::PseudoRandom)
        throw ConfigError("the MC method needs a pseudo-random point set");
    return Engine(problem).run(method, points, threads);
}

EstimatorResult run_estimator(Method method, const PricingProblem& problem, const PointSetSpec& points,
                              bool use_rootfind, int threads) {
    return run_estimator(method, problem, PointSet::with_default_tables(points), use_rootfind, threads);
}

}  // namespace bqmc
