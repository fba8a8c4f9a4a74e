#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "bqmc/heston.hpp"
#include "bqmc/lt.hpp"
#include "bqmc/options.hpp"
#include "bqmc/qrng.hpp"

namespace bqmc {

enum class Method { MC, QMC_LT, QMC_LT_CS, QMC_LT_CS_RF };

std::string to_string(Method method);     // "mc", "qmc_lt", ...
std::string short_tag(Method method);     // "MC", "LT", "CS", "RF"
std::string display_name(Method method);  // "QMC+LT+CS", ...
Method parse_method(const std::string& text);

struct PricingProblem {
    HestonParams model;
    GridSpec grid;
    PayoffSpec payoff;
    BarrierSpec barrier;

    void validate() const;
    double discount() const;
};

/// Randomized-QMC (or batched MC) estimate of a discounted price.
struct EstimatorResult {
    Method method = Method::MC;
    double mean = 0.0;
    double std_of_means = 0.0;  // sample standard deviation of the per-shift means
    std::vector<double> per_shift_means;
    std::size_t n = 0;       // points per shift
    std::size_t shifts = 0;

    double std_error() const;  // std_of_means / sqrt(shifts)

    static EstimatorResult from_shift_means(Method method, std::vector<double> means, std::size_t n);
};

/// Undiscounted payout max(f, 0) times the barrier indicator on monitoring dates 1..m.
/// Knock-in indicators are the complements of the matching knock-out ones.
double evaluate_payoff(const PathState& path, const PayoffSpec& payoff, const BarrierSpec& barrier);

/// mc.std_of_means / other.std_of_means; +inf when the denominator vanishes.
double variance_ratio(const EstimatorResult& mc, const EstimatorResult& other);

struct ConvergencePoint {
    std::size_t n = 0;
    double std_of_means = 0.0;
    double mean = 0.0;
};

/// Estimator pipelines for one pricing problem.
///
/// MC: pseudo-random points through the identity construction and the log
/// scheme. QMC_LT: the plain-price LT matrix and plain Euler scheme. QMC_LT_CS
/// and QMC_LT_CS_RF: the constrained log-LT matrix with z1 conditioned on the
/// barrier (and on a positive payout for RF); uniform coordinate 1 drives z1.
///
/// Transform matrices are built on first use and cached; an Engine is safe to
/// share between threads.
class Engine {
public:
    explicit Engine(PricingProblem problem);

    const PricingProblem& problem() const { return problem_; }
    const TransformMatrix& matrix(Method method) const;

    // Discounted per-point scores of one shift, points [0, count). For the
    // conditional methods the CS and RF scores come from one shared pass.
    std::vector<std::vector<double>> shift_scores(std::span<const Method> methods, const PointSet& points,
                                                  std::size_t shift, std::size_t count) const;

    EstimatorResult run(Method method, const PointSet& points, int threads = 1) const;

    // Runs several methods. MC draws from `mc_points`, the QMC methods from
    // `qmc_points`; the conditional methods share their transform pass.
    std::vector<EstimatorResult> run_many(std::span<const Method> methods, const PointSet& qmc_points,
                                          const PointSet& mc_points, int threads = 1) const;

    // Standard deviation of per-shift means over leading prefixes of the point
    // sets, for every n in n_list (each n <= the point sets' counts).
    std::map<Method, std::vector<ConvergencePoint>> convergence(std::span<const Method> methods,
                                                                const PointSet& qmc_points,
                                                                const PointSet& mc_points,
                                                                std::span<const std::size_t> n_list,
                                                                int threads = 1) const;

private:
    std::vector<std::vector<std::vector<double>>> all_scores(std::span<const Method> methods,
                                                             const PointSet& points, int threads) const;

    PricingProblem problem_;
    mutable std::mutex mutex_;
    mutable std::map<int, std::shared_ptr<const TransformMatrix>> matrices_;
};

/// Single-method convenience entry point. use_rootfind upgrades QMC_LT_CS to
/// QMC_LT_CS_RF.
EstimatorResult run_estimator(Method method, const PricingProblem& problem, const PointSet& points,
                              bool use_rootfind = false, int threads = 1);
EstimatorResult run_estimator(Method method, const PricingProblem& problem, const PointSetSpec& points,
                              bool use_rootfind = false, int threads = 1);

}  // namespace bqmc
