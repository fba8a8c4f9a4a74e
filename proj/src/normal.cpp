#include "bqmc/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bqmc/error.hpp"

namespace bqmc {

double norm_cdf(double z) {
    if (std::isnan(z)) throw DomainError("norm_cdf: NaN argument");
    if (z == std::numeric_limits<double>::infinity()) return 1.0;
    if (z == -std::numeric_limits<double>::infinity()) return 0.0;
    return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
}

double norm_interval_mass(double lo, double hi) {
    if (!(lo < hi)) return 0.0;
    if (lo >= 0.0) return norm_cdf(-lo) - norm_cdf(-hi);
    if (hi <= 0.0) return norm_cdf(hi) - norm_cdf(lo);
    return 1.0 - norm_cdf(lo) - norm_cdf(-hi);
}

namespace {

// Wichura (1988), Algorithm AS 241, PPND16.
constexpr double kA[8] = {3.3871328727963666080e0, 1.3314166789178437745e+2,
                          1.9715909503065514427e+3, 1.3731693765509461125e+4,
                          4.5921953931549871457e+4, 6.7265770927008700853e+4,
                          3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kB[8] = {1.0,
                          4.2313330701600911252e+1, 6.8718700749205790830e+2,
                          5.3941960214247511077e+3, 2.1213794301586595867e+4,
                          3.9307895800092710610e+4, 2.8729085735721942674e+4,
                          5.2264952788528545610e+3};
constexpr double kC[8] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                          5.76949722146069140550e0, 3.64784832476320460504e0,
                          1.27045825245236838258e0, 2.41780725177450611770e-1,
                          2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[8] = {1.0,
                          2.05319162663775882187e0, 1.67638483018380384940e0,
                          6.89767334985100004550e-1, 1.48103976427480074590e-1,
                          1.51986665636164571966e-2, 5.47593808499534494600e-4,
                          1.05075007164441684324e-9};
constexpr double kE[8] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                          1.78482653991729133580e0, 2.96560571828504891230e-1,
                          2.65321895265761230930e-2, 1.24266094738807843860e-3,
                          2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[8] = {1.0,
                          5.99832206555887937690e-1, 1.36929880922735805310e-1,
                          1.48753612908506148525e-2, 7.86869131145613259100e-4,
                          1.84631831751005468180e-5, 1.42151175831644588870e-7,
                          2.04426310338993978564e-15};

inline double poly7(const double (&c)[8], double x) {
    return ((((((c[7] * x + c[6]) * x + c[5]) * x + c[4]) * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
}

}  // namespace

double inv_norm_cdf(double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("inv_norm_cdf: argument must lie in (0,1)");
    const double q = u - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly7(kA, r) / poly7(kB, r);
    }
    double r = std::sqrt(-std::log(q < 0.0 ? u : 1.0 - u));
    double z;
    if (r <= 5.0) {
        r -= 1.6;
        z = poly7(kC, r) / poly7(kD, r);
    } else {
        r -= 5.0;
        z = poly7(kE, r) / poly7(kF, r);
    }
    return q < 0.0 ? -z : z;
}

}  // namespace bqmc
