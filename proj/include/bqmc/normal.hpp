#pragma once

namespace bqmc {

/// Standard normal CDF. Exact 0 and 1 at -inf and +inf; throws DomainError on NaN.
double norm_cdf(double z);

/// Inverse standard normal CDF (Wichura's AS241, PPND16).
/// Throws DomainError unless 0 < u < 1.
double inv_norm_cdf(double u);

/// Phi(hi) - Phi(lo), evaluated on whichever tail keeps full relative precision.
double norm_interval_mass(double lo, double hi);

}  // namespace bqmc
