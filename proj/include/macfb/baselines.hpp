#pragma once

// Classical reference regions for the symmetric Gaussian MAC.

#include "macfb/rate_terms.hpp"

namespace macfb {

struct GaussianMacParams {
  double P = 1.0;
  double sigma2 = 1.0;
};

/// Capacity region without feedback.
RegionBounds nofb_pentagon(const GaussianMacParams& g);

struct OzarowSum {
  double rho_star = 0.0;
  double sum_bits = 0.0;
};

/// Residual (1 + snr(1 - rho^2))^2 - (1 + 2 snr (1 + rho)) of the fixed-point equation.
double ozarow_residual(double snr, double rho);

/// Symmetric perfect-feedback sum capacity: rho* solves the fixed point on
/// [0,1] (60 bisection steps), sum = C(2 snr (1 + rho*)).
OzarowSum ozarow_sum_capacity(const GaussianMacParams& g);

/// Two fully coordinated transmitters: C(4P/sigma2).
double cooperation_sum_bound(const GaussianMacParams& g);

}  // namespace macfb
