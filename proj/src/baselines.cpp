#include "macfb/baselines.hpp"

#include <cmath>

#include "macfb/error.hpp"

namespace macfb {

namespace {

double snr_of(const GaussianMacParams& g) {
  if (!(std::isfinite(g.P) && g.P >= 0.0 && std::isfinite(g.sigma2) && g.sigma2 > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "P must be finite and >= 0, sigma2 finite and > 0");
  }
  return g.P / g.sigma2;
}

}  // namespace

RegionBounds nofb_pentagon(const GaussianMacParams& g) {
  const double snr = snr_of(g);
  RegionBounds b;
  b.bR1 = b.bR2 = capacity(snr);
  b.bSumA = b.bSumB = capacity(2.0 * snr);
  b.fbCost = 0.0;
  return b;
}

double ozarow_residual(double snr, double rho) {
  const double rhs = 1.0 + snr * (1.0 - rho * rho);
  return rhs * rhs - (1.0 + 2.0 * snr * (1.0 + rho));
}

OzarowSum ozarow_sum_capacity(const GaussianMacParams& g) {
  const double snr = snr_of(g);
  // residual(0) = snr^2 > 0, residual(1) = -4 snr < 0, and the residual is
  // strictly decreasing on [0,1].
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ozarow_residual(snr, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  OzarowSum r;
  r.rho_star = std::abs(ozarow_residual(snr, lo)) <= std::abs(ozarow_residual(snr, hi)) ? lo : hi;
  r.sum_bits = capacity(2.0 * snr * (1.0 + r.rho_star));
  return r;
}

double cooperation_sum_bound(const GaussianMacParams& g) { return capacity(4.0 * snr_of(g)); }

}  // namespace macfb
