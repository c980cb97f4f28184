#pragma once

// Gaussian specialization of the rate-limited-feedback MAC scheme: parameter
// validation, the correlation coefficients (xi1, xi2), the full two-block
// linear-Gaussian system, the closed-form region and a covariance oracle that
// evaluates the same region term by term.

#include <limits>
#include <optional>
#include <random>

#include "macfb/linear_gaussian.hpp"
#include "macfb/rate_terms.hpp"

namespace macfb {

/// Knobs of the Gaussian scheme. An empty sigma1_sq/sigma2_sq means the
/// private feedback noise is infinite (only common feedback Y12 is sent);
/// both must be empty or both present.
struct SchemeParams {
  double P = 1.0;
  double sigma2 = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double theta = 0.0;
  double lambda = 0.0;
  double sigma12_sq = 1.0;
  std::optional<double> sigma1_sq;
  std::optional<double> sigma2_sq;
  double Rfb = std::numeric_limits<double>::infinity();

  bool common_feedback() const { return !sigma1_sq.has_value(); }
};

struct XiPair {
  double xi1 = 1.0;
  double xi2 = 0.0;
};

enum class XiBranch { Canonical, Alternate };

/// Throws InvalidParams unless every structural range holds (lambda is only
/// range-checked against [-1,1], not against lambda_max).
void validate_structure(const SchemeParams& p);

/// Upper limit on lambda for which real (xi1, xi2) exist; in [0,1).
double lambda_max(const SchemeParams& p);

/// sqrt(P theta alpha / (sigma2 + sigma12^2 + 2 P alpha theta + 2 P (1 - theta))),
/// the correlation between each A_i (tilde) and f(St).
double xi_coupling(const SchemeParams& p);

XiPair solve_xi(const SchemeParams& p, XiBranch branch = XiBranch::Canonical);

/// Residuals of the two defining equations for (xi1, xi2).
std::pair<double, double> xi_residuals(const SchemeParams& p, const XiPair& xi);

LinearGaussianSystem build_system(const SchemeParams& p, XiBranch branch = XiBranch::Canonical);

RegionBounds closed_form_bounds(const SchemeParams& p);

struct OracleResult {
  MacMiTerms terms;
  RegionBounds bounds;
};

OracleResult oracle_bounds(const SchemeParams& p, XiBranch branch = XiBranch::Canonical);

/// The sixteen terms evaluated on an already built system.
MacMiTerms oracle_terms(const LinearGaussianSystem& sys, bool common_feedback);

/// Rfb >= fbCost - 1e-9, using the closed-form cost.
bool feedback_feasible(const SchemeParams& p);

/// Parameters of the V1 = V2 = empty specialization (no beta, no lambda).
struct DecoupledParams {
  double P = 1.0;
  double sigma2 = 1.0;
  double alpha = 0.0;
  double theta = 0.0;
  double sigma12_sq = 1.0;
  std::optional<double> sigma1_sq;
  std::optional<double> sigma2_sq;
  double Rfb = std::numeric_limits<double>::infinity();
};

/// Region with V1 = V2 = empty, evaluated on a single-block Gaussian system.
/// bSumA holds I(X1 X2;Y) and bSumB the min/min sum bound.
RegionBounds decoupled_bounds(const DecoupledParams& p);

/// Smallest common-feedback quantization noise admissible at rate Rfb when
/// theta = 0: (sigma2 + P) / (2^(2 Rfb) - 1). Infinite at Rfb = 0.
double sigma12_min_sq(double sigma2, double P, double Rfb);

/// Random structurally valid parameters with lambda inside [0, lambda_max] and
/// Rfb infinite. Roughly one draw in ten pins alpha, beta or theta to an endpoint.
SchemeParams random_scheme_params(std::mt19937_64& rng, bool common_feedback);

}  // namespace macfb
