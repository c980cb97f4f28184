#pragma once

// Rate-pair polygons, time-sharing hulls, parameter sweeps and sum-rate
// optimization over the Gaussian scheme.

#include <cstdint>
#include <span>
#include <vector>

#include "macfb/gaussian_scheme.hpp"
#include "macfb/rate_terms.hpp"

namespace macfb {

struct RatePoint {
  double r1 = 0.0;
  double r2 = 0.0;

  bool operator==(const RatePoint&) const = default;
};

/// Convex polygon, counter-clockwise from (0,0).
struct RegionPolygon {
  std::vector<RatePoint> vertices;

  bool contains(RatePoint p, double tol = 1e-9) const;
  /// True if every vertex of `other` lies in this polygon.
  bool includes(const RegionPolygon& other, double tol = 1e-9) const;
};

RegionPolygon polygon_from_bounds(const RegionBounds& b);

/// Hull of the points, their axis projections and the origin.
RegionPolygon convex_hull(std::span<const RatePoint> points);

/// Northeast boundary vertices (those not strictly dominated in both
/// coordinates), sorted by R1.
std::vector<RatePoint> pareto_frontier(const RegionPolygon& poly);

enum class SweepMode {
  Proposed,   // closed-form bounds over (alpha, beta, theta, lambda, sigma12^2[, sigma_i^2])
  Decoupled,  // V1 = V2 = empty region over (alpha, theta, sigma12^2[, sigma_i^2])
};

struct SweepConfig {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> theta;
  std::vector<double> lambda_fraction;  // multiples of lambda_max
  std::vector<double> sigma12_sq;
  std::vector<double> sigma1_sq;  // both empty: common feedback only
  std::vector<double> sigma2_sq;
  int refine_iterations = 600;
  std::uint64_t seed = 1;

  /// Default grids bracketing the smallest admissible common-feedback noise.
  static SweepConfig defaults(double P, double sigma2, double Rfb);

  /// Throws InvalidParams if a grid value is out of range or a grid is empty.
  void validate(SweepMode mode) const;
};

/// Default log-spaced sigma12^2 grid for one feedback rate.
std::vector<double> default_sigma12_grid(double P, double sigma2, double Rfb);

struct SweepResult {
  std::vector<RatePoint> points;
  RegionPolygon hull;
  std::size_t evaluated = 0;
  std::size_t feasible = 0;
  bool fallback = false;  // no feasible grid point; hull is the no-feedback pentagon
};

SweepResult sweep_regions(const SweepConfig& cfg, double Rfb, double P, double sigma2,
                          SweepMode mode = SweepMode::Proposed);

struct OptTraceEntry {
  SchemeParams params;
  double value = 0.0;
};

struct OptResult {
  SchemeParams best;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::vector<OptTraceEntry> trace;
  double grid_value = 0.0;
  double oracle_delta = 0.0;  // max |closed form - oracle| over the bounds at `best`
  bool found_feasible = false;
};

/// Sum rate min(bSumA, bSumB) of the closed form, or -inf if infeasible.
double sum_rate_objective(const SchemeParams& p);

OptResult optimize_sum_rate(double P, double sigma2, double Rfb, bool common_feedback, const SweepConfig& cfg);

}  // namespace macfb
