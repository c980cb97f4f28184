#include "macfb/rate_terms.hpp"

#include <algorithm>
#include <cmath>

namespace macfb {

RegionBounds bounds_from_terms(const MacMiTerms& t) {
  const double res1 = std::min(t.a1, t.bW + t.bU1 + t.bV1);
  const double res2 = std::min(t.a2, t.bW + t.bU2 + t.bV2);
  RegionBounds b;
  b.bR1 = t.d1 + res1;
  b.bR2 = t.d2 + res2;
  b.bSumA = t.d12 + t.bW + t.bU12 + t.bV12;
  b.bSumB = t.d12 + res1 + res2;
  b.fbCost = std::max(t.tFB1, t.tFB2) + t.tFBa + t.tFBb;
  return b;
}

double max_abs_delta(const RegionBounds& x, const RegionBounds& y) {
  double worst = 0.0;
  for (const auto& [name, field] : RegionBounds::fields) worst = std::max(worst, std::fabs(x.*field - y.*field));
  return worst;
}

double max_abs_delta(const MacMiTerms& x, const MacMiTerms& y) {
  double worst = 0.0;
  for (const auto& [name, field] : MacMiTerms::fields) worst = std::max(worst, std::fabs(x.*field - y.*field));
  return worst;
}

bool region_contains(const RegionBounds& b, double r1, double r2, double rfb) {
  const double eps = kRateTolerance;
  return r1 >= -eps && r2 >= -eps && rfb >= b.fbCost - eps && r1 <= b.bR1 + eps && r2 <= b.bR2 + eps &&
         r1 + r2 <= b.sum_bound() + eps;
}

}  // namespace macfb
