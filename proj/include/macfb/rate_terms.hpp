#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

namespace macfb {

/// Gaussian capacity function 0.5*log2(1+x), in bits.
inline double capacity(double x) { return 0.5 * std::log2(1.0 + x); }

/// Name of the previous-block copy of a variable.
inline std::string tilde(const std::string& name) { return "t_" + name; }

/// Global tolerance for the non-strict rate inequalities.
inline constexpr double kRateTolerance = 1e-9;

/// The mutual-information quantities entering the achievable region.
/// S = (W,V1,V2) for the current block, St = (Wt,V1t,V2t,Y12t) for the previous one.
struct MacMiTerms {
  double tFB1 = 0;  // I(Y12;Y|W X1)
  double tFB2 = 0;  // I(Y12;Y|W X2)
  double tFBa = 0;  // I(Y;Y1|Y12 X1 W)
  double tFBb = 0;  // I(Y;Y2|Y12 X2 W)
  double d1 = 0;    // I(X1;Y|S U1 U2 X2)
  double d2 = 0;    // I(X2;Y|S U1 U2 X1)
  double d12 = 0;   // I(X1 X2;Y|S U1 U2)
  double a1 = 0;    // I(U1;Y2 Y12|St Y2t U2t X2t W V2 U2 X2)
  double a2 = 0;    // I(U2;Y1 Y12|St Y1t U1t X1t W V1 U1 X1)
  double bW = 0;    // I(W;Y|Wt Yt)
  double bU1 = 0;   // I(U1;Y|W V1 V2 U2)
  double bU2 = 0;   // I(U2;Y|W V1 V2 U1)
  double bV1 = 0;   // I(V1;Y|Yt St Y1t Y2t U2t W V2)
  double bV2 = 0;   // I(V2;Y|Yt St Y1t Y2t U1t W V1)
  double bU12 = 0;  // I(U1 U2;Y|W V1 V2)
  double bV12 = 0;  // I(V1 V2;Y|Yt St Y1t Y2t W)

  static constexpr std::array<std::pair<std::string_view, double MacMiTerms::*>, 16> fields{{
      {"tFB1", &MacMiTerms::tFB1}, {"tFB2", &MacMiTerms::tFB2}, {"tFBa", &MacMiTerms::tFBa},
      {"tFBb", &MacMiTerms::tFBb}, {"d1", &MacMiTerms::d1},     {"d2", &MacMiTerms::d2},
      {"d12", &MacMiTerms::d12},   {"a1", &MacMiTerms::a1},     {"a2", &MacMiTerms::a2},
      {"bW", &MacMiTerms::bW},     {"bU1", &MacMiTerms::bU1},   {"bU2", &MacMiTerms::bU2},
      {"bV1", &MacMiTerms::bV1},   {"bV2", &MacMiTerms::bV2},   {"bU12", &MacMiTerms::bU12},
      {"bV12", &MacMiTerms::bV12},
  }};
};

/// Bounds R1 <= bR1, R2 <= bR2, R1+R2 <= bSumA, R1+R2 <= bSumB, valid when Rfb >= fbCost.
struct RegionBounds {
  double bR1 = 0;
  double bR2 = 0;
  double bSumA = 0;
  double bSumB = 0;
  double fbCost = 0;

  double sum_bound() const { return bSumA < bSumB ? bSumA : bSumB; }

  static constexpr std::array<std::pair<std::string_view, double RegionBounds::*>, 5> fields{{
      {"bR1", &RegionBounds::bR1},
      {"bR2", &RegionBounds::bR2},
      {"bSumA", &RegionBounds::bSumA},
      {"bSumB", &RegionBounds::bSumB},
      {"fbCost", &RegionBounds::fbCost},
  }};
};

RegionBounds bounds_from_terms(const MacMiTerms& t);

/// Largest per-field absolute difference.
double max_abs_delta(const RegionBounds& x, const RegionBounds& y);
double max_abs_delta(const MacMiTerms& x, const MacMiTerms& y);

/// Membership of (R1,R2) in the region described by `b`, non-strict with kRateTolerance.
bool region_contains(const RegionBounds& b, double r1, double r2, double rfb);

}  // namespace macfb
