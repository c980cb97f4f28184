#include "macfb/gaussian_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "macfb/error.hpp"

namespace macfb {

namespace {

constexpr double kStructTolerance = 1e-12;

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

bool in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

void check_ranges(const SchemeParams& p, bool check_lambda) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidParams, msg); };
  if (!finite_positive(p.P)) fail("P must be finite and > 0");
  if (!finite_positive(p.sigma2)) fail("sigma2 must be finite and > 0");
  if (!in_unit(p.alpha)) fail("alpha must lie in [0,1]");
  if (!in_unit(p.beta)) fail("beta must lie in [0,1]");
  if (!in_unit(p.theta)) fail("theta must lie in [0,1]");
  if (p.alpha + p.beta > 1.0 + kStructTolerance) fail("alpha + beta must not exceed 1");
  if (check_lambda && !(std::isfinite(p.lambda) && p.lambda >= -1.0 && p.lambda <= 1.0)) fail("lambda must lie in [-1,1]");
  if (!finite_positive(p.sigma12_sq)) fail("sigma12_sq must be finite and > 0");
  if (p.sigma1_sq.has_value() != p.sigma2_sq.has_value()) {
    fail("sigma1_sq and sigma2_sq must both be finite or both infinite");
  }
  if (p.sigma1_sq && !finite_positive(*p.sigma1_sq)) fail("sigma1_sq must be > 0");
  if (p.sigma2_sq && !finite_positive(*p.sigma2_sq)) fail("sigma2_sq must be > 0");
  if (std::isnan(p.Rfb) || p.Rfb < 0.0) fail("Rfb must be >= 0");
}

// 1 - alpha - beta, clipped against rounding.
double common_share(double alpha, double beta) { return std::max(0.0, 1.0 - alpha - beta); }

// Parallel combination of the common and a private feedback noise.
double combined_feedback_noise(double sigma12_sq, const std::optional<double>& sigma_i_sq) {
  if (!sigma_i_sq) return sigma12_sq;
  return sigma12_sq * *sigma_i_sq / (sigma12_sq + *sigma_i_sq);
}

}  // namespace

void validate_structure(const SchemeParams& p) { check_ranges(p, true); }

double lambda_max(const SchemeParams& p) {
  check_ranges(p, false);
  const double num = p.P * p.theta * p.alpha;
  return num / (p.sigma2 + p.sigma12_sq + p.P * p.alpha * p.theta + 2.0 * p.P * (1.0 - p.theta));
}

double xi_coupling(const SchemeParams& p) {
  const double d = p.sigma2 + p.sigma12_sq + 2.0 * p.P * p.alpha * p.theta + 2.0 * p.P * (1.0 - p.theta);
  return std::sqrt(p.P * p.theta * p.alpha / d);
}

XiPair solve_xi(const SchemeParams& p, XiBranch branch) {
  validate_structure(p);
  const double g = xi_coupling(p);
  double disc = (1.0 + p.lambda) * g * g - p.lambda;
  if (disc < -kStructTolerance) {
    throw Error(ErrorKind::NoRealSolution, "lambda = " + std::to_string(p.lambda) + " exceeds lambda_max = " +
                                               std::to_string(lambda_max(p)));
  }
  disc = std::max(disc, 0.0);
  XiPair xi;
  xi.xi1 = std::sqrt(1.0 + p.lambda);
  const double root = std::sqrt(disc);
  xi.xi2 = -xi.xi1 * g + (branch == XiBranch::Canonical ? root : -root);
  return xi;
}

std::pair<double, double> xi_residuals(const SchemeParams& p, const XiPair& xi) {
  const double g = xi_coupling(p);
  const double r1 = xi.xi1 * xi.xi1 + xi.xi2 * xi.xi2 + 2.0 * xi.xi1 * xi.xi2 * g - 1.0;
  const double r2 = -2.0 * xi.xi1 * xi.xi2 * g - xi.xi2 * xi.xi2 - p.lambda;
  return {std::fabs(r1), std::fabs(r2)};
}

LinearGaussianSystem build_system(const SchemeParams& p, XiBranch branch) {
  const XiPair xi = solve_xi(p, branch);
  const double k = common_share(p.alpha, p.beta);
  const bool common = p.common_feedback();
  const double sa = std::sqrt(p.alpha), sb = std::sqrt(p.beta), sk = std::sqrt(k);
  const double fresh = std::sqrt(p.P * (1.0 - p.theta)), coop = std::sqrt(p.P * p.theta);

  LinearGaussianSystem s;
  // Previous block. (t_V1, t_V2) is a unit-variance pair with correlation lambda.
  for (const char* n : {"W", "A1", "A2", "IX1", "IX2"}) s.add(tilde(n), {}, 1.0);
  s.add(tilde("Z"), {}, p.sigma2);
  s.add(tilde("Z12"), {}, p.sigma12_sq);
  if (!common) {
    s.add(tilde("Z1"), {}, *p.sigma1_sq);
    s.add(tilde("Z2"), {}, *p.sigma2_sq);
  }
  s.add(tilde("V1"), {}, 1.0);
  s.add(tilde("V2"), {{tilde("V1"), p.lambda}}, std::max(0.0, 1.0 - p.lambda * p.lambda));

  auto add_tuple = [&](auto name) {
    for (const std::string i : {"1", "2"}) {
      s.add(name("U" + i), {{name("A" + i), sa}, {name("V" + i), sb}, {name("W"), sk}});
      s.add(name("X" + i), {{name("IX" + i), fresh}, {name("U" + i), coop}});
    }
    s.add(name("Y"), {{name("X1"), 1.0}, {name("X2"), 1.0}, {name("Z"), 1.0}});
    s.add(name("Y12"), {{name("Y"), 1.0}, {name("Z12"), 1.0}});
    if (!common) {
      s.add(name("Y1"), {{name("Y"), 1.0}, {name("Z1"), 1.0}});
      s.add(name("Y2"), {{name("Y"), 1.0}, {name("Z2"), 1.0}});
    }
  };
  add_tuple([](const std::string& n) { return tilde(n); });

  // f(St): the part of t_Y12 not explained by (t_W, t_V1, t_V2), normalized.
  const double d = p.sigma2 + p.sigma12_sq + 2.0 * p.P * p.alpha * p.theta + 2.0 * p.P * (1.0 - p.theta);
  const double sd = std::sqrt(d);
  s.add("f", {{tilde("Y12"), 1.0 / sd},
              {tilde("V1"), -std::sqrt(p.beta * p.theta * p.P) / sd},
              {tilde("V2"), -std::sqrt(p.beta * p.theta * p.P) / sd},
              {tilde("W"), -2.0 * std::sqrt(k * p.theta * p.P) / sd}});
  s.add("V1", {{tilde("A1"), xi.xi1}, {"f", xi.xi2}});
  s.add("V2", {{tilde("A2"), -xi.xi1}, {"f", -xi.xi2}});

  // Current block.
  for (const char* n : {"W", "A1", "A2", "IX1", "IX2"}) s.add(n, {}, 1.0);
  s.add("Z", {}, p.sigma2);
  s.add("Z12", {}, p.sigma12_sq);
  if (!common) {
    s.add("Z1", {}, *p.sigma1_sq);
    s.add("Z2", {}, *p.sigma2_sq);
  }
  add_tuple([](const std::string& n) { return n; });
  return s;
}

RegionBounds closed_form_bounds(const SchemeParams& p) {
  validate_structure(p);
  const double P = p.P, s2 = p.sigma2, al = p.alpha, be = p.beta, th = p.theta, lam = p.lambda, s12 = p.sigma12_sq;
  const double k = common_share(al, be);
  const double kt = 1.0 - k * th;  // zero only when alpha = beta = 0 and theta = 1
  const double bl2 = be * be * th * th * lam * lam;

  RegionBounds b;
  {
    const double corr = kt > 0.0 ? be * be * th * lam * lam / kt : 0.0;
    b.fbCost = capacity(s2 / s12 + P / s12 - P * th / s12 * (k + corr));
    if (!p.common_feedback()) {
      double ratio;
      if (kt > 0.0) {
        const double num = s2 * kt + P * (kt * kt - bl2);
        const double den = (s2 + s12) * kt + P * (kt * kt - bl2);
        ratio = num / den;
      } else {
        ratio = s2 / (s2 + s12);
      }
      b.fbCost += capacity(s12 / *p.sigma1_sq * ratio) + capacity(s12 / *p.sigma2_sq * ratio);
    }
  }

  const double direct = capacity(P * (1.0 - th) / s2);
  auto relay_term = [&](const std::optional<double>& sigma_i_sq) {
    const double q = combined_feedback_noise(s12, sigma_i_sq);
    return capacity(P * th * al / (s2 + q + P * (1.0 - th)) +
                    P * th * be * (1.0 + lam) / (q + s2 + P * (1.0 - th) + P * al * th));
  };
  const double resolve_term =
      capacity(al * P * th / (2.0 * P * (1.0 - th) + s2)) +
      capacity(4.0 * P * th * k / (s2 + 2.0 * P * (1.0 - th) + 2.0 * P * th * (al + be * (1.0 + lam)))) +
      capacity(be * P * th * (2.0 * P * (1.0 - th) + s2) * (1.0 + lam) /
               ((2.0 * al * P * th + 2.0 * P * (1.0 - th) + s2) * (s2 + 2.0 * P * (1.0 - th) + al * P * th)));

  // User 1's cooperative part is learned by user 2 through (Y2, Y12), hence sigma2_sq.
  const double res1 = std::min(relay_term(p.sigma2_sq), resolve_term);
  const double res2 = std::min(relay_term(p.sigma1_sq), resolve_term);
  b.bR1 = direct + res1;
  b.bR2 = direct + res2;
  const double direct_sum = capacity(2.0 * P * (1.0 - th) / s2);
  b.bSumA = direct_sum + capacity(2.0 * P * th * (2.0 - al - be * (1.0 - lam)) / (2.0 * P * (1.0 - th) + s2));
  b.bSumB = direct_sum + res1 + res2;
  return b;
}

MacMiTerms oracle_terms(const LinearGaussianSystem& sys, bool common) {
  const VarSet st = {tilde("W"), tilde("V1"), tilde("V2"), tilde("Y12")};
  auto cat = [](std::initializer_list<VarSet> parts) {
    VarSet out;
    for (const auto& part : parts) out.insert(out.end(), part.begin(), part.end());
    return out;
  };
  const VarSet private_fb_t = common ? VarSet{} : VarSet{tilde("Y1"), tilde("Y2")};

  struct Query {
    double MacMiTerms::*field;
    VarSet a, b, c;
  };
  std::vector<Query> queries = {
      {&MacMiTerms::tFB1, {"Y12"}, {"Y"}, {"W", "X1"}},
      {&MacMiTerms::tFB2, {"Y12"}, {"Y"}, {"W", "X2"}},
      {&MacMiTerms::d1, {"X1"}, {"Y"}, {"W", "V1", "V2", "U1", "U2", "X2"}},
      {&MacMiTerms::d2, {"X2"}, {"Y"}, {"W", "V1", "V2", "U1", "U2", "X1"}},
      {&MacMiTerms::d12, {"X1", "X2"}, {"Y"}, {"W", "V1", "V2", "U1", "U2"}},
      {&MacMiTerms::a1, {"U1"}, common ? VarSet{"Y12"} : VarSet{"Y2", "Y12"},
       cat({st, common ? VarSet{} : VarSet{tilde("Y2")}, {tilde("U2"), tilde("X2"), "W", "V2", "U2", "X2"}})},
      {&MacMiTerms::a2, {"U2"}, common ? VarSet{"Y12"} : VarSet{"Y1", "Y12"},
       cat({st, common ? VarSet{} : VarSet{tilde("Y1")}, {tilde("U1"), tilde("X1"), "W", "V1", "U1", "X1"}})},
      {&MacMiTerms::bW, {"W"}, {"Y"}, {tilde("W"), tilde("Y")}},
      {&MacMiTerms::bU1, {"U1"}, {"Y"}, {"W", "V1", "V2", "U2"}},
      {&MacMiTerms::bU2, {"U2"}, {"Y"}, {"W", "V1", "V2", "U1"}},
      {&MacMiTerms::bV1, {"V1"}, {"Y"}, cat({{tilde("Y")}, st, private_fb_t, {tilde("U2"), "W", "V2"}})},
      {&MacMiTerms::bV2, {"V2"}, {"Y"}, cat({{tilde("Y")}, st, private_fb_t, {tilde("U1"), "W", "V1"}})},
      {&MacMiTerms::bU12, {"U1", "U2"}, {"Y"}, {"W", "V1", "V2"}},
      {&MacMiTerms::bV12, {"V1", "V2"}, {"Y"}, cat({{tilde("Y")}, st, private_fb_t, {"W"}})},
  };
  if (!common) {
    queries.push_back({&MacMiTerms::tFBa, {"Y"}, {"Y1"}, {"Y12", "X1", "W"}});
    queries.push_back({&MacMiTerms::tFBb, {"Y"}, {"Y2"}, {"Y12", "X2", "W"}});
  }

  MacMiTerms t;
  for (const auto& q : queries) {
    try {
      t.*(q.field) = cond_mi_gaussian(sys, q.a, q.b, q.c);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InfiniteMutualInformation) throw;
      std::string name = "?";
      for (const auto& [n, f] : MacMiTerms::fields) {
        if (f == q.field) name = std::string(n);
      }
      throw Error(ErrorKind::InfiniteMutualInformation, "term " + name + ": " + e.what());
    }
  }
  return t;
}

OracleResult oracle_bounds(const SchemeParams& p, XiBranch branch) {
  const auto sys = build_system(p, branch);
  OracleResult r;
  r.terms = oracle_terms(sys, p.common_feedback());
  r.bounds = bounds_from_terms(r.terms);
  return r;
}

bool feedback_feasible(const SchemeParams& p) {
  validate_structure(p);
  if (std::isinf(p.Rfb)) return true;
  return p.Rfb >= closed_form_bounds(p).fbCost - kRateTolerance;
}

RegionBounds decoupled_bounds(const DecoupledParams& dp) {
  SchemeParams check;
  check.P = dp.P;
  check.sigma2 = dp.sigma2;
  check.alpha = dp.alpha;
  check.theta = dp.theta;
  check.sigma12_sq = dp.sigma12_sq;
  check.sigma1_sq = dp.sigma1_sq;
  check.sigma2_sq = dp.sigma2_sq;
  check.Rfb = dp.Rfb;
  validate_structure(check);

  const bool common = !dp.sigma1_sq.has_value();
  const double sa = std::sqrt(dp.alpha), sw = std::sqrt(1.0 - dp.alpha);
  LinearGaussianSystem s;
  for (const char* n : {"W", "A1", "A2", "IX1", "IX2"}) s.add(n, {}, 1.0);
  s.add("Z", {}, dp.sigma2);
  s.add("Z12", {}, dp.sigma12_sq);
  if (!common) {
    s.add("Z1", {}, *dp.sigma1_sq);
    s.add("Z2", {}, *dp.sigma2_sq);
  }
  for (const std::string i : {"1", "2"}) {
    s.add("U" + i, {{"A" + i, sa}, {"W", sw}});
    s.add("X" + i, {{"IX" + i, std::sqrt(dp.P * (1.0 - dp.theta))}, {"U" + i, std::sqrt(dp.P * dp.theta)}});
  }
  s.add("Y", {{"X1", 1.0}, {"X2", 1.0}, {"Z", 1.0}});
  s.add("Y12", {{"Y", 1.0}, {"Z12", 1.0}});
  if (!common) {
    s.add("Y1", {{"Y", 1.0}, {"Z1", 1.0}});
    s.add("Y2", {{"Y", 1.0}, {"Z2", 1.0}});
  }

  auto mi = [&](const VarSet& a, const VarSet& b, const VarSet& c) { return cond_mi_gaussian(s, a, b, c); };
  RegionBounds r;
  r.fbCost = std::max(mi({"Y12"}, {"Y"}, {"W", "X1"}), mi({"Y12"}, {"Y"}, {"W", "X2"}));
  if (!common) r.fbCost += mi({"Y"}, {"Y1"}, {"Y12", "X1", "W"}) + mi({"Y"}, {"Y2"}, {"Y12", "X2", "W"});

  const double iw = mi({"W"}, {"Y"}, {});
  const double res1 = std::min(mi({"U1"}, {"Y"}, {"W", "U2"}) + iw,
                               mi({"U1"}, common ? VarSet{"Y12"} : VarSet{"Y2", "Y12"}, {"W", "X2"}));
  const double res2 = std::min(mi({"U2"}, {"Y"}, {"W", "U1"}) + iw,
                               mi({"U2"}, common ? VarSet{"Y12"} : VarSet{"Y1", "Y12"}, {"W", "X1"}));
  r.bR1 = mi({"X1"}, {"Y"}, {"W", "U1", "X2"}) + res1;
  r.bR2 = mi({"X2"}, {"Y"}, {"W", "U2", "X1"}) + res2;
  r.bSumB = mi({"X1", "X2"}, {"Y"}, {"W", "U1", "U2"}) + res1 + res2;
  r.bSumA = mi({"X1", "X2"}, {"Y"}, {});
  return r;
}

double sigma12_min_sq(double sigma2, double P, double Rfb) {
  if (Rfb <= 0.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(Rfb)) return 0.0;
  return (sigma2 + P) / (std::exp2(2.0 * Rfb) - 1.0);
}

SchemeParams random_scheme_params(std::mt19937_64& rng, bool common_feedback) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };
  auto fraction = [&]() {
    double u = unit(rng);
    if (u < 0.05) return 0.0;
    if (u < 0.10) return 1.0;
    return unit(rng);
  };
  SchemeParams p;
  p.P = log_uniform(0.1, 30.0);
  p.sigma2 = log_uniform(0.2, 5.0);
  p.alpha = fraction();
  p.beta = fraction() * (1.0 - p.alpha);
  p.theta = fraction();
  p.sigma12_sq = log_uniform(0.02, 20.0);
  if (!common_feedback) {
    p.sigma1_sq = log_uniform(0.02, 20.0);
    p.sigma2_sq = log_uniform(0.02, 20.0);
  }
  p.lambda = unit(rng) * lambda_max(p);
  return p;
}

}  // namespace macfb
