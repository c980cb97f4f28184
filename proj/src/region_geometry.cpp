#include "macfb/region_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "macfb/baselines.hpp"
#include "macfb/error.hpp"

namespace macfb {

namespace {

constexpr double kVertexMerge = 1e-12;

double cross(RatePoint o, RatePoint a, RatePoint b) {
  return (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1);
}

double dist_to_segment(RatePoint p, RatePoint a, RatePoint b) {
  const double dx = b.r1 - a.r1, dy = b.r2 - a.r2;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.r1 - a.r1) * dx + (p.r2 - a.r2) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.r1 - (a.r1 + t * dx), p.r2 - (a.r2 + t * dy));
}

bool close(RatePoint a, RatePoint b) {
  return std::fabs(a.r1 - b.r1) <= kVertexMerge && std::fabs(a.r2 - b.r2) <= kVertexMerge;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  v.back() = hi;
  return v;
}

// Simplex minimizer with reflection, expansion, contraction and shrink steps.
struct SimplexResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
};

SimplexResult simplex_minimize(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                               const std::vector<double>& steps, std::size_t max_evals) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> val(n + 1);
  SimplexResult res;
  auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    return f(x);
  };
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += steps[i];
  for (std::size_t i = 0; i <= n; ++i) val[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  while (res.evaluations < max_evals) {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];
    if (std::isfinite(val[best]) && std::fabs(val[worst] - val[best]) < 1e-13) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / static_cast<double>(n);
    }
    auto along = [&](double t) {
      std::vector<double> x(n);
      for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
      return x;
    };

    const auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < val[best]) {
      const auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe, val[worst] = fe;
      } else {
        pts[worst] = xr, val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = xr, val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const auto xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < std::min(fr, val[worst])) {
      pts[worst] = xc, val[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
      val[i] = eval(pts[i]);
    }
  }
  const auto it = std::min_element(val.begin(), val.end());
  res.x = pts[static_cast<std::size_t>(it - val.begin())];
  res.f = *it;
  return res;
}

template <class Fn>
void for_each_grid_point(const SweepConfig& cfg, SweepMode mode, double P, double sigma2, double Rfb, Fn&& fn) {
  const bool common = cfg.sigma1_sq.empty();
  const std::vector<double> zero = {0.0};
  const auto& betas = mode == SweepMode::Proposed ? cfg.beta : zero;
  const auto& fracs = mode == SweepMode::Proposed ? cfg.lambda_fraction : zero;
  const std::vector<double> none = {std::numeric_limits<double>::quiet_NaN()};
  const auto& s1 = common ? none : cfg.sigma1_sq;
  const auto& s2 = common ? none : cfg.sigma2_sq;

  SchemeParams p;
  p.P = P;
  p.sigma2 = sigma2;
  p.Rfb = Rfb;
  for (double a : cfg.alpha) {
    for (double b : betas) {
      if (a + b > 1.0 + 1e-12) continue;
      for (double th : cfg.theta) {
        for (double frac : fracs) {
          for (double q12 : cfg.sigma12_sq) {
            for (double q1 : s1) {
              for (double q2 : s2) {
                p.alpha = a;
                p.beta = b;
                p.theta = th;
                p.lambda = 0.0;
                p.sigma12_sq = q12;
                p.sigma1_sq = common ? std::nullopt : std::optional<double>(q1);
                p.sigma2_sq = common ? std::nullopt : std::optional<double>(q2);
                p.lambda = frac * lambda_max(p);
                fn(p);
              }
            }
          }
        }
      }
    }
  }
}

DecoupledParams as_decoupled(const SchemeParams& p) {
  return DecoupledParams{p.P, p.sigma2, p.alpha, p.theta, p.sigma12_sq, p.sigma1_sq, p.sigma2_sq, p.Rfb};
}

}  // namespace

bool RegionPolygon::contains(RatePoint p, double tol) const {
  const auto& v = vertices;
  if (v.empty()) return false;
  if (v.size() == 1) return std::hypot(p.r1 - v[0].r1, p.r2 - v[0].r2) <= tol;
  if (v.size() == 2) return dist_to_segment(p, v[0], v[1]) <= tol;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const RatePoint a = v[i], b = v[(i + 1) % v.size()];
    const double len = std::hypot(b.r1 - a.r1, b.r2 - a.r2);
    if (len == 0.0) continue;
    if (cross(a, b, p) / len < -tol) return false;
  }
  return true;
}

bool RegionPolygon::includes(const RegionPolygon& other, double tol) const {
  return std::all_of(other.vertices.begin(), other.vertices.end(), [&](RatePoint p) { return contains(p, tol); });
}

RegionPolygon polygon_from_bounds(const RegionBounds& b) {
  const double s = std::max(0.0, b.sum_bound());
  const double r1 = std::min(std::max(0.0, b.bR1), s);
  const double r2 = std::min(std::max(0.0, b.bR2), s);
  const std::vector<RatePoint> raw = {
      {0.0, 0.0}, {r1, 0.0}, {r1, std::min(r2, s - r1)}, {std::min(r1, s - r2), r2}, {0.0, r2}};
  RegionPolygon poly;
  for (const auto& p : raw) {
    if (poly.vertices.empty() || !close(poly.vertices.back(), p)) poly.vertices.push_back(p);
  }
  while (poly.vertices.size() > 1 && close(poly.vertices.back(), poly.vertices.front())) poly.vertices.pop_back();
  return poly;
}

RegionPolygon convex_hull(std::span<const RatePoint> points) {
  std::vector<RatePoint> pts;
  pts.reserve(3 * points.size() + 1);
  pts.push_back({0.0, 0.0});
  double scale = 0.0;
  for (const auto& q : points) {
    const RatePoint p{std::max(q.r1, 0.0), std::max(q.r2, 0.0)};
    pts.push_back(p);
    pts.push_back({p.r1, 0.0});
    pts.push_back({0.0, p.r2});
    scale = std::max({scale, p.r1, p.r2});
  }
  std::sort(pts.begin(), pts.end(), [](RatePoint a, RatePoint b) { return a.r1 < b.r1 || (a.r1 == b.r1 && a.r2 < b.r2); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  RegionPolygon poly;
  if (pts.size() < 3) {
    poly.vertices = pts;
    return poly;
  }
  // Andrew's monotone chain; near-collinear turns are dropped.
  const double tol = 1e-12 * scale * scale;
  std::vector<RatePoint> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= tol) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= tol) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  poly.vertices = std::move(hull);
  return poly;
}

std::vector<RatePoint> pareto_frontier(const RegionPolygon& poly) {
  std::vector<RatePoint> out;
  for (const auto& p : poly.vertices) {
    const bool dominated = std::any_of(poly.vertices.begin(), poly.vertices.end(), [&](RatePoint q) {
      return q.r1 > p.r1 + kVertexMerge && q.r2 > p.r2 + kVertexMerge;
    });
    if (!dominated) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](RatePoint a, RatePoint b) { return a.r1 < b.r1 || (a.r1 == b.r1 && a.r2 > b.r2); });
  return out;
}

std::vector<double> default_sigma12_grid(double P, double sigma2, double Rfb) {
  const double total = sigma2 + P;
  const double m = sigma12_min_sq(sigma2, P, Rfb);
  double lo = std::isinf(m) ? total / 100.0 : 0.25 * m;
  lo = std::max(lo, total * 1e-6);
  const double hi = std::max(4.0 * total, 16.0 * lo);
  std::vector<double> grid = linspace(std::log(lo), std::log(hi), 16);
  for (auto& g : grid) g = std::exp(g);
  return grid;
}

SweepConfig SweepConfig::defaults(double P, double sigma2, double Rfb) {
  SweepConfig cfg;
  cfg.alpha = linspace(0.0, 1.0, 21);
  cfg.beta = linspace(0.0, 1.0, 21);
  cfg.theta = linspace(0.0, 1.0, 21);
  cfg.lambda_fraction = {0.0, 0.25, 0.5, 0.75, 0.99};
  cfg.sigma12_sq = default_sigma12_grid(P, sigma2, Rfb);
  return cfg;
}

void SweepConfig::validate(SweepMode mode) const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidParams, "sweep config: " + m); };
  auto unit = [&](const std::vector<double>& g, const char* name) {
    if (g.empty()) fail(std::string(name) + " grid is empty");
    for (double x : g) {
      if (!(x >= 0.0 && x <= 1.0)) fail(std::string(name) + " values must lie in [0,1]");
    }
  };
  auto positive = [&](const std::vector<double>& g, const char* name) {
    for (double x : g) {
      if (!(std::isfinite(x) && x > 0.0)) fail(std::string(name) + " values must be finite and > 0");
    }
  };
  unit(alpha, "alpha");
  unit(theta, "theta");
  if (mode == SweepMode::Proposed) {
    unit(beta, "beta");
    if (lambda_fraction.empty()) fail("lambda_fraction grid is empty");
    for (double x : lambda_fraction) {
      if (!(x >= -1.0 && x <= 1.0)) fail("lambda_fraction values must lie in [-1,1]");
    }
  }
  if (sigma12_sq.empty()) fail("sigma12_sq grid is empty");
  positive(sigma12_sq, "sigma12_sq");
  positive(sigma1_sq, "sigma1_sq");
  positive(sigma2_sq, "sigma2_sq");
  if (sigma1_sq.empty() != sigma2_sq.empty()) fail("sigma1_sq and sigma2_sq grids must both be given or both omitted");
  if (refine_iterations < 0) fail("refine_iterations must be >= 0");
}

SweepResult sweep_regions(const SweepConfig& cfg, double Rfb, double P, double sigma2, SweepMode mode) {
  cfg.validate(mode);
  SweepResult res;
  for_each_grid_point(cfg, mode, P, sigma2, Rfb, [&](const SchemeParams& p) {
    ++res.evaluated;
    const RegionBounds b = mode == SweepMode::Proposed ? closed_form_bounds(p) : decoupled_bounds(as_decoupled(p));
    if (!(Rfb >= b.fbCost - kRateTolerance)) return;
    ++res.feasible;
    for (const auto& v : polygon_from_bounds(b).vertices) res.points.push_back(v);
  });
  if (res.feasible == 0) {
    res.fallback = true;
    res.hull = polygon_from_bounds(nofb_pentagon({P, sigma2}));
  } else {
    res.hull = convex_hull(res.points);
  }
  return res;
}

double sum_rate_objective(const SchemeParams& p) {
  try {
    const RegionBounds b = closed_form_bounds(p);
    if (!std::isinf(p.Rfb) && p.Rfb < b.fbCost - kRateTolerance) return -std::numeric_limits<double>::infinity();
    if (p.lambda > lambda_max(p)) return -std::numeric_limits<double>::infinity();
    return b.sum_bound();
  } catch (const Error&) {
    return -std::numeric_limits<double>::infinity();
  }
}

OptResult optimize_sum_rate(double P, double sigma2, double Rfb, bool common_feedback, const SweepConfig& cfg_in) {
  SweepConfig cfg = cfg_in;
  if (common_feedback) {
    cfg.sigma1_sq.clear();
    cfg.sigma2_sq.clear();
  } else if (cfg.sigma1_sq.empty()) {
    cfg.sigma1_sq = cfg.sigma12_sq;
    cfg.sigma2_sq = cfg.sigma12_sq;
  }
  cfg.validate(SweepMode::Proposed);

  OptResult res;
  res.value = -std::numeric_limits<double>::infinity();
  for_each_grid_point(cfg, SweepMode::Proposed, P, sigma2, Rfb, [&](const SchemeParams& p) {
    ++res.evaluations;
    const double v = sum_rate_objective(p);
    if (v > res.value) {
      res.value = v;
      res.best = p;
      res.found_feasible = true;
      res.trace.push_back({p, v});
    }
  });
  res.grid_value = res.value;
  if (!res.found_feasible) return res;

  // Local refinement in (alpha, beta, theta, lambda, log sigma12^2[, log sigma1^2, log sigma2^2]).
  auto project = [&](const std::vector<double>& z) {
    SchemeParams p = res.best;
    p.alpha = std::clamp(z[0], 0.0, 1.0);
    p.beta = std::clamp(z[1], 0.0, 1.0);
    if (p.alpha + p.beta > 1.0) {
      const double s = p.alpha + p.beta;
      p.alpha /= s;
      p.beta = std::min(p.beta / s, 1.0 - p.alpha);
    }
    p.theta = std::clamp(z[2], 0.0, 1.0);
    p.sigma12_sq = std::exp(std::clamp(z[4], -40.0, 40.0));
    if (!common_feedback) {
      p.sigma1_sq = std::exp(std::clamp(z[5], -40.0, 40.0));
      p.sigma2_sq = std::exp(std::clamp(z[6], -40.0, 40.0));
    }
    p.lambda = std::clamp(z[3], -1.0, lambda_max(p) - 1e-12);
    return p;
  };
  auto encode = [&](const SchemeParams& p) {
    std::vector<double> z = {p.alpha, p.beta, p.theta, p.lambda, std::log(p.sigma12_sq)};
    if (!common_feedback) {
      z.push_back(std::log(*p.sigma1_sq));
      z.push_back(std::log(*p.sigma2_sq));
    }
    return z;
  };
  auto objective = [&](const std::vector<double>& z) {
    const double v = sum_rate_objective(project(z));
    return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
  };

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> coin(0, 1);
  constexpr int kRounds = 3;
  const std::size_t per_round = static_cast<std::size_t>(cfg.refine_iterations) / kRounds;
  for (int round = 0; round < kRounds && per_round > 0; ++round) {
    const auto z0 = encode(res.best);
    const double shrink = std::ldexp(1.0, -round);
    std::vector<double> steps = {0.05, 0.05, 0.05, 0.05 * (lambda_max(res.best) + 0.1), 0.2};
    if (!common_feedback) steps.insert(steps.end(), {0.2, 0.2});
    for (auto& s : steps) s *= (coin(rng) ? 1.0 : -1.0) * shrink;
    const auto r = simplex_minimize(objective, z0, steps, per_round);
    res.evaluations += r.evaluations;
    if (std::isfinite(r.f) && -r.f > res.value) {
      const SchemeParams p = project(r.x);
      const double v = sum_rate_objective(p);
      if (v > res.value) {
        res.best = p;
        res.value = v;
        res.trace.push_back({p, v});
      }
    }
  }

  res.oracle_delta = max_abs_delta(closed_form_bounds(res.best), oracle_bounds(res.best).bounds);
  return res;
}

}  // namespace macfb
