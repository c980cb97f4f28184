#include "macfb/discrete_theorem.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <Eigen/Dense>

#include "macfb/error.hpp"

namespace macfb {

namespace {

std::vector<const FactorKernel*> block_chain(const ChannelSpec& c, const AuxKernels& k, bool with_pv) {
  std::vector<const FactorKernel*> chain = {&k.pW};
  if (with_pv) chain.push_back(&k.pV);
  for (const FactorKernel* f : {&k.pU1, &k.pU2, &k.pX1, &k.pX2, &c.law, &k.pY12, &k.pY1, &k.pY2}) chain.push_back(f);
  return chain;
}

JointPmf apply_chain(JointPmf joint, const std::vector<const FactorKernel*>& chain, bool as_tilde) {
  for (const FactorKernel* f : chain) joint = as_tilde ? f->renamed(tilde).apply(joint) : f->apply(joint);
  return joint;
}

// Tilde block followed by the two linkage kernels.
JointPmf tilde_with_linkage(const ChannelSpec& c, const AuxKernels& k, const FactorKernel& pv) {
  JointPmf joint = pv.renamed(tilde).apply(k.pW.renamed(tilde).apply(JointPmf()));
  auto chain = block_chain(c, k, false);
  chain.erase(chain.begin());
  joint = apply_chain(std::move(joint), chain, true);
  joint = k.link1.apply(joint);
  return k.link2.apply(joint);
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return 0.5 * s;
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ",") + n;
  return out;
}

}  // namespace

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

const std::vector<std::string>& block_variables() {
  static const std::vector<std::string> vars = {"W", "V1", "V2", "U1", "U2", "X1", "X2", "Y", "Y12", "Y1", "Y2"};
  return vars;
}

ValidationReport validate(const ChannelSpec& c, const AuxKernels& k) {
  ValidationReport report;
  bool structural_ok = true;

  std::map<std::string, std::size_t> card;
  auto record_outputs = [&](const FactorKernel& f) {
    for (const auto& o : f.outputs()) card[o.name] = o.card;
  };
  for (const FactorKernel* f : block_chain(c, k, true)) record_outputs(*f);
  for (const auto& [name, n] : std::map<std::string, std::size_t>(card)) card[tilde(name)] = n;

  struct Expect {
    std::string label;
    const FactorKernel* kernel;
    std::set<std::string> outputs;
    std::set<std::string> parents;
  };
  const std::vector<Expect> expected = {
      {"channel P(Y|X1X2)", &c.law, {"Y"}, {"X1", "X2"}},
      {"P(W)", &k.pW, {"W"}, {}},
      {"P(V1V2)", &k.pV, {"V1", "V2"}, {}},
      {"P(U1|W V1)", &k.pU1, {"U1"}, {"W", "V1"}},
      {"P(U2|W V2)", &k.pU2, {"U2"}, {"W", "V2"}},
      {"P(X1|W U1 V1)", &k.pX1, {"X1"}, {"W", "U1", "V1"}},
      {"P(X2|W U2 V2)", &k.pX2, {"X2"}, {"W", "U2", "V2"}},
      {"P(Y12|Y W)", &k.pY12, {"Y12"}, {"Y", "W"}},
      {"P(Y1|W Y Y12)", &k.pY1, {"Y1"}, {"W", "Y", "Y12"}},
      {"P(Y2|W Y Y12)", &k.pY2, {"Y2"}, {"W", "Y", "Y12"}},
      {"P(V1|St U1t)", &k.link1, {"V1"}, {tilde("W"), tilde("V1"), tilde("V2"), tilde("Y12"), tilde("U1")}},
      {"P(V2|St U2t)", &k.link2, {"V2"}, {tilde("W"), tilde("V1"), tilde("V2"), tilde("Y12"), tilde("U2")}},
  };

  for (const auto& e : expected) {
    ValidationCheck shape{"shape " + e.label, true, 0.0, ""};
    std::set<std::string> outs;
    for (const auto& o : e.kernel->outputs()) outs.insert(o.name);
    const std::set<std::string> pars(e.kernel->parents().begin(), e.kernel->parents().end());
    if (outs != e.outputs || pars != e.parents) {
      shape.passed = false;
      shape.detail = "unexpected variables (parents: " + join(e.kernel->parents()) + ")";
    } else {
      std::size_t configs = 1;
      for (const auto& p : e.kernel->parents()) configs *= card.count(p) ? card[p] : 0;
      if (configs != e.kernel->parent_configs()) {
        shape.passed = false;
        shape.detail = "table covers " + std::to_string(e.kernel->parent_configs()) + " parent configurations, expected " +
                       std::to_string(configs);
      }
    }
    structural_ok = structural_ok && shape.passed;
    report.checks.push_back(shape);

    const double err = e.kernel->normalization_error();
    report.checks.push_back({"normalized " + e.label, err <= kKernelTolerance, err, ""});
    structural_ok = structural_ok && err <= kKernelTolerance;
  }

  {
    ValidationCheck alph{"channel alphabets", true, 0.0, ""};
    if (card["X1"] != c.card_x1 || card["X2"] != c.card_x2 || card["Y"] != c.card_y) {
      alph.passed = false;
      alph.detail = "input/output cardinalities disagree with the channel declaration";
    }
    structural_ok = structural_ok && alph.passed;
    report.checks.push_back(alph);
  }

  ValidationCheck link{"linkage consistency (induced V1V2 marginal)", false, 0.0, ""};
  if (!structural_ok) {
    link.detail = "skipped: structural errors";
  } else {
    const JointPmf induced = marginalize(tilde_with_linkage(c, k, k.pV), {"V1", "V2"});
    const JointPmf declared = marginalize(k.pV.apply(JointPmf()), {"V1", "V2"});
    link.deviation = total_variation(induced.probs(), declared.probs());
    link.passed = link.deviation <= kLinkageTolerance;
    link.detail = "total variation distance";
  }
  report.checks.push_back(link);
  return report;
}

JointPmf assemble_single_block(const ChannelSpec& c, const AuxKernels& k) {
  return apply_chain(JointPmf(), block_chain(c, k, true), false);
}

JointPmf assemble_two_block_joint(const ChannelSpec& c, const AuxKernels& k) {
  const auto report = validate(c, k);
  if (!report.ok()) {
    std::string failed;
    for (const auto& chk : report.checks) {
      if (!chk.passed) failed += (failed.empty() ? "" : "; ") + chk.name;
    }
    throw Error(ErrorKind::InconsistentKernels, failed);
  }
  JointPmf joint = tilde_with_linkage(c, k, k.pV);
  return apply_chain(std::move(joint), block_chain(c, k, false), false);
}

MacMiTerms theorem_terms(const JointPmf& joint) {
  EntropyTable h(joint);
  const VarSet st = {tilde("W"), tilde("V1"), tilde("V2"), tilde("Y12")};
  auto with = [&](VarSet base, const VarSet& extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
  };
  MacMiTerms t;
  t.tFB1 = h.cond_mi({"Y12"}, {"Y"}, {"W", "X1"});
  t.tFB2 = h.cond_mi({"Y12"}, {"Y"}, {"W", "X2"});
  t.tFBa = h.cond_mi({"Y"}, {"Y1"}, {"Y12", "X1", "W"});
  t.tFBb = h.cond_mi({"Y"}, {"Y2"}, {"Y12", "X2", "W"});
  t.d1 = h.cond_mi({"X1"}, {"Y"}, {"W", "V1", "V2", "U1", "U2", "X2"});
  t.d2 = h.cond_mi({"X2"}, {"Y"}, {"W", "V1", "V2", "U1", "U2", "X1"});
  t.d12 = h.cond_mi({"X1", "X2"}, {"Y"}, {"W", "V1", "V2", "U1", "U2"});
  t.a1 = h.cond_mi({"U1"}, {"Y2", "Y12"}, with(st, {tilde("Y2"), tilde("U2"), tilde("X2"), "W", "V2", "U2", "X2"}));
  t.a2 = h.cond_mi({"U2"}, {"Y1", "Y12"}, with(st, {tilde("Y1"), tilde("U1"), tilde("X1"), "W", "V1", "U1", "X1"}));
  t.bW = h.cond_mi({"W"}, {"Y"}, {tilde("W"), tilde("Y")});
  t.bU1 = h.cond_mi({"U1"}, {"Y"}, {"W", "V1", "V2", "U2"});
  t.bU2 = h.cond_mi({"U2"}, {"Y"}, {"W", "V1", "V2", "U1"});
  const VarSet resolved = with({tilde("Y")}, with(st, {tilde("Y1"), tilde("Y2")}));
  t.bV1 = h.cond_mi({"V1"}, {"Y"}, with(resolved, {tilde("U2"), "W", "V2"}));
  t.bV2 = h.cond_mi({"V2"}, {"Y"}, with(resolved, {tilde("U1"), "W", "V1"}));
  t.bU12 = h.cond_mi({"U1", "U2"}, {"Y"}, {"W", "V1", "V2"});
  t.bV12 = h.cond_mi({"V1", "V2"}, {"Y"}, with(resolved, {"W"}));
  return t;
}

RegionBounds decoupled_bounds_discrete(const JointPmf& single) {
  EntropyTable h(single);
  RegionBounds r;
  r.fbCost = std::max(h.cond_mi({"Y12"}, {"Y"}, {"W", "X1"}), h.cond_mi({"Y12"}, {"Y"}, {"W", "X2"})) +
             h.cond_mi({"Y"}, {"Y1"}, {"Y12", "X1", "W"}) + h.cond_mi({"Y"}, {"Y2"}, {"Y12", "X2", "W"});
  const double iw = h.cond_mi({"W"}, {"Y"}, {});
  const double res1 = std::min(h.cond_mi({"U1"}, {"Y"}, {"W", "U2"}) + iw, h.cond_mi({"U1"}, {"Y2", "Y12"}, {"W", "X2"}));
  const double res2 = std::min(h.cond_mi({"U2"}, {"Y"}, {"W", "U1"}) + iw, h.cond_mi({"U2"}, {"Y1", "Y12"}, {"W", "X1"}));
  r.bR1 = h.cond_mi({"X1"}, {"Y"}, {"W", "U1", "X2"}) + res1;
  r.bR2 = h.cond_mi({"X2"}, {"Y"}, {"W", "U2", "X1"}) + res2;
  r.bSumB = h.cond_mi({"X1", "X2"}, {"Y"}, {"W", "U1", "U2"}) + res1 + res2;
  r.bSumA = h.cond_mi({"X1", "X2"}, {"Y"}, {});
  return r;
}

std::optional<RateSplitWitness> inner_feasible(const MacMiTerms& t, double r1, double r2, double rfb) {
  const double eps = kRateTolerance;
  if (r1 < -eps || r2 < -eps) return std::nullopt;
  if (rfb < std::max(t.tFB1, t.tFB2) + t.tFBa + t.tFBb - eps) return std::nullopt;

  // R1' range from the per-user constraints, likewise R2'.
  const double lo1 = std::max(0.0, r1 - t.d1);
  const double hi1 = std::min({t.a1, t.bW + t.bU1 + t.bV1, std::max(r1, 0.0)});
  const double lo2 = std::max(0.0, r2 - t.d2);
  const double hi2 = std::min({t.a2, t.bW + t.bU2 + t.bV2, std::max(r2, 0.0)});
  if (lo1 > hi1 + eps || lo2 > hi2 + eps) return std::nullopt;

  // R1' + R2' must lie in [r1 + r2 - d12, bW + bU12 + bV12] as well.
  const double sum_lo = std::max(lo1 + lo2, r1 + r2 - t.d12);
  const double sum_hi = std::min(hi1 + hi2, t.bW + t.bU12 + t.bV12);
  if (sum_lo > sum_hi + eps) return std::nullopt;

  RateSplitWitness w;
  const double s = sum_lo;
  w.r1p = std::clamp(s - lo2, lo1, std::max(lo1, hi1));
  w.r2p = std::max(s - w.r1p, 0.0);
  w.r0 = t.bW / 2.0;
  w.r0_degenerate = t.bW <= 0.0;
  return w;
}

EquivalenceReport region_equivalence_check(const MacMiTerms& t, double rfb, std::size_t samples, std::uint64_t seed) {
  if (t.d1 + t.d2 < t.d12 - 1e-10) {
    throw Error(ErrorKind::InvalidParams, "terms violate d1 + d2 >= d12");
  }
  const RegionBounds b = bounds_from_terms(t);
  const double margin = 0.1 * std::max({b.bR1, b.bR2, 0.0}) + 1e-3;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u1(0.0, std::max(b.bR1, 0.0) + margin);
  std::uniform_real_distribution<double> u2(0.0, std::max(b.bR2, 0.0) + margin);

  EquivalenceReport report;
  report.samples = samples;
  for (std::size_t i = 0; i < samples; ++i) {
    const double r1 = u1(rng), r2 = u2(rng);
    const double gap = std::min({std::fabs(r1 - b.bR1), std::fabs(r2 - b.bR2), std::fabs(r1 + r2 - b.bSumA),
                                 std::fabs(r1 + r2 - b.bSumB)});
    if (gap < kBoundaryBand) {
      ++report.in_band;
      continue;
    }
    const bool outer = region_contains(b, r1, r2, rfb);
    const bool inner = inner_feasible(t, r1, r2, rfb).has_value();
    if (outer) ++report.inside;
    if (outer != inner) report.disagreements.push_back({r1, r2, outer, inner});
  }
  return report;
}

FactorKernel random_kernel(std::mt19937_64& rng, std::vector<Axis> outputs, std::vector<std::string> parents,
                           std::size_t parent_configs) {
  std::size_t out = 1;
  for (const auto& o : outputs) out *= o.card;
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> table(out * parent_configs);
  for (std::size_t cfg = 0; cfg < parent_configs; ++cfg) {
    double sum = 0.0;
    for (std::size_t j = 0; j < out; ++j) sum += table[cfg * out + j] = expo(rng) + 1e-3;
    // Normalize then put the rounding residue on the largest entry.
    for (std::size_t j = 0; j < out; ++j) table[cfg * out + j] /= sum;
    double acc = 0.0;
    std::size_t big = 0;
    for (std::size_t j = 0; j < out; ++j) {
      acc += table[cfg * out + j];
      if (table[cfg * out + j] > table[cfg * out + big]) big = j;
    }
    table[cfg * out + big] += 1.0 - acc;
  }
  return FactorKernel(std::move(outputs), std::move(parents), std::move(table));
}

std::pair<ChannelSpec, AuxKernels> random_instance(std::mt19937_64& rng, const InstanceShape& s) {
  auto kern = [&](std::vector<Axis> outs, std::vector<std::string> parents, std::size_t configs) {
    return random_kernel(rng, std::move(outs), std::move(parents), configs);
  };
  ChannelSpec c{s.x1, s.x2, s.y, kern({{"Y", s.y}}, {"X1", "X2"}, s.x1 * s.x2)};
  AuxKernels k{
      kern({{"W", s.w}}, {}, 1),
      FactorKernel({{"V1", s.v1}, {"V2", s.v2}}, {}, std::vector<double>(s.v1 * s.v2, 1.0 / static_cast<double>(s.v1 * s.v2))),
      kern({{"U1", s.u1}}, {"W", "V1"}, s.w * s.v1),
      kern({{"U2", s.u2}}, {"W", "V2"}, s.w * s.v2),
      kern({{"X1", s.x1}}, {"W", "U1", "V1"}, s.w * s.u1 * s.v1),
      kern({{"X2", s.x2}}, {"W", "U2", "V2"}, s.w * s.u2 * s.v2),
      kern({{"Y12", s.y12}}, {"Y", "W"}, s.y * s.w),
      kern({{"Y1", s.y1}}, {"W", "Y", "Y12"}, s.w * s.y * s.y12),
      kern({{"Y2", s.y2}}, {"W", "Y", "Y12"}, s.w * s.y * s.y12),
      kern({{"V1", s.v1}}, {tilde("W"), tilde("V1"), tilde("V2"), tilde("Y12"), tilde("U1")},
           s.w * s.v1 * s.v2 * s.y12 * s.u1),
      kern({{"V2", s.v2}}, {tilde("W"), tilde("V1"), tilde("V2"), tilde("Y12"), tilde("U2")},
           s.w * s.v1 * s.v2 * s.y12 * s.u2),
  };

  // P(V1V2) must be stationary for the block-to-block transition induced by
  // the linkage kernels: solve pi = pi K.
  const std::size_t n = s.v1 * s.v2;
  Eigen::MatrixXd trans(n, n);
  for (std::size_t from = 0; from < n; ++from) {
    std::vector<double> point(n, 0.0);
    point[from] = 1.0;
    const FactorKernel pv({{"V1", s.v1}, {"V2", s.v2}}, {}, point);
    const JointPmf next = marginalize(tilde_with_linkage(c, k, pv), {"V1", "V2"});
    for (std::size_t to = 0; to < n; ++to) trans(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to)) = next.probs()[to];
  }
  Eigen::MatrixXd lhs = trans.transpose() - Eigen::MatrixXd::Identity(n, n);
  lhs.row(0).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(0) = 1.0;
  Eigen::VectorXd pi = lhs.fullPivLu().solve(rhs);
  std::vector<double> stationary(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += stationary[i] = std::max(pi(static_cast<Eigen::Index>(i)), 0.0);
  for (auto& q : stationary) q /= sum;
  k.pV = FactorKernel({{"V1", s.v1}, {"V2", s.v2}}, {}, stationary);
  return {std::move(c), std::move(k)};
}

AuxKernels degenerate_aux(const std::vector<double>& px1, const std::vector<double>& px2, std::size_t card_y) {
  auto point = [](const std::string& name, std::vector<std::string> parents, std::size_t configs) {
    return FactorKernel({{name, 1}}, std::move(parents), std::vector<double>(configs, 1.0));
  };
  return AuxKernels{
      point("W", {}, 1),
      FactorKernel({{"V1", 1}, {"V2", 1}}, {}, {1.0}),
      point("U1", {"W", "V1"}, 1),
      point("U2", {"W", "V2"}, 1),
      FactorKernel({{"X1", px1.size()}}, {"W", "U1", "V1"}, px1),
      FactorKernel({{"X2", px2.size()}}, {"W", "U2", "V2"}, px2),
      point("Y12", {"Y", "W"}, card_y),
      point("Y1", {"W", "Y", "Y12"}, card_y),
      point("Y2", {"W", "Y", "Y12"}, card_y),
      point("V1", {tilde("W"), tilde("V1"), tilde("V2"), tilde("Y12"), tilde("U1")}, 1),
      point("V2", {tilde("W"), tilde("V1"), tilde("V2"), tilde("Y12"), tilde("U2")}, 1),
  };
}

}  // namespace macfb
