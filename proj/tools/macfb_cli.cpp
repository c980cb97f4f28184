// Command-line front end: region evaluation, discrete theorem evaluation,
// baseline comparison sweeps, the feedback-noise conjecture scan and self checks.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "macfb/baselines.hpp"
#include "macfb/discrete_theorem.hpp"
#include "macfb/error.hpp"
#include "macfb/gaussian_scheme.hpp"
#include "macfb/io.hpp"
#include "macfb/region_geometry.hpp"

using namespace macfb;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsage = 2;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Globals {
  std::string input;
  std::string output;
  std::uint64_t seed = 1;
  double tolerance = 1e-6;
};

[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::Schema, msg); }

double parse_rate(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "Inf") return kInf;
  double v = 0;
  std::size_t used = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    usage("not a number: '" + s + "'");
  }
  if (used != s.size() || std::isnan(v)) usage("not a number: '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rate(item));
  if (out.empty()) usage("empty list");
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_text_file(path, text);
  }
}

std::string frontier_csv(const std::vector<RatePoint>& pts) {
  std::string out = "R1,R2\n";
  for (const auto& p : pts) out += io::format_number(p.r1) + "," + io::format_number(p.r2) + "\n";
  return out;
}

json points_json(const std::vector<RatePoint>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({p.r1, p.r2});
  return a;
}

std::string sibling_csv(const std::string& json_path) {
  const auto dot = json_path.find_last_of('.');
  const auto slash = json_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return json_path + ".csv";
  return json_path.substr(0, dot) + ".csv";
}

int cmd_gauss_region(const Globals& g, const std::string& csv_path) {
  if (g.input.empty()) usage("gauss-region needs --input");
  const SchemeParams p = io::params_from_json(io::read_json_file(g.input));

  json report;
  report["params"] = io::to_json(p);
  const double lmax = lambda_max(p);
  const bool lambda_ok = p.lambda <= lmax;
  report["lambda_max"] = lmax;
  report["lambda_feasible"] = lambda_ok;

  const RegionBounds closed = closed_form_bounds(p);
  const bool fb_ok = feedback_feasible(p);
  report["feedback_feasible"] = fb_ok;
  report["fbCost"] = closed.fbCost;
  report["bounds_closed_form"] = io::to_json(closed);

  bool agree = true;
  if (lambda_ok) {
    const XiPair xi = solve_xi(p);
    report["xi"] = {{"xi1", xi.xi1}, {"xi2", xi.xi2}};
    const OracleResult o = oracle_bounds(p);
    report["oracle_terms"] = io::to_json(o.terms);
    report["bounds_oracle"] = io::to_json(o.bounds);
    json deltas = json::object();
    for (const auto& [name, field] : RegionBounds::fields) deltas[std::string(name)] = closed.*field - o.bounds.*field;
    report["deltas"] = deltas;
    const double d = max_abs_delta(closed, o.bounds);
    report["max_abs_delta_bits"] = d;
    agree = d <= g.tolerance;
  } else {
    report["xi"] = nullptr;
    report["oracle_terms"] = nullptr;
    report["bounds_oracle"] = nullptr;
    report["max_abs_delta_bits"] = nullptr;
  }
  report["tolerance"] = g.tolerance;
  report["agreement_ok"] = agree;

  const auto frontier = pareto_frontier(polygon_from_bounds(closed));
  report["frontier"] = points_json(frontier);

  emit(g.output, report.dump(2) + "\n");
  std::string csv = csv_path;
  if (csv.empty() && !g.output.empty() && g.output != "-") csv = sibling_csv(g.output);
  if (!csv.empty()) io::write_text_file(csv, frontier_csv(frontier));

  if (!lambda_ok) std::cerr << "lambda exceeds lambda_max = " << lmax << "\n";
  if (!fb_ok) std::cerr << "feedback cost " << closed.fbCost << " exceeds Rfb\n";
  if (!agree) std::cerr << "closed form and oracle disagree beyond " << g.tolerance << " bits\n";
  return lambda_ok && fb_ok && agree ? kOk : kDomainFailure;
}

int cmd_discrete_eval(const Globals& g, const std::string& channel_path) {
  if (channel_path.empty() || g.input.empty()) usage("discrete-eval needs --channel and --input (kernels file)");
  const ChannelSpec c = io::channel_from_json(io::read_json_file(channel_path));
  const json kj = io::read_json_file(g.input);
  const AuxKernels k = io::aux_from_json(kj);

  double rfb = kInf;
  if (kj.contains("Rfb") && !kj.at("Rfb").is_null()) {
    if (!kj.at("Rfb").is_number()) usage("'Rfb' must be a number or null");
    rfb = kj.at("Rfb").get<double>();
  }
  std::vector<RatePoint> probes;
  if (kj.contains("probes")) {
    for (const auto& pr : kj.at("probes")) {
      if (!pr.is_array() || pr.size() != 2 || !pr[0].is_number() || !pr[1].is_number()) {
        usage("each probe must be [R1, R2]");
      }
      probes.push_back({pr[0].get<double>(), pr[1].get<double>()});
    }
  }

  json report;
  const ValidationReport v = validate(c, k);
  report["validation"] = io::to_json(v);
  if (!v.ok()) {
    emit(g.output, report.dump(2) + "\n");
    for (const auto& chk : v.checks) {
      if (!chk.passed) std::cerr << "failed: " << chk.name << " (deviation " << chk.deviation << ")\n";
    }
    return kDomainFailure;
  }
  const JointPmf joint = assemble_two_block_joint(c, k);
  const MacMiTerms t = theorem_terms(joint);
  const RegionBounds b = bounds_from_terms(t);
  report["joint_entries"] = joint.size();
  report["terms"] = io::to_json(t);
  report["bounds"] = io::to_json(b);
  report["Rfb"] = std::isfinite(rfb) ? json(rfb) : json(nullptr);
  report["feedback_feasible"] = rfb >= b.fbCost - kRateTolerance;
  json verdicts = json::array();
  for (const auto& p : probes) {
    const auto w = inner_feasible(t, p.r1, p.r2, rfb);
    json e{{"R1", p.r1}, {"R2", p.r2}, {"region_member", region_contains(b, p.r1, p.r2, rfb)}, {"feasible", w.has_value()}};
    e["witness"] = w ? json{{"R1p", w->r1p}, {"R2p", w->r2p}, {"R0", w->r0}, {"R0_degenerate", w->r0_degenerate}}
                     : json(nullptr);
    verdicts.push_back(e);
  }
  report["probes"] = verdicts;
  emit(g.output, report.dump(2) + "\n");
  return kOk;
}

SweepConfig load_sweep(const Globals& g, double P, double sigma2, double rfb) {
  SweepConfig cfg = SweepConfig::defaults(P, sigma2, rfb);
  cfg.seed = g.seed;
  if (!g.input.empty()) cfg = io::sweep_config_from_json(io::read_json_file(g.input), cfg);
  return cfg;
}

void check_gaussian(double P, double sigma2) {
  if (!(std::isfinite(P) && P > 0 && std::isfinite(sigma2) && sigma2 > 0)) usage("P and sigma2 must be finite and > 0");
}

int cmd_fig2(const Globals& g, double P, double sigma2, const std::string& rfb_text) {
  check_gaussian(P, sigma2);
  const double rfb = parse_rate(rfb_text);
  if (!(rfb >= 0)) usage("Rfb must be >= 0");
  SweepConfig cfg = load_sweep(g, P, sigma2, rfb);
  cfg.sigma1_sq.clear();
  cfg.sigma2_sq.clear();
  try {
    cfg.validate(SweepMode::Proposed);
  } catch (const Error& e) {
    usage(e.what());
  }

  const GaussianMacParams gm{P, sigma2};
  const double oz = ozarow_sum_capacity(gm).sum_bits;
  const double coop = cooperation_sum_bound(gm);
  const SweepResult prop = sweep_regions(cfg, rfb, P, sigma2, SweepMode::Proposed);
  const SweepResult dec = sweep_regions(cfg, rfb, P, sigma2, SweepMode::Decoupled);

  std::string csv = "curve,R1,R2\n";
  auto rows = [&](const char* label, const std::vector<RatePoint>& pts) {
    for (const auto& p : pts) csv += io::csv_row(label, {p.r1, p.r2});
  };
  rows("nofb", pareto_frontier(polygon_from_bounds(nofb_pentagon(gm))));
  rows("ozarow_sum", {{0.0, oz}, {oz, 0.0}});
  rows("coop_sum", {{0.0, coop}, {coop, 0.0}});
  rows("proposed", pareto_frontier(prop.hull));
  rows("decoupled", pareto_frontier(dec.hull));
  emit(g.output, csv);

  json summary{{"P", P},
               {"sigma2", sigma2},
               {"Rfb", std::isfinite(rfb) ? json(rfb) : json(nullptr)},
               {"ozarow_sum", oz},
               {"coop_sum", coop},
               {"proposed", {{"evaluated", prop.evaluated}, {"feasible", prop.feasible}, {"fallback", prop.fallback}}},
               {"decoupled", {{"evaluated", dec.evaluated}, {"feasible", dec.feasible}, {"fallback", dec.fallback}}}};
  std::cerr << summary.dump() << "\n";
  return kOk;
}

double max_sum(const RegionPolygon& poly) {
  double best = 0;
  for (const auto& v : poly.vertices) best = std::max(best, v.r1 + v.r2);
  return best;
}

int cmd_conjecture_scan(const Globals& g, const std::string& snr_text, const std::string& rfb_text, double sigma2,
                        bool optimize) {
  const auto snrs = parse_list(snr_text);
  const auto rates = parse_list(rfb_text);
  for (double r : rates) {
    if (!(r > 0)) usage("Rfb grid entries must be > 0 (the boundary formula is singular at 0)");
  }
  for (double s : snrs) check_gaussian(s * sigma2, sigma2);

  std::string csv = "snr,Rfb,sigma12_min_sq,sigma2,conjecture_side";
  csv += optimize ? ",sum_proposed,sum_decoupled\n" : "\n";
  for (double snr : snrs) {
    for (double rfb : rates) {
      const double P = snr * sigma2;
      const double m = sigma12_min_sq(sigma2, P, rfb);
      const double side = sigma2 > m ? 1.0 : (sigma2 < m ? -1.0 : 0.0);
      std::vector<double> row{snr, rfb, m, sigma2, side};
      if (optimize) {
        const SweepConfig cfg = load_sweep(g, P, sigma2, rfb);
        row.push_back(optimize_sum_rate(P, sigma2, rfb, true, cfg).value);
        row.push_back(max_sum(sweep_regions(cfg, rfb, P, sigma2, SweepMode::Decoupled).hull));
      }
      std::string line = io::csv_row("", row);
      csv += line.substr(1);
    }
  }
  emit(g.output, csv);
  return kOk;
}

int cmd_check(const Globals& g, int samples, int instances) {
  if (samples < 0 || instances < 0) usage("counts must be nonnegative");
  std::mt19937_64 rng(g.seed);
  double worst = 0;
  int bad = 0;
  for (int i = 0; i < samples; ++i) {
    const SchemeParams p = random_scheme_params(rng, i % 2 == 0);
    const double d = max_abs_delta(closed_form_bounds(p), oracle_bounds(p).bounds);
    worst = std::max(worst, d);
    bad += d > g.tolerance;
  }
  std::printf("oracle agreement: %d parameter sets, max |delta| = %.3g bits, %d above %.3g -> %s\n", samples, worst, bad,
              g.tolerance, bad == 0 ? "ok" : "FAILED");

  std::size_t disagreements = 0, total = 0;
  for (int i = 0; i < instances; ++i) {
    auto [c, k] = random_instance(rng, InstanceShape{});
    const MacMiTerms t = theorem_terms(assemble_two_block_joint(c, k));
    const double cost = std::max(t.tFB1, t.tFB2) + t.tFBa + t.tFBb;
    const EquivalenceReport r = region_equivalence_check(t, cost + 0.5, 10000, g.seed + i);
    disagreements += r.disagreements.size();
    total += r.samples;
  }
  std::printf("equivalence: %d discrete instances, %zu rate pairs, %zu disagreements outside the boundary band -> %s\n",
              instances, total, disagreements, disagreements == 0 ? "ok" : "FAILED");
  return bad == 0 && disagreements == 0 ? kOk : kDomainFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Achievable rate regions for the two-user MAC with rate-limited feedback"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--input", g.input, "Input file (parameters, kernels or sweep config)");
  app.add_option("--output", g.output, "Output file ('-' or omitted: stdout)");
  app.add_option("--seed", g.seed, "Seed for randomized steps");
  app.add_option("--tolerance", g.tolerance, "Agreement tolerance in bits")->check(CLI::PositiveNumber);
  app.fallthrough();

  std::string csv_path;
  auto* gauss = app.add_subcommand("gauss-region", "Gaussian scheme region: closed form vs covariance oracle");
  gauss->add_option("--csv", csv_path, "Frontier CSV (default: --output with .csv extension)");

  std::string channel_path;
  auto* disc = app.add_subcommand("discrete-eval", "Evaluate the theorem on a finite-alphabet channel");
  disc->add_option("--channel", channel_path, "Channel kernel JSON")->required();

  double P = 5.0, sigma2 = 1.0;
  std::string rfb = "2";
  auto* fig2 = app.add_subcommand("fig2", "Baseline and scheme frontiers as CSV");
  fig2->add_option("--P", P, "Transmit power per user");
  fig2->add_option("--sigma2", sigma2, "Channel noise variance");
  fig2->add_option("--rfb", rfb, "Feedback rate in bits per use, or 'inf'");

  std::string snr_grid = "1,5,10", rfb_grid = "0.5,1,2,4";
  double scan_sigma2 = 1.0;
  bool no_opt = false;
  auto* scan = app.add_subcommand("conjecture-scan", "Smallest admissible feedback noise and optimized sum rates");
  scan->add_option("--snr-grid", snr_grid, "Comma-separated P/sigma2 values");
  scan->add_option("--rfb-grid", rfb_grid, "Comma-separated feedback rates (> 0, 'inf' allowed)");
  scan->add_option("--sigma2", scan_sigma2, "Channel noise variance");
  scan->add_flag("--no-optimize", no_opt, "Skip the sum-rate optimization columns");

  int samples = 1000, instances = 10;
  auto* check = app.add_subcommand("check", "Oracle-agreement and equivalence self checks");
  check->add_option("--samples", samples, "Random Gaussian parameter sets");
  check->add_option("--instances", instances, "Random discrete instances (10^4 rate pairs each)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gauss) return cmd_gauss_region(g, csv_path);
    if (*disc) return cmd_discrete_eval(g, channel_path);
    if (*fig2) return cmd_fig2(g, P, sigma2, rfb);
    if (*scan) return cmd_conjecture_scan(g, snr_grid, rfb_grid, scan_sigma2, !no_opt);
    if (*check) return cmd_check(g, samples, instances);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::Schema:
      case ErrorKind::SizeGuardExceeded:
      case ErrorKind::ShapeMismatch:
      case ErrorKind::UnknownParent:
      case ErrorKind::UnknownVariable:
      case ErrorKind::DuplicateName:
      case ErrorKind::InvalidParams:
        return kUsage;
      default:
        return kDomainFailure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainFailure;
  }
  return kUsage;
}
