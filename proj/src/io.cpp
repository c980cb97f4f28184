#include "macfb/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "macfb/error.hpp"

namespace macfb::io {

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorKind::Schema, msg); }

double number(const json& j, const char* key) {
  if (!j.contains(key)) schema(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number()) schema(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

std::optional<double> number_or_null(const json& j, const char* key) {
  if (!j.contains(key)) schema(std::string("missing field '") + key + "'");
  if (j.at(key).is_null()) return std::nullopt;
  if (!j.at(key).is_number()) schema(std::string("field '") + key + "' must be a number or null");
  return j.at(key).get<double>();
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<std::string> names(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) schema(std::string("kernel field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& n : j.at(key)) {
    if (!n.is_string()) schema(std::string("kernel field '") + key + "' must list variable names");
    out.push_back(n.get<std::string>());
  }
  return out;
}

// Flattens a rectangular nested array of the given depth, recording its shape.
void flatten(const json& j, std::size_t depth, std::vector<std::size_t>& shape, std::size_t level,
             std::vector<double>& out) {
  if (level == depth) {
    if (!j.is_number()) schema("kernel table leaves must be numbers");
    out.push_back(j.get<double>());
    return;
  }
  if (!j.is_array() || j.empty()) schema("kernel table nesting does not match parents + outputs");
  if (shape.size() == level) {
    shape.push_back(j.size());
  } else if (shape[level] != j.size()) {
    schema("kernel table is not rectangular");
  }
  for (const auto& e : j) flatten(e, depth, shape, level + 1, out);
}

}  // namespace

SchemeParams params_from_json(const json& j) {
  if (!j.is_object()) schema("parameter file must hold a JSON object");
  SchemeParams p;
  p.P = number(j, "P");
  p.sigma2 = number(j, "sigma2");
  p.alpha = number(j, "alpha");
  p.beta = number(j, "beta");
  p.theta = number(j, "theta");
  p.lambda = number(j, "lambda");
  p.sigma12_sq = number(j, "sigma12_sq");
  p.sigma1_sq = number_or_null(j, "sigma1_sq");
  p.sigma2_sq = number_or_null(j, "sigma2_sq");
  p.Rfb = number_or_null(j, "Rfb").value_or(std::numeric_limits<double>::infinity());
  try {
    validate_structure(p);
  } catch (const Error& e) {
    schema(e.what());
  }
  return p;
}

json to_json(const SchemeParams& p) {
  return json{{"P", p.P},
              {"sigma2", p.sigma2},
              {"alpha", p.alpha},
              {"beta", p.beta},
              {"theta", p.theta},
              {"lambda", p.lambda},
              {"sigma12_sq", p.sigma12_sq},
              {"sigma1_sq", nullable(p.sigma1_sq)},
              {"sigma2_sq", nullable(p.sigma2_sq)},
              {"Rfb", finite_or_null(p.Rfb)}};
}

json to_json(const MacMiTerms& t) {
  json j = json::object();
  for (const auto& [name, field] : MacMiTerms::fields) j[std::string(name)] = t.*field;
  return j;
}

json to_json(const RegionBounds& b) {
  json j = json::object();
  for (const auto& [name, field] : RegionBounds::fields) j[std::string(name)] = b.*field;
  return j;
}

json to_json(const ValidationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"deviation", finite_or_null(c.deviation)}, {"detail", c.detail}});
  }
  return json{{"ok", r.ok()}, {"checks", checks}};
}

FactorKernel kernel_from_json(const json& j) {
  if (!j.is_object()) schema("kernel must be a JSON object");
  const auto outs = names(j, "outputs");
  const auto pars = names(j, "parents");
  if (outs.empty()) schema("kernel needs at least one output");
  if (!j.contains("table")) schema("kernel is missing 'table'");
  std::vector<std::size_t> shape;
  std::vector<double> table;
  flatten(j.at("table"), outs.size() + pars.size(), shape, 0, table);
  std::vector<Axis> out_axes;
  for (std::size_t i = 0; i < outs.size(); ++i) out_axes.push_back({outs[i], shape[pars.size() + i]});
  try {
    return FactorKernel(std::move(out_axes), pars, std::move(table));
  } catch (const Error& e) {
    schema(e.what());
  }
}

ChannelSpec channel_from_json(const json& j) {
  const json& k = j.contains("channel") ? j.at("channel") : j;
  FactorKernel law = kernel_from_json(k);
  if (law.outputs().size() != 1 || law.outputs()[0].name != "Y" || law.parents() != std::vector<std::string>{"X1", "X2"}) {
    schema("channel kernel must have outputs [\"Y\"] and parents [\"X1\",\"X2\"]");
  }
  // Parent sizes are the leading dimensions of the nested table.
  std::vector<std::size_t> shape;
  std::vector<double> scratch;
  flatten(k.at("table"), 3, shape, 0, scratch);
  return ChannelSpec{shape[0], shape[1], shape[2], std::move(law)};
}

AuxKernels aux_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kernels") || !j.at("kernels").is_object()) schema("kernels file needs a 'kernels' object");
  const json& k = j.at("kernels");
  auto get = [&](const char* key) {
    if (!k.contains(key)) schema(std::string("missing kernel '") + key + "'");
    return kernel_from_json(k.at(key));
  };
  return AuxKernels{get("W"),  get("V1V2"), get("U1"), get("U2"), get("X1"),      get("X2"),
                    get("Y12"), get("Y1"),  get("Y2"), get("link_V1"), get("link_V2")};
}

SweepConfig sweep_config_from_json(const json& j, SweepConfig base) {
  if (!j.is_object()) schema("sweep config must be a JSON object");
  auto grid = [&](const char* key, std::vector<double>& dst) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_array()) schema(std::string("sweep field '") + key + "' must be an array");
    dst.clear();
    for (const auto& v : j.at(key)) {
      if (!v.is_number()) schema(std::string("sweep field '") + key + "' must hold numbers");
      dst.push_back(v.get<double>());
    }
  };
  grid("alpha", base.alpha);
  grid("beta", base.beta);
  grid("theta", base.theta);
  grid("lambda_fraction", base.lambda_fraction);
  grid("sigma12_sq", base.sigma12_sq);
  grid("sigma1_sq", base.sigma1_sq);
  grid("sigma2_sq", base.sigma2_sq);
  if (j.contains("refine_iterations")) {
    if (!j.at("refine_iterations").is_number_integer()) schema("refine_iterations must be an integer");
    base.refine_iterations = j.at("refine_iterations").get<int>();
  }
  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0)) {
      schema("seed must be a nonnegative integer");
    }
    base.seed = j.at("seed").get<std::uint64_t>();
  }
  return base;
}

std::string format_number(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

std::string csv_row(const std::string& label, const std::vector<double>& values) {
  std::string row = label;
  for (double v : values) row += "," + format_number(v);
  return row + "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    schema("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Schema, "cannot write '" + path + "'");
  out << content;
}

}  // namespace macfb::io
