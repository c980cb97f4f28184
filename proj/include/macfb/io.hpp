#pragma once

// JSON ingestion and report/CSV emission for the command-line tool.

#include <string>
#include <vector>

#include <json.hpp>

#include "macfb/discrete_theorem.hpp"
#include "macfb/gaussian_scheme.hpp"
#include "macfb/region_geometry.hpp"

namespace macfb::io {

using nlohmann::json;

/// {"P","sigma2","alpha","beta","theta","lambda","sigma12_sq","sigma1_sq"|null,
///  "sigma2_sq"|null,"Rfb"|null}; null means infinite. Throws Error(Schema).
SchemeParams params_from_json(const json& j);
json to_json(const SchemeParams& p);
json to_json(const MacMiTerms& t);
json to_json(const RegionBounds& b);
json to_json(const ValidationReport& r);

/// {"outputs":[names], "parents":[names], "table": nested arrays}, parent-major
/// and output-minor; alphabet sizes come from the nesting shape.
FactorKernel kernel_from_json(const json& j);

ChannelSpec channel_from_json(const json& j);

/// {"kernels": {"W","V1V2","U1","U2","X1","X2","Y12","Y1","Y2","link_V1","link_V2"}}.
AuxKernels aux_from_json(const json& j);

/// Missing grids fall back to `base`.
SweepConfig sweep_config_from_json(const json& j, SweepConfig base);

/// Locale-independent shortest form with 12 significant digits.
std::string format_number(double x);

std::string csv_row(const std::string& label, const std::vector<double>& values);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace macfb::io
