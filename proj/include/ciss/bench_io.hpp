#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ciss/bench.hpp"
#include "ciss/surface_io.hpp"

namespace ciss::bench {

/// Reads an ExperimentConfig from JSON. Keys are exactly the config field
/// names; missing keys keep their defaults, unknown keys and wrongly typed
/// values raise ConfigError. The result is validated.
ExperimentConfig parse_config(std::string_view json_text);
std::string config_to_json(const ExperimentConfig& cfg);

std::string export_records(const std::vector<CountRecord>& records,
                           scan::Format format);

std::string export_measurement(const SMeasurement& m, scan::Format format);

/// Scan nodes with theory, simulated S, std_error and sigma columns.
/// Nodes without statistics carry "nan" (CSV) or null (JSON).
std::string export_nodes(const std::vector<ScanNode>& nodes, scan::Format format,
                         bool include_theta_b = true);

}  // namespace ciss::bench
