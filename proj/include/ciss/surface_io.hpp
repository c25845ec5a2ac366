#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ciss/s_scan.hpp"

namespace ciss::scan {

enum class Format { Csv, Json };

/// Parses "csv" or "json"; throws std::invalid_argument otherwise.
Format parse_format(std::string_view name);

/// Fixed-point decimal with 6 fractional digits, '.' separator, no "-0".
std::string format_decimal(double value);

/// CSV layout depends on how many axes vary:
///   one axis  -> columns <axis>,S, one row per node;
///   two axes  -> matrix, first varying axis down the rows, second across;
///   otherwise -> long form theta_a,theta_b,theta_c,S in row-major order.
/// JSON is {"axes": [[..],[..],[..]], "values": [..]} with row-major values.
std::string export_surface(const SLandscape& land, Format format);

/// Tabular content recovered from an export. Axes that were pinned in a
/// CSV slice are not part of the document and are absent here.
struct SurfaceTable {
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> axes;
  std::vector<double> values;
};

/// Inverse of export_surface. Throws std::invalid_argument on malformed input.
SurfaceTable parse_surface(std::string_view document, Format format);

}  // namespace ciss::scan
