#include "ciss/surface_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ciss::scan {

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw std::invalid_argument("unknown export format: " + std::string(name));
}

std::string format_decimal(double value) {
  char buf[64];
  auto [end, ec] =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
  if (ec != std::errc{}) throw std::runtime_error("format_decimal overflow");
  std::string out(buf, end);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

namespace {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(sep, pos);
    out.emplace_back(line.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_decimal(const std::string& field) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::invalid_argument("malformed number in surface export: " + field);
  }
  return v;
}

std::vector<std::string> lines_of(std::string_view doc) {
  std::vector<std::string> out = split(doc, '\n');
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

std::string export_csv(const SLandscape& land) {
  std::ostringstream out;
  const auto varying = land.varying_axes();
  if (varying.size() == 1) {
    const int k = varying[0];
    out << kAxisNames[k] << ",S\n";
    for (std::size_t i = 0; i < land.axes[k].size(); ++i) {
      out << format_decimal(land.axes[k][i]) << ','
          << format_decimal(land.values[i]) << '\n';
    }
  } else if (varying.size() == 2) {
    const int row_axis = varying[0];
    const int col_axis = varying[1];
    const auto& rows = land.axes[row_axis];
    const auto& cols = land.axes[col_axis];
    out << kAxisNames[row_axis] << '\\' << kAxisNames[col_axis];
    for (double c : cols) out << ',' << format_decimal(c);
    out << '\n';
    // With a single pinned axis the flat row-major index is r * cols + c.
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out << format_decimal(rows[r]);
      for (std::size_t c = 0; c < cols.size(); ++c) {
        out << ',' << format_decimal(land.values[r * cols.size() + c]);
      }
      out << '\n';
    }
  } else {
    out << "theta_a,theta_b,theta_c,S\n";
    for (std::size_t ia = 0; ia < land.axes[0].size(); ++ia)
      for (std::size_t ib = 0; ib < land.axes[1].size(); ++ib)
        for (std::size_t ic = 0; ic < land.axes[2].size(); ++ic) {
          out << format_decimal(land.axes[0][ia]) << ','
              << format_decimal(land.axes[1][ib]) << ','
              << format_decimal(land.axes[2][ic]) << ','
              << format_decimal(land.at(ia, ib, ic)) << '\n';
        }
  }
  return out.str();
}

SurfaceTable parse_csv(std::string_view doc) {
  const auto lines = lines_of(doc);
  if (lines.empty()) throw std::invalid_argument("empty surface export");
  const auto header = split(lines[0], ',');
  SurfaceTable table;

  if (header.size() == 2 && header[1] == "S") {
    table.axis_names = {header[0]};
    table.axes.resize(1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto f = split(lines[i], ',');
      if (f.size() != 2) throw std::invalid_argument("bad profile row");
      table.axes[0].push_back(parse_decimal(f[0]));
      table.values.push_back(parse_decimal(f[1]));
    }
  } else if (header.size() == 4 && header[3] == "S") {
    table.axis_names = {header[0], header[1], header[2]};
    table.axes.resize(3);
    std::array<std::vector<double>, 3> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto f = split(lines[i], ',');
      if (f.size() != 4) throw std::invalid_argument("bad long-form row");
      for (int k = 0; k < 3; ++k) {
        const double v = parse_decimal(f[k]);
        auto& axis = table.axes[k];
        if (std::find(axis.begin(), axis.end(), v) == axis.end()) axis.push_back(v);
      }
      table.values.push_back(parse_decimal(f[3]));
    }
  } else {
    const auto corner = split(header[0], '\\');
    if (corner.size() != 2 || header.size() < 2) {
      throw std::invalid_argument("unrecognized surface header");
    }
    table.axis_names = {corner[0], corner[1]};
    table.axes.resize(2);
    for (std::size_t c = 1; c < header.size(); ++c) {
      table.axes[1].push_back(parse_decimal(header[c]));
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto f = split(lines[i], ',');
      if (f.size() != header.size()) throw std::invalid_argument("ragged matrix row");
      table.axes[0].push_back(parse_decimal(f[0]));
      for (std::size_t c = 1; c < f.size(); ++c) {
        table.values.push_back(parse_decimal(f[c]));
      }
    }
  }
  return table;
}

}  // namespace

std::string export_surface(const SLandscape& land, Format format) {
  if (format == Format::Csv) return export_csv(land);
  nlohmann::json doc;
  doc["axes"] = nlohmann::json::array();
  for (const auto& axis : land.axes) doc["axes"].push_back(axis);
  doc["values"] = land.values;
  return doc.dump() + "\n";
}

SurfaceTable parse_surface(std::string_view document, Format format) {
  if (format == Format::Csv) return parse_csv(document);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
    SurfaceTable table;
    table.axis_names.assign(kAxisNames.begin(), kAxisNames.end());
    table.axes = doc.at("axes").get<std::vector<std::vector<double>>>();
    table.values = doc.at("values").get<std::vector<double>>();
    if (table.axes.size() != 3) throw std::invalid_argument("expected 3 axes");
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed surface JSON: ") + e.what());
  }
}

}  // namespace ciss::scan
