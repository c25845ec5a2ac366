#include "ciss/bench_io.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace ciss::bench {

using nlohmann::json;
using scan::format_decimal;

namespace {

template <typename T>
void read_field(const json& doc, const char* key, T& field) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(std::string("config field '") + key +
                        "' must be a non-negative integer");
    }
  } else if (!v.is_number()) {
    throw ConfigError(std::string("config field '") + key + "' must be a number");
  }
  field = v.get<T>();
}

const char* const kFields[] = {
    "heralded_rate", "integration_time",   "eff_d1",       "eff_d2",
    "eff_d3",        "dark_rate_d1",       "dark_rate_d2", "dark_rate_d3",
    "coincidence_window", "p2_step",       "hwp_step",     "rng_seed"};

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(std::begin(kFields), std::end(kFields), key) == std::end(kFields)) {
      throw ConfigError("unknown config field '" + key + "'");
    }
  }
  ExperimentConfig cfg;
  read_field(doc, "heralded_rate", cfg.heralded_rate);
  read_field(doc, "integration_time", cfg.integration_time);
  read_field(doc, "eff_d1", cfg.eff_d1);
  read_field(doc, "eff_d2", cfg.eff_d2);
  read_field(doc, "eff_d3", cfg.eff_d3);
  read_field(doc, "dark_rate_d1", cfg.dark_rate_d1);
  read_field(doc, "dark_rate_d2", cfg.dark_rate_d2);
  read_field(doc, "dark_rate_d3", cfg.dark_rate_d3);
  read_field(doc, "coincidence_window", cfg.coincidence_window);
  read_field(doc, "p2_step", cfg.p2_step);
  read_field(doc, "hwp_step", cfg.hwp_step);
  read_field(doc, "rng_seed", cfg.rng_seed);
  cfg.validate();
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json doc = {{"heralded_rate", cfg.heralded_rate},
              {"integration_time", cfg.integration_time},
              {"eff_d1", cfg.eff_d1},
              {"eff_d2", cfg.eff_d2},
              {"eff_d3", cfg.eff_d3},
              {"dark_rate_d1", cfg.dark_rate_d1},
              {"dark_rate_d2", cfg.dark_rate_d2},
              {"dark_rate_d3", cfg.dark_rate_d3},
              {"coincidence_window", cfg.coincidence_window},
              {"p2_step", cfg.p2_step},
              {"hwp_step", cfg.hwp_step},
              {"rng_seed", cfg.rng_seed}};
  return doc.dump(2) + "\n";
}

namespace {

json record_json(const CountRecord& r) {
  return {{"theta_prep", r.setting.theta_prep.degrees()},
          {"hwp_angle", r.setting.hwp_angle},
          {"theta_meas", r.setting.theta_meas()},
          {"duration", r.duration},
          {"singles_d1", r.singles_d1},
          {"singles_d2", r.singles_d2},
          {"singles_d3", r.singles_d3},
          {"coinc_13", r.coinc_13},
          {"coinc_23", r.coinc_23}};
}

json estimate_json(const SEstimate& s) {
  return {{"value", s.value},
          {"std_error", s.std_error},
          {"sigma_violation", s.sigma_violation}};
}

json probability_json(const EstimatedProbability& p) {
  return {{"value", p.value}, {"std_error", p.std_error}};
}

}  // namespace

std::string export_records(const std::vector<CountRecord>& records,
                           scan::Format format) {
  if (format == scan::Format::Json) {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(record_json(r));
    return arr.dump() + "\n";
  }
  std::ostringstream out;
  out << "theta_prep,hwp_angle,theta_meas,duration,singles_d1,singles_d2,"
         "singles_d3,coinc_13,coinc_23\n";
  for (const auto& r : records) {
    out << format_decimal(r.setting.theta_prep.degrees()) << ','
        << format_decimal(r.setting.hwp_angle) << ','
        << format_decimal(r.setting.theta_meas()) << ','
        << format_decimal(r.duration) << ',' << r.singles_d1 << ','
        << r.singles_d2 << ',' << r.singles_d3 << ',' << r.coinc_13 << ','
        << r.coinc_23 << '\n';
  }
  return out.str();
}

std::string export_measurement(const SMeasurement& m, scan::Format format) {
  const double a = m.angles.theta_a.degrees();
  const double b = m.angles.theta_b.degrees();
  const double c = m.angles.theta_c.degrees();
  if (format == scan::Format::Json) {
    json doc = {{"theta_a", a},
                {"theta_b", b},
                {"theta_c", c},
                {"S", estimate_json(m.s)},
                {"p_ab", probability_json(m.p_ab)},
                {"p_bc", probability_json(m.p_bc)},
                {"p_ac", probability_json(m.p_ac)},
                {"records", json::array()}};
    for (const auto& r : m.records) doc["records"].push_back(record_json(r));
    return doc.dump() + "\n";
  }
  std::ostringstream out;
  out << "theta_a,theta_b,theta_c,p_ab,p_ab_std_error,p_bc,p_bc_std_error,"
         "p_ac,p_ac_std_error,S,std_error,sigma\n";
  out << format_decimal(a) << ',' << format_decimal(b) << ',' << format_decimal(c);
  for (const auto* p : {&m.p_ab, &m.p_bc, &m.p_ac}) {
    out << ',' << format_decimal(p->value) << ',' << format_decimal(p->std_error);
  }
  out << ',' << format_decimal(m.s.value) << ',' << format_decimal(m.s.std_error)
      << ',' << format_decimal(m.s.sigma_violation) << '\n';
  return out.str();
}

std::string export_nodes(const std::vector<ScanNode>& nodes, scan::Format format,
                         bool include_theta_b) {
  if (format == scan::Format::Json) {
    json arr = json::array();
    for (const auto& n : nodes) {
      json row = {{"theta_a", n.theta_a},
                  {"theta_b", n.theta_b},
                  {"theta_c", n.theta_c},
                  {"S_theory", n.theory}};
      if (n.simulated) {
        row["S_simulated"] = n.simulated->value;
        row["std_error"] = n.simulated->std_error;
        row["sigma"] = n.simulated->sigma_violation;
      } else {
        row["S_simulated"] = nullptr;
        row["std_error"] = nullptr;
        row["sigma"] = nullptr;
      }
      arr.push_back(std::move(row));
    }
    return arr.dump() + "\n";
  }
  std::ostringstream out;
  if (include_theta_b) out << "theta_b,";
  out << "theta_c,S_theory,S_simulated,std_error,sigma\n";
  for (const auto& n : nodes) {
    if (include_theta_b) out << format_decimal(n.theta_b) << ',';
    out << format_decimal(n.theta_c) << ',' << format_decimal(n.theory) << ',';
    if (n.simulated) {
      out << format_decimal(n.simulated->value) << ','
          << format_decimal(n.simulated->std_error) << ','
          << format_decimal(n.simulated->sigma_violation);
    } else {
      out << "nan,nan,nan";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace ciss::bench
