#include <cmath>
#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "popcheck/io.hpp"

namespace popcheck {

namespace detail {

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out;
}

void require_keys(const nlohmann::json& j, const std::string& where, const std::vector<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(where + ": unknown field '" + key + "' (valid: " + join(allowed) + ")");
    }
  }
}

}  // namespace detail

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
  auto out = linspace(lo, hi, count);
  for (auto& x : out) x = std::exp(x);
  return out;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open for reading");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

nlohmann::json result_to_json(const CheckResult& result) {
  const auto& m = result.metadata;
  nlohmann::json j;
  j["check"] = m.check;
  j["estimate"] = result.estimate;
  j["std_error"] = result.std_error;
  j["replications"] = m.replications;
  j["seed"] = m.seed;
  j["rep_size"] = m.rep_size;
  j["scheme"] = m.scheme;
  j["distance"] = m.distance;
  j["ties"] = m.ties;
  j["split_retries"] = m.split_retries;
  j["per_rep_values"] = result.per_rep_values;
  return j;
}

CheckResult result_from_json(const nlohmann::json& j) {
  CheckResult r;
  try {
    r.estimate = j.at("estimate").get<double>();
    r.std_error = j.at("std_error").get<double>();
    r.per_rep_values = j.at("per_rep_values").get<std::vector<double>>();
    auto& m = r.metadata;
    m.check = j.at("check").get<std::string>();
    m.replications = j.at("replications").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.rep_size = j.at("rep_size").get<std::size_t>();
    m.scheme = j.at("scheme").get<std::string>();
    m.distance = j.at("distance").get<std::string>();
    m.ties = j.at("ties").get<std::size_t>();
    m.split_retries = j.at("split_retries").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("result document: ") + e.what());
  }
  return r;
}

void write_trace_csv(const std::filesystem::path& path, const CheckResult& result) {
  CsvWriter csv(path, {"replication", "value"});
  for (std::size_t r = 0; r < result.per_rep_values.size(); ++r) {
    csv.row({std::to_string(r), format_double(result.per_rep_values[r])});
  }
  csv.close();
}

}  // namespace popcheck
