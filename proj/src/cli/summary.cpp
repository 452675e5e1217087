#include <json.hpp>

#include "qgp/scenario.hpp"

namespace qgp::scenario {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunSummary, name, kind, preset, scenario, model_parameters, t0,
                                   t1, samples, seed, headline, headline_source, flags, convention,
                                   columns, csv_file, wall_time_s)

std::string serialize(const RunSummary& summary) {
  return nlohmann::json(summary).dump(2) + "\n";
}

RunSummary parse_summary(std::string_view json) {
  try {
    return nlohmann::json::parse(json).get<RunSummary>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run summary: ") + e.what());
  }
}

}  // namespace qgp::scenario
