#pragma once

#include <string>

#include <json.hpp>

#include "maght/magmap.hpp"
#include "maght/pipeline.hpp"
#include "maght/synth.hpp"

namespace maght {

// Versioned structured-text documents. Units are meters and microtesla
// throughout; schemas carry an explicit version tag and loading anything
// else raises SchemaError.
//
// Map files store lambda, mode, bounds and the node list (position + field
// vector) only; features, frames and the search index are recomputed on
// load. Scenario files embed the generation spec, the world and the cases;
// the lattice map is rebuilt deterministically from those.

nlohmann::json map_to_json(const MagneticMap& map);
MagneticMap map_from_json(const nlohmann::json& j);  // indexed on return

nlohmann::json trajectory_to_json(const InputTrajectory& traj);
InputTrajectory trajectory_from_json(const nlohmann::json& j);

nlohmann::json result_to_json(const RelocResult& result, double wall_ms);

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);  // map rebuilt

// Whole-file helpers; throw IoError on filesystem failures and SchemaError
// on unparsable content.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace maght
