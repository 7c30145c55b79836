#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdstsp/core.hpp"

namespace pdstsp {

using json = nlohmann::json;

// Instance and route JSON. Field order is free; unknown fields are rejected
// with ConfigError.
json to_json(const Instance& inst);
Instance instance_from_json(const json& j);
json to_json(const Route& route);
Route route_from_json(const Instance& inst, const json& j);

/// One compact JSON document per line.
void write_instances_jsonl(std::ostream& os, const std::vector<Instance>& insts);
std::vector<Instance> read_instances_jsonl(std::istream& is);
std::vector<Instance> read_instances_jsonl_file(const std::string& path);

/// One line of a trajectory seed file:
///   {"instance_id": str, "routes": [[0,...,2n+1], ...]}
struct TrajectoryRecord {
  std::string instance_id;
  std::vector<std::vector<Vertex>> routes;
};

void write_trajectories_jsonl(std::ostream& os, const std::vector<TrajectoryRecord>& records);
std::vector<TrajectoryRecord> read_trajectories_jsonl(std::istream& is);
std::vector<TrajectoryRecord> read_trajectories_jsonl_file(const std::string& path);

}  // namespace pdstsp
