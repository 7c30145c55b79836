#include "pdstsp/json_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

namespace pdstsp {

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError(std::string(what) + ": unknown field '" + item.key() + "'");
  }
  for (const auto& key : allowed) {
    if (!j.contains(key)) throw ConfigError(std::string(what) + ": missing field '" + key + "'");
  }
}

template <class T>
T field(const json& j, const char* key, const char* what) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

json to_json(const Instance& inst) {
  json coords = json::array();
  for (const Point& p : inst.coords) coords.push_back({p.x, p.y});
  return json{{"n", inst.n},
              {"coords", coords},
              {"demand", inst.demand},
              {"revenue", inst.revenue},
              {"capacity", inst.capacity},
              {"max_length", inst.max_length},
              {"revenue_setting", std::string(to_string(inst.revenue_setting))},
              {"seed", inst.seed}};
}

Instance instance_from_json(const json& j) {
  static const std::set<std::string> keys{"n",        "coords",     "demand",          "revenue",
                                          "capacity", "max_length", "revenue_setting", "seed"};
  reject_unknown(j, keys, "instance");
  Instance inst;
  inst.n = field<int>(j, "n", "instance");
  for (const auto& p : field<std::vector<std::vector<double>>>(j, "coords", "instance")) {
    if (p.size() != 2) throw ConfigError("instance: each coordinate needs two values");
    inst.coords.push_back({p[0], p[1]});
  }
  inst.demand = field<std::vector<int>>(j, "demand", "instance");
  inst.revenue = field<std::vector<double>>(j, "revenue", "instance");
  inst.capacity = field<int>(j, "capacity", "instance");
  inst.max_length = field<double>(j, "max_length", "instance");
  inst.revenue_setting = revenue_setting_from_string(field<std::string>(j, "revenue_setting", "instance"));
  inst.seed = field<std::uint64_t>(j, "seed", "instance");
  inst.check();
  return inst;
}

json to_json(const Route& route) {
  return json{{"seq", route.seq()}, {"revenue", route.revenue()}, {"length", route.length()}};
}

Route route_from_json(const Instance& inst, const json& j) {
  reject_unknown(j, {"seq", "revenue", "length"}, "route");
  return Route(inst, field<std::vector<Vertex>>(j, "seq", "route"));
}

void write_instances_jsonl(std::ostream& os, const std::vector<Instance>& insts) {
  for (const auto& inst : insts) os << to_json(inst).dump() << '\n';
}

std::vector<Instance> read_instances_jsonl(std::istream& is) {
  std::vector<Instance> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(instance_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("instance JSONL: ") + e.what());
    }
  }
  return out;
}

std::vector<Instance> read_instances_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_instances_jsonl(in);
}

void write_trajectories_jsonl(std::ostream& os, const std::vector<TrajectoryRecord>& records) {
  for (const auto& r : records) os << json{{"instance_id", r.instance_id}, {"routes", r.routes}}.dump() << '\n';
}

std::vector<TrajectoryRecord> read_trajectories_jsonl(std::istream& is) {
  std::vector<TrajectoryRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("trajectory JSONL: ") + e.what());
    }
    reject_unknown(j, {"instance_id", "routes"}, "trajectory");
    TrajectoryRecord rec;
    rec.instance_id = field<std::string>(j, "instance_id", "trajectory");
    rec.routes = field<std::vector<std::vector<Vertex>>>(j, "routes", "trajectory");
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<TrajectoryRecord> read_trajectories_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return read_trajectories_jsonl(in);
}

}  // namespace pdstsp
