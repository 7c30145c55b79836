#include "pdstsp/core.hpp"

#include <algorithm>
#include <string>

namespace pdstsp {

std::string_view to_string(RevenueSetting s) {
  switch (s) {
    case RevenueSetting::distance:
      return "distance";
    case RevenueSetting::ton_distance:
      return "ton_distance";
    case RevenueSetting::uniform:
      return "uniform";
    case RevenueSetting::constant:
      return "constant";
  }
  return "distance";
}

RevenueSetting revenue_setting_from_string(std::string_view name) {
  if (name == "distance") return RevenueSetting::distance;
  if (name == "ton_distance" || name == "ton-distance") return RevenueSetting::ton_distance;
  if (name == "uniform") return RevenueSetting::uniform;
  if (name == "constant") return RevenueSetting::constant;
  throw ConfigError("unknown revenue setting '" + std::string(name) + "'");
}

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::repeat_visit:
      return "repeat_visit";
    case Violation::precedence:
      return "precedence";
    case Violation::capacity:
      return "capacity";
    case Violation::length:
      return "length";
  }
  return "unknown";
}

bool Instance::degenerate() const {
  return std::any_of(demand.begin(), demand.end(), [&](int q) { return q > capacity; });
}

void Instance::check() const {
  const auto nn = static_cast<std::size_t>(n);
  if (n < 0) throw ConfigError("instance: n must be nonnegative");
  if (coords.size() != 2 * nn + 2) throw ConfigError("instance: coords must have 2n+2 points");
  if (demand.size() != nn || revenue.size() != nn)
    throw ConfigError("instance: demand and revenue must have n entries");
  for (const Point& p : coords) {
    if (!(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0))
      throw ConfigError("instance: coordinates must lie in the unit square");
  }
  for (int q : demand) {
    if (q <= 0) throw ConfigError("instance: demands must be positive");
  }
  for (double r : revenue) {
    if (!(r >= 0.0 && r <= 1.5)) throw ConfigError("instance: revenue outside [0, 1.5]");
  }
  if (capacity <= 0) throw ConfigError("instance: capacity must be positive");
  if (!(max_length > 0.0)) throw ConfigError("instance: max_length must be positive");
}

namespace {

void check_indices(const Instance& inst, std::span<const Vertex> seq) {
  for (Vertex v : seq) {
    if (!inst.valid_vertex(v))
      throw InvalidVertex("vertex " + std::to_string(v) + " outside [0, " +
                          std::to_string(inst.end()) + "]");
  }
}

bool has_repeat(const Instance& inst, std::span<const Vertex> seq) {
  std::vector<char> seen(static_cast<std::size_t>(inst.vertex_count()), 0);
  for (Vertex v : seq) {
    auto& s = seen[static_cast<std::size_t>(v)];
    if (s) return true;
    s = 1;
  }
  return false;
}

// Assumes no repeats.
bool precedence_ok(const Instance& inst, std::span<const Vertex> seq) {
  if (seq.size() < 2 || seq.front() != inst.start() || seq.back() != inst.end()) return false;
  std::vector<int> pos(static_cast<std::size_t>(inst.vertex_count()), -1);
  for (std::size_t i = 0; i < seq.size(); ++i) pos[static_cast<std::size_t>(seq[i])] = static_cast<int>(i);
  for (std::size_t i = 1; i + 1 < seq.size(); ++i) {
    if (inst.is_depot(seq[i])) return false;
  }
  for (RequestId h = 1; h <= inst.n; ++h) {
    const int p = pos[static_cast<std::size_t>(inst.pickup(h))];
    const int d = pos[static_cast<std::size_t>(inst.delivery(h))];
    if ((p < 0) != (d < 0)) return false;
    if (p >= 0 && p > d) return false;
  }
  return true;
}

bool capacity_holds(const Instance& inst, std::span<const Vertex> seq) {
  int load = 0;
  for (Vertex v : seq) {
    load += inst.load_delta(v);
    if (load > inst.capacity) return false;
  }
  return true;
}

}  // namespace

double route_length(const Instance& inst, std::span<const Vertex> seq) {
  check_indices(inst, seq);
  double total = 0.0;
  for (std::size_t i = 1; i < seq.size(); ++i) total += inst.dist(seq[i - 1], seq[i]);
  return total;
}

std::vector<int> load_profile(const Instance& inst, std::span<const Vertex> seq) {
  check_indices(inst, seq);
  std::vector<int> loads;
  loads.reserve(seq.size());
  int load = 0;
  for (Vertex v : seq) {
    load += inst.load_delta(v);
    loads.push_back(load);
  }
  return loads;
}

double collected_revenue(const Instance& inst, std::span<const Vertex> seq) {
  check_indices(inst, seq);
  std::vector<char> seen(static_cast<std::size_t>(inst.vertex_count()), 0);
  for (Vertex v : seq) seen[static_cast<std::size_t>(v)] = 1;
  double total = 0.0;
  for (RequestId h = 1; h <= inst.n; ++h) {
    const bool p = seen[static_cast<std::size_t>(inst.pickup(h))];
    const bool d = seen[static_cast<std::size_t>(inst.delivery(h))];
    if (p != d) throw StructuralError("request " + std::to_string(h) + " is not paired");
    if (p) total += inst.revenue_of(h);
  }
  return total;
}

double collected_revenue(const Instance&, const Route& route) { return route.revenue(); }

EvalResult validate_route(const Instance& inst, std::span<const Vertex> seq) {
  EvalResult out;
  out.length = route_length(inst, seq);
  if (has_repeat(inst, seq)) {
    out.violation = Violation::repeat_visit;
  } else if (!precedence_ok(inst, seq)) {
    out.violation = Violation::precedence;
  } else if (!capacity_holds(inst, seq)) {
    out.violation = Violation::capacity;
  } else if (out.length > inst.max_length + kLengthTol) {
    out.violation = Violation::length;
  }
  if (!out.violation || *out.violation == Violation::capacity || *out.violation == Violation::length)
    out.revenue = collected_revenue(inst, seq);
  out.profit = out.revenue - out.length;
  out.feasible = !out.violation.has_value();
  return out;
}

Route::Route(const Instance& inst, std::vector<Vertex> seq) : seq_(std::move(seq)) {
  check_indices(inst, seq_);
  if (has_repeat(inst, seq_)) throw StructuralError("route repeats a vertex");
  if (!precedence_ok(inst, seq_)) throw StructuralError("route breaks endpoint or pickup/delivery order");
  for (Vertex v : seq_) {
    if (inst.is_pickup(v)) served_.push_back(v);
  }
  std::sort(served_.begin(), served_.end());
  length_ = route_length(inst, seq_);
  for (RequestId h : served_) revenue_ += inst.revenue_of(h);
  capacity_ok_ = capacity_holds(inst, seq_);
  length_ok_ = length_ <= inst.max_length + kLengthTol;
}

Route Route::empty(const Instance& inst) { return Route(inst, {inst.start(), inst.end()}); }

bool Route::serves(RequestId h) const { return std::binary_search(served_.begin(), served_.end(), h); }

double shaped_objective(const Instance& inst, const Route& route, double rho) {
  return -route.revenue() + rho * std::max(0.0, route.length() - inst.max_length);
}

bool better(const Route& a, const Route& b) {
  if (a.revenue() != b.revenue()) return a.revenue() > b.revenue();
  if (a.length() != b.length()) return a.length() < b.length();
  return a.seq() < b.seq();
}

bool same_served(const Route& a, const Route& b) { return a.served() == b.served(); }

}  // namespace pdstsp
