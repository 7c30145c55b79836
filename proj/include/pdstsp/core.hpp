#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdstsp/errors.hpp"

namespace pdstsp {

/// Slack on the route-length limit to absorb summation-order differences.
inline constexpr double kLengthTol = 1e-9;
/// Revenue differences at or below this are treated as ties.
inline constexpr double kRevenueTol = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class RevenueSetting { distance, ton_distance, uniform, constant };

std::string_view to_string(RevenueSetting s);
RevenueSetting revenue_setting_from_string(std::string_view name);

using Vertex = int;
using RequestId = int;

// Vertex layout: 0 is the start depot, 1..n are pickups, n+1..2n are the
// matching deliveries and 2n+1 is the end depot. Requests are numbered 1..n
// and request h owns pickup h and delivery h+n.
struct Instance {
  int n = 0;
  std::vector<Point> coords;
  std::vector<int> demand;       // indexed by request - 1
  std::vector<double> revenue;   // normalized revenue, indexed by request - 1
  int capacity = 1;
  double max_length = 0.0;
  RevenueSetting revenue_setting = RevenueSetting::distance;
  std::uint64_t seed = 0;

  int vertex_count() const { return 2 * n + 2; }
  Vertex start() const { return 0; }
  Vertex end() const { return 2 * n + 1; }
  Vertex pickup(RequestId h) const { return h; }
  Vertex delivery(RequestId h) const { return h + n; }
  bool is_pickup(Vertex v) const { return v >= 1 && v <= n; }
  bool is_delivery(Vertex v) const { return v > n && v <= 2 * n; }
  bool is_depot(Vertex v) const { return v == 0 || v == 2 * n + 1; }
  /// Request served at a pickup or delivery vertex; 0 for depots.
  RequestId request_of(Vertex v) const {
    if (is_pickup(v)) return v;
    if (is_delivery(v)) return v - n;
    return 0;
  }

  int demand_of(RequestId h) const { return demand[static_cast<std::size_t>(h - 1)]; }
  double revenue_of(RequestId h) const { return revenue[static_cast<std::size_t>(h - 1)]; }
  /// Signed load change when visiting v.
  int load_delta(Vertex v) const {
    if (is_pickup(v)) return demand_of(v);
    if (is_delivery(v)) return -demand_of(v - n);
    return 0;
  }

  double dist(Vertex i, Vertex j) const {
    const Point& a = coords[static_cast<std::size_t>(i)];
    const Point& b = coords[static_cast<std::size_t>(j)];
    return std::hypot(a.x - b.x, a.y - b.y);
  }

  bool valid_vertex(Vertex v) const { return v >= 0 && v <= 2 * n + 1; }

  /// True when some demand exceeds capacity; such requests can never be served.
  bool degenerate() const;

  /// Throws ConfigError when the field invariants do not hold.
  void check() const;
};

enum class Violation { repeat_visit, precedence, capacity, length };

std::string_view to_string(Violation v);

struct EvalResult {
  double length = 0.0;
  double revenue = 0.0;
  double profit = 0.0;
  bool feasible = false;
  std::optional<Violation> violation;
};

/// Sum of consecutive Euclidean distances. Throws InvalidVertex on a bad index.
double route_length(const Instance& inst, std::span<const Vertex> seq);

/// Load carried after each vertex of seq; the first entry is the start load 0.
std::vector<int> load_profile(const Instance& inst, std::span<const Vertex> seq);

/// Full feasibility check. The first violation is reported in the fixed order
/// repeat -> precedence -> capacity -> length. Wrong endpoints and unpaired
/// visits count as precedence violations.
EvalResult validate_route(const Instance& inst, std::span<const Vertex> seq);

/// A structurally valid route: starts at 0, ends at 2n+1, no repeats, and every
/// visited pickup's delivery comes later (and vice versa). Capacity and length
/// may be violated; use feasible() or validate_route for those.
class Route {
 public:
  /// Throws InvalidVertex or StructuralError.
  Route(const Instance& inst, std::vector<Vertex> seq);

  /// The route (0, 2n+1).
  static Route empty(const Instance& inst);

  const std::vector<Vertex>& seq() const { return seq_; }
  /// Served request ids in ascending order.
  const std::vector<RequestId>& served() const { return served_; }
  double length() const { return length_; }
  double revenue() const { return revenue_; }
  double profit() const { return revenue_ - length_; }
  bool capacity_ok() const { return capacity_ok_; }
  bool length_ok() const { return length_ok_; }
  bool feasible() const { return capacity_ok_ && length_ok_; }
  bool serves(RequestId h) const;

  friend bool operator==(const Route& a, const Route& b) { return a.seq_ == b.seq_; }

 private:
  std::vector<Vertex> seq_;
  std::vector<RequestId> served_;
  double length_ = 0.0;
  double revenue_ = 0.0;
  bool capacity_ok_ = true;
  bool length_ok_ = true;
};

/// Sum of revenue over the requests whose pickup and delivery both appear.
/// Summed in ascending request order so equal served sets give equal bits.
double collected_revenue(const Instance& inst, const Route& route);
double collected_revenue(const Instance& inst, std::span<const Vertex> seq);

/// -revenue + rho * max(0, length - T).
double shaped_objective(const Instance& inst, const Route& route, double rho);

/// Total order used for tie-breaking everywhere: revenue descending, then
/// length ascending, then lexicographic sequence.
bool better(const Route& a, const Route& b);

/// Same served set as a key, for deduplication.
bool same_served(const Route& a, const Route& b);

}  // namespace pdstsp
