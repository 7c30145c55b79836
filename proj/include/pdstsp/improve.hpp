#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "pdstsp/core.hpp"
#include "pdstsp/rng.hpp"

namespace pdstsp {

/// Greedy best insertion. Each round scans every unserved request, every
/// capacity-feasible interval and every pickup/delivery position pair inside
/// it, and applies the single best insertion that fits T (highest revenue,
/// then shortest route). Stops at the first round without an insertion.
/// Throws InfeasibleRoute on infeasible input.
Route repair(const Instance& inst, const Route& route);

/// `route` without the given requests.
Route destroy(const Instance& inst, const Route& route, std::span<const RequestId> requests);

/// Segment-reversal 2-Opt keeping only feasible, strictly shorter reversals.
Route two_opt_route(const Instance& inst, const Route& route);

/// Alternate repair and 2-Opt until neither changes the route.
Route hill_climb(const Instance& inst, const Route& route);

/// Wall-clock budget in seconds; infinite when t_max <= 0.
class Deadline {
 public:
  explicit Deadline(double t_max);
  bool expired() const;

 private:
  std::optional<double> limit_;
  double start_ = 0.0;
};

/// All single-request destroy+repair neighbors of `route`, best first.
std::vector<Route> one_destroy_neighbors(const Instance& inst, const Route& route);

/// 1-destroy best-improvement LNS. Each round tries every served request:
/// remove it, repair, and move to the best neighbor if it strictly raises
/// revenue. Stops when a round finds nothing or the budget runs out; a
/// converged result is a 1-attractor.
Route bi_lns(const Instance& inst, const Route& route, double t_max = 0.0);

struct LnsConfig {
  int k_max = 3;
  double t_max = 1.0;
  long max_iters = -1;  // -1: bounded by time only
  std::uint64_t seed = 0;
};

/// Random-destroy LNS: remove k ~ Unif{1..k_max} random served requests,
/// repair, accept only strict revenue improvement.
Route lns_random(const Instance& inst, const Route& route, const LnsConfig& cfg);

struct SaConfig {
  double t0 = 10.0;
  double cooling = 0.95;
  double t_stop = 0.01;
  int iters_per_temp = 20;
  double t_max = 0.0;
  std::uint64_t seed = 0;
};

enum class SaMove { swap, insert, replace, destroy };

std::string_view to_string(SaMove m);

/// One random move of the given kind; nullopt when the move is impossible or
/// yields an infeasible route.
std::optional<Route> sa_propose(const Instance& inst, const Route& route, SaMove move, Rng& rng);

/// Metropolis acceptance for f = -revenue: always when delta <= 0, else with
/// probability exp(-delta / temperature).
bool sa_accept(double delta, double temperature, Rng& rng);

Route simulated_annealing(const Instance& inst, const Route& route, const SaConfig& cfg);

enum class RemovalRule { softmax, uniform };
enum class DestroySchedule { increasing, fixed_k };

struct MslnsConfig {
  int starts = 5;  // M, used when seeds are generated
  int beta = 3;
  double alpha = 1.0;
  int k_max = 4;
  double t_max = 1.0;
  RemovalRule removal = RemovalRule::softmax;
  DestroySchedule schedule = DestroySchedule::increasing;
  bool multistart = true;
  std::uint64_t seed = 0;
};

struct SolutionPool {
  std::vector<Route> routes;     // distinct served sets, best first
  std::set<RequestId> memory;    // requests destroyed so far
  int iteration = 1;
  std::optional<Route> incumbent_best;
};

/// Occurrence count of each served request across routes, skipping `memory`.
std::vector<std::pair<RequestId, int>> count_unique(std::span<const Route> routes, const std::set<RequestId>& memory);

/// softmax(alpha * counts).
std::vector<double> removal_probabilities(std::span<const int> counts, double alpha);

/// Called after every MSLNS iteration with the pool and the requests destroyed.
using MslnsObserver = std::function<void(const SolutionPool&, std::span<const RequestId>)>;

/// Multi-start LNS over a deduplicated pool of seed routes. Each iteration
/// draws min(i+1, k_max) not-yet-destroyed requests by softmax over their pool
/// frequency, removes them from every pool route, repairs and 2-Opts each,
/// and keeps the top-beta distinct served sets of old and new routes. Each
/// request is destroyed at most once. Throws InfeasibleRoute on a bad seed.
Route mslns(const Instance& inst, std::span<const Route> seeds, const MslnsConfig& cfg,
            const MslnsObserver& observer = {});

}  // namespace pdstsp
