#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdstsp/core.hpp"
#include "pdstsp/improve.hpp"
#include "pdstsp/search.hpp"

namespace pdstsp {

// Method strings follow `constructor[+improver]`, e.g. "gs+hc", "msgs+mslns".
//   constructors: gs, msgs, decode, sgbs, exact
//   improvers:    hc, 2opt, bilns, lns, sa, mslns

enum class Constructor { gs, msgs, decode, sgbs, exact };
enum class Improver { hc, two_opt, bilns, lns, sa, mslns };

struct MethodSpec {
  std::string label;
  Constructor constructor = Constructor::gs;
  std::optional<Improver> improver;
};

/// Throws ConfigError on an unknown token.
MethodSpec parse_method(std::string_view text);

/// Knobs shared by every method; unused ones are ignored.
struct MethodParams {
  int starts = 0;          // M for msgs/multistart decode/mslns seeds; 0 means max(1, n/2)
  int beta = 3;            // MSLNS pool width
  int sgbs_beta = 5;
  int sgbs_gamma = 5;
  double alpha = 1.0;
  int k_max = 4;           // MSLNS
  int lns_k_max = 3;       // random LNS
  double t_max = 1.0;      // seconds, for bilns/lns/sa/mslns
  long max_iters = -1;     // random LNS iteration cap
  DecodeConfig decode;
  RemovalRule removal = RemovalRule::softmax;
  DestroySchedule schedule = DestroySchedule::increasing;
  bool multistart = true;
  int exact_max_n = 6;
  /// Replayed trajectories per instance id for the `decode` constructor.
  const std::map<std::string, std::vector<std::vector<Vertex>>>* trajectories = nullptr;
};

/// Candidate routes from the constructor, best first; at least one, all
/// feasible (infeasible train-mode decodes are dropped, falling back to the
/// empty route).
std::vector<Route> construct(const Instance& inst, Constructor c, const MethodParams& params, std::uint64_t seed,
                             const std::string& instance_id);

/// Run a full method on one instance. The result is always feasible.
Route run_method(const Instance& inst, const MethodSpec& spec, const MethodParams& params, std::uint64_t seed,
                 const std::string& instance_id = "0");

}  // namespace pdstsp
