#include "pdstsp/methods.hpp"

#include <algorithm>

#include "pdstsp/exact.hpp"

namespace pdstsp {

namespace {

Constructor constructor_from(std::string_view t) {
  if (t == "gs") return Constructor::gs;
  if (t == "msgs") return Constructor::msgs;
  if (t == "decode") return Constructor::decode;
  if (t == "sgbs") return Constructor::sgbs;
  if (t == "exact") return Constructor::exact;
  throw ConfigError("unknown constructor '" + std::string(t) + "' (expected gs, msgs, decode, sgbs or exact)");
}

Improver improver_from(std::string_view t) {
  if (t == "hc") return Improver::hc;
  if (t == "2opt") return Improver::two_opt;
  if (t == "bilns") return Improver::bilns;
  if (t == "lns") return Improver::lns;
  if (t == "sa") return Improver::sa;
  if (t == "mslns") return Improver::mslns;
  throw ConfigError("unknown improver '" + std::string(t) + "' (expected hc, 2opt, bilns, lns, sa or mslns)");
}

int resolved_starts(const Instance& inst, const MethodParams& p) {
  return p.starts > 0 ? p.starts : std::max(1, inst.n / 2);
}

}  // namespace

MethodSpec parse_method(std::string_view text) {
  MethodSpec spec;
  spec.label = std::string(text);
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  const auto plus = lower.find('+');
  spec.constructor = constructor_from(std::string_view(lower).substr(0, plus));
  if (plus != std::string::npos) {
    const auto rest = std::string_view(lower).substr(plus + 1);
    if (rest.find('+') != std::string_view::npos) throw ConfigError("method '" + spec.label + "' has more than one improver");
    spec.improver = improver_from(rest);
  }
  return spec;
}

std::vector<Route> construct(const Instance& inst, Constructor c, const MethodParams& params, std::uint64_t seed,
                             const std::string& instance_id) {
  std::vector<Route> routes;
  switch (c) {
    case Constructor::gs:
      routes.push_back(greedy_search(inst));
      break;
    case Constructor::msgs:
      routes = multi_start_greedy(inst, resolved_starts(inst, params)).routes;
      break;
    case Constructor::decode: {
      DecodeConfig cfg = params.decode;
      if (cfg.starts <= 0) cfg.starts = resolved_starts(inst, params);
      if (params.trajectories) {
        const auto it = params.trajectories->find(instance_id);
        if (it == params.trajectories->end())
          throw ConfigError("no trajectories for instance '" + instance_id + "' in the seeds file");
        routes = decode(inst, ExternalScorer::from_trajectories(it->second), cfg, seed);
      } else {
        routes = decode(inst, FitnessScorer{}, cfg, seed);
      }
      break;
    }
    case Constructor::sgbs: {
      const FitnessScorer fitness;
      routes.push_back(sgbs(inst, fitness, params.sgbs_beta, params.sgbs_gamma, fitness, params.decode.mask_mode,
                            params.decode.rho));
      break;
    }
    case Constructor::exact:
      routes.push_back(exhaustive_solve(inst, params.exact_max_n));
      break;
  }
  std::erase_if(routes, [](const Route& r) { return !r.feasible(); });
  if (routes.empty()) routes.push_back(Route::empty(inst));
  std::sort(routes.begin(), routes.end(), better);
  return routes;
}

Route run_method(const Instance& inst, const MethodSpec& spec, const MethodParams& params, std::uint64_t seed,
                 const std::string& instance_id) {
  std::vector<Route> pool = construct(inst, spec.constructor, params, seed, instance_id);
  if (!spec.improver) return pool.front();
  const Route& best = pool.front();
  switch (*spec.improver) {
    case Improver::hc:
      return hill_climb(inst, best);
    case Improver::two_opt:
      return two_opt_route(inst, best);
    case Improver::bilns:
      return bi_lns(inst, best, params.t_max);
    case Improver::lns:
      return lns_random(inst, best, {params.lns_k_max, params.t_max, params.max_iters, seed});
    case Improver::sa: {
      SaConfig cfg;
      cfg.t_max = params.t_max;
      cfg.seed = seed;
      return simulated_annealing(inst, best, cfg);
    }
    case Improver::mslns: {
      MslnsConfig cfg;
      cfg.starts = resolved_starts(inst, params);
      cfg.beta = params.beta;
      cfg.alpha = params.alpha;
      cfg.k_max = params.k_max;
      cfg.t_max = params.t_max;
      cfg.removal = params.removal;
      cfg.schedule = params.schedule;
      cfg.multistart = params.multistart;
      cfg.seed = seed;
      return mslns(inst, pool, cfg);
    }
  }
  return best;
}

}  // namespace pdstsp
