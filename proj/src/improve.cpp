#include "pdstsp/improve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

namespace pdstsp {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void require_feasible(const Route& route, const char* who) {
  if (!route.feasible()) throw InfeasibleRoute(std::string(who) + ": input route is infeasible");
}

std::vector<Vertex> with_insertion(std::span<const Vertex> seq, std::size_t after_p, std::size_t after_d, Vertex p,
                                   Vertex d) {
  std::vector<Vertex> out;
  out.reserve(seq.size() + 2);
  for (std::size_t m = 0; m < seq.size(); ++m) {
    out.push_back(seq[m]);
    if (m == after_p) out.push_back(p);
    if (m == after_d) out.push_back(d);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Repair

Route repair(const Instance& inst, const Route& route) {
  require_feasible(route, "repair");
  Route current = route;
  while (true) {
    const auto& seq = current.seq();
    const auto loads = load_profile(inst, seq);
    const std::size_t last = seq.size() - 1;
    const double base = current.length();
    const double limit = inst.max_length + kLengthTol;

    struct Best {
      RequestId h = 0;
      std::size_t i = 0;
      std::size_t k = 0;
      double length = 0.0;
    } best;

    auto consider = [&](RequestId h, std::size_t i, std::size_t k, double length) {
      if (length > limit) return;
      if (best.h != 0) {
        const double rb = inst.revenue_of(best.h);
        const double rh = inst.revenue_of(h);
        if (rh < rb) return;
        if (rh == rb) {
          if (length > best.length) return;
          if (length == best.length &&
              !(with_insertion(seq, i, k, inst.pickup(h), inst.delivery(h)) <
                with_insertion(seq, best.i, best.k, inst.pickup(best.h), inst.delivery(best.h))))
            return;
        }
      }
      best = {h, i, k, length};
    };

    for (RequestId h = 1; h <= inst.n; ++h) {
      if (current.serves(h) || inst.revenue_of(h) <= 0.0) continue;
      const int q = inst.demand_of(h);
      const Vertex p = inst.pickup(h);
      const Vertex d = inst.delivery(h);
      for (std::size_t i = 0; i < last; ++i) {
        if (loads[i] + q > inst.capacity) continue;
        const double cut = inst.dist(seq[i], seq[i + 1]);
        consider(h, i, i, base + inst.dist(seq[i], p) + inst.dist(p, d) + inst.dist(d, seq[i + 1]) - cut);
        const double add_p = inst.dist(seq[i], p) + inst.dist(p, seq[i + 1]) - cut;
        for (std::size_t k = i + 1; k < last; ++k) {
          if (loads[k] + q > inst.capacity) break;
          consider(h, i, k,
                   base + add_p + inst.dist(seq[k], d) + inst.dist(d, seq[k + 1]) - inst.dist(seq[k], seq[k + 1]));
        }
      }
    }
    if (best.h == 0) return current;
    Route next(inst, with_insertion(seq, best.i, best.k, inst.pickup(best.h), inst.delivery(best.h)));
    // Incremental length can disagree with the recomputed sum in the last ulp.
    if (!next.feasible()) return current;
    current = std::move(next);
  }
}

Route destroy(const Instance& inst, const Route& route, std::span<const RequestId> requests) {
  std::vector<Vertex> seq;
  seq.reserve(route.seq().size());
  for (Vertex v : route.seq()) {
    const RequestId h = inst.request_of(v);
    if (h > 0 && std::find(requests.begin(), requests.end(), h) != requests.end()) continue;
    seq.push_back(v);
  }
  return Route(inst, std::move(seq));
}

// ---------------------------------------------------------------------------
// 2-Opt, HC

Route two_opt_route(const Instance& inst, const Route& route) {
  require_feasible(route, "two_opt_route");
  std::vector<Vertex> seq = route.seq();
  const std::size_t last = seq.size() - 1;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 1; i + 1 < last; ++i) {
      for (std::size_t k = i + 1; k < last; ++k) {
        const double delta = inst.dist(seq[i - 1], seq[k]) + inst.dist(seq[i], seq[k + 1]) -
                             inst.dist(seq[i - 1], seq[i]) - inst.dist(seq[k], seq[k + 1]);
        if (delta >= -1e-12) continue;
        std::vector<Vertex> cand = seq;
        std::reverse(cand.begin() + static_cast<std::ptrdiff_t>(i), cand.begin() + static_cast<std::ptrdiff_t>(k) + 1);
        if (!validate_route(inst, cand).feasible) continue;
        seq = std::move(cand);
        improved = true;
      }
    }
  }
  Route out(inst, std::move(seq));
  return out.length() <= route.length() ? out : route;
}

Route hill_climb(const Instance& inst, const Route& route) {
  Route current = route;
  while (true) {
    Route next = two_opt_route(inst, repair(inst, current));
    if (next == current) return current;
    current = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// LNS family

Deadline::Deadline(double t_max) : start_(now_seconds()) {
  if (t_max > 0.0) limit_ = t_max;
}

bool Deadline::expired() const { return limit_ && now_seconds() - start_ >= *limit_; }

std::vector<Route> one_destroy_neighbors(const Instance& inst, const Route& route) {
  std::vector<Route> out;
  for (RequestId h : route.served()) {
    const RequestId drop[] = {h};
    out.push_back(repair(inst, destroy(inst, route, drop)));
  }
  std::sort(out.begin(), out.end(), better);
  return out;
}

Route bi_lns(const Instance& inst, const Route& route, double t_max) {
  require_feasible(route, "bi_lns");
  const Deadline deadline(t_max);
  Route current = route;
  while (!deadline.expired()) {
    std::optional<Route> best;
    for (RequestId h : current.served()) {
      const RequestId drop[] = {h};
      Route cand = repair(inst, destroy(inst, current, drop));
      if (!best || better(cand, *best)) best = std::move(cand);
      if (deadline.expired()) break;
    }
    if (!best || best->revenue() <= current.revenue() + kRevenueTol) break;
    current = std::move(*best);
  }
  return current;
}

Route lns_random(const Instance& inst, const Route& route, const LnsConfig& cfg) {
  require_feasible(route, "lns_random");
  if (cfg.t_max <= 0.0 && cfg.max_iters < 0) throw ConfigError("lns_random: needs a time or iteration budget");
  if (cfg.k_max < 1) throw ConfigError("lns_random: k_max must be >= 1");
  Rng rng(cfg.seed);
  const Deadline deadline(cfg.t_max);
  Route current = route;
  for (long it = 0; cfg.max_iters < 0 || it < cfg.max_iters; ++it) {
    if (deadline.expired()) break;
    std::vector<RequestId> served = current.served();
    Route cand = current;
    if (served.empty()) {
      cand = repair(inst, current);
    } else {
      const auto k = std::min<std::int64_t>(rng.uniform_int(1, cfg.k_max), static_cast<std::int64_t>(served.size()));
      rng.shuffle(served);
      served.resize(static_cast<std::size_t>(k));
      cand = repair(inst, destroy(inst, current, served));
    }
    if (cand.revenue() > current.revenue() + kRevenueTol) current = std::move(cand);
  }
  return current;
}

// ---------------------------------------------------------------------------
// Simulated annealing

std::string_view to_string(SaMove m) {
  switch (m) {
    case SaMove::swap:
      return "swap";
    case SaMove::insert:
      return "insert";
    case SaMove::replace:
      return "replace";
    case SaMove::destroy:
      return "destroy";
  }
  return "swap";
}

std::optional<Route> sa_propose(const Instance& inst, const Route& route, SaMove move, Rng& rng) {
  std::vector<Vertex> seq = route.seq();
  const auto size = static_cast<std::int64_t>(seq.size());
  std::vector<RequestId> unserved;
  for (RequestId h = 1; h <= inst.n; ++h) {
    if (!route.serves(h)) unserved.push_back(h);
  }
  const auto& served = route.served();
  auto pick = [&](const std::vector<RequestId>& from) {
    return from[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(from.size()) - 1))];
  };

  switch (move) {
    case SaMove::swap: {
      if (size < 4) return std::nullopt;
      const auto i = rng.uniform_int(1, size - 2);
      auto j = rng.uniform_int(1, size - 3);
      if (j >= i) ++j;
      std::swap(seq[static_cast<std::size_t>(i)], seq[static_cast<std::size_t>(j)]);
      break;
    }
    case SaMove::insert: {
      if (unserved.empty()) return std::nullopt;
      const RequestId h = pick(unserved);
      const auto a = rng.uniform_int(1, size - 1);
      seq.insert(seq.begin() + a, inst.pickup(h));
      const auto b = rng.uniform_int(a + 1, size);
      seq.insert(seq.begin() + b, inst.delivery(h));
      break;
    }
    case SaMove::replace: {
      if (unserved.empty() || served.empty()) return std::nullopt;
      const RequestId out = pick(served);
      const RequestId in = pick(unserved);
      for (Vertex& v : seq) {
        if (v == inst.pickup(out)) v = inst.pickup(in);
        else if (v == inst.delivery(out)) v = inst.delivery(in);
      }
      break;
    }
    case SaMove::destroy: {
      if (served.empty()) return std::nullopt;
      const RequestId out = pick(served);
      std::erase_if(seq, [&](Vertex v) { return inst.request_of(v) == out; });
      break;
    }
  }
  if (!validate_route(inst, seq).feasible) return std::nullopt;
  return Route(inst, std::move(seq));
}

bool sa_accept(double delta, double temperature, Rng& rng) {
  if (delta <= 0.0) return true;
  if (temperature <= 0.0) return false;
  return rng.uniform() < std::exp(-delta / temperature);
}

Route simulated_annealing(const Instance& inst, const Route& route, const SaConfig& cfg) {
  require_feasible(route, "simulated_annealing");
  if (!(cfg.cooling > 0.0 && cfg.cooling < 1.0)) throw ConfigError("simulated_annealing: cooling must be in (0, 1)");
  constexpr SaMove kMoves[] = {SaMove::swap, SaMove::insert, SaMove::replace, SaMove::destroy};
  Rng rng(cfg.seed);
  const Deadline deadline(cfg.t_max);
  Route current = route;
  Route best = route;
  for (double temp = cfg.t0; temp > cfg.t_stop && !deadline.expired(); temp *= cfg.cooling) {
    for (int it = 0; it < cfg.iters_per_temp; ++it) {
      const SaMove move = kMoves[rng.uniform_int(0, 3)];
      auto cand = sa_propose(inst, current, move, rng);
      if (!cand) continue;
      const double delta = current.revenue() - cand->revenue();
      if (!sa_accept(delta, temp, rng)) continue;
      current = std::move(*cand);
      if (better(current, best)) best = current;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// MSLNS

std::vector<std::pair<RequestId, int>> count_unique(std::span<const Route> routes, const std::set<RequestId>& memory) {
  std::map<RequestId, int> counts;
  for (const Route& r : routes) {
    for (RequestId h : r.served()) {
      if (!memory.count(h)) ++counts[h];
    }
  }
  return {counts.begin(), counts.end()};
}

std::vector<double> removal_probabilities(std::span<const int> counts, double alpha) {
  std::vector<double> p(counts.size(), 0.0);
  if (counts.empty()) return p;
  double top = alpha * counts[0];
  for (int c : counts) top = std::max(top, alpha * c);
  double total = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    p[k] = std::exp(alpha * counts[k] - top);
    total += p[k];
  }
  for (double& x : p) x /= total;
  return p;
}

namespace {

// Best route per served set, best first, at most `width` entries.
std::vector<Route> dedup_top(std::vector<Route> routes, std::size_t width) {
  std::sort(routes.begin(), routes.end(), better);
  std::vector<Route> out;
  for (auto& r : routes) {
    if (out.size() >= width) break;
    if (std::any_of(out.begin(), out.end(), [&](const Route& o) { return same_served(o, r); })) continue;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

Route mslns(const Instance& inst, std::span<const Route> seeds, const MslnsConfig& cfg, const MslnsObserver& observer) {
  if (seeds.empty()) throw ConfigError("mslns: needs at least one seed route");
  if (cfg.beta < 1 || cfg.k_max < 1) throw ConfigError("mslns: beta and k_max must be >= 1");
  for (const Route& s : seeds) require_feasible(s, "mslns");

  std::vector<Route> initial(seeds.begin(), seeds.end());
  if (!cfg.multistart) {
    std::sort(initial.begin(), initial.end(), better);
    initial.erase(initial.begin() + 1, initial.end());
  }

  Rng rng(cfg.seed);
  const Deadline deadline(cfg.t_max);
  SolutionPool pool;
  pool.routes = dedup_top(std::move(initial), SIZE_MAX);
  pool.incumbent_best = pool.routes.front();

  while (!deadline.expired()) {
    const auto unique = count_unique(pool.routes, pool.memory);
    if (unique.empty()) break;

    const int want = cfg.schedule == DestroySchedule::increasing ? std::min(pool.iteration + 1, cfg.k_max) : cfg.k_max;
    const auto k = std::min(static_cast<std::size_t>(want), unique.size());

    // Draw without replacement: renormalize over the requests still in play,
    // so a sharp softmax cannot underflow the runners-up to zero.
    std::vector<RequestId> chosen;
    std::vector<std::pair<RequestId, int>> left = unique;
    for (std::size_t s = 0; s < k; ++s) {
      std::vector<double> weights(left.size(), 1.0);
      if (cfg.removal == RemovalRule::softmax) {
        std::vector<int> counts;
        for (const auto& [h, c] : left) counts.push_back(c);
        weights = removal_probabilities(counts, cfg.alpha);
      }
      const std::size_t idx = rng.categorical(weights);
      chosen.push_back(left[idx].first);
      left.erase(left.begin() + static_cast<std::ptrdiff_t>(idx));
    }
    pool.memory.insert(chosen.begin(), chosen.end());

    std::vector<Route> merged = pool.routes;
    for (const Route& r : pool.routes) merged.push_back(two_opt_route(inst, repair(inst, destroy(inst, r, chosen))));
    pool.routes = dedup_top(std::move(merged), static_cast<std::size_t>(cfg.beta));
    if (better(pool.routes.front(), *pool.incumbent_best)) pool.incumbent_best = pool.routes.front();
    if (observer) observer(pool, chosen);
    ++pool.iteration;
  }
  return *pool.incumbent_best;
}

}  // namespace pdstsp
