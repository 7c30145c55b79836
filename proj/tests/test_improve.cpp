#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "pdstsp/exact.hpp"
#include "pdstsp/improve.hpp"
#include "pdstsp/search.hpp"
#include "test_helpers.hpp"

using namespace pdstsp;
using namespace pdstsp::testing;

namespace {

std::vector<RequestId> unserved(const Instance& inst, const std::vector<Vertex>& seq) {
  std::vector<RequestId> out;
  for (RequestId h = 1; h <= inst.n; ++h)
    if (std::find(seq.begin(), seq.end(), h) == seq.end()) out.push_back(h);
  return out;
}

// Every feasible single-request insertion into seq.
std::vector<std::vector<Vertex>> all_insertions(const Instance& inst, const std::vector<Vertex>& seq) {
  std::vector<std::vector<Vertex>> out;
  for (RequestId h : unserved(inst, seq)) {
    for (std::size_t i = 1; i < seq.size(); ++i) {
      for (std::size_t j = i; j < seq.size(); ++j) {
        std::vector<Vertex> cand = seq;
        cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(i), h);
        cand.insert(cand.begin() + static_cast<std::ptrdiff_t>(j + 1), h + inst.n);
        if (naive_feasible(inst, cand)) out.push_back(std::move(cand));
      }
    }
  }
  return out;
}

// Best single insertion by revenue, then length, then sequence.
std::optional<std::vector<Vertex>> best_insertion(const Instance& inst, const std::vector<Vertex>& seq) {
  std::optional<std::vector<Vertex>> best;
  for (auto& cand : all_insertions(inst, seq)) {
    if (!best) {
      best = cand;
      continue;
    }
    const double rc = naive_revenue(inst, cand), rb = naive_revenue(inst, *best);
    const double lc = naive_length(inst, cand), lb = naive_length(inst, *best);
    if (rc > rb + 1e-12 || (std::abs(rc - rb) <= 1e-12 && (lc < lb - 1e-12 || (std::abs(lc - lb) <= 1e-12 && cand < *best))))
      best = cand;
  }
  return best;
}

std::set<RequestId> served_set(const Route& r) { return {r.served().begin(), r.served().end()}; }

}  // namespace

TEST_CASE("repair matches brute-force best insertion") {
  int inserted = 0, rejected = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Instance inst = random_instance(5, 3000 + seed, RevenueSetting::uniform);
    inst.max_length = 100.0;
    Rng rng(seed);
    // Route serving all requests but one; then squeeze T so the last request
    // sometimes fits and sometimes does not.
    std::vector<Vertex> seq{0, inst.end()};
    for (RequestId h = 1; h < inst.n; ++h) {
      const auto i = rng.uniform_int(1, static_cast<std::int64_t>(seq.size()) - 1);
      seq.insert(seq.begin() + i, h);
      const auto j = rng.uniform_int(i + 1, static_cast<std::int64_t>(seq.size()) - 1);
      seq.insert(seq.begin() + j, h + inst.n);
    }
    inst.capacity = 100;
    inst.max_length = naive_length(inst, seq) + rng.uniform(0.0, 0.6);
    const Route in(inst, seq);
    REQUIRE(unserved(inst, seq).size() == 1);
    const Route out = repair(inst, in);
    const auto want = best_insertion(inst, seq);
    if (!want) {
      CHECK(out == in);
      ++rejected;
    } else {
      CHECK(out.seq() == *want);
      ++inserted;
    }
  }
  CHECK(inserted > 20);
  CHECK(rejected > 20);
  MESSAGE("insertions checked: " << inserted << ", no-fit cases: " << rejected);

  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const Instance inst = random_instance(6, 4000 + seed);
    Rng rng(seed);
    const Route in(inst, random_feasible_seq(inst, rng, 3));
    const Route out = repair(inst, in);
    CHECK(naive_feasible(inst, out.seq()));
    CHECK(out.revenue() >= in.revenue() - 1e-12);
    // Fixpoint: nothing else fits.
    CHECK(all_insertions(inst, out.seq()).empty());
    // The requests served before are still served.
    for (RequestId h : in.served()) CHECK(served_set(out).count(h) == 1);
  }

  const Instance inst = random_instance(3, 5);
  Instance tight = inst;
  tight.max_length = naive_length(tight, {0, tight.end()});
  CHECK(repair(tight, Route::empty(tight)) == Route::empty(tight));
  const Route over(tight, {0, 1, 4, 7});
  CHECK_THROWS_AS(repair(tight, over), InfeasibleRoute);
}

TEST_CASE("destroy removes exactly the given requests") {
  const Instance inst = random_instance(5, 8);
  Rng rng(1);
  const Route r = repair(inst, Route::empty(inst));
  if (r.served().size() >= 2) {
    const std::vector<RequestId> drop{r.served()[0]};
    const Route d = destroy(inst, r, drop);
    CHECK(d.served().size() + 1 == r.served().size());
    CHECK(served_set(d).count(drop[0]) == 0);
  }
}

TEST_CASE("two_opt_route uncrosses a planted crossing") {
  // Two deliveries visited in the worse of their two orders.
  const Instance inst = make_instance(
      {{0.0, 0.5}, {0.1, 0.45}, {0.1, 0.55}, {0.6, 0.95}, {0.6, 0.05}, {1.0, 0.5}}, {1, 1}, {1, 1}, 10, 10.0);
  std::vector<Vertex> a{0, 1, 2, 3, 4, 5};
  std::vector<Vertex> b{0, 1, 2, 4, 3, 5};
  if (naive_length(inst, a) < naive_length(inst, b)) std::swap(a, b);
  REQUIRE(naive_length(inst, a) > naive_length(inst, b) + 0.05);
  const Route out = two_opt_route(inst, Route(inst, a));
  CHECK(out.length() < naive_length(inst, a) - 0.05);
  CHECK(served_set(out) == std::set<RequestId>{1, 2});

  // Exhaustive reorder oracle over the same served set.
  double best = 1e18;
  enumerate_all_sequences(inst, [&](const std::vector<Vertex>& seq) {
    if (seq.size() == 6 && naive_feasible(inst, seq)) best = std::min(best, naive_length(inst, seq));
  });
  CHECK(out.length() == doctest::Approx(best));

  const Route empty = Route::empty(inst);
  CHECK(two_opt_route(inst, empty) == empty);
  CHECK(two_opt_route(inst, out) == out);
}

TEST_CASE("two_opt_route keeps served set and feasibility") {
  Rng rng(21);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Instance inst = random_instance(7, 5000 + seed, RevenueSetting::constant);
    const Route in(inst, random_feasible_seq(inst, rng));
    const Route out = two_opt_route(inst, in);
    CHECK(naive_feasible(inst, out.seq()));
    CHECK(served_set(out) == served_set(in));
    CHECK(out.length() <= in.length() + 1e-12);
  }
}

TEST_CASE("hill climbing") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const Instance inst = random_instance(8, 6000 + seed);
    const Route gs = greedy_search(inst);
    const Route hc = hill_climb(inst, gs);
    CHECK(naive_feasible(inst, hc.seq()));
    CHECK(hc.revenue() >= gs.revenue() - kRevenueTol);
    CHECK(repair(inst, hc) == hc);
    CHECK(two_opt_route(inst, hc) == hc);
    CHECK(hill_climb(inst, hc) == hc);
  }
}

TEST_CASE("best-improvement LNS") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 3 + static_cast<int>(seed % 3);
    const Instance inst = random_instance(n, 7000 + seed, RevenueSetting::uniform);
    const Route gs = greedy_search(inst);
    const Route out = bi_lns(inst, gs);
    CHECK(naive_feasible(inst, out.seq()));
    CHECK(out.revenue() >= gs.revenue() - kRevenueTol);
    CHECK(out.revenue() <= exhaustive_solve(inst).revenue() + kRevenueTol);
  }
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Instance inst = random_instance(10, 7500 + seed);
    const Route out = bi_lns(inst, greedy_search(inst));
    // 1-attractor: no single destroy + repair raises revenue.
    for (RequestId h : out.served()) {
      const std::vector<RequestId> one{h};
      CHECK(repair(inst, destroy(inst, out, one)).revenue() <= out.revenue() + kRevenueTol);
    }
    CHECK(bi_lns(inst, out) == out);
  }
}

TEST_CASE("random LNS") {
  const Instance inst = random_instance(12, 99);
  LnsConfig cfg;
  cfg.t_max = 0.0;
  cfg.max_iters = 300;
  cfg.seed = 4;
  const Route gs = greedy_search(inst);
  const Route a = lns_random(inst, gs, cfg);
  const Route b = lns_random(inst, gs, cfg);
  CHECK(a == b);
  CHECK(a.revenue() >= gs.revenue() - kRevenueTol);
  CHECK(naive_feasible(inst, a.seq()));

  const Route from_empty = lns_random(inst, Route::empty(inst), cfg);
  CHECK(from_empty.revenue() >= repair(inst, Route::empty(inst)).revenue() - kRevenueTol);

  // More iterations never end worse with the same stream.
  LnsConfig longer = cfg;
  longer.max_iters = 600;
  CHECK(lns_random(inst, gs, longer).revenue() >= a.revenue() - kRevenueTol);

  LnsConfig unbounded = cfg;
  unbounded.max_iters = -1;
  CHECK_THROWS_AS(lns_random(inst, gs, unbounded), ConfigError);
}

TEST_CASE("simulated annealing") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) CHECK(sa_accept(0.0, 1.0, rng));
  for (int i = 0; i < 100; ++i) CHECK(sa_accept(-0.3, 1e-9, rng));
  for (int i = 0; i < 100; ++i) CHECK_FALSE(sa_accept(0.01, 1e-12, rng));
  int accepted = 0;
  for (int i = 0; i < 20000; ++i) accepted += sa_accept(1.0, 1.0, rng) ? 1 : 0;
  CHECK(accepted / 20000.0 == doctest::Approx(std::exp(-1.0)).epsilon(0.05));

  // Fuzz: every proposed move is feasible or rejected.
  Rng fuzz(6);
  int produced = 0;
  std::map<SaMove, int> by_kind;
  for (int i = 0; i < 10000; ++i) {
    const Instance inst = random_instance(6, 8000 + static_cast<std::uint64_t>(i % 50));
    const Route r(inst, random_feasible_seq(inst, fuzz, 10));
    const auto move = static_cast<SaMove>(fuzz.uniform_int(0, 3));
    if (auto cand = sa_propose(inst, r, move, fuzz)) {
      CHECK(naive_feasible(inst, cand->seq()));
      ++produced;
      ++by_kind[move];
    }
  }
  CHECK(produced > 1000);
  CHECK(by_kind.size() == 4);

  const Instance inst = random_instance(10, 1);
  SaConfig cfg;
  cfg.seed = 2;
  const Route gs = greedy_search(inst);
  const Route a = simulated_annealing(inst, gs, cfg);
  CHECK(naive_feasible(inst, a.seq()));
  CHECK(a.revenue() >= gs.revenue() - kRevenueTol);
  CHECK(simulated_annealing(inst, gs, cfg) == a);
}

TEST_CASE("removal counts and probabilities") {
  const Instance inst = make_instance({{0, 0}, {.1, 0}, {.2, 0}, {.3, 0}, {.4, 0}, {.5, 0}, {.6, 0}, {.7, 0}},
                                      {1, 1, 1}, {1, 1, 1}, 10, 10.0);
  const std::vector<Route> pool{Route(inst, {0, 1, 2, 4, 5, 7}), Route(inst, {0, 1, 3, 4, 6, 7})};
  const auto counts = count_unique(pool, {});
  CHECK(counts == std::vector<std::pair<RequestId, int>>{{1, 2}, {2, 1}, {3, 1}});
  CHECK(count_unique(pool, {1}) == std::vector<std::pair<RequestId, int>>{{2, 1}, {3, 1}});

  const std::vector<int> c{2, 1, 1};
  const auto p = removal_probabilities(c, 1.0);
  const double z = std::exp(2.0) + 2 * std::exp(1.0);
  CHECK(p[0] == doctest::Approx(std::exp(2.0) / z));
  CHECK(p[1] == doctest::Approx(std::exp(1.0) / z));
  CHECK(p[0] == doctest::Approx(0.576).epsilon(0.002));
  CHECK(p[2] == doctest::Approx(0.212).epsilon(0.005));
  const auto sharp = removal_probabilities(c, 1000.0);
  CHECK(sharp[0] == doctest::Approx(1.0));
}

TEST_CASE("multi-start LNS") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Instance inst = random_instance(12, 9000 + seed);
    const auto seeds = multi_start_greedy(inst, 5);
    MslnsConfig cfg;
    cfg.t_max = 0.0;
    cfg.seed = seed;
    int calls = 0;
    double last_best = -1.0;
    std::set<RequestId> destroyed;
    const Route out = mslns(inst, seeds.routes, cfg, [&](const SolutionPool& pool, std::span<const RequestId> chosen) {
      ++calls;
      if (calls == 1) CHECK(chosen.size() <= 2);
      CHECK(chosen.size() <= static_cast<std::size_t>(cfg.k_max));
      for (RequestId h : chosen) {
        CHECK(destroyed.count(h) == 0);
        destroyed.insert(h);
        CHECK(pool.memory.count(h) == 1);
      }
      CHECK(pool.routes.size() <= static_cast<std::size_t>(cfg.beta));
      std::set<std::vector<RequestId>> sets;
      for (const auto& r : pool.routes) {
        CHECK(naive_feasible(inst, r.seq()));
        sets.insert(r.served());
      }
      CHECK(sets.size() == pool.routes.size());
      REQUIRE(pool.incumbent_best.has_value());
      CHECK(pool.incumbent_best->revenue() >= last_best - kRevenueTol);
      last_best = pool.incumbent_best->revenue();
    });
    CHECK(naive_feasible(inst, out.seq()));
    CHECK(out.revenue() >= seeds.best.revenue() - kRevenueTol);
    CHECK(out.revenue() >= last_best - kRevenueTol);
  }
}

TEST_CASE("multi-start LNS destroy sizes and ablations") {
  const Instance inst = random_instance(15, 31);
  const auto seeds = multi_start_greedy(inst, 5);
  std::set<RequestId> pool_requests;
  for (const auto& r : seeds.routes) pool_requests.insert(r.served().begin(), r.served().end());
  REQUIRE(pool_requests.size() >= 6);

  MslnsConfig cfg;
  cfg.t_max = 0.0;
  std::vector<std::size_t> sizes;
  const auto record = [&](const SolutionPool&, std::span<const RequestId> chosen) { sizes.push_back(chosen.size()); };
  mslns(inst, seeds.routes, cfg, record);
  REQUIRE(sizes.size() >= 3);
  CHECK(sizes[0] == 2);
  CHECK(sizes[1] == 3);
  CHECK(sizes[2] <= 4);

  sizes.clear();
  cfg.schedule = DestroySchedule::fixed_k;
  mslns(inst, seeds.routes, cfg, record);
  CHECK(sizes.front() == 4);

  cfg.schedule = DestroySchedule::increasing;
  cfg.multistart = false;
  int first_pool = -1;
  mslns(inst, seeds.routes, cfg, [&](const SolutionPool& pool, std::span<const RequestId>) {
    if (first_pool < 0) first_pool = static_cast<int>(pool.routes.size());
  });
  CHECK(first_pool >= 1);

  cfg.multistart = true;
  cfg.removal = RemovalRule::uniform;
  CHECK(naive_feasible(inst, mslns(inst, seeds.routes, cfg).seq()));

  const std::vector<Route> none;
  CHECK_THROWS(mslns(inst, none, cfg));
}

TEST_CASE("multi-start LNS argmax selection at large alpha") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Instance inst = random_instance(14, 9500 + seed);
    const auto seeds = multi_start_greedy(inst, 7);
    // Pool after deduplication by served set, as the first iteration sees it.
    std::vector<Route> pool;
    std::set<std::vector<RequestId>> seen;
    for (const auto& r : seeds.routes)
      if (seen.insert(r.served()).second) pool.push_back(r);
    std::sort(pool.begin(), pool.end(), [](const Route& a, const Route& b) { return better(a, b); });
    MslnsConfig cfg;
    cfg.alpha = 1000.0;
    cfg.beta = 100;
    cfg.t_max = 0.0;
    std::map<RequestId, int> count;
    for (const auto& r : pool)
      for (RequestId h : r.served()) ++count[h];
    std::vector<int> values;
    for (auto& [h, c] : count) values.push_back(c);
    std::sort(values.rbegin(), values.rend());
    // Need a strict gap after the top two counts.
    if (values.size() < 3 || values[1] == values[2]) continue;
    std::vector<RequestId> first;
    mslns(inst, seeds.routes, cfg, [&](const SolutionPool&, std::span<const RequestId> chosen) {
      if (first.empty()) first.assign(chosen.begin(), chosen.end());
    });
    REQUIRE(first.size() == 2);
    for (RequestId h : first) CHECK(count[h] >= values[1]);
    ++checked;
  }
  MESSAGE("argmax cases checked: " << checked);
  CHECK(checked > 0);
}
