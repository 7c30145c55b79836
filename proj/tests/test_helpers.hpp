#pragma once

// Shared fixtures and independent oracles for the test binaries. Nothing here
// calls into the solver paths it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "pdstsp/core.hpp"
#include "pdstsp/generator.hpp"

namespace pdstsp::testing {

/// Instance with explicit geometry; demands and revenues default to 1.
inline Instance make_instance(std::vector<Point> coords, std::vector<int> demand, std::vector<double> revenue,
                              int capacity, double max_length) {
  Instance inst;
  inst.n = static_cast<int>(demand.size());
  inst.coords = std::move(coords);
  inst.demand = std::move(demand);
  inst.revenue = std::move(revenue);
  inst.capacity = capacity;
  inst.max_length = max_length;
  inst.revenue_setting = RevenueSetting::uniform;
  return inst;
}

inline Instance random_instance(int n, std::uint64_t seed, RevenueSetting setting = RevenueSetting::distance) {
  return gen_instance(GenSpec{n, setting, seed, 1}, 0);
}

/// Naive pairwise summation straight from coordinates.
inline double naive_length(const Instance& inst, const std::vector<Vertex>& seq) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const auto& a = inst.coords[static_cast<std::size_t>(seq[i])];
    const auto& b = inst.coords[static_cast<std::size_t>(seq[i + 1])];
    total += std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
  }
  return total;
}

/// Independent feasibility check: no repeats, endpoints, pairing, precedence,
/// capacity via prefix sums, and the length limit.
inline bool naive_feasible(const Instance& inst, const std::vector<Vertex>& seq) {
  const int n = inst.n;
  if (seq.size() < 2 || seq.front() != 0 || seq.back() != 2 * n + 1) return false;
  std::vector<int> pos(static_cast<std::size_t>(2 * n + 2), -1);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] < 0 || seq[i] > 2 * n + 1) return false;
    if (pos[static_cast<std::size_t>(seq[i])] >= 0) return false;
    pos[static_cast<std::size_t>(seq[i])] = static_cast<int>(i);
  }
  for (int h = 1; h <= n; ++h) {
    const int p = pos[static_cast<std::size_t>(h)];
    const int d = pos[static_cast<std::size_t>(h + n)];
    if ((p < 0) != (d < 0)) return false;
    if (p >= 0 && p > d) return false;
  }
  int load = 0;
  for (Vertex v : seq) {
    if (v >= 1 && v <= n) load += inst.demand[static_cast<std::size_t>(v - 1)];
    if (v > n && v <= 2 * n) load -= inst.demand[static_cast<std::size_t>(v - n - 1)];
    if (load > inst.capacity) return false;
  }
  return naive_length(inst, seq) <= inst.max_length + 1e-9;
}

inline double naive_revenue(const Instance& inst, const std::vector<Vertex>& seq) {
  double total = 0.0;
  for (Vertex v : seq) {
    if (v >= 1 && v <= inst.n) total += inst.revenue[static_cast<std::size_t>(v - 1)];
  }
  return total;
}

/// Calls fn(seq) for every sequence 0, (distinct interior vertices), 2n+1,
/// with no pruning at all.
inline void enumerate_all_sequences(const Instance& inst, const std::function<void(const std::vector<Vertex>&)>& fn) {
  const int n = inst.n;
  std::vector<Vertex> seq{0};
  std::vector<char> used(static_cast<std::size_t>(2 * n + 2), 0);
  std::function<void()> rec = [&] {
    seq.push_back(2 * n + 1);
    fn(seq);
    seq.pop_back();
    for (Vertex v = 1; v <= 2 * n; ++v) {
      if (used[static_cast<std::size_t>(v)]) continue;
      used[static_cast<std::size_t>(v)] = 1;
      seq.push_back(v);
      rec();
      seq.pop_back();
      used[static_cast<std::size_t>(v)] = 0;
    }
  };
  rec();
}

struct BruteBest {
  double revenue = 0.0;
  double length = 0.0;
  std::vector<Vertex> seq;
};

/// Revenue-maximal feasible sequence by plain enumeration; ties broken by
/// shorter length, then lexicographic sequence.
inline BruteBest brute_force_optimum(const Instance& inst) {
  BruteBest best;
  bool have = false;
  enumerate_all_sequences(inst, [&](const std::vector<Vertex>& seq) {
    if (!naive_feasible(inst, seq)) return;
    const double rev = naive_revenue(inst, seq);
    const double len = naive_length(inst, seq);
    if (!have || rev > best.revenue + 1e-12 ||
        (std::abs(rev - best.revenue) <= 1e-12 && (len < best.length - 1e-12 ||
                                                   (std::abs(len - best.length) <= 1e-12 && seq < best.seq)))) {
      best = {rev, len, seq};
      have = true;
    }
  });
  return best;
}

/// Random feasible route built by uniform random insertions.
template <class Rng>
std::vector<Vertex> random_feasible_seq(const Instance& inst, Rng& rng, int attempts = 40) {
  std::vector<Vertex> seq{0, 2 * inst.n + 1};
  for (int a = 0; a < attempts; ++a) {
    const int h = static_cast<int>(rng.uniform_int(1, inst.n));
    if (std::find(seq.begin(), seq.end(), h) != seq.end()) continue;
    std::vector<Vertex> cand = seq;
    const auto size = static_cast<std::int64_t>(cand.size());
    const auto i = rng.uniform_int(1, size - 1);
    cand.insert(cand.begin() + i, h);
    const auto j = rng.uniform_int(i + 1, size);
    cand.insert(cand.begin() + j, h + inst.n);
    if (naive_feasible(inst, cand)) seq = std::move(cand);
  }
  return seq;
}

}  // namespace pdstsp::testing
