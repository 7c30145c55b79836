#include "pdstsp/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "pdstsp/exact.hpp"
#include "pdstsp/improve.hpp"
#include "pdstsp/rng.hpp"

namespace pdstsp {

namespace {

void guard_served(const Route& route) {
  if (static_cast<int>(route.served().size()) > kMaxEnumeratedServed)
    throw SizeError("route serves " + std::to_string(route.served().size()) + " requests; enumeration is limited to " +
                    std::to_string(kMaxEnumeratedServed));
}

// Calls fn(subset) for every subset of `items` with size 1..k.
template <class Fn>
void for_each_subset(const std::vector<RequestId>& items, int k, Fn&& fn) {
  std::vector<RequestId> pick;
  const auto m = static_cast<int>(items.size());
  auto rec = [&](auto&& self, int from) -> void {
    for (int i = from; i < m; ++i) {
      pick.push_back(items[static_cast<std::size_t>(i)]);
      fn(static_cast<const std::vector<RequestId>&>(pick));
      if (static_cast<int>(pick.size()) < k) self(self, i + 1);
      pick.pop_back();
    }
  };
  if (k >= 1) rec(rec, 0);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

bool is_k_attractor(const Instance& inst, const Route& route, int k) {
  if (!route.feasible()) throw InfeasibleRoute("is_k_attractor: route is infeasible");
  if (k < 1) throw ConfigError("is_k_attractor: k must be >= 1");
  guard_served(route);
  bool attractor = true;
  for_each_subset(route.served(), k, [&](const std::vector<RequestId>& drop) {
    if (!attractor) return;
    const Route cand = repair(inst, destroy(inst, route, drop));
    if (cand.revenue() > route.revenue() + kRevenueTol) attractor = false;
  });
  return attractor;
}

Route k_lns_converge(const Instance& inst, const Route& route, int k) {
  if (!route.feasible()) throw InfeasibleRoute("k_lns_converge: route is infeasible");
  Route current = route;
  while (k >= 1) {
    guard_served(current);
    std::optional<Route> best;
    for_each_subset(current.served(), k, [&](const std::vector<RequestId>& drop) {
      Route cand = repair(inst, destroy(inst, current, drop));
      if (!best || better(cand, *best)) best = std::move(cand);
    });
    if (!best || best->revenue() <= current.revenue() + kRevenueTol) break;
    current = std::move(*best);
  }
  return current;
}

bool in_k_basin(const Instance& inst, const Route& route, const Route& reference, int k) {
  if (!reference.feasible()) throw InfeasibleRoute("in_k_basin: reference is infeasible");
  const Route end = k <= 0 ? route : k_lns_converge(inst, route, k);
  return same_served(end, reference) && std::abs(end.revenue() - reference.revenue()) <= kRevenueTol;
}

BasinTable basin_profile(const std::vector<Instance>& insts, const std::vector<std::string>& methods,
                         const std::vector<int>& ks, const MethodParams& params, std::uint64_t seed) {
  std::vector<MethodSpec> specs;
  for (const auto& m : methods) specs.push_back(parse_method(m));
  BasinTable table;
  table.methods = methods;
  table.ks = ks;
  table.fraction.assign(methods.size(), std::vector<double>(ks.size(), 0.0));
  if (insts.empty()) return table;

  for (std::size_t i = 0; i < insts.size(); ++i) {
    const Instance& inst = insts[i];
    const std::uint64_t inst_seed = derive_seed(seed, i);
    std::vector<Route> solutions;
    for (std::size_t m = 0; m < specs.size(); ++m)
      solutions.push_back(run_method(inst, specs[m], params, derive_seed(inst_seed, m), std::to_string(i)));
    Route reference = Route::empty(inst);
    if (inst.n <= params.exact_max_n) {
      reference = exhaustive_solve(inst, params.exact_max_n);
    } else {
      for (const auto& s : solutions) {
        if (better(s, reference)) reference = s;
      }
    }
    for (std::size_t m = 0; m < specs.size(); ++m) {
      for (std::size_t kk = 0; kk < ks.size(); ++kk) {
        if (in_k_basin(inst, solutions[m], reference, ks[kk])) table.fraction[m][kk] += 1.0;
      }
    }
  }
  for (auto& row : table.fraction) {
    for (double& f : row) f /= static_cast<double>(insts.size());
  }
  return table;
}

void write_basin_csv(std::ostream& os, const BasinTable& table) {
  os << "method,k,fraction\n";
  for (std::size_t m = 0; m < table.methods.size(); ++m) {
    for (std::size_t kk = 0; kk < table.ks.size(); ++kk)
      os << table.methods[m] << ',' << table.ks[kk] << ',' << fmt(table.fraction[m][kk]) << '\n';
  }
}

BenchReport run_benchmark(const std::vector<Instance>& insts, const std::vector<std::string>& methods,
                          const BenchOptions& opts) {
  std::vector<MethodSpec> specs;
  for (const auto& m : methods) specs.push_back(parse_method(m));
  const std::size_t nm = specs.size();
  BenchReport report;
  report.rows.resize(insts.size() * nm);

  auto run_instance = [&](std::size_t i) {
    const Instance& inst = insts[i];
    const std::uint64_t inst_seed = derive_seed(opts.seed, i);
    for (std::size_t m = 0; m < nm; ++m) {
      const auto t0 = std::chrono::steady_clock::now();
      const Route r = run_method(inst, specs[m], opts.params, derive_seed(inst_seed, m), std::to_string(i));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      BenchRow& row = report.rows[i * nm + m];
      row.method = methods[m];
      row.instance_id = std::to_string(i);
      row.time_s = opts.record_time ? secs : 0.0;
      row.revenue = r.revenue();
      row.profit = r.profit();
      row.length = r.length();
    }
  };

  const auto jobs = static_cast<std::size_t>(std::max(1, opts.jobs));
  if (jobs == 1 || insts.size() <= 1) {
    for (std::size_t i = 0; i < insts.size(); ++i) run_instance(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < std::min(jobs, insts.size()); ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < insts.size(); i = next++) {
          try {
            run_instance(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  for (std::size_t i = 0; i < insts.size(); ++i) {
    double best = 0.0;
    for (std::size_t m = 0; m < nm; ++m) best = std::max(best, report.rows[i * nm + m].revenue);
    for (std::size_t m = 0; m < nm; ++m) {
      BenchRow& row = report.rows[i * nm + m];
      row.gap_pct = best > 0.0 ? std::max(0.0, (best - row.revenue) / best * 100.0) : 0.0;
      row.winner = row.revenue >= best - kRevenueTol;
      if (row.winner) row.gap_pct = 0.0;
    }
  }

  for (std::size_t m = 0; m < nm; ++m) {
    BenchAggregate agg;
    agg.method = methods[m];
    double wins = 0.0;
    for (std::size_t i = 0; i < insts.size(); ++i) {
      const BenchRow& row = report.rows[i * nm + m];
      agg.mean_time_s += row.time_s;
      agg.mean_revenue += row.revenue;
      agg.mean_profit += row.profit;
      agg.mean_gap_pct += row.gap_pct;
      wins += row.winner ? 1.0 : 0.0;
    }
    if (!insts.empty()) {
      const auto count = static_cast<double>(insts.size());
      agg.mean_time_s /= count;
      agg.mean_revenue /= count;
      agg.mean_profit /= count;
      agg.mean_gap_pct /= count;
      agg.win_rate_pct = wins / count * 100.0;
    }
    report.aggregates.push_back(agg);
  }
  return report;
}

void write_bench_csv(std::ostream& os, const BenchReport& report) {
  os << "method,instance_id,time_s,revenue,profit,length,gap_pct,is_winner\n";
  for (const auto& r : report.rows) {
    os << r.method << ',' << r.instance_id << ',' << fmt(r.time_s) << ',' << fmt(r.revenue) << ',' << fmt(r.profit)
       << ',' << fmt(r.length) << ',' << fmt(r.gap_pct) << ',' << (r.winner ? 1 : 0) << '\n';
  }
  os << "# aggregate\n";
  os << "method,mean_time_s,mean_revenue,mean_profit,mean_gap_pct,win_rate_pct\n";
  for (const auto& a : report.aggregates) {
    os << a.method << ',' << fmt(a.mean_time_s) << ',' << fmt(a.mean_revenue) << ',' << fmt(a.mean_profit) << ','
       << fmt(a.mean_gap_pct) << ',' << fmt(a.win_rate_pct) << '\n';
  }
}

void write_plot_csv(std::ostream& os, const BenchReport& report) {
  os << "method,mean_time_s,mean_revenue\n";
  for (const auto& a : report.aggregates) os << a.method << ',' << fmt(a.mean_time_s) << ',' << fmt(a.mean_revenue) << '\n';
}

}  // namespace pdstsp
