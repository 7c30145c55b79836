#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdstsp/core.hpp"
#include "pdstsp/methods.hpp"

namespace pdstsp {

/// Largest served count for which removal sets are enumerated.
inline constexpr int kMaxEnumeratedServed = 12;

/// True iff no destroy of 1..k served requests followed by repair yields more
/// revenue than `route`. Throws SizeError beyond kMaxEnumeratedServed.
bool is_k_attractor(const Instance& inst, const Route& route, int k);

/// Best-improvement k-destroy LNS to convergence: each round enumerates every
/// removal set of size 1..k, repairs it, and moves to the best neighbor if it
/// strictly improves revenue.
Route k_lns_converge(const Instance& inst, const Route& route, int k);

/// Whether k_lns_converge(route) lands on the reference's served set with the
/// same revenue (within kRevenueTol). k = 0 compares `route` itself.
bool in_k_basin(const Instance& inst, const Route& route, const Route& reference, int k);

struct BasinTable {
  std::vector<std::string> methods;
  std::vector<int> ks;
  std::vector<std::vector<double>> fraction;  // [method][k index]
};

/// Fraction of instances whose method solution lies in the k-basin of the
/// reference: the exact optimum when n <= params.exact_max_n, else the best
/// route any of the methods found.
BasinTable basin_profile(const std::vector<Instance>& insts, const std::vector<std::string>& methods,
                         const std::vector<int>& ks, const MethodParams& params, std::uint64_t seed);

void write_basin_csv(std::ostream& os, const BasinTable& table);

struct BenchRow {
  std::string method;
  std::string instance_id;
  double time_s = 0.0;
  double revenue = 0.0;
  double profit = 0.0;
  double length = 0.0;
  double gap_pct = 0.0;
  bool winner = false;
};

struct BenchAggregate {
  std::string method;
  double mean_time_s = 0.0;
  double mean_revenue = 0.0;
  double mean_profit = 0.0;
  double mean_gap_pct = 0.0;
  double win_rate_pct = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;            // instance-major, method order as given
  std::vector<BenchAggregate> aggregates;
};

struct BenchOptions {
  MethodParams params;
  std::uint64_t seed = 0;
  int jobs = 1;
  /// When false, time_s is written as 0 so identical runs give identical bytes.
  bool record_time = true;
};

/// Run every method on every instance. Gap is measured against the best
/// revenue among the compared methods per instance and averaged over
/// instances; ties count as wins for every tied method.
BenchReport run_benchmark(const std::vector<Instance>& insts, const std::vector<std::string>& methods,
                          const BenchOptions& opts);

/// `method,instance_id,time_s,revenue,profit,length,gap_pct,is_winner`
/// followed by a `# aggregate` block.
void write_bench_csv(std::ostream& os, const BenchReport& report);

/// Per-method mean time vs. mean revenue, one row per method.
void write_plot_csv(std::ostream& os, const BenchReport& report);

}  // namespace pdstsp
