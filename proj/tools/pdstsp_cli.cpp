// Command-line front end: gen, exact, milp, seeds, solve, bench, basin.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pdstsp/analysis.hpp"
#include "pdstsp/exact.hpp"
#include "pdstsp/generator.hpp"
#include "pdstsp/json_io.hpp"
#include "pdstsp/methods.hpp"
#include "pdstsp/rng.hpp"

namespace {

using namespace pdstsp;

struct Options {
  std::string in;
  std::string out;
  std::string plot;
  std::string seeds_file;
  std::vector<std::string> methods;
  std::vector<int> ks{0, 1, 2, 3};
  int n = 10;
  int count = 1;
  int index = 0;
  std::string revenue = "distance";
  std::uint64_t seed = 0;
  int starts = 0;
  int beta = 3;
  int sgbs_beta = 5;
  int sgbs_gamma = 5;
  double alpha = 1.0;
  int k_max = 4;
  int lns_k_max = 3;
  double t_max = 1.0;
  long max_iters = -1;
  double rho = 10.0;
  std::string mask_mode = "inference_2opt";
  std::string decode_mode = "greedy";
  std::string removal = "softmax";
  std::string schedule = "increasing";
  bool single_start = false;
  int jobs = 0;
  bool deterministic = false;
  int max_n = 6;
};

// Output stream for --out, or stdout when empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot write '" + path + "'");
    }
  }
  std::ostream& get() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::vector<Instance> load_instances(const Options& o) {
  if (o.in.empty()) throw ConfigError("--in is required");
  return read_instances_jsonl_file(o.in);
}

MethodParams make_params(const Options& o, std::map<std::string, std::vector<std::vector<Vertex>>>& trajectories) {
  MethodParams p;
  p.starts = o.starts;
  p.beta = o.beta;
  p.sgbs_beta = o.sgbs_beta;
  p.sgbs_gamma = o.sgbs_gamma;
  p.alpha = o.alpha;
  p.k_max = o.k_max;
  p.lns_k_max = o.lns_k_max;
  p.t_max = o.t_max;
  p.max_iters = o.max_iters;
  p.exact_max_n = o.max_n;
  p.decode.rho = o.rho;
  p.decode.mask_mode = mask_mode_from_string(o.mask_mode);
  p.decode.mode = decode_mode_from_string(o.decode_mode);
  p.decode.beam_width = o.beta;
  p.decode.starts = o.starts;
  if (o.removal == "softmax") p.removal = RemovalRule::softmax;
  else if (o.removal == "uniform") p.removal = RemovalRule::uniform;
  else throw ConfigError("unknown removal rule '" + o.removal + "'");
  if (o.schedule == "increasing") p.schedule = DestroySchedule::increasing;
  else if (o.schedule == "fixed_k") p.schedule = DestroySchedule::fixed_k;
  else throw ConfigError("unknown destroy schedule '" + o.schedule + "'");
  p.multistart = !o.single_start;
  if (!o.seeds_file.empty()) {
    for (auto& rec : read_trajectories_jsonl_file(o.seeds_file)) trajectories[rec.instance_id] = std::move(rec.routes);
    p.trajectories = &trajectories;
  }
  return p;
}

std::vector<std::string> split_methods(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& m : raw) {
    std::stringstream ss(m);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(tok);
    }
  }
  if (out.empty()) throw ConfigError("--method is required");
  for (const auto& m : out) parse_method(m);
  return out;
}

int cmd_gen(const Options& o) {
  GenSpec spec{o.n, revenue_setting_from_string(o.revenue), o.seed, o.count};
  Output out(o.out);
  write_instances_jsonl(out.get(), gen_batch(spec));
  return 0;
}

int cmd_exact(const Options& o) {
  const auto insts = load_instances(o);
  Output out(o.out);
  for (const auto& inst : insts) out.get() << to_json(exhaustive_solve(inst, o.max_n)).dump() << '\n';
  return 0;
}

int cmd_milp(const Options& o) {
  const auto insts = load_instances(o);
  if (o.index < 0 || o.index >= static_cast<int>(insts.size())) throw ConfigError("--index out of range");
  Output out(o.out);
  write_lp(out.get(), export_milp(insts[static_cast<std::size_t>(o.index)]));
  return 0;
}

int cmd_seeds(const Options& o) {
  const auto insts = load_instances(o);
  std::vector<TrajectoryRecord> records;
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const int m = o.starts > 0 ? o.starts : std::max(1, insts[i].n / 2);
    TrajectoryRecord rec{std::to_string(i), {}};
    for (const auto& r : multi_start_greedy(insts[i], m).routes) rec.routes.push_back(r.seq());
    records.push_back(std::move(rec));
  }
  Output out(o.out);
  write_trajectories_jsonl(out.get(), records);
  return 0;
}

int cmd_solve(const Options& o) {
  const auto insts = load_instances(o);
  const auto methods = split_methods(o.methods);
  if (methods.size() != 1) throw ConfigError("solve takes exactly one --method");
  std::map<std::string, std::vector<std::vector<Vertex>>> traj;
  const MethodParams params = make_params(o, traj);
  const MethodSpec spec = parse_method(methods.front());
  Output out(o.out);
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const Route r = run_method(insts[i], spec, params, derive_seed(o.seed, i), std::to_string(i));
    out.get() << to_json(r).dump() << '\n';
  }
  return 0;
}

int cmd_bench(const Options& o) {
  const auto insts = load_instances(o);
  const auto methods = split_methods(o.methods);
  std::map<std::string, std::vector<std::vector<Vertex>>> traj;
  BenchOptions opts;
  opts.params = make_params(o, traj);
  opts.seed = o.seed;
  opts.jobs = o.jobs > 0 ? o.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  opts.record_time = !o.deterministic;
  if (o.deterministic && opts.params.max_iters < 0) opts.params.max_iters = 200;
  const BenchReport report = run_benchmark(insts, methods, opts);
  Output out(o.out);
  write_bench_csv(out.get(), report);
  if (!o.plot.empty()) {
    Output plot(o.plot);
    write_plot_csv(plot.get(), report);
  }
  return 0;
}

int cmd_basin(const Options& o) {
  const auto insts = load_instances(o);
  const auto methods = split_methods(o.methods);
  std::map<std::string, std::vector<std::vector<Vertex>>> traj;
  const MethodParams params = make_params(o, traj);
  Output out(o.out);
  write_basin_csv(out.get(), basin_profile(insts, methods, o.ks, params, o.seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  if (const char* env = std::getenv("PDSTSP_SEED")) {
    try {
      o.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "error: PDSTSP_SEED is not an unsigned integer\n";
      return 2;
    }
  }

  CLI::App app{"Solver suite for the selective multi-commodity pickup-and-delivery TSP"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed (falls back to PDSTSP_SEED)");
    sub->add_option("--out", o.out, "Output file (default: stdout)");
  };
  auto input = [&](CLI::App* sub) { sub->add_option("--in", o.in, "Instance JSONL file")->required(); };
  auto tuning = [&](CLI::App* sub) {
    sub->add_option("--method", o.methods, "constructor[+improver], comma separated for bench/basin")->required();
    sub->add_option("--M", o.starts, "Multi-start count (0: n/2)");
    sub->add_option("--beta", o.beta, "MSLNS pool width / beam width");
    sub->add_option("--alpha", o.alpha, "MSLNS softmax temperature");
    sub->add_option("--k-max", o.k_max, "MSLNS maximum destroy size");
    sub->add_option("--lns-k-max", o.lns_k_max, "Random LNS maximum destroy size");
    sub->add_option("--t-max", o.t_max, "Improver time budget in seconds");
    sub->add_option("--max-iters", o.max_iters, "Random LNS iteration cap");
    sub->add_option("--rho", o.rho, "Length-overrun penalty");
    sub->add_option("--mask-mode", o.mask_mode, "train_lb or inference_2opt");
    sub->add_option("--decode-mode", o.decode_mode, "greedy, sample, beam or multistart");
    sub->add_option("--sgbs-beta", o.sgbs_beta, "SGBS beam width");
    sub->add_option("--sgbs-gamma", o.sgbs_gamma, "SGBS expansion factor");
    sub->add_option("--removal", o.removal, "MSLNS removal rule: softmax or uniform");
    sub->add_option("--schedule", o.schedule, "MSLNS destroy schedule: increasing or fixed_k");
    sub->add_flag("--single-start", o.single_start, "MSLNS with one seed only");
    sub->add_option("--seeds-file", o.seeds_file, "Trajectory JSONL replayed by the decode constructor");
    sub->add_option("--max-n", o.max_n, "Largest n for the exact solver");
    sub->add_option("--jobs", o.jobs, "Parallel instances (default: all cores)");
  };

  auto* gen = app.add_subcommand("gen", "Generate random instances as JSONL");
  common(gen);
  gen->add_option("--n", o.n, "Requests per instance")->check(CLI::PositiveNumber);
  gen->add_option("--count", o.count, "Number of instances")->check(CLI::PositiveNumber);
  gen->add_option("--revenue", o.revenue, "distance, ton_distance, uniform or constant");

  auto* exact = app.add_subcommand("exact", "Solve each instance exactly (small n)");
  common(exact);
  input(exact);
  exact->add_option("--max-n", o.max_n, "Refuse instances above this size");

  auto* milp = app.add_subcommand("milp", "Write the MILP model of one instance in LP format");
  common(milp);
  input(milp);
  milp->add_option("--index", o.index, "Instance line in the input file");

  auto* seeds = app.add_subcommand("seeds", "Write multi-start greedy trajectories as seed JSONL");
  common(seeds);
  input(seeds);
  seeds->add_option("--M", o.starts, "Trajectories per instance (0: n/2)");

  auto* solve = app.add_subcommand("solve", "Run one method on every instance");
  common(solve);
  input(solve);
  tuning(solve);

  auto* bench = app.add_subcommand("bench", "Compare methods and write a CSV report");
  common(bench);
  input(bench);
  tuning(bench);
  bench->add_option("--plot", o.plot, "Also write revenue-vs-time data here");
  bench->add_flag("--deterministic", o.deterministic, "Zero the time column and cap random LNS by iterations");

  auto* basin = app.add_subcommand("basin", "Fraction of solutions in the k-basin of the reference");
  common(basin);
  input(basin);
  tuning(basin);
  basin->add_option("--k", o.ks, "k values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*exact) return cmd_exact(o);
    if (*milp) return cmd_milp(o);
    if (*seeds) return cmd_seeds(o);
    if (*solve) return cmd_solve(o);
    if (*bench) return cmd_bench(o);
    if (*basin) return cmd_basin(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n' << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
