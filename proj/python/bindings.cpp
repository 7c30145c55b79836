// Python module `pdstsp._pdstsp`.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "pdstsp/analysis.hpp"
#include "pdstsp/exact.hpp"
#include "pdstsp/generator.hpp"
#include "pdstsp/improve.hpp"
#include "pdstsp/json_io.hpp"
#include "pdstsp/methods.hpp"
#include "pdstsp/search.hpp"

namespace py = pybind11;
using namespace pdstsp;

namespace {

MethodParams make_params(int starts, int beta, double alpha, int k_max, double t_max, long max_iters,
                         const std::string& removal, const std::string& schedule, bool multistart) {
  MethodParams p;
  p.starts = starts;
  p.beta = beta;
  p.alpha = alpha;
  p.k_max = k_max;
  p.t_max = t_max;
  p.max_iters = max_iters;
  if (removal == "softmax") p.removal = RemovalRule::softmax;
  else if (removal == "uniform") p.removal = RemovalRule::uniform;
  else throw ConfigError("unknown removal rule '" + removal + "'");
  if (schedule == "increasing") p.schedule = DestroySchedule::increasing;
  else if (schedule == "fixed_k") p.schedule = DestroySchedule::fixed_k;
  else throw ConfigError("unknown destroy schedule '" + schedule + "'");
  p.multistart = multistart;
  return p;
}

std::vector<Route> to_routes(const Instance& inst, const std::vector<std::vector<Vertex>>& seqs) {
  std::vector<Route> out;
  for (const auto& s : seqs) out.emplace_back(inst, s);
  return out;
}

}  // namespace

PYBIND11_MODULE(_pdstsp, m) {
  m.doc() = "Solver suite for the selective pickup-and-delivery TSP";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidVertex>(m, "InvalidVertex", base.ptr());
  py::register_exception<StructuralError>(m, "StructuralError", base.ptr());
  py::register_exception<InfeasibleRoute>(m, "InfeasibleRoute", base.ptr());
  py::register_exception<SizeError>(m, "SizeError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<Instance>(m, "Instance")
      .def_readonly("n", &Instance::n)
      .def_readonly("demand", &Instance::demand)
      .def_readonly("revenue", &Instance::revenue)
      .def_readonly("capacity", &Instance::capacity)
      .def_readonly("max_length", &Instance::max_length)
      .def_readonly("seed", &Instance::seed)
      .def_property_readonly("coords",
                             [](const Instance& i) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& p : i.coords) out.emplace_back(p.x, p.y);
                               return out;
                             })
      .def_property_readonly("revenue_setting", [](const Instance& i) { return std::string(to_string(i.revenue_setting)); })
      .def("dist",
           [](const Instance& i, Vertex a, Vertex b) {
             if (!i.valid_vertex(a) || !i.valid_vertex(b)) throw InvalidVertex("vertex out of range");
             return i.dist(a, b);
           },
           py::arg("i"), py::arg("j"))
      .def("to_json", [](const Instance& i) { return to_json(i).dump(); })
      .def_static("from_json", [](const std::string& s) { return instance_from_json(json::parse(s)); }, py::arg("text"))
      .def("__repr__", [](const Instance& i) {
        return "<Instance n=" + std::to_string(i.n) + " Q=" + std::to_string(i.capacity) + " T=" + std::to_string(i.max_length) +
               ">";
      });

  py::class_<Route>(m, "Route")
      .def(py::init<const Instance&, std::vector<Vertex>>(), py::arg("instance"), py::arg("seq"))
      .def_property_readonly("seq", &Route::seq)
      .def_property_readonly("served", &Route::served)
      .def_property_readonly("length", &Route::length)
      .def_property_readonly("revenue", &Route::revenue)
      .def_property_readonly("profit", &Route::profit)
      .def_property_readonly("feasible", &Route::feasible)
      .def("__eq__", [](const Route& a, const Route& b) { return a == b; })
      .def("__repr__", [](const Route& r) {
        std::ostringstream os;
        os << "<Route revenue=" << r.revenue() << " length=" << r.length() << " served=" << r.served().size() << ">";
        return os.str();
      });

  m.def("generate",
        [](int n, const std::string& revenue, std::uint64_t seed, int count) {
          return gen_batch({n, revenue_setting_from_string(revenue), seed, count});
        },
        py::arg("n"), py::arg("revenue") = "distance", py::arg("seed") = 0, py::arg("count") = 1);

  m.def("read_instances", &read_instances_jsonl_file, py::arg("path"));
  m.def("write_instances",
        [](const std::string& path, const std::vector<Instance>& insts) {
          std::ofstream os(path);
          if (!os) throw ConfigError("cannot write '" + path + "'");
          write_instances_jsonl(os, insts);
        },
        py::arg("path"), py::arg("instances"));

  m.def("validate_route",
        [](const Instance& inst, const std::vector<Vertex>& seq) {
          const EvalResult r = validate_route(inst, seq);
          py::dict out;
          out["feasible"] = r.feasible;
          out["length"] = r.length;
          out["revenue"] = r.revenue;
          out["profit"] = r.profit;
          out["violation"] = r.violation ? py::cast(std::string(to_string(*r.violation))) : py::none();
          return out;
        },
        py::arg("instance"), py::arg("seq"));

  m.def("exact_solve", &exhaustive_solve, py::arg("instance"), py::arg("max_n") = 6);
  m.def("milp_lp", [](const Instance& inst) { return lp_text(export_milp(inst)); }, py::arg("instance"));

  m.def("greedy_search", [](const Instance& inst) { return greedy_search(inst); }, py::arg("instance"));
  m.def("multi_start_greedy", [](const Instance& inst, int starts) { return multi_start_greedy(inst, starts).routes; },
        py::arg("instance"), py::arg("starts"));

  m.def("repair", &repair, py::arg("instance"), py::arg("route"));
  m.def("two_opt", &two_opt_route, py::arg("instance"), py::arg("route"));
  m.def("hill_climb", &hill_climb, py::arg("instance"), py::arg("route"));
  m.def("bi_lns", &bi_lns, py::arg("instance"), py::arg("route"), py::arg("t_max") = 0.0);
  m.def("is_k_attractor", &is_k_attractor, py::arg("instance"), py::arg("route"), py::arg("k"));

  m.def("mslns",
        [](const Instance& inst, const std::vector<std::vector<Vertex>>& seeds, int beta, double alpha, int k_max,
           double t_max, std::uint64_t seed) {
          MslnsConfig cfg;
          cfg.beta = beta;
          cfg.alpha = alpha;
          cfg.k_max = k_max;
          cfg.t_max = t_max;
          cfg.seed = seed;
          return mslns(inst, to_routes(inst, seeds), cfg);
        },
        py::arg("instance"), py::arg("seeds"), py::arg("beta") = 3, py::arg("alpha") = 1.0, py::arg("k_max") = 4,
        py::arg("t_max") = 1.0, py::arg("seed") = 0);

  m.def("solve",
        [](const Instance& inst, const std::string& method, std::uint64_t seed, int starts, int beta, double alpha,
           int k_max, double t_max, long max_iters, const std::string& removal, const std::string& schedule,
           bool multistart) {
          const MethodParams p = make_params(starts, beta, alpha, k_max, t_max, max_iters, removal, schedule, multistart);
          py::gil_scoped_release release;
          return run_method(inst, parse_method(method), p, seed);
        },
        py::arg("instance"), py::arg("method"), py::arg("seed") = 0, py::arg("starts") = 0, py::arg("beta") = 3,
        py::arg("alpha") = 1.0, py::arg("k_max") = 4, py::arg("t_max") = 1.0, py::arg("max_iters") = -1,
        py::arg("removal") = "softmax", py::arg("schedule") = "increasing", py::arg("multistart") = true);

  m.def("bench_csv",
        [](const std::vector<Instance>& insts, const std::vector<std::string>& methods, std::uint64_t seed, double t_max,
           long max_iters, int jobs, bool record_time) {
          BenchOptions opts;
          opts.params.t_max = t_max;
          opts.params.max_iters = max_iters;
          opts.seed = seed;
          opts.jobs = jobs;
          opts.record_time = record_time;
          std::ostringstream os;
          {
            py::gil_scoped_release release;
            write_bench_csv(os, run_benchmark(insts, methods, opts));
          }
          return os.str();
        },
        py::arg("instances"), py::arg("methods"), py::arg("seed") = 0, py::arg("t_max") = 1.0, py::arg("max_iters") = -1,
        py::arg("jobs") = 1, py::arg("record_time") = true);

  m.def("basin_csv",
        [](const std::vector<Instance>& insts, const std::vector<std::string>& methods, const std::vector<int>& ks,
           std::uint64_t seed) {
          std::ostringstream os;
          write_basin_csv(os, basin_profile(insts, methods, ks, MethodParams{}, seed));
          return os.str();
        },
        py::arg("instances"), py::arg("methods"), py::arg("ks") = std::vector<int>{0, 1, 2, 3}, py::arg("seed") = 0);
}
