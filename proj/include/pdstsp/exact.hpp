#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pdstsp/core.hpp"

namespace pdstsp {

/// Revenue-maximal feasible route by depth-first branch and bound. Ties are
/// broken by shorter length, then lexicographic sequence (see better()).
/// Throws SizeError when inst.n > max_n.
Route exhaustive_solve(const Instance& inst, int max_n = 6);

// ---------------------------------------------------------------------------
// MILP export
//
// Variables: binary X_i_j for every ordered vertex pair (diagonal included and
// fixed to zero), continuous Tm_i (cumulative length on arrival) and L_i (load
// on departure). Indicator constraints are linearized with big-M:
//   M_T = T + max c_ij,  M_L = Q + max q.

enum class VarKind { arc, time, load };

struct MilpVar {
  std::string name;
  VarKind kind = VarKind::arc;
  double lower = 0.0;
  double upper = 1.0;  // +inf for unbounded
};

enum class Sense { le, ge, eq };

struct MilpRow {
  std::string name;
  std::string family;
  std::vector<std::pair<int, double>> terms;  // (variable index, coefficient)
  Sense sense = Sense::eq;
  double rhs = 0.0;
};

struct MilpModel {
  int vertex_count = 0;
  std::vector<MilpVar> vars;
  std::vector<MilpRow> rows;
  /// Minimization objective: -r_h on every X_{h,j}.
  std::vector<std::pair<int, double>> objective;
  double big_m_time = 0.0;
  double big_m_load = 0.0;

  int arc(int i, int j) const { return i * vertex_count + j; }
  int time(int i) const { return vertex_count * vertex_count + i; }
  int load(int i) const { return vertex_count * vertex_count + vertex_count + i; }

  std::size_t binary_count() const;
  std::size_t continuous_count() const;
  std::size_t rows_in_family(const std::string& family) const;
};

MilpModel export_milp(const Instance& inst);

/// LP-format text: Maximize / Subject To / Bounds / Binary / End.
void write_lp(std::ostream& os, const MilpModel& model);
std::string lp_text(const MilpModel& model);

/// X/T/L values induced by a route: X on consecutive arcs, Tm as cumulative
/// length, L as departure load; unvisited vertices get zeros.
std::vector<double> milp_assignment(const MilpModel& model, const Instance& inst, const Route& route);

struct RowViolation {
  std::string row;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Rows and bounds violated by an assignment beyond `tol`.
std::vector<RowViolation> check_assignment(const MilpModel& model, const std::vector<double>& values,
                                           double tol = 1e-7);

}  // namespace pdstsp
