#include "pdstsp/exact.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace pdstsp {

namespace {

class BranchAndBound {
 public:
  explicit BranchAndBound(const Instance& inst)
      : inst_(inst), visited_(static_cast<std::size_t>(inst.vertex_count()), 0) {
    seq_.reserve(static_cast<std::size_t>(inst.vertex_count()));
    open_revenue_ = 0.0;
    for (RequestId h = 1; h <= inst.n; ++h) {
      if (inst.demand_of(h) <= inst.capacity) open_revenue_ += inst.revenue_of(h);
    }
  }

  Route run() {
    seq_.push_back(inst_.start());
    visited_[0] = 1;
    dfs(inst_.start(), 0.0, 0, 0.0);
    return best_ ? *best_ : Route::empty(inst_);
  }

 private:
  // Shortest possible remaining distance: reach the end directly, or via the
  // farthest pending delivery.
  double completion_bound(Vertex cur) const {
    double lb = inst_.dist(cur, inst_.end());
    for (Vertex d : pending_) lb = std::max(lb, inst_.dist(cur, d) + inst_.dist(d, inst_.end()));
    return lb;
  }

  void offer(double length) {
    if (length > inst_.max_length + kLengthTol) return;
    Route cand(inst_, seq_);
    if (!best_ || better(cand, *best_)) best_ = std::move(cand);
  }

  void dfs(Vertex cur, double length, int load, double banked) {
    if (length + completion_bound(cur) > inst_.max_length + kLengthTol) return;
    if (best_) {
      double pending_revenue = 0.0;
      for (Vertex d : pending_) pending_revenue += inst_.revenue_of(inst_.request_of(d));
      if (banked + pending_revenue + open_revenue_ < best_->revenue() - kRevenueTol) return;
    }

    if (pending_.empty()) {
      seq_.push_back(inst_.end());
      offer(length + inst_.dist(cur, inst_.end()));
      seq_.pop_back();
    }

    for (Vertex v = 1; v <= 2 * inst_.n; ++v) {
      if (visited_[static_cast<std::size_t>(v)]) continue;
      const RequestId h = inst_.request_of(v);
      if (inst_.is_pickup(v)) {
        if (load + inst_.demand_of(h) > inst_.capacity) continue;
      } else if (std::find(pending_.begin(), pending_.end(), v) == pending_.end()) {
        continue;
      }
      const double step = inst_.dist(cur, v);
      visited_[static_cast<std::size_t>(v)] = 1;
      seq_.push_back(v);
      if (inst_.is_pickup(v)) {
        pending_.push_back(inst_.delivery(h));
        open_revenue_ -= inst_.revenue_of(h);
        dfs(v, length + step, load + inst_.demand_of(h), banked);
        open_revenue_ += inst_.revenue_of(h);
        pending_.pop_back();
      } else {
        auto it = std::find(pending_.begin(), pending_.end(), v);
        const auto at = it - pending_.begin();
        pending_.erase(it);
        dfs(v, length + step, load - inst_.demand_of(h), banked + inst_.revenue_of(h));
        pending_.insert(pending_.begin() + at, v);
      }
      seq_.pop_back();
      visited_[static_cast<std::size_t>(v)] = 0;
    }
  }

  const Instance& inst_;
  std::vector<char> visited_;
  std::vector<Vertex> seq_;
  std::vector<Vertex> pending_;
  double open_revenue_ = 0.0;  // revenue of pickups not yet visited
  std::optional<Route> best_;
};

}  // namespace

Route exhaustive_solve(const Instance& inst, int max_n) {
  if (inst.n > max_n)
    throw SizeError("exhaustive_solve: n=" + std::to_string(inst.n) + " exceeds max_n=" + std::to_string(max_n));
  return BranchAndBound(inst).run();
}

// ---------------------------------------------------------------------------

std::size_t MilpModel::binary_count() const {
  return static_cast<std::size_t>(std::count_if(vars.begin(), vars.end(), [](const MilpVar& v) { return v.kind == VarKind::arc; }));
}

std::size_t MilpModel::continuous_count() const { return vars.size() - binary_count(); }

std::size_t MilpModel::rows_in_family(const std::string& family) const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const MilpRow& r) { return r.family == family; }));
}

MilpModel export_milp(const Instance& inst) {
  MilpModel m;
  const int nv = inst.vertex_count();
  const int n = inst.n;
  const Vertex end = inst.end();
  m.vertex_count = nv;
  const double inf = std::numeric_limits<double>::infinity();

  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nv; ++j) m.vars.push_back({"X_" + std::to_string(i) + "_" + std::to_string(j), VarKind::arc, 0.0, 1.0});
  }
  for (int i = 0; i < nv; ++i) m.vars.push_back({"Tm_" + std::to_string(i), VarKind::time, 0.0, inf});
  for (int i = 0; i < nv; ++i) m.vars.push_back({"L_" + std::to_string(i), VarKind::load, 0.0, static_cast<double>(inst.capacity)});

  double max_c = 0.0;
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nv; ++j) max_c = std::max(max_c, inst.dist(i, j));
  }
  const int max_q = inst.demand.empty() ? 0 : *std::max_element(inst.demand.begin(), inst.demand.end());
  m.big_m_time = inst.max_length + max_c;
  m.big_m_load = inst.capacity + max_q;
  const double mt = m.big_m_time;
  const double ml = m.big_m_load;

  for (RequestId h = 1; h <= n; ++h) {
    for (int j = 0; j < nv; ++j) m.objective.emplace_back(m.arc(inst.pickup(h), j), -inst.revenue_of(h));
  }

  auto add = [&](std::string name, const char* family, std::vector<std::pair<int, double>> terms, Sense s, double rhs) {
    m.rows.push_back({std::move(name), family, std::move(terms), s, rhs});
  };
  auto out_arcs = [&](int i, double coef, std::vector<std::pair<int, double>>& t) {
    for (int j = 0; j < nv; ++j) t.emplace_back(m.arc(i, j), coef);
  };
  auto in_arcs = [&](int j, double coef, std::vector<std::pair<int, double>>& t) {
    for (int i = 0; i < nv; ++i) t.emplace_back(m.arc(i, j), coef);
  };
  const std::string si = "_";

  for (int i = 0; i < nv; ++i) add("noself_" + std::to_string(i), "noself", {{m.arc(i, i), 1.0}}, Sense::eq, 0.0);

  // The direct arc 0 -> 2n+1 is admitted so the empty route stays feasible.
  {
    std::vector<std::pair<int, double>> t;
    for (Vertex j = 1; j <= n; ++j) t.emplace_back(m.arc(0, j), 1.0);
    t.emplace_back(m.arc(0, end), 1.0);
    add("start_out", "startend", std::move(t), Sense::eq, 1.0);
    std::vector<std::pair<int, double>> u;
    for (Vertex i = n + 1; i <= 2 * n; ++i) u.emplace_back(m.arc(i, end), 1.0);
    u.emplace_back(m.arc(0, end), 1.0);
    add("end_in", "startend", std::move(u), Sense::eq, 1.0);
  }
  {
    std::vector<std::pair<int, double>> t;
    in_arcs(0, 1.0, t);
    add("start_no_in", "noinoutSE", std::move(t), Sense::eq, 0.0);
    std::vector<std::pair<int, double>> u;
    out_arcs(end, 1.0, u);
    add("end_no_out", "noinoutSE", std::move(u), Sense::eq, 0.0);
  }
  for (Vertex i = 1; i <= 2 * n; ++i) {
    std::vector<std::pair<int, double>> t;
    out_arcs(i, 1.0, t);
    in_arcs(i, -1.0, t);
    add("flow_" + std::to_string(i), "flowcons", std::move(t), Sense::eq, 0.0);
  }
  for (int i = 0; i < nv; ++i) {
    if (i == end) continue;
    std::vector<std::pair<int, double>> t;
    out_arcs(i, 1.0, t);
    add("outdeg_" + std::to_string(i), "outdeg", std::move(t), Sense::le, 1.0);
  }
  for (int j = 0; j < nv; ++j) {
    if (j == 0) continue;
    std::vector<std::pair<int, double>> t;
    in_arcs(j, 1.0, t);
    add("indeg_" + std::to_string(j), "indeg", std::move(t), Sense::le, 1.0);
  }
  for (RequestId h = 1; h <= n; ++h) {
    std::vector<std::pair<int, double>> t;
    out_arcs(inst.pickup(h), 1.0, t);
    in_arcs(inst.delivery(h), -1.0, t);
    add("pair_" + std::to_string(h), "pairvisit", std::move(t), Sense::eq, 0.0);
  }
  add("len_start", "routeLen", {{m.time(0), 1.0}}, Sense::eq, 0.0);
  add("len_cap", "routeLen", {{m.time(end), 1.0}}, Sense::le, inst.max_length);

  // Tm_j - Tm_i - M_T X_ij >= c_ij - M_T
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < nv; ++j) {
      if (i == j) continue;
      add("dist_" + std::to_string(i) + si + std::to_string(j), "compatDist",
          {{m.time(j), 1.0}, {m.time(i), -1.0}, {m.arc(i, j), -mt}}, Sense::ge, inst.dist(i, j) - mt);
    }
  }
  // Tm_{h+n} - Tm_h - M_T sum_j X_hj >= -M_T
  for (RequestId h = 1; h <= n; ++h) {
    std::vector<std::pair<int, double>> t{{m.time(inst.delivery(h)), 1.0}, {m.time(inst.pickup(h)), -1.0}};
    out_arcs(inst.pickup(h), -mt, t);
    add("prec_" + std::to_string(h), "precedence", std::move(t), Sense::ge, -mt);
  }
  add("load_start", "capbounds", {{m.load(0), 1.0}}, Sense::eq, 0.0);

  // |L_j - L_i - delta_j| <= M_L (1 - X_ij) as two rows.
  for (int i = 0; i < nv; ++i) {
    for (Vertex j = 1; j <= 2 * n; ++j) {
      if (i == j) continue;
      const double delta = inst.load_delta(j);
      const char* family = inst.is_pickup(j) ? "loadPick" : "loadDel";
      const std::string tag = std::to_string(i) + si + std::to_string(j);
      add("load_ub_" + tag, family, {{m.load(j), 1.0}, {m.load(i), -1.0}, {m.arc(i, j), ml}}, Sense::le, delta + ml);
      add("load_lb_" + tag, family, {{m.load(j), 1.0}, {m.load(i), -1.0}, {m.arc(i, j), -ml}}, Sense::ge, delta - ml);
    }
  }
  add("load_end", "endzero", {{m.load(end), 1.0}}, Sense::eq, 0.0);
  return m;
}

namespace {

void write_terms(std::ostream& os, const MilpModel& m, const std::vector<std::pair<int, double>>& terms, double scale) {
  int on_line = 0;
  for (const auto& [var, coef] : terms) {
    const double c = coef * scale;
    if (c == 0.0) continue;
    os << (c < 0 ? " - " : " + ") << std::abs(c) << ' ' << m.vars[static_cast<std::size_t>(var)].name;
    if (++on_line % 8 == 0) os << "\n  ";
  }
  if (on_line == 0) os << " 0 " << m.vars[0].name;
}

}  // namespace

void write_lp(std::ostream& os, const MilpModel& m) {
  const auto old_precision = os.precision(17);
  os << "\\ m1-PDSTSP model, " << m.vertex_count << " vertices\n";
  os << "Maximize\n obj:";
  write_terms(os, m, m.objective, -1.0);
  os << "\nSubject To\n";
  for (const auto& row : m.rows) {
    os << ' ' << row.name << ':';
    write_terms(os, m, row.terms, 1.0);
    switch (row.sense) {
      case Sense::le:
        os << " <= ";
        break;
      case Sense::ge:
        os << " >= ";
        break;
      case Sense::eq:
        os << " = ";
        break;
    }
    os << row.rhs << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : m.vars) {
    if (v.kind == VarKind::arc) continue;
    if (std::isinf(v.upper))
      os << ' ' << v.name << " >= " << v.lower << '\n';
    else
      os << ' ' << v.lower << " <= " << v.name << " <= " << v.upper << '\n';
  }
  os << "Binary\n";
  for (const auto& v : m.vars) {
    if (v.kind == VarKind::arc) os << ' ' << v.name << '\n';
  }
  os << "End\n";
  os.precision(old_precision);
}

std::string lp_text(const MilpModel& model) {
  std::ostringstream os;
  write_lp(os, model);
  return os.str();
}

std::vector<double> milp_assignment(const MilpModel& m, const Instance& inst, const Route& route) {
  std::vector<double> x(m.vars.size(), 0.0);
  const auto& seq = route.seq();
  double t = 0.0;
  int load = 0;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (k > 0) {
      x[static_cast<std::size_t>(m.arc(seq[k - 1], seq[k]))] = 1.0;
      t += inst.dist(seq[k - 1], seq[k]);
    }
    load += inst.load_delta(seq[k]);
    x[static_cast<std::size_t>(m.time(seq[k]))] = t;
    x[static_cast<std::size_t>(m.load(seq[k]))] = load;
  }
  return x;
}

std::vector<RowViolation> check_assignment(const MilpModel& m, const std::vector<double>& values, double tol) {
  std::vector<RowViolation> out;
  for (const auto& row : m.rows) {
    double lhs = 0.0;
    for (const auto& [var, coef] : row.terms) lhs += coef * values[static_cast<std::size_t>(var)];
    bool ok = true;
    switch (row.sense) {
      case Sense::le:
        ok = lhs <= row.rhs + tol;
        break;
      case Sense::ge:
        ok = lhs >= row.rhs - tol;
        break;
      case Sense::eq:
        ok = std::abs(lhs - row.rhs) <= tol;
        break;
    }
    if (!ok) out.push_back({row.name, lhs, row.rhs});
  }
  for (std::size_t k = 0; k < m.vars.size(); ++k) {
    const auto& v = m.vars[k];
    const double val = values[k];
    bool ok = val >= v.lower - tol && val <= v.upper + tol;
    if (v.kind == VarKind::arc) ok = ok && (val == 0.0 || val == 1.0);
    if (!ok) out.push_back({"bound_" + v.name, val, v.lower});
  }
  return out;
}

}  // namespace pdstsp
