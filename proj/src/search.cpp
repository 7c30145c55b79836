#include "pdstsp/search.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numeric>

#include "json.hpp"
#include "pdstsp/rng.hpp"

namespace pdstsp {

PathResult two_opt_path(const Instance& inst, Vertex start, Vertex end, std::span<const Vertex> mids) {
  std::vector<Vertex> path;
  path.reserve(mids.size() + 2);
  path.push_back(start);
  std::vector<Vertex> left(mids.begin(), mids.end());
  while (!left.empty()) {
    const Vertex cur = path.back();
    std::size_t pick = 0;
    for (std::size_t k = 1; k < left.size(); ++k) {
      const double dk = inst.dist(cur, left[k]);
      const double dp = inst.dist(cur, left[pick]);
      if (dk < dp || (dk == dp && left[k] < left[pick])) pick = k;
    }
    path.push_back(left[pick]);
    left.erase(left.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  path.push_back(end);

  // Reverse path[i..k] for interior i < k while some reversal shortens.
  const std::size_t last = path.size() - 1;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 1; i + 1 < last; ++i) {
      for (std::size_t k = i + 1; k < last; ++k) {
        const double delta = inst.dist(path[i - 1], path[k]) + inst.dist(path[i], path[k + 1]) -
                             inst.dist(path[i - 1], path[i]) - inst.dist(path[k], path[k + 1]);
        if (delta < -1e-12) {
          std::reverse(path.begin() + static_cast<std::ptrdiff_t>(i), path.begin() + static_cast<std::ptrdiff_t>(k) + 1);
          improved = true;
        }
      }
    }
  }
  PathResult out;
  out.length = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) out.length += inst.dist(path[k - 1], path[k]);
  out.seq = std::move(path);
  return out;
}

std::string_view to_string(MaskMode m) { return m == MaskMode::train_lb ? "train_lb" : "inference_2opt"; }

MaskMode mask_mode_from_string(std::string_view s) {
  if (s == "train_lb" || s == "train") return MaskMode::train_lb;
  if (s == "inference_2opt" || s == "inference") return MaskMode::inference_2opt;
  throw ConfigError("unknown mask mode '" + std::string(s) + "'");
}

std::string_view to_string(DecodeMode m) {
  switch (m) {
    case DecodeMode::greedy:
      return "greedy";
    case DecodeMode::sample:
      return "sample";
    case DecodeMode::beam:
      return "beam";
    case DecodeMode::multistart:
      return "multistart";
  }
  return "greedy";
}

DecodeMode decode_mode_from_string(std::string_view s) {
  if (s == "greedy") return DecodeMode::greedy;
  if (s == "sample") return DecodeMode::sample;
  if (s == "beam") return DecodeMode::beam;
  if (s == "multistart") return DecodeMode::multistart;
  throw ConfigError("unknown decode mode '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// DecodeState

DecodeState DecodeState::initial(const Instance& inst) {
  DecodeState s;
  s.seq_ = {inst.start()};
  s.visited_.assign(static_cast<std::size_t>(inst.vertex_count()), 0);
  s.visited_[0] = 1;
  s.remaining_length_ = inst.max_length;
  s.witness_ = {inst.end()};
  s.witness_length_ = inst.dist(inst.start(), inst.end());
  return s;
}

std::vector<RequestId> DecodeState::selected() const {
  std::vector<RequestId> out;
  const int n = (static_cast<int>(visited_.size()) - 2) / 2;
  for (Vertex v = 1; v <= n; ++v) {
    if (visited_[static_cast<std::size_t>(v)]) out.push_back(v);
  }
  return out;
}

void DecodeState::advance(const Instance& inst, Vertex v) {
  remaining_length_ -= inst.dist(current(), v);
  const double q_hat = static_cast<double>(inst.load_delta(v)) / inst.capacity;
  remaining_capacity_frac_ = std::max(remaining_capacity_frac_ - q_hat, 0.0);
  load_ += inst.load_delta(v);
  seq_.push_back(v);
  visited_[static_cast<std::size_t>(v)] = 1;
  if (inst.is_pickup(v)) {
    pending_.insert(std::upper_bound(pending_.begin(), pending_.end(), inst.delivery(v)), inst.delivery(v));
  } else if (inst.is_delivery(v)) {
    pending_.erase(std::remove(pending_.begin(), pending_.end(), v), pending_.end());
  } else if (v == inst.end()) {
    finished_ = true;
  }
  if (!witness_.empty() && witness_.front() == v) {
    witness_length_ -= inst.dist(seq_[seq_.size() - 2], v);
    witness_.erase(witness_.begin());
  } else {
    witness_.clear();
    witness_length_ = std::numeric_limits<double>::infinity();
  }
}

void DecodeState::set_witness(std::vector<Vertex> path, double length) {
  witness_ = std::move(path);
  witness_length_ = length;
}

Route DecodeState::to_route(const Instance& inst) const {
  if (!finished_) throw StructuralError("decode state is not finished");
  return Route(inst, seq_);
}

int MaskVector::count() const { return static_cast<int>(std::count(allowed.begin(), allowed.end(), 1)); }

// ---------------------------------------------------------------------------
// Masking

namespace {

struct MaskDetail {
  MaskVector mask;
  // Inference mode: completion after each open vertex and its length.
  std::vector<std::vector<Vertex>> completion;
  std::vector<double> completion_length;
};

MaskDetail mask_detail(const DecodeState& state, const Instance& inst, MaskMode mode) {
  const auto nv = static_cast<std::size_t>(inst.vertex_count());
  MaskDetail d;
  d.mask.allowed.assign(nv, 0);
  const bool certify = mode == MaskMode::inference_2opt;
  if (certify) {
    d.completion.resize(nv);
    d.completion_length.assign(nv, std::numeric_limits<double>::infinity());
  }
  if (state.finished()) return d;

  const Vertex cur = state.current();
  const double budget = state.remaining_length() + kLengthTol;
  const auto& pending = state.pending_deliveries();

  for (Vertex j = 1; j <= inst.n; ++j) {
    if (state.visited(j)) continue;
    if (state.load() + inst.demand_of(j) > inst.capacity) continue;
    if (!certify) {
      if (pickup_completion_cost(state, inst, j, mode) <= budget) d.mask.allowed[static_cast<std::size_t>(j)] = 1;
      continue;
    }
    std::vector<Vertex> mids = pending;
    mids.push_back(inst.delivery(j));
    PathResult path = two_opt_path(inst, j, inst.end(), mids);
    if (inst.dist(cur, j) + path.length <= budget) {
      d.mask.allowed[static_cast<std::size_t>(j)] = 1;
      d.completion[static_cast<std::size_t>(j)].assign(path.seq.begin() + 1, path.seq.end());
      d.completion_length[static_cast<std::size_t>(j)] = path.length;
    }
  }

  for (Vertex dv : pending) {
    if (!certify) {
      d.mask.allowed[static_cast<std::size_t>(dv)] = 1;
      continue;
    }
    std::vector<Vertex> mids;
    for (Vertex o : pending) {
      if (o != dv) mids.push_back(o);
    }
    PathResult path = two_opt_path(inst, dv, inst.end(), mids);
    std::vector<Vertex> best(path.seq.begin() + 1, path.seq.end());
    double best_len = path.length;
    const auto& w = state.witness();
    if (!w.empty() && w.front() == dv) {
      const double via_witness = state.witness_length() - inst.dist(cur, dv);
      if (via_witness < best_len) {
        best.assign(w.begin() + 1, w.end());
        best_len = via_witness;
      }
    }
    if (inst.dist(cur, dv) + best_len <= budget) {
      d.mask.allowed[static_cast<std::size_t>(dv)] = 1;
      d.completion[static_cast<std::size_t>(dv)] = std::move(best);
      d.completion_length[static_cast<std::size_t>(dv)] = best_len;
    }
  }

  if (pending.empty()) {
    d.mask.allowed[static_cast<std::size_t>(inst.end())] = 1;
    if (certify) d.completion_length[static_cast<std::size_t>(inst.end())] = 0.0;
  }
  return d;
}

Vertex argmax_open(std::span<const double> scores, const MaskVector& mask) {
  Vertex best = -1;
  for (std::size_t v = 0; v < scores.size(); ++v) {
    if (!mask.allowed[v]) continue;
    if (best < 0 || scores[v] > scores[static_cast<std::size_t>(best)]) best = static_cast<Vertex>(v);
  }
  return best;
}

// Fallback when nothing is open: close the route, or (train mode only) take
// the first pending delivery and let shaping absorb the overrun.
Vertex fallback_action(const DecodeState& state, const Instance& inst) {
  if (state.pending_deliveries().empty()) return inst.end();
  return state.pending_deliveries().front();
}

void take(DecodeState& state, const Instance& inst, Vertex v, const MaskDetail& d, MaskMode mode) {
  const bool was_open = d.mask[v];
  state.advance(inst, v);
  if (mode == MaskMode::inference_2opt && was_open && v != inst.end())
    state.set_witness(d.completion[static_cast<std::size_t>(v)], d.completion_length[static_cast<std::size_t>(v)]);
}

bool decode_better(const Instance& inst, const Route& a, const Route& b, double rho) {
  const double fa = shaped_objective(inst, a, rho);
  const double fb = shaped_objective(inst, b, rho);
  if (fa != fb) return fa < fb;
  if (a.length() != b.length()) return a.length() < b.length();
  return a.seq() < b.seq();
}

void sort_best_first(const Instance& inst, std::vector<Route>& routes, double rho) {
  std::sort(routes.begin(), routes.end(), [&](const Route& a, const Route& b) { return decode_better(inst, a, b, rho); });
  routes.erase(std::unique(routes.begin(), routes.end()), routes.end());
}

Route sample_rollout(const Instance& inst, const Scorer& scorer, const DecodeConfig& cfg, Rng& rng) {
  DecodeState state = DecodeState::initial(inst);
  while (!state.finished()) {
    MaskDetail d = mask_detail(state, inst, cfg.mask_mode);
    Vertex v;
    if (d.mask.count() == 0) {
      v = fallback_action(state, inst);
    } else {
      const auto probs = action_probabilities(scorer.score(state, inst), d.mask, cfg.softmax_scale);
      v = static_cast<Vertex>(rng.categorical(probs));
    }
    take(state, inst, v, d, cfg.mask_mode);
  }
  return state.to_route(inst);
}

std::vector<Route> beam_decode(const Instance& inst, const Scorer& scorer, const DecodeConfig& cfg) {
  struct Node {
    DecodeState state;
    double logp = 0.0;
  };
  const auto width = static_cast<std::size_t>(std::max(1, cfg.beam_width));
  std::vector<Node> beam{{DecodeState::initial(inst), 0.0}};
  auto unfinished = [](const std::vector<Node>& b) {
    return std::any_of(b.begin(), b.end(), [](const Node& n) { return !n.state.finished(); });
  };
  while (unfinished(beam)) {
    std::vector<Node> children;
    for (const Node& node : beam) {
      if (node.state.finished()) {
        children.push_back(node);
        continue;
      }
      MaskDetail d = mask_detail(node.state, inst, cfg.mask_mode);
      if (d.mask.count() == 0) {
        Node child = node;
        take(child.state, inst, fallback_action(node.state, inst), d, cfg.mask_mode);
        children.push_back(std::move(child));
        continue;
      }
      const auto probs = action_probabilities(scorer.score(node.state, inst), d.mask, cfg.softmax_scale);
      for (Vertex v = 0; v < inst.vertex_count(); ++v) {
        if (!d.mask[v]) continue;
        Node child = node;
        take(child.state, inst, v, d, cfg.mask_mode);
        child.logp += std::log(probs[static_cast<std::size_t>(v)]);
        children.push_back(std::move(child));
      }
    }
    auto ranks_before = [](const Node& a, const Node& b) {
      if (a.logp != b.logp) return a.logp > b.logp;
      return a.state.partial_seq() < b.state.partial_seq();
    };
    std::map<std::vector<RequestId>, std::size_t> keep;
    for (std::size_t k = 0; k < children.size(); ++k) {
      auto [it, inserted] = keep.emplace(children[k].state.selected(), k);
      if (!inserted && ranks_before(children[k], children[it->second])) it->second = k;
    }
    std::vector<Node> next;
    next.reserve(keep.size());
    for (const auto& [key, k] : keep) next.push_back(std::move(children[k]));
    std::sort(next.begin(), next.end(), ranks_before);
    if (next.size() > width) next.resize(width);
    if (cfg.beam_observer) {
      std::vector<DecodeState> kept;
      for (const Node& node : next) kept.push_back(node.state);
      cfg.beam_observer(kept);
    }
    beam = std::move(next);
  }
  std::vector<Route> out;
  for (const Node& node : beam) out.push_back(node.state.to_route(inst));
  return out;
}

}  // namespace

void apply_action(DecodeState& state, const Instance& inst, Vertex v, MaskMode mode) {
  if (v < 0 || v >= inst.vertex_count()) throw InvalidVertex("vertex " + std::to_string(v) + " out of range");
  if (state.finished()) throw StructuralError("decode state is already finished");
  const MaskDetail d = mask_detail(state, inst, mode);
  take(state, inst, v, d, mode);
}

double pickup_completion_cost(const DecodeState& state, const Instance& inst, Vertex pickup, MaskMode mode) {
  const Vertex cur = state.current();
  const Vertex del = inst.delivery(pickup);
  if (mode == MaskMode::train_lb) return inst.dist(cur, pickup) + inst.dist(pickup, del) + inst.dist(del, inst.end());
  std::vector<Vertex> mids = state.pending_deliveries();
  mids.push_back(del);
  return inst.dist(cur, pickup) + two_opt_path(inst, pickup, inst.end(), mids).length;
}

MaskVector compute_mask(const DecodeState& state, const Instance& inst, MaskMode mode) {
  return mask_detail(state, inst, mode).mask;
}

// ---------------------------------------------------------------------------
// Scorers

std::vector<double> FitnessScorer::score(const DecodeState& state, const Instance& inst) const {
  std::vector<double> s(static_cast<std::size_t>(inst.vertex_count()), 0.0);
  const Vertex cur = state.current();
  for (Vertex v = 0; v < inst.vertex_count(); ++v) {
    const RequestId h = inst.request_of(v);
    const double r = h > 0 ? inst.revenue_of(h) : 0.0;
    s[static_cast<std::size_t>(v)] = r - inst.dist(cur, v);
  }
  return s;
}

ExternalScorer ExternalScorer::from_logits(std::vector<std::vector<double>> logits) {
  ExternalScorer s;
  s.logits_ = std::move(logits);
  return s;
}

ExternalScorer ExternalScorer::from_trajectories(std::vector<std::vector<Vertex>> routes) {
  ExternalScorer s;
  s.routes_ = std::move(routes);
  s.replay_ = true;
  return s;
}

std::vector<double> ExternalScorer::score(const DecodeState& state, const Instance& inst) const {
  const auto nv = static_cast<std::size_t>(inst.vertex_count());
  if (logits_.size() != nv) throw ConfigError("external scorer: logit table does not match the instance");
  const auto& row = logits_[static_cast<std::size_t>(state.current())];
  if (row.size() != nv) throw ConfigError("external scorer: logit row has the wrong width");
  return row;
}

const std::vector<std::vector<Vertex>>* ExternalScorer::trajectories() const { return replay_ ? &routes_ : nullptr; }

std::vector<LogitRecord> read_logits_jsonl(std::istream& is) {
  std::vector<LogitRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      for (const auto& item : j.items()) {
        if (item.key() != "instance_id" && item.key() != "logits")
          throw ConfigError("logit record: unknown field '" + item.key() + "'");
      }
      out.push_back({j.at("instance_id").get<std::string>(), j.at("logits").get<std::vector<std::vector<double>>>()});
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("logit JSONL: ") + e.what());
    }
  }
  return out;
}

std::vector<double> action_probabilities(std::span<const double> scores, const MaskVector& mask, double scale) {
  std::vector<double> p(scores.size(), 0.0);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < scores.size(); ++v) {
    if (mask.allowed[v]) top = std::max(top, scale * std::tanh(scores[v]));
  }
  double total = 0.0;
  for (std::size_t v = 0; v < scores.size(); ++v) {
    if (!mask.allowed[v]) continue;
    p[v] = std::exp(scale * std::tanh(scores[v]) - top);
    total += p[v];
  }
  if (total > 0.0) {
    for (double& x : p) x /= total;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Construction

Route greedy_rollout(const Instance& inst, const Scorer& scorer, DecodeState state, MaskMode mode) {
  while (!state.finished()) {
    MaskDetail d = mask_detail(state, inst, mode);
    Vertex v = argmax_open(scorer.score(state, inst), d.mask);
    if (v < 0) v = fallback_action(state, inst);
    take(state, inst, v, d, mode);
  }
  return state.to_route(inst);
}

std::vector<Vertex> select_start_pickups(const Instance& inst, const Scorer& scorer, int starts, MaskMode mode) {
  const DecodeState state = DecodeState::initial(inst);
  const MaskVector mask = compute_mask(state, inst, mode);
  const auto scores = scorer.score(state, inst);
  std::vector<Vertex> cand;
  for (Vertex j = 1; j <= inst.n; ++j) {
    if (mask[j]) cand.push_back(j);
  }
  std::stable_sort(cand.begin(), cand.end(), [&](Vertex a, Vertex b) {
    return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
  });
  if (cand.size() > static_cast<std::size_t>(std::max(0, starts))) cand.resize(static_cast<std::size_t>(std::max(0, starts)));
  return cand;
}

std::vector<Route> decode(const Instance& inst, const Scorer& scorer, const DecodeConfig& cfg, std::uint64_t rng_seed) {
  std::vector<Route> out;
  if (const auto* fixed = scorer.trajectories()) {
    for (const auto& seq : *fixed) {
      Route r(inst, seq);
      if (!r.capacity_ok() || (cfg.mask_mode == MaskMode::inference_2opt && !r.feasible()))
        throw InfeasibleRoute("replayed trajectory is infeasible");
      out.push_back(std::move(r));
    }
    sort_best_first(inst, out, cfg.rho);
    return out;
  }

  switch (cfg.mode) {
    case DecodeMode::greedy:
      out.push_back(greedy_rollout(inst, scorer, DecodeState::initial(inst), cfg.mask_mode));
      break;
    case DecodeMode::sample: {
      Rng rng(rng_seed);
      for (int s = 0; s < std::max(1, cfg.samples); ++s) out.push_back(sample_rollout(inst, scorer, cfg, rng));
      break;
    }
    case DecodeMode::beam:
      out = beam_decode(inst, scorer, cfg);
      break;
    case DecodeMode::multistart: {
      const int m = cfg.starts > 0 ? cfg.starts : std::max(1, inst.n / 2);
      for (Vertex first : select_start_pickups(inst, scorer, m, cfg.mask_mode)) {
        DecodeState state = DecodeState::initial(inst);
        MaskDetail d = mask_detail(state, inst, cfg.mask_mode);
        take(state, inst, first, d, cfg.mask_mode);
        out.push_back(greedy_rollout(inst, scorer, std::move(state), cfg.mask_mode));
      }
      if (out.empty()) out.push_back(greedy_rollout(inst, scorer, DecodeState::initial(inst), cfg.mask_mode));
      break;
    }
  }
  sort_best_first(inst, out, cfg.rho);
  return out;
}

Route greedy_search(const Instance& inst, std::optional<Vertex> start_pickup) {
  const FitnessScorer fitness;
  DecodeState state = DecodeState::initial(inst);
  if (start_pickup) {
    MaskDetail d = mask_detail(state, inst, MaskMode::inference_2opt);
    if (!inst.is_pickup(*start_pickup) || !d.mask[*start_pickup])
      throw ConfigError("greedy_search: start vertex " + std::to_string(*start_pickup) + " is not an admissible pickup");
    take(state, inst, *start_pickup, d, MaskMode::inference_2opt);
  }
  return greedy_rollout(inst, fitness, std::move(state), MaskMode::inference_2opt);
}

MultiStartResult multi_start_greedy(const Instance& inst, int starts) {
  const FitnessScorer fitness;
  std::vector<Route> routes;
  for (Vertex first : select_start_pickups(inst, fitness, starts, MaskMode::inference_2opt))
    routes.push_back(greedy_search(inst, first));
  if (routes.empty()) routes.push_back(greedy_search(inst));
  Route best = routes.front();
  for (const auto& r : routes) {
    if (better(r, best)) best = r;
  }
  return {std::move(routes), std::move(best)};
}

Route sgbs(const Instance& inst, const Scorer& scorer, int beam_width, int expansion, const Scorer& rollout,
           MaskMode mode, double rho) {
  if (beam_width < 1 || expansion < 1) throw ConfigError("sgbs: beam width and expansion must be >= 1");
  struct Node {
    DecodeState state;
    Route sim;
  };
  std::optional<Route> best;
  auto consider = [&](const Route& r) {
    if (!best || decode_better(inst, r, *best, rho)) best = r;
  };

  std::vector<DecodeState> beam{DecodeState::initial(inst)};
  while (!beam.empty()) {
    std::vector<Node> children;
    for (const DecodeState& node : beam) {
      MaskDetail d = mask_detail(node, inst, mode);
      std::vector<Vertex> open;
      for (Vertex v = 0; v < inst.vertex_count(); ++v) {
        if (d.mask[v]) open.push_back(v);
      }
      if (open.empty()) open.push_back(fallback_action(node, inst));
      const auto scores = scorer.score(node, inst);
      std::stable_sort(open.begin(), open.end(), [&](Vertex a, Vertex b) {
        return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
      });
      if (open.size() > static_cast<std::size_t>(expansion)) open.resize(static_cast<std::size_t>(expansion));
      for (Vertex v : open) {
        DecodeState child = node;
        take(child, inst, v, d, mode);
        Route sim = greedy_rollout(inst, rollout, child, mode);
        consider(sim);
        children.push_back({std::move(child), std::move(sim)});
      }
    }
    auto ranks_before = [&](const Node& a, const Node& b) {
      if (!(a.sim == b.sim)) return decode_better(inst, a.sim, b.sim, rho);
      return a.state.partial_seq() < b.state.partial_seq();
    };
    std::map<std::vector<RequestId>, std::size_t> keep;
    for (std::size_t k = 0; k < children.size(); ++k) {
      if (children[k].state.finished()) continue;
      auto [it, inserted] = keep.emplace(children[k].state.selected(), k);
      if (!inserted && ranks_before(children[k], children[it->second])) it->second = k;
    }
    std::vector<Node> kept;
    for (const auto& [key, k] : keep) kept.push_back(std::move(children[k]));
    std::sort(kept.begin(), kept.end(), ranks_before);
    if (kept.size() > static_cast<std::size_t>(beam_width)) kept.erase(kept.begin() + beam_width, kept.end());
    beam.clear();
    for (auto& node : kept) beam.push_back(std::move(node.state));
  }
  return best ? *best : Route::empty(inst);
}

}  // namespace pdstsp
