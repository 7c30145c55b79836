#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdstsp/core.hpp"

namespace pdstsp {

/// Fixed-endpoint path through `mids`, built nearest-neighbor first and then
/// improved by 2-Opt segment reversals until none shortens it. An upper bound
/// on the shortest Hamiltonian path, hence a valid feasibility witness.
struct PathResult {
  std::vector<Vertex> seq;  // start, mids..., end
  double length = 0.0;
};

PathResult two_opt_path(const Instance& inst, Vertex start, Vertex end, std::span<const Vertex> mids);

enum class MaskMode {
  train_lb,        // cheap lower bound c(cur,j) + c(j,j+n) + c(j+n,end)
  inference_2opt,  // c(cur,j) + 2-Opt completion through every pending delivery
};

std::string_view to_string(MaskMode m);
MaskMode mask_mode_from_string(std::string_view s);

/// Partial solution of the construction process.
class DecodeState {
 public:
  static DecodeState initial(const Instance& inst);

  const std::vector<Vertex>& partial_seq() const { return seq_; }
  bool visited(Vertex v) const { return visited_[static_cast<std::size_t>(v)] != 0; }
  Vertex current() const { return seq_.back(); }
  bool finished() const { return finished_; }
  int load() const { return load_; }
  /// Normalized remaining capacity, updated as max(Q_t - q_z / Q, 0) with
  /// deliveries carrying negative demand.
  double remaining_capacity_frac() const { return remaining_capacity_frac_; }
  double remaining_length() const { return remaining_length_; }
  /// Deliveries whose pickup has been visited, ascending.
  const std::vector<Vertex>& pending_deliveries() const { return pending_; }
  /// Requests whose pickup has been visited, ascending.
  std::vector<RequestId> selected() const;

  /// Certified completion from the current vertex (inference mode only):
  /// vertices still to visit, ending at 2n+1, with its length.
  const std::vector<Vertex>& witness() const { return witness_; }
  double witness_length() const { return witness_length_; }

  /// Append v. Does not check admissibility; use compute_mask for that.
  void advance(const Instance& inst, Vertex v);
  void set_witness(std::vector<Vertex> path, double length);

  /// Complete route. Requires finished().
  Route to_route(const Instance& inst) const;

 private:
  std::vector<Vertex> seq_;
  std::vector<char> visited_;
  std::vector<Vertex> pending_;
  std::vector<Vertex> witness_;
  double witness_length_ = 0.0;
  int load_ = 0;
  double remaining_capacity_frac_ = 1.0;
  double remaining_length_ = 0.0;
  bool finished_ = false;
};

struct MaskVector {
  std::vector<char> allowed;  // per vertex

  bool operator[](Vertex v) const { return allowed[static_cast<std::size_t>(v)] != 0; }
  int count() const;
};

/// Admissible next vertices:
///   visited vertices are masked;
///   a delivery is open only while its pickup is visited and it is not;
///   the end depot is masked while deliveries are pending;
///   a pickup is masked when its demand exceeds the remaining capacity or its
///   completion cost exceeds the remaining length.
/// In inference mode a delivery is also masked when no certified completion
/// through the remaining pending deliveries fits, so every open action keeps a
/// feasible completion.
MaskVector compute_mask(const DecodeState& state, const Instance& inst, MaskMode mode);

/// Advance `state` by v, keeping the certified completion when v is open.
void apply_action(DecodeState& state, const Instance& inst, Vertex v, MaskMode mode);

/// Completion cost of pickup j used by the mask (c~_j).
double pickup_completion_cost(const DecodeState& state, const Instance& inst, Vertex pickup, MaskMode mode);

/// Per-vertex action scores (pre-mask logits).
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> score(const DecodeState& state, const Instance& inst) const = 0;
  /// Fixed trajectories to replay instead of scoring, if any.
  virtual const std::vector<std::vector<Vertex>>* trajectories() const { return nullptr; }
};

/// fitness_j = r_j - c(cur, j); deliveries carry their request's revenue and
/// the end depot carries 0.
class FitnessScorer final : public Scorer {
 public:
  std::vector<double> score(const DecodeState& state, const Instance& inst) const override;
};

/// Scores supplied from outside: a (2n+2) x (2n+2) transition-logit table
/// indexed [current][next], or fixed trajectories to replay.
class ExternalScorer final : public Scorer {
 public:
  static ExternalScorer from_logits(std::vector<std::vector<double>> logits);
  static ExternalScorer from_trajectories(std::vector<std::vector<Vertex>> routes);

  std::vector<double> score(const DecodeState& state, const Instance& inst) const override;
  const std::vector<std::vector<Vertex>>* trajectories() const override;

 private:
  std::vector<std::vector<double>> logits_;
  std::vector<std::vector<Vertex>> routes_;
  bool replay_ = false;
};

/// One line of a logit file: {"instance_id": str, "logits": [[...], ...]}.
struct LogitRecord {
  std::string instance_id;
  std::vector<std::vector<double>> logits;
};
std::vector<LogitRecord> read_logits_jsonl(std::istream& is);

/// softmax(C * tanh(score)) over the open entries; masked entries are exactly 0.
std::vector<double> action_probabilities(std::span<const double> scores, const MaskVector& mask, double scale);

enum class DecodeMode { greedy, sample, beam, multistart };

std::string_view to_string(DecodeMode m);
DecodeMode decode_mode_from_string(std::string_view s);

struct DecodeConfig {
  DecodeMode mode = DecodeMode::greedy;
  int starts = 0;  // M; 0 means max(1, n/2)
  int beam_width = 3;
  int samples = 16;  // eta
  MaskMode mask_mode = MaskMode::inference_2opt;
  double rho = 10.0;
  double softmax_scale = 10.0;  // C
  /// Beam mode only: called with the kept partials after each step.
  std::function<void(const std::vector<DecodeState>&)> beam_observer;
};

/// Build routes with the given scorer.
///   greedy:     argmax open score each step (lowest index on ties)
///   sample:     `samples` categorical rollouts
///   beam:       width-`beam_width`, cumulative log-probability, per-step dedup
///               of partials selecting the same request set
///   multistart: top-`starts` first pickups by initial score, greedy after
/// The end depot is taken when it is the only open vertex. Inference-mode
/// routes are always feasible; train-mode routes may overrun T.
/// Returned routes are ordered best first.
std::vector<Route> decode(const Instance& inst, const Scorer& scorer, const DecodeConfig& cfg,
                          std::uint64_t rng_seed = 0);

/// Greedy completion of `state` under the scorer.
Route greedy_rollout(const Instance& inst, const Scorer& scorer, DecodeState state, MaskMode mode);

/// Fitness-driven greedy construction with inference masking, optionally
/// forced to start at a given pickup.
Route greedy_search(const Instance& inst, std::optional<Vertex> start_pickup = std::nullopt);

struct MultiStartResult {
  std::vector<Route> routes;  // in start-rank order
  Route best;
};

/// Greedy runs from the top-M first pickups by fitness. Returns fewer routes
/// when fewer pickups are admissible at the start.
MultiStartResult multi_start_greedy(const Instance& inst, int starts);

/// Admissible first pickups ranked by score, best first.
std::vector<Vertex> select_start_pickups(const Instance& inst, const Scorer& scorer, int starts, MaskMode mode);

/// Simulation-guided beam search: width `beam_width`, `expansion` children per
/// node by the scorer, each child valued by a greedy rollout with `rollout`,
/// children selecting the same request set deduplicated before pruning.
/// Returns the best rollout seen.
Route sgbs(const Instance& inst, const Scorer& scorer, int beam_width, int expansion, const Scorer& rollout,
           MaskMode mode = MaskMode::inference_2opt, double rho = 10.0);

}  // namespace pdstsp
