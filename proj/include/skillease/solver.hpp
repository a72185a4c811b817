#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "skillease/core.hpp"
#include "skillease/ingest.hpp"

namespace skillease {

/// Current estimate of every player skill and map ease. Vectors are aligned
/// with the node orderings of the BipartiteIndex the state was built from.
struct RatingState {
  std::vector<double> skill;  // indexed like BipartiteIndex::players
  std::vector<double> ease;   // indexed like BipartiteIndex::maps
  int iteration = 0;
  double mae = 0.0;  // selected-mean absolute error of this state
};

enum class HaltReason { converged, reverted, max_iterations };

const char* to_string(HaltReason reason);
std::optional<HaltReason> halt_reason_from_string(const std::string& name);

/// Error history of a fit. Entry 0 is the initial state's error; entry k the
/// error after iteration k. When halt_reason is `reverted`, the last entry is
/// the rejected iteration's error and the returned state is the one before it.
struct FitTrace {
  std::vector<std::pair<int, double>> entries;
  HaltReason halt_reason = HaltReason::max_iterations;
};

struct SolverOptions {
  // One iteration updates players first, then maps. `sequential` feeds the
  // freshly updated skills into the map update; `simultaneous` computes both
  // halves from the previous state.
  enum class Schedule { sequential, simultaneous };
  Schedule schedule = Schedule::sequential;

  // Ranking key for the top-score selection on the map side: the per-edge
  // ease estimate itself, or the current skill of the player who set it.
  enum class MapEdgeRank { estimate, player_skill };
  MapEdgeRank rank_map_edges_by = MapEdgeRank::estimate;

  // The sd cutoff drops only high outliers by default; two-sided drops both.
  bool sd_filter_two_sided = false;

  int max_iterations = 100;
};

inline double predict_score(double skill, double ease) { return skill * ease; }

inline double edge_skill_estimate(const PreparedScore& edge, double ease) {
  return edge.value / ease;
}

inline double edge_ease_estimate(const PreparedScore& edge, double skill) {
  return edge.value / skill;
}

/// Top-score aggregation: sorts the estimates descending, keeps the best
/// ceil(aggregation_topscores_p * n), optionally drops kept members more than
/// sd_range sample standard deviations above their mean (needs >= 3 kept),
/// and returns the arithmetic mean of the survivors. Throws on empty input.
double aggregate_estimates(std::vector<double> estimates, const Hyperparams& hp,
                           bool sd_filter_two_sided = false);

/// Mean of the lowest floor(n/2) values (all values when n <= 1); 0 when
/// empty. The selection rule shared by training and test error.
double lowest_half_mean(std::vector<double> errors);

/// All skills and eases at default_rating, iteration 0, error evaluated on
/// that state. Throws std::invalid_argument for an empty graph.
RatingState init_state(const BipartiteIndex& graph, const Hyperparams& hp);

std::vector<double> update_players(const RatingState& state,
                                   const BipartiteIndex& graph,
                                   const Hyperparams& hp,
                                   const SolverOptions& options = {});

std::vector<double> update_maps(const RatingState& state,
                                const BipartiteIndex& graph,
                                const Hyperparams& hp,
                                const SolverOptions& options = {});

/// Selected-mean absolute prediction error of the state over all edges.
double model_error(const RatingState& state, const BipartiteIndex& graph,
                   const Hyperparams& hp);

/// Runs the alternating averaging loop until the relative error change drops
/// below error_change_prop, the error increases with finish_early set
/// (revert and halt), or max_iterations is reached. Throws std::runtime_error
/// naming the offending node if a value turns non-finite.
std::pair<RatingState, FitTrace> fit(const BipartiteIndex& graph,
                                     const Hyperparams& hp,
                                     const SolverOptions& options = {});

// Fitted-state serialization:
// {"players": {id: skill}, "maps": {id: ease},
//  "trace": [[iteration, mae], ...], "halt_reason": "..."}
nlohmann::json state_to_json(const RatingState& state,
                             const BipartiteIndex& graph,
                             const FitTrace& trace);

struct StateFile {
  std::map<PlayerId, double> players;
  std::map<MapId, double> maps;
  FitTrace trace;
};

StateFile state_from_json(const nlohmann::json& doc);

}  // namespace skillease
