#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "skillease/core.hpp"
#include "skillease/ingest.hpp"
#include "skillease/solver.hpp"

namespace skillease {

/// Hidden skills and eases behind a generated dataset — the independent
/// oracle used to check what the solver recovers.
struct GroundTruth {
  std::map<PlayerId, double> true_skill;
  std::map<MapId, double> true_ease;
  double noise_sd = 0.0;  // sd of the multiplicative log-normal noise
  std::uint64_t seed = 0;
};

/// Random ground truth with skills and eases log-uniform in [1, 10]; player
/// ids p0001..., map ids m0001....
GroundTruth random_truth(int n_players, int n_maps, double noise_sd,
                         std::uint64_t seed);

/// Samples each (player, map) pair with probability edge_density and gives
/// the edge value s = skill * ease * exp(eta), eta ~ Normal(0, noise_sd^2),
/// capped at value_cap. Repair edges are added if sampling left the
/// bipartite graph disconnected. Values are already linear and enter the
/// solver directly; adjusted_raw is NaN. Deterministic per truth.seed.
Dataset generate(int n_players, int n_maps, double edge_density,
                 const GroundTruth& truth, double value_cap = 100.0);

/// RMS log-errors of the fitted skills and eases against the truth, after
/// removing the scale degeneracy: c = exp(mean(log p* - log p_hat)) is
/// applied to skills and 1/c to eases. Returns (skill RMS, ease RMS).
/// Throws std::invalid_argument when the key sets disagree.
std::pair<double, double> recovery_error(const RatingState& state,
                                         const BipartiteIndex& graph,
                                         const GroundTruth& truth);

/// Rewrites the dataset's edges as raw-percentage score records by inverting
/// the score transform, so synthetic data can be routed through the full
/// prepare pipeline. Edge values at or above the transform's range are
/// clamped just below it.
std::vector<ScoreRecord> to_raw_records(const Dataset& ds,
                                        const Hyperparams& hp);

nlohmann::json truth_to_json(const GroundTruth& truth);

}  // namespace skillease
