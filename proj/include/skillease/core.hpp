#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace skillease {

// Opaque leaderboard identifiers. The solver never does arithmetic on ids;
// wrapping them keeps player and map keys from being mixed up.
struct PlayerId {
  std::string value;
  auto operator<=>(const PlayerId&) const = default;
};

struct MapId {
  std::string value;
  auto operator<=>(const MapId&) const = default;
};

/// One raw observation: the best score a player set on a map.
struct ScoreRecord {
  PlayerId player;
  MapId map;
  double raw = 0.0;  // fraction of the maximum achievable score, in [0,1]
  std::int64_t timestamp = 0;  // seconds since epoch
  std::vector<std::string> modifiers;  // modifier codes, possibly empty
};

/// The tunables of the rating pipeline. Defaults are the combination the
/// final grid search settled on; min_raw_score and recency_keep_fraction
/// are the data-prep thresholds, exposed so prep is reproducible.
struct Hyperparams {
  // proportion of best per-edge estimates kept when averaging a node
  double aggregation_topscores_p = 0.9;
  // optional sd cutoff applied to the kept estimates (one-sided above)
  std::optional<double> aggregation_topscores_sd_range = 1.0;
  // beta distribution shape parameters for the score transform
  double beta_alpha = 25.0;
  double beta_beta = 1.02;
  // initial value for every skill and ease
  double default_rating = 10.0;
  // halt when the relative MAE change drops below this
  double error_change_prop = 0.005;
  // revert and halt when the MAE increases between iterations
  bool finish_early = true;
  // scale (mean of the untruncated base exponential) and truncation bound
  // of the truncated-exponential value curve
  double truncexp_base_mean = 10.0;
  double truncexp_max = 100.0;
  // cleaning: drop adjusted raw scores below this
  double min_raw_score = 0.75;
  // cleaning: proportion of most recent scores kept
  double recency_keep_fraction = 0.35;
};

/// Checks every field invariant; returns one message per violation,
/// empty when the parameters are usable.
std::vector<std::string> validate_hyperparams(const Hyperparams& hp);

/// Maps modifier codes to score multipliers. Default-constructed tables
/// hold exactly the eight codes that change the score.
class ModifierTable {
 public:
  ModifierTable();
  explicit ModifierTable(std::map<std::string, double> multipliers);

  std::optional<double> multiplier(const std::string& code) const;
  const std::map<std::string, double>& entries() const { return multipliers_; }

 private:
  std::map<std::string, double> multipliers_;
};

}  // namespace skillease

template <>
struct std::hash<skillease::PlayerId> {
  std::size_t operator()(const skillease::PlayerId& id) const noexcept {
    return std::hash<std::string>{}(id.value);
  }
};

template <>
struct std::hash<skillease::MapId> {
  std::size_t operator()(const skillease::MapId& id) const noexcept {
    return std::hash<std::string>{}(id.value);
  }
};
