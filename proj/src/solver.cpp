#include "skillease/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace skillease {

namespace {

// Core of the top-score aggregation. `estimates` must already be ordered
// descending by the selection key.
double aggregate_ranked(const std::vector<double>& estimates,
                        const Hyperparams& hp, bool two_sided) {
  const std::size_t n = estimates.size();
  const auto kept = std::min(
      n, static_cast<std::size_t>(std::ceil(
             hp.aggregation_topscores_p * static_cast<double>(n))));
  double sum = 0.0;
  for (std::size_t i = 0; i < kept; ++i) sum += estimates[i];
  const double mean = sum / static_cast<double>(kept);

  if (!hp.aggregation_topscores_sd_range || kept < 3) return mean;

  double squares = 0.0;
  for (std::size_t i = 0; i < kept; ++i) {
    const double d = estimates[i] - mean;
    squares += d * d;
  }
  const double sd = std::sqrt(squares / static_cast<double>(kept - 1));
  const double range = *hp.aggregation_topscores_sd_range;
  const double hi = mean + range * sd;
  const double lo = two_sided ? mean - range * sd
                              : -std::numeric_limits<double>::infinity();

  double survivor_sum = 0.0;
  std::size_t survivors = 0;
  for (std::size_t i = 0; i < kept; ++i) {
    if (estimates[i] <= hi && estimates[i] >= lo) {
      survivor_sum += estimates[i];
      ++survivors;
    }
  }
  if (survivors == 0) return mean;
  return survivor_sum / static_cast<double>(survivors);
}

void check_finite(const RatingState& state, const BipartiteIndex& graph,
                  int iteration) {
  for (std::size_t i = 0; i < state.skill.size(); ++i)
    if (!std::isfinite(state.skill[i]))
      throw std::runtime_error("fit: non-finite skill for player '" +
                               graph.players[i].value + "' at iteration " +
                               std::to_string(iteration));
  for (std::size_t i = 0; i < state.ease.size(); ++i)
    if (!std::isfinite(state.ease[i]))
      throw std::runtime_error("fit: non-finite ease for map '" +
                               graph.maps[i].value + "' at iteration " +
                               std::to_string(iteration));
}

}  // namespace

const char* to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::converged: return "converged";
    case HaltReason::reverted: return "reverted";
    case HaltReason::max_iterations: return "max_iterations";
  }
  return "unknown";
}

std::optional<HaltReason> halt_reason_from_string(const std::string& name) {
  if (name == "converged") return HaltReason::converged;
  if (name == "reverted") return HaltReason::reverted;
  if (name == "max_iterations") return HaltReason::max_iterations;
  return std::nullopt;
}

double aggregate_estimates(std::vector<double> estimates,
                           const Hyperparams& hp, bool sd_filter_two_sided) {
  if (estimates.empty())
    throw std::invalid_argument("aggregate_estimates: empty input");
  std::sort(estimates.begin(), estimates.end(), std::greater<>());
  return aggregate_ranked(estimates, hp, sd_filter_two_sided);
}

double lowest_half_mean(std::vector<double> errors) {
  if (errors.empty()) return 0.0;
  const std::size_t n = errors.size();
  const std::size_t k = n <= 1 ? n : n / 2;
  std::sort(errors.begin(), errors.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += errors[i];
  return sum / static_cast<double>(k);
}

RatingState init_state(const BipartiteIndex& graph, const Hyperparams& hp) {
  if (graph.num_edges() == 0)
    throw std::invalid_argument("init_state: empty graph");
  RatingState state;
  state.skill.assign(graph.num_players(), hp.default_rating);
  state.ease.assign(graph.num_maps(), hp.default_rating);
  state.iteration = 0;
  state.mae = model_error(state, graph, hp);
  return state;
}

std::vector<double> update_players(const RatingState& state,
                                   const BipartiteIndex& graph,
                                   const Hyperparams& hp,
                                   const SolverOptions& options) {
  std::vector<double> skills(graph.num_players());
  std::vector<double> estimates;
  for (std::size_t p = 0; p < graph.num_players(); ++p) {
    const auto& incident = graph.edges_of_player[p];
    if (incident.empty()) {
      skills[p] = hp.default_rating;
      continue;
    }
    estimates.clear();
    for (const auto ei : incident)
      estimates.push_back(
          edge_skill_estimate(graph.edges[ei], state.ease[graph.edge_map[ei]]));
    std::sort(estimates.begin(), estimates.end(), std::greater<>());
    skills[p] = aggregate_ranked(estimates, hp, options.sd_filter_two_sided);
  }
  return skills;
}

std::vector<double> update_maps(const RatingState& state,
                                const BipartiteIndex& graph,
                                const Hyperparams& hp,
                                const SolverOptions& options) {
  std::vector<double> eases(graph.num_maps());
  std::vector<double> estimates;
  std::vector<std::pair<double, double>> ranked;  // (rank key, estimate)
  for (std::size_t m = 0; m < graph.num_maps(); ++m) {
    const auto& incident = graph.edges_of_map[m];
    if (incident.empty()) {
      eases[m] = hp.default_rating;
      continue;
    }
    estimates.clear();
    if (options.rank_map_edges_by == SolverOptions::MapEdgeRank::estimate) {
      for (const auto ei : incident)
        estimates.push_back(edge_ease_estimate(
            graph.edges[ei], state.skill[graph.edge_player[ei]]));
      std::sort(estimates.begin(), estimates.end(), std::greater<>());
    } else {
      ranked.clear();
      for (const auto ei : incident) {
        const double skill = state.skill[graph.edge_player[ei]];
        ranked.emplace_back(skill, edge_ease_estimate(graph.edges[ei], skill));
      }
      std::sort(ranked.begin(), ranked.end(), std::greater<>());
      for (const auto& [key, est] : ranked) estimates.push_back(est);
    }
    eases[m] = aggregate_ranked(estimates, hp, options.sd_filter_two_sided);
  }
  return eases;
}

double model_error(const RatingState& state, const BipartiteIndex& graph,
                   const Hyperparams&) {
  std::vector<double> errors;
  errors.reserve(graph.num_edges());
  for (std::size_t i = 0; i < graph.num_edges(); ++i) {
    const double predicted = predict_score(state.skill[graph.edge_player[i]],
                                           state.ease[graph.edge_map[i]]);
    errors.push_back(std::fabs(graph.edges[i].value - predicted));
  }
  return lowest_half_mean(std::move(errors));
}

std::pair<RatingState, FitTrace> fit(const BipartiteIndex& graph,
                                     const Hyperparams& hp,
                                     const SolverOptions& options) {
  if (const auto errors = validate_hyperparams(hp); !errors.empty()) {
    std::string msg = "fit: invalid hyperparameters:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw std::invalid_argument(msg);
  }

  RatingState state = init_state(graph, hp);
  FitTrace trace;
  trace.entries.emplace_back(0, state.mae);
  trace.halt_reason = HaltReason::max_iterations;

  for (int iteration = 1; iteration <= options.max_iterations; ++iteration) {
    RatingState next = state;
    if (options.schedule == SolverOptions::Schedule::sequential) {
      next.skill = update_players(next, graph, hp, options);
      next.ease = update_maps(next, graph, hp, options);  // sees fresh skills
    } else {
      auto skills = update_players(state, graph, hp, options);
      auto eases = update_maps(state, graph, hp, options);
      next.skill = std::move(skills);
      next.ease = std::move(eases);
    }
    next.iteration = iteration;
    check_finite(next, graph, iteration);
    next.mae = model_error(next, graph, hp);
    trace.entries.emplace_back(iteration, next.mae);

    const double previous = state.mae;
    if (hp.finish_early && next.mae > previous) {
      trace.halt_reason = HaltReason::reverted;
      return {std::move(state), std::move(trace)};
    }
    state = std::move(next);
    const bool converged =
        previous > 0.0
            ? std::fabs(state.mae - previous) / previous < hp.error_change_prop
            : state.mae == 0.0;
    if (converged) {
      trace.halt_reason = HaltReason::converged;
      return {std::move(state), std::move(trace)};
    }
  }
  return {std::move(state), std::move(trace)};
}

nlohmann::json state_to_json(const RatingState& state,
                             const BipartiteIndex& graph,
                             const FitTrace& trace) {
  nlohmann::json players = nlohmann::json::object();
  for (std::size_t i = 0; i < graph.num_players(); ++i)
    players[graph.players[i].value] = state.skill[i];
  nlohmann::json maps = nlohmann::json::object();
  for (std::size_t i = 0; i < graph.num_maps(); ++i)
    maps[graph.maps[i].value] = state.ease[i];
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [iteration, mae] : trace.entries)
    entries.push_back({iteration, mae});
  return nlohmann::json{{"players", std::move(players)},
                        {"maps", std::move(maps)},
                        {"trace", std::move(entries)},
                        {"halt_reason", to_string(trace.halt_reason)}};
}

StateFile state_from_json(const nlohmann::json& doc) {
  StateFile file;
  try {
    for (const auto& [id, skill] : doc.at("players").items())
      file.players[PlayerId{id}] = skill.get<double>();
    for (const auto& [id, ease] : doc.at("maps").items())
      file.maps[MapId{id}] = ease.get<double>();
    for (const auto& entry : doc.at("trace"))
      file.trace.entries.emplace_back(entry.at(0).get<int>(),
                                      entry.at(1).get<double>());
    const auto reason =
        halt_reason_from_string(doc.at("halt_reason").get<std::string>());
    if (!reason) throw std::runtime_error("state file: unknown halt_reason");
    file.trace.halt_reason = *reason;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("state file: bad document: ") +
                             e.what());
  }
  return file;
}

}  // namespace skillease
