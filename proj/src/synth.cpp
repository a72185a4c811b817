#include "skillease/synth.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "skillease/detail/rng.hpp"
#include "skillease/transform.hpp"

namespace skillease {

namespace {

std::string padded_id(char prefix, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%c%04d", prefix, index);
  return buf;
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void merge(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  bool joined(std::size_t a, std::size_t b) { return find(a) == find(b); }
};

// Inverts score_to_value by bisection on the monotone raw axis.
double invert_score_value(double value, const Hyperparams& hp) {
  double lo = 0.0;
  double hi = 1.0 - 1e-12;
  if (value <= 0.0) return 0.0;
  if (value >= score_to_value(hi, hp)) return hi;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (score_to_value(mid, hp) < value)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GroundTruth random_truth(int n_players, int n_maps, double noise_sd,
                         std::uint64_t seed) {
  if (n_players < 1 || n_maps < 1)
    throw std::invalid_argument("random_truth: need at least one player and map");
  if (noise_sd < 0.0)
    throw std::invalid_argument("random_truth: noise_sd must be non-negative");
  GroundTruth truth;
  truth.noise_sd = noise_sd;
  truth.seed = seed;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n_players; ++i)
    truth.true_skill[PlayerId{padded_id('p', i + 1)}] =
        std::pow(10.0, detail::uniform01(rng));
  for (int i = 0; i < n_maps; ++i)
    truth.true_ease[MapId{padded_id('m', i + 1)}] =
        std::pow(10.0, detail::uniform01(rng));
  return truth;
}

Dataset generate(int n_players, int n_maps, double edge_density,
                 const GroundTruth& truth, double value_cap) {
  if (n_players < 1 || n_maps < 1)
    throw std::invalid_argument("generate: need at least one player and map");
  if (!(edge_density > 0.0 && edge_density <= 1.0))
    throw std::invalid_argument("generate: edge_density must be in (0,1]");
  if (truth.true_skill.size() != static_cast<std::size_t>(n_players) ||
      truth.true_ease.size() != static_cast<std::size_t>(n_maps))
    throw std::invalid_argument("generate: truth sizes do not match n_players/n_maps");

  std::vector<std::pair<PlayerId, double>> players(truth.true_skill.begin(),
                                                   truth.true_skill.end());
  std::vector<std::pair<MapId, double>> maps(truth.true_ease.begin(),
                                             truth.true_ease.end());

  // separate stream from random_truth so truth values and topology decouple
  std::mt19937_64 rng(truth.seed ^ 0xA3C59AC2D1E6F04BULL);
  const auto P = players.size();
  const auto M = maps.size();
  UnionFind components(P + M);

  Dataset ds;
  std::int64_t timestamp = 1'000'000;
  auto add_edge = [&](std::size_t p, std::size_t m) {
    const double noise =
        truth.noise_sd > 0.0
            ? std::exp(truth.noise_sd * detail::standard_normal(rng))
            : 1.0;
    PreparedScore edge;
    edge.player = players[p].first;
    edge.map = maps[m].first;
    edge.value = std::min(players[p].second * maps[m].second * noise, value_cap);
    edge.adjusted_raw = std::numeric_limits<double>::quiet_NaN();
    edge.timestamp = timestamp++;
    ds.edges.push_back(std::move(edge));
    components.merge(p, P + m);
  };

  for (std::size_t p = 0; p < P; ++p)
    for (std::size_t m = 0; m < M; ++m)
      if (detail::uniform01(rng) < edge_density) add_edge(p, m);

  // connect leftover components through map 0 / player 0
  for (std::size_t p = 0; p < P; ++p)
    if (!components.joined(p, P)) add_edge(p, 0);
  for (std::size_t m = 0; m < M; ++m)
    if (!components.joined(P + m, P)) add_edge(0, m);

  for (const auto& edge : ds.edges) {
    ds.players.insert(edge.player);
    ds.maps.insert(edge.map);
  }
  return ds;
}

std::pair<double, double> recovery_error(const RatingState& state,
                                         const BipartiteIndex& graph,
                                         const GroundTruth& truth) {
  if (graph.num_players() != truth.true_skill.size() ||
      graph.num_maps() != truth.true_ease.size())
    throw std::invalid_argument("recovery_error: node sets do not match truth");

  std::vector<double> skill_log_ratio(graph.num_players());
  for (std::size_t i = 0; i < graph.num_players(); ++i) {
    const auto it = truth.true_skill.find(graph.players[i]);
    if (it == truth.true_skill.end())
      throw std::invalid_argument("recovery_error: player '" +
                                  graph.players[i].value + "' not in truth");
    skill_log_ratio[i] = std::log(it->second) - std::log(state.skill[i]);
  }
  const double log_c =
      std::accumulate(skill_log_ratio.begin(), skill_log_ratio.end(), 0.0) /
      static_cast<double>(skill_log_ratio.size());

  double skill_sq = 0.0;
  for (const double r : skill_log_ratio) {
    const double d = log_c - r;  // log(c * skill) - log(true skill)
    skill_sq += d * d;
  }
  double ease_sq = 0.0;
  for (std::size_t i = 0; i < graph.num_maps(); ++i) {
    const auto it = truth.true_ease.find(graph.maps[i]);
    if (it == truth.true_ease.end())
      throw std::invalid_argument("recovery_error: map '" +
                                  graph.maps[i].value + "' not in truth");
    // eases carry the inverse rescaling 1/c
    const double d = std::log(state.ease[i]) - log_c - std::log(it->second);
    ease_sq += d * d;
  }
  return {std::sqrt(skill_sq / static_cast<double>(graph.num_players())),
          std::sqrt(ease_sq / static_cast<double>(graph.num_maps()))};
}

std::vector<ScoreRecord> to_raw_records(const Dataset& ds,
                                        const Hyperparams& hp) {
  std::vector<ScoreRecord> records;
  records.reserve(ds.edges.size());
  for (const auto& edge : ds.edges) {
    ScoreRecord rec;
    rec.player = edge.player;
    rec.map = edge.map;
    rec.raw = invert_score_value(edge.value, hp);
    rec.timestamp = edge.timestamp;
    records.push_back(std::move(rec));
  }
  return records;
}

nlohmann::json truth_to_json(const GroundTruth& truth) {
  nlohmann::json players = nlohmann::json::object();
  for (const auto& [id, skill] : truth.true_skill) players[id.value] = skill;
  nlohmann::json maps = nlohmann::json::object();
  for (const auto& [id, ease] : truth.true_ease) maps[id.value] = ease;
  return nlohmann::json{{"players", std::move(players)},
                        {"maps", std::move(maps)}};
}

}  // namespace skillease
