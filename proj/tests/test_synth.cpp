#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "skillease/synth.hpp"
#include "skillease/transform.hpp"

using namespace skillease;

namespace {

// tiny union-find for the connectivity check
struct UF {
  std::vector<std::size_t> parent;
  explicit UF(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void merge(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

bool is_connected(const BipartiteIndex& g) {
  if (g.num_players() == 0) return false;
  UF uf(g.num_players() + g.num_maps());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    uf.merge(g.edge_player[e], g.num_players() + g.edge_map[e]);
  }
  const auto root = uf.find(0);
  for (std::size_t i = 0; i < g.num_players() + g.num_maps(); ++i) {
    if (uf.find(i) != root) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("random_truth draws log-uniform ratings with padded ids") {
  const auto truth = random_truth(5, 3, 0.0, 99);
  REQUIRE(truth.true_skill.size() == 5);
  REQUIRE(truth.true_ease.size() == 3);
  CHECK(truth.true_skill.count(PlayerId{"p0001"}) == 1);
  CHECK(truth.true_skill.count(PlayerId{"p0005"}) == 1);
  CHECK(truth.true_ease.count(MapId{"m0003"}) == 1);
  for (const auto& [id, s] : truth.true_skill) {
    CHECK(s >= 1.0);
    CHECK(s < 10.0);
  }
  for (const auto& [id, e] : truth.true_ease) {
    CHECK(e >= 1.0);
    CHECK(e < 10.0);
  }
  CHECK(truth.seed == 99);
}

TEST_CASE("random_truth is deterministic in the seed") {
  const auto a = random_truth(4, 4, 0.1, 7);
  const auto b = random_truth(4, 4, 0.1, 7);
  CHECK(a.true_skill == b.true_skill);
  CHECK(a.true_ease == b.true_ease);

  const auto c = random_truth(4, 4, 0.1, 8);
  CHECK(a.true_skill != c.true_skill);
}

TEST_CASE("random_truth validates its arguments") {
  CHECK_THROWS_AS(random_truth(0, 3, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_truth(3, 0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(random_truth(3, 3, -0.5, 1), std::invalid_argument);
}

TEST_CASE("generate at full density emits every pair with exact products") {
  const auto truth = random_truth(4, 3, 0.0, 13);
  const auto ds = generate(4, 3, 1.0, truth);

  REQUIRE(ds.edges.size() == 12);
  CHECK(ds.players.size() == 4);
  CHECK(ds.maps.size() == 3);

  std::set<std::pair<std::string, std::string>> seen;
  std::int64_t last_ts = 0;
  for (const auto& e : ds.edges) {
    const double expected =
        truth.true_skill.at(e.player) * truth.true_ease.at(e.map);
    CHECK(e.value == expected);  // noiseless: bitwise equal
    CHECK(std::isnan(e.adjusted_raw));
    CHECK(e.timestamp > last_ts);
    last_ts = e.timestamp;
    seen.insert({e.player.value, e.map.value});
  }
  CHECK(seen.size() == 12);
}

TEST_CASE("generate is deterministic and honours the value cap") {
  const auto truth = random_truth(6, 5, 0.2, 21);
  const auto a = generate(6, 5, 0.5, truth);
  const auto b = generate(6, 5, 0.5, truth);
  REQUIRE(a.edges.size() == b.edges.size());
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    CHECK(a.edges[i].player == b.edges[i].player);
    CHECK(a.edges[i].map == b.edges[i].map);
    CHECK(a.edges[i].value == b.edges[i].value);
    CHECK(a.edges[i].timestamp == b.edges[i].timestamp);
  }

  const auto capped = generate(6, 5, 1.0, truth, 5.0);
  bool any_at_cap = false;
  for (const auto& e : capped.edges) {
    CHECK(e.value <= 5.0);
    any_at_cap = any_at_cap || e.value == 5.0;
  }
  CHECK(any_at_cap);  // skills*eases span [1,100); plenty above 5
}

TEST_CASE("generate adds noise only when asked") {
  const auto quiet = random_truth(5, 5, 0.0, 31);
  for (const auto& e : generate(5, 5, 1.0, quiet).edges) {
    CHECK(e.value == quiet.true_skill.at(e.player) * quiet.true_ease.at(e.map));
  }

  const auto noisy = random_truth(5, 5, 0.3, 31);  // same ratings, same topology
  bool any_differs = false;
  for (const auto& e : generate(5, 5, 1.0, noisy).edges) {
    const double clean = noisy.true_skill.at(e.player) * noisy.true_ease.at(e.map);
    CHECK(e.value > 0.0);
    any_differs = any_differs || e.value != clean;
  }
  CHECK(any_differs);
}

TEST_CASE("generate repairs disconnected graphs") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    const auto truth = random_truth(20, 15, 0.0, seed);
    const auto ds = generate(20, 15, 0.05, truth);  // sparse enough to fragment
    const auto g = build_graph(ds.edges);
    CHECK(g.num_players() == 20);
    CHECK(g.num_maps() == 15);
    CHECK(is_connected(g));
  }
}

TEST_CASE("generate validates its arguments") {
  const auto truth = random_truth(3, 3, 0.0, 1);
  CHECK_THROWS_AS(generate(3, 3, 0.0, truth), std::invalid_argument);
  CHECK_THROWS_AS(generate(3, 3, 1.5, truth), std::invalid_argument);
  CHECK_THROWS_AS(generate(4, 3, 0.5, truth), std::invalid_argument);  // size mismatch
  CHECK_THROWS_AS(generate(3, 2, 0.5, truth), std::invalid_argument);
}

TEST_CASE("recovery_error vanishes on the truth and is scale-blind") {
  const auto truth = random_truth(8, 6, 0.0, 17);
  const auto ds = generate(8, 6, 1.0, truth);
  const auto g = build_graph(ds.edges);

  RatingState exact;
  exact.skill.resize(g.num_players());
  exact.ease.resize(g.num_maps());
  for (std::size_t i = 0; i < g.num_players(); ++i) {
    exact.skill[i] = truth.true_skill.at(g.players[i]);
  }
  for (std::size_t i = 0; i < g.num_maps(); ++i) {
    exact.ease[i] = truth.true_ease.at(g.maps[i]);
  }

  auto [skill_rms, ease_rms] = recovery_error(exact, g, truth);
  CHECK(skill_rms == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ease_rms == doctest::Approx(0.0).epsilon(1e-12));

  RatingState scaled = exact;
  for (auto& s : scaled.skill) s *= 2.0;
  for (auto& e : scaled.ease) e /= 2.0;
  auto [skill_rms2, ease_rms2] = recovery_error(scaled, g, truth);
  CHECK(skill_rms2 < 1e-12);
  CHECK(ease_rms2 < 1e-12);
}

TEST_CASE("recovery_error rejects mismatched node sets") {
  const auto truth = random_truth(4, 4, 0.0, 3);
  const auto ds = generate(4, 4, 1.0, truth);

  // graph missing one player
  std::vector<PreparedScore> subset;
  for (const auto& e : ds.edges) {
    if (e.player.value != "p0004") subset.push_back(e);
  }
  const auto g = build_graph(std::move(subset));
  RatingState state;
  state.skill.assign(g.num_players(), 1.0);
  state.ease.assign(g.num_maps(), 1.0);
  CHECK_THROWS_AS(recovery_error(state, g, truth), std::invalid_argument);
}

TEST_CASE("to_raw_records inverts the score transform") {
  const auto truth = random_truth(6, 4, 0.1, 23);
  const auto ds = generate(6, 4, 1.0, truth, 50.0);
  Hyperparams hp;
  const auto records = to_raw_records(ds, hp);
  REQUIRE(records.size() == ds.edges.size());

  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].player == ds.edges[i].player);
    CHECK(records[i].map == ds.edges[i].map);
    CHECK(records[i].timestamp == ds.edges[i].timestamp);
    CHECK(records[i].modifiers.empty());
    CHECK(records[i].raw > 0.0);
    CHECK(records[i].raw < 1.0);
    const double back = score_to_value(records[i].raw, hp);
    CHECK(back == doctest::Approx(ds.edges[i].value).epsilon(1e-9));
  }
}

TEST_CASE("truth_to_json lists every rating under players and maps") {
  const auto truth = random_truth(3, 2, 0.0, 9);
  const auto doc = truth_to_json(truth);
  REQUIRE(doc.contains("players"));
  REQUIRE(doc.contains("maps"));
  CHECK(doc["players"].size() == 3);
  CHECK(doc["maps"].size() == 2);
  CHECK(doc["players"]["p0002"].get<double>() ==
        truth.true_skill.at(PlayerId{"p0002"}));
  CHECK(doc["maps"]["m0001"].get<double>() == truth.true_ease.at(MapId{"m0001"}));
}
