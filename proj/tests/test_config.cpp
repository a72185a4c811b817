#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include <json.hpp>

#include "skillease/config.hpp"

using namespace skillease;
using nlohmann::json;

TEST_CASE("set_hyperparam_field covers every tunable") {
  Hyperparams hp;
  CHECK(set_hyperparam_field(hp, "aggregation_topscores_p", json(0.5)));
  CHECK(hp.aggregation_topscores_p == 0.5);
  CHECK(set_hyperparam_field(hp, "aggregation_topscores_sd_range", json(2.0)));
  REQUIRE(hp.aggregation_topscores_sd_range.has_value());
  CHECK(*hp.aggregation_topscores_sd_range == 2.0);
  CHECK(set_hyperparam_field(hp, "aggregation_topscores_sd_range", json(nullptr)));
  CHECK_FALSE(hp.aggregation_topscores_sd_range.has_value());
  CHECK(set_hyperparam_field(hp, "beta_alpha", json(30.0)));
  CHECK(hp.beta_alpha == 30.0);
  CHECK(set_hyperparam_field(hp, "beta_beta", json(1.5)));
  CHECK(hp.beta_beta == 1.5);
  CHECK(set_hyperparam_field(hp, "default_rating", json(7.0)));
  CHECK(hp.default_rating == 7.0);
  CHECK(set_hyperparam_field(hp, "error_change_prop", json(0.01)));
  CHECK(hp.error_change_prop == 0.01);
  CHECK(set_hyperparam_field(hp, "finish_early", json(false)));
  CHECK_FALSE(hp.finish_early);
  CHECK(set_hyperparam_field(hp, "truncexp_base_mean", json(12.0)));
  CHECK(hp.truncexp_base_mean == 12.0);
  CHECK(set_hyperparam_field(hp, "truncexp_max", json(80.0)));
  CHECK(hp.truncexp_max == 80.0);
  CHECK(set_hyperparam_field(hp, "min_raw_score", json(0.6)));
  CHECK(hp.min_raw_score == 0.6);
  CHECK(set_hyperparam_field(hp, "recency_keep_fraction", json(0.5)));
  CHECK(hp.recency_keep_fraction == 0.5);

  CHECK_FALSE(set_hyperparam_field(hp, "no_such_field", json(1.0)));
  CHECK_THROWS_AS(set_hyperparam_field(hp, "beta_alpha", json("oops")),
                  nlohmann::json::exception);
}

TEST_CASE("load_config applies defaults when the document is empty") {
  const auto cfg = load_config(json::object());
  const Hyperparams defaults;
  CHECK(cfg.hp.aggregation_topscores_p == defaults.aggregation_topscores_p);
  CHECK(cfg.hp.beta_alpha == defaults.beta_alpha);
  CHECK(cfg.solver.max_iterations == 100);
  CHECK(cfg.solver.schedule == SolverOptions::Schedule::sequential);
  CHECK(cfg.solver.rank_map_edges_by == SolverOptions::MapEdgeRank::estimate);
  CHECK_FALSE(cfg.solver.sd_filter_two_sided);
  CHECK(cfg.eval.unseen_nodes == UnseenNodes::default_rating);
  CHECK(cfg.eval.threads == 1);
  CHECK(cfg.split.train_fraction == 0.8);
  CHECK(cfg.split.folds == 5);
}

TEST_CASE("load_config reads every section") {
  const json doc = {
      {"aggregation_topscores_p", 0.75},
      {"aggregation_topscores_sd_range", 1.5},
      {"beta_alpha", 20.0},
      {"finish_early", false},
      {"max_iterations", 50},
      {"update_schedule", "simultaneous"},
      {"rank_map_edges_by", "player_skill"},
      {"sd_filter_two_sided", true},
      {"unseen_nodes", "skip"},
      {"threads", 4},
      {"train_fraction", 0.7},
      {"folds", 3},
  };
  const auto cfg = load_config(doc);
  CHECK(cfg.hp.aggregation_topscores_p == 0.75);
  CHECK(cfg.hp.aggregation_topscores_sd_range == 1.5);
  CHECK(cfg.hp.beta_alpha == 20.0);
  CHECK_FALSE(cfg.hp.finish_early);
  CHECK(cfg.solver.max_iterations == 50);
  CHECK(cfg.solver.schedule == SolverOptions::Schedule::simultaneous);
  CHECK(cfg.solver.rank_map_edges_by == SolverOptions::MapEdgeRank::player_skill);
  CHECK(cfg.solver.sd_filter_two_sided);
  CHECK(cfg.eval.unseen_nodes == UnseenNodes::skip);
  CHECK(cfg.eval.threads == 4);
  CHECK(cfg.split.train_fraction == 0.7);
  CHECK(cfg.split.folds == 3);
}

TEST_CASE("load_config rejects typos instead of ignoring them") {
  CHECK_THROWS_WITH_AS(load_config(json{{"agregation_topscores_p", 0.5}}),
                       doctest::Contains("unknown key"), std::invalid_argument);
  CHECK_THROWS_AS(load_config(json::array()), std::invalid_argument);
}

TEST_CASE("load_config rejects bad enum strings") {
  CHECK_THROWS_WITH_AS(load_config(json{{"update_schedule", "backwards"}}),
                       doctest::Contains("backwards"), std::invalid_argument);
  CHECK_THROWS_AS(load_config(json{{"rank_map_edges_by", "vibes"}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_config(json{{"unseen_nodes", "panic"}}),
                  std::invalid_argument);
}

TEST_CASE("load_config validates values after assembly") {
  CHECK_THROWS_WITH_AS(load_config(json{{"beta_alpha", -1.0}}),
                       doctest::Contains("beta_alpha"), std::invalid_argument);
  CHECK_THROWS_AS(load_config(json{{"max_iterations", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(load_config(json{{"threads", 0}}), std::invalid_argument);
  CHECK_THROWS_AS(load_config(json{{"train_fraction", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(load_config(json{{"folds", 0}}), std::invalid_argument);
  // several problems are reported together
  try {
    load_config(json{{"beta_alpha", -1.0}, {"truncexp_base_mean", -5.0}});
    FAIL("expected invalid_argument");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("beta_alpha") != std::string::npos);
    CHECK(msg.find("truncexp_base_mean") != std::string::npos);
  }
}

TEST_CASE("hyperparams_to_json round-trips through load_config") {
  Hyperparams hp;
  hp.aggregation_topscores_p = 0.6;
  hp.aggregation_topscores_sd_range = 2.5;
  hp.beta_alpha = 18.0;
  hp.beta_beta = 1.1;
  hp.default_rating = 5.0;
  hp.error_change_prop = 0.002;
  hp.finish_early = false;
  hp.truncexp_base_mean = 8.0;
  hp.truncexp_max = 60.0;
  hp.min_raw_score = 0.5;
  hp.recency_keep_fraction = 0.9;

  const auto doc = hyperparams_to_json(hp);
  const auto cfg = load_config(doc);
  CHECK(cfg.hp.aggregation_topscores_p == hp.aggregation_topscores_p);
  CHECK(cfg.hp.aggregation_topscores_sd_range == hp.aggregation_topscores_sd_range);
  CHECK(cfg.hp.beta_alpha == hp.beta_alpha);
  CHECK(cfg.hp.beta_beta == hp.beta_beta);
  CHECK(cfg.hp.default_rating == hp.default_rating);
  CHECK(cfg.hp.error_change_prop == hp.error_change_prop);
  CHECK(cfg.hp.finish_early == hp.finish_early);
  CHECK(cfg.hp.truncexp_base_mean == hp.truncexp_base_mean);
  CHECK(cfg.hp.truncexp_max == hp.truncexp_max);
  CHECK(cfg.hp.min_raw_score == hp.min_raw_score);
  CHECK(cfg.hp.recency_keep_fraction == hp.recency_keep_fraction);

  // the unset optional serializes as null and loads back as unset
  Hyperparams no_sd;
  no_sd.aggregation_topscores_sd_range.reset();
  const auto doc2 = hyperparams_to_json(no_sd);
  CHECK(doc2.at("aggregation_topscores_sd_range").is_null());
  CHECK_FALSE(load_config(doc2).hp.aggregation_topscores_sd_range.has_value());
}
