#include "skillease/config.hpp"

#include <stdexcept>

namespace skillease {

namespace {

double as_double(const nlohmann::json& value) { return value.get<double>(); }

[[noreturn]] void bad_enum(const std::string& key, const std::string& got) {
  throw std::invalid_argument("config: unknown value \"" + got + "\" for " + key);
}

}  // namespace

bool set_hyperparam_field(Hyperparams& hp, const std::string& field,
                          const nlohmann::json& value) {
  if (field == "aggregation_topscores_p") {
    hp.aggregation_topscores_p = as_double(value);
  } else if (field == "aggregation_topscores_sd_range") {
    if (value.is_null()) {
      hp.aggregation_topscores_sd_range.reset();
    } else {
      hp.aggregation_topscores_sd_range = as_double(value);
    }
  } else if (field == "beta_alpha") {
    hp.beta_alpha = as_double(value);
  } else if (field == "beta_beta") {
    hp.beta_beta = as_double(value);
  } else if (field == "default_rating") {
    hp.default_rating = as_double(value);
  } else if (field == "error_change_prop") {
    hp.error_change_prop = as_double(value);
  } else if (field == "finish_early") {
    hp.finish_early = value.get<bool>();
  } else if (field == "truncexp_base_mean") {
    hp.truncexp_base_mean = as_double(value);
  } else if (field == "truncexp_max") {
    hp.truncexp_max = as_double(value);
  } else if (field == "min_raw_score") {
    hp.min_raw_score = as_double(value);
  } else if (field == "recency_keep_fraction") {
    hp.recency_keep_fraction = as_double(value);
  } else {
    return false;
  }
  return true;
}

RunConfig load_config(const nlohmann::json& doc) {
  if (!doc.is_object()) {
    throw std::invalid_argument("config: document must be a JSON object");
  }
  RunConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (set_hyperparam_field(cfg.hp, key, value)) {
      continue;
    }
    if (key == "max_iterations") {
      cfg.solver.max_iterations = value.get<int>();
    } else if (key == "update_schedule") {
      const auto s = value.get<std::string>();
      if (s == "sequential") {
        cfg.solver.schedule = SolverOptions::Schedule::sequential;
      } else if (s == "simultaneous") {
        cfg.solver.schedule = SolverOptions::Schedule::simultaneous;
      } else {
        bad_enum(key, s);
      }
    } else if (key == "rank_map_edges_by") {
      const auto s = value.get<std::string>();
      if (s == "estimate") {
        cfg.solver.rank_map_edges_by = SolverOptions::MapEdgeRank::estimate;
      } else if (s == "player_skill") {
        cfg.solver.rank_map_edges_by = SolverOptions::MapEdgeRank::player_skill;
      } else {
        bad_enum(key, s);
      }
    } else if (key == "sd_filter_two_sided") {
      cfg.solver.sd_filter_two_sided = value.get<bool>();
    } else if (key == "unseen_nodes") {
      const auto s = value.get<std::string>();
      if (s == "default_rating") {
        cfg.eval.unseen_nodes = UnseenNodes::default_rating;
      } else if (s == "skip") {
        cfg.eval.unseen_nodes = UnseenNodes::skip;
      } else {
        bad_enum(key, s);
      }
    } else if (key == "threads") {
      cfg.eval.threads = value.get<int>();
    } else if (key == "train_fraction") {
      cfg.split.train_fraction = as_double(value);
    } else if (key == "folds") {
      cfg.split.folds = value.get<int>();
    } else {
      throw std::invalid_argument("config: unknown key \"" + key + "\"");
    }
  }
  const auto problems = validate_hyperparams(cfg.hp);
  if (!problems.empty()) {
    std::string msg = "config: invalid hyperparameters:";
    for (const auto& p : problems) {
      msg += "\n  " + p;
    }
    throw std::invalid_argument(msg);
  }
  if (cfg.solver.max_iterations < 1) {
    throw std::invalid_argument("config: max_iterations must be at least 1");
  }
  if (cfg.eval.threads < 1) {
    throw std::invalid_argument("config: threads must be at least 1");
  }
  if (!(cfg.split.train_fraction > 0.0 && cfg.split.train_fraction < 1.0)) {
    throw std::invalid_argument("config: train_fraction must be in (0,1)");
  }
  if (cfg.split.folds < 1) {
    throw std::invalid_argument("config: folds must be at least 1");
  }
  return cfg;
}

nlohmann::json hyperparams_to_json(const Hyperparams& hp) {
  nlohmann::json doc;
  doc["aggregation_topscores_p"] = hp.aggregation_topscores_p;
  if (hp.aggregation_topscores_sd_range) {
    doc["aggregation_topscores_sd_range"] = *hp.aggregation_topscores_sd_range;
  } else {
    doc["aggregation_topscores_sd_range"] = nullptr;
  }
  doc["beta_alpha"] = hp.beta_alpha;
  doc["beta_beta"] = hp.beta_beta;
  doc["default_rating"] = hp.default_rating;
  doc["error_change_prop"] = hp.error_change_prop;
  doc["finish_early"] = hp.finish_early;
  doc["truncexp_base_mean"] = hp.truncexp_base_mean;
  doc["truncexp_max"] = hp.truncexp_max;
  doc["min_raw_score"] = hp.min_raw_score;
  doc["recency_keep_fraction"] = hp.recency_keep_fraction;
  return doc;
}

}  // namespace skillease
