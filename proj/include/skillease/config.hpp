#pragma once

#include <string>

#include <json.hpp>

#include "skillease/core.hpp"
#include "skillease/eval.hpp"
#include "skillease/solver.hpp"

namespace skillease {

// Everything a run can be configured with, bundled for the CLI. All keys are
// optional in the JSON document; missing ones keep their defaults.
struct RunConfig {
  Hyperparams hp;
  SolverOptions solver;
  EvalOptions eval;
  SplitSpec split;
};

// Assigns one hyperparameter by its field name (names match the struct
// members one-to-one). Returns false for an unknown name; throws
// nlohmann::json exceptions on a type mismatch.
bool set_hyperparam_field(Hyperparams& hp, const std::string& field,
                          const nlohmann::json& value);

// Parses a config document. Unknown keys and bad enum strings throw
// std::invalid_argument so typos never silently fall back to defaults.
RunConfig load_config(const nlohmann::json& doc);

nlohmann::json hyperparams_to_json(const Hyperparams& hp);

}  // namespace skillease
