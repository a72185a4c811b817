#include "skillease/core.hpp"

#include <stdexcept>
#include <utility>

namespace skillease {

std::vector<std::string> validate_hyperparams(const Hyperparams& hp) {
  std::vector<std::string> errors;
  auto fail = [&](const std::string& msg) { errors.push_back(msg); };

  if (!(hp.aggregation_topscores_p > 0.0 && hp.aggregation_topscores_p <= 1.0))
    fail("aggregation_topscores_p: proportion must be in (0,1]");
  if (hp.aggregation_topscores_sd_range &&
      !(*hp.aggregation_topscores_sd_range > 0.0))
    fail("aggregation_topscores_sd_range: must be positive when set");
  if (!(hp.beta_alpha > 0.0)) fail("beta_alpha: must be positive");
  if (!(hp.beta_beta > 0.0)) fail("beta_beta: must be positive");
  if (!(hp.default_rating > 0.0)) fail("default_rating: must be positive");
  if (!(hp.error_change_prop > 0.0))
    fail("error_change_prop: must be positive");
  if (!(hp.truncexp_base_mean > 0.0))
    fail("truncexp_base_mean: must be positive");
  if (!(hp.truncexp_max > hp.truncexp_base_mean))
    fail("truncexp_max: max must exceed mean");
  if (!(hp.min_raw_score >= 0.0 && hp.min_raw_score < 1.0))
    fail("min_raw_score: must be in [0,1)");
  if (!(hp.recency_keep_fraction > 0.0 && hp.recency_keep_fraction <= 1.0))
    fail("recency_keep_fraction: must be in (0,1]");

  return errors;
}

ModifierTable::ModifierTable()
    : multipliers_{{"SF", 1.05}, {"SA", 1.02}, {"NO", 0.5}, {"SS", 0.65},
                   {"FS", 1.02}, {"NB", 0.5},  {"NA", 0.5}, {"OP", 0.5}} {}

ModifierTable::ModifierTable(std::map<std::string, double> multipliers)
    : multipliers_(std::move(multipliers)) {
  for (const auto& [code, mult] : multipliers_) {
    if (code.empty())
      throw std::invalid_argument("modifier table: empty modifier code");
    if (!(mult > 0.0))
      throw std::invalid_argument("modifier table: multiplier for '" + code +
                                  "' must be positive");
  }
}

std::optional<double> ModifierTable::multiplier(const std::string& code) const {
  auto it = multipliers_.find(code);
  if (it == multipliers_.end()) return std::nullopt;
  return it->second;
}

}  // namespace skillease
