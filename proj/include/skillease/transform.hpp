#pragma once

#include <optional>
#include <span>
#include <string>

#include "skillease/core.hpp"

namespace skillease {

// Linearized worth of a raw score, in [0, truncexp_max).
using ScoreValue = double;

/// Multiplies a raw score by the product of the listed modifiers'
/// multipliers, clamped to 1.0 from above. Returns nullopt when a code is
/// unknown to the table (the offending code is reported via unknown_code);
/// the caller decides whether to drop the record or abort.
std::optional<double> apply_modifiers(double raw,
                                      std::span<const std::string> modifiers,
                                      const ModifierTable& table,
                                      std::string* unknown_code = nullptr);

/// Regularized incomplete beta function I_x(alpha, beta), the Beta(alpha,
/// beta) CDF at x. Continued-fraction evaluation, absolute accuracy well
/// below 1e-10 over the parameter ranges used by the grid search.
/// Throws std::domain_error outside x in [0,1], alpha,beta > 0.
double regularized_incomplete_beta(double x, double alpha, double beta);

/// Quantile of the exponential distribution with scale `mean`, truncated at
/// `max`: Q(u) = -mean * ln(1 - u * (1 - exp(-max/mean))).
/// Q(0) = 0, Q(1) = max, strictly increasing.
/// Throws std::domain_error outside u in [0,1], max > mean > 0.
double truncated_exp_quantile(double u, double mean, double max);

/// The full score linearization: beta CDF followed by the truncated
/// exponential quantile. Strictly monotone in raw for fixed hyperparameters;
/// output in [0, truncexp_max). A raw of exactly 1 is rejected — perfect
/// scores must be filtered upstream during cleaning.
ScoreValue score_to_value(double raw, const Hyperparams& hp);

}  // namespace skillease
