#include "skillease/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skillease {

namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a,b).
// Only valid (and fast) for x below the symmetry point (a+1)/(a+b+2).
double beta_cont_fraction(double a, double b, double x) {
  constexpr int max_iter = 500;
  constexpr double eps = 1e-16;
  constexpr double tiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    // even step
    double coef = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + coef * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + coef / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    // odd step
    coef = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + coef * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + coef / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < eps) return h;
  }
  throw std::runtime_error(
      "regularized_incomplete_beta: continued fraction did not converge");
}

}  // namespace

std::optional<double> apply_modifiers(double raw,
                                      std::span<const std::string> modifiers,
                                      const ModifierTable& table,
                                      std::string* unknown_code) {
  if (!(raw >= 0.0 && raw <= 1.0))
    throw std::domain_error("apply_modifiers: raw must be in [0,1]");
  double product = 1.0;
  for (const auto& code : modifiers) {
    const auto mult = table.multiplier(code);
    if (!mult) {
      if (unknown_code) *unknown_code = code;
      return std::nullopt;
    }
    product *= *mult;
  }
  return std::min(raw * product, 1.0);
}

double regularized_incomplete_beta(double x, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw std::domain_error(
        "regularized_incomplete_beta: alpha and beta must be positive");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("regularized_incomplete_beta: x must be in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  // x^a (1-x)^b / B(a,b), the prefactor shared by both expansions
  const double ln_pre = std::lgamma(alpha + beta) - std::lgamma(alpha) -
                        std::lgamma(beta) + alpha * std::log(x) +
                        beta * std::log1p(-x);
  const double pre = std::exp(ln_pre);

  // evaluate on the side where the continued fraction converges quickly
  if (x < (alpha + 1.0) / (alpha + beta + 2.0))
    return pre * beta_cont_fraction(alpha, beta, x) / alpha;
  return 1.0 - pre * beta_cont_fraction(beta, alpha, 1.0 - x) / beta;
}

double truncated_exp_quantile(double u, double mean, double max) {
  if (!(mean > 0.0) || !(max > mean))
    throw std::domain_error("truncated_exp_quantile: need max > mean > 0");
  if (!(u >= 0.0 && u <= 1.0))
    throw std::domain_error("truncated_exp_quantile: u must be in [0,1]");
  if (u == 1.0) return max;  // exact truncation bound, no float round trip
  const double tail = -std::expm1(-max / mean);  // 1 - exp(-max/mean)
  const double q = -mean * std::log1p(-u * tail);
  return std::min(q, max);
}

ScoreValue score_to_value(double raw, const Hyperparams& hp) {
  if (raw == 1.0)
    throw std::domain_error(
        "score_to_value: perfect score must be filtered upstream");
  if (!(raw >= 0.0 && raw < 1.0))
    throw std::domain_error("score_to_value: raw must be in [0,1)");
  const double u =
      regularized_incomplete_beta(raw, hp.beta_alpha, hp.beta_beta);
  return truncated_exp_quantile(u, hp.truncexp_base_mean, hp.truncexp_max);
}

}  // namespace skillease
