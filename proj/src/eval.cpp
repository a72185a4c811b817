#include "skillease/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>

#include "skillease/config.hpp"
#include "skillease/detail/rng.hpp"
#include "skillease/detail/text.hpp"

namespace skillease {

namespace {

// Distinct reproducible stream per (seed, run); runs stay comparable across
// grid combinations because nothing else advances these generators.
std::mt19937_64 split_rng(const SplitSpec& spec, int run) {
  const auto mixed =
      (spec.seed + 1) * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(run);
  return std::mt19937_64(mixed);
}

std::vector<PreparedScore> take(const std::vector<PreparedScore>& edges,
                                std::vector<std::size_t> indices) {
  std::sort(indices.begin(), indices.end());  // keep the input edge order
  std::vector<PreparedScore> out;
  out.reserve(indices.size());
  for (const auto i : indices) {
    out.push_back(edges[i]);
  }
  return out;
}

}  // namespace

Split split_edges(const std::vector<PreparedScore>& edges, const SplitSpec& spec,
                  int run) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
    throw std::invalid_argument("split: train_fraction must be in (0,1)");
  }
  if (edges.size() < 2) {
    throw std::invalid_argument("split: need at least two edges");
  }
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = split_rng(spec, run);
  detail::shuffle(order, rng);

  const auto train_n = static_cast<std::size_t>(
      std::llround(spec.train_fraction * static_cast<double>(edges.size())));
  Split result;
  result.train = take(edges, {order.begin(), order.begin() + train_n});
  result.test = take(edges, {order.begin() + train_n, order.end()});
  return result;
}

double test_error(const RatingState& state, const BipartiteIndex& train_graph,
                  const std::vector<PreparedScore>& test, const Hyperparams& hp,
                  UnseenNodes policy) {
  std::vector<double> errors;
  errors.reserve(test.size());
  for (const auto& edge : test) {
    const auto p = train_graph.player_index.find(edge.player);
    const auto m = train_graph.map_index.find(edge.map);
    const bool unseen =
        p == train_graph.player_index.end() || m == train_graph.map_index.end();
    if (unseen && policy == UnseenNodes::skip) {
      continue;
    }
    const double skill =
        p == train_graph.player_index.end() ? hp.default_rating : state.skill[p->second];
    const double ease =
        m == train_graph.map_index.end() ? hp.default_rating : state.ease[m->second];
    errors.push_back(std::fabs(edge.value - predict_score(skill, ease)));
  }
  return lowest_half_mean(std::move(errors));
}

CvResult cross_validate(const std::vector<PreparedScore>& edges, const Hyperparams& hp,
                        const SplitSpec& spec, const SolverOptions& solver,
                        UnseenNodes policy) {
  const auto problems = validate_hyperparams(hp);
  if (!problems.empty()) {
    throw std::invalid_argument("cross_validate: " + problems.front());
  }
  if (spec.folds < 1) {
    throw std::invalid_argument("cross_validate: folds must be at least 1");
  }
  CvResult result;
  result.folds.reserve(static_cast<std::size_t>(spec.folds));
  for (int run = 1; run <= spec.folds; ++run) {
    const auto parts = split_edges(edges, spec, run);
    const auto graph = build_graph(parts.train);
    const auto [state, trace] = fit(graph, hp, solver);
    FoldResult fold;
    fold.run = run;
    fold.train_mae = state.mae;
    fold.test_mae = test_error(state, graph, parts.test, hp, policy);
    result.train_mae += fold.train_mae;
    result.test_mae += fold.test_mae;
    result.folds.push_back(fold);
  }
  result.train_mae /= static_cast<double>(spec.folds);
  result.test_mae /= static_cast<double>(spec.folds);
  return result;
}

namespace {

// index -> one value choice per axis, last axis varying fastest.
std::vector<std::size_t> decode_combo(std::size_t index,
                                      const std::vector<GridAxis>& axes) {
  std::vector<std::size_t> digits(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    digits[a] = index % axes[a].values.size();
    index /= axes[a].values.size();
  }
  return digits;
}

EvalRow evaluate_combo(std::size_t index, const std::vector<PreparedScore>& edges,
                       const Hyperparams& fixed, const std::vector<GridAxis>& axes,
                       const SplitSpec& spec, const SolverOptions& solver,
                       UnseenNodes policy) {
  const auto digits = decode_combo(index, axes);
  EvalRow row;
  Hyperparams hp = fixed;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const auto& value = axes[a].values[digits[a]];
    row.values.push_back(value);
    set_hyperparam_field(hp, axes[a].field, value);  // pre-validated
  }
  const auto problems = validate_hyperparams(hp);
  if (!problems.empty()) {
    row.failed = true;
    for (const auto& p : problems) {
      if (!row.error.empty()) row.error += "; ";
      row.error += p;
    }
    return row;
  }
  try {
    const CvResult cv = cross_validate(edges, hp, spec, solver, policy);
    row.train_mae = cv.train_mae;
    row.test_mae = cv.test_mae;
    row.folds = cv.folds;
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }
  return row;
}

}  // namespace

EvalReport grid_search(const std::vector<PreparedScore>& edges, const Hyperparams& fixed,
                       const std::vector<GridAxis>& axes, const SplitSpec& spec,
                       const SolverOptions& solver, const EvalOptions& options) {
  std::size_t combos = 1;
  Hyperparams scratch = fixed;
  for (const auto& axis : axes) {
    if (axis.values.empty()) {
      throw std::invalid_argument("grid: axis \"" + axis.field + "\" has no values");
    }
    for (const auto& value : axis.values) {
      try {
        if (!set_hyperparam_field(scratch, axis.field, value)) {
          throw std::invalid_argument("grid: unknown hyperparameter \"" + axis.field +
                                      "\"");
        }
      } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument("grid: bad value type for \"" + axis.field + "\"");
      }
    }
    combos *= axis.values.size();
  }

  EvalReport report;
  for (const auto& axis : axes) {
    report.fields.push_back(axis.field);
  }
  report.rows.resize(combos);

  const auto worker_count =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(options.threads, 1)), combos);
  if (worker_count <= 1) {
    for (std::size_t i = 0; i < combos; ++i) {
      report.rows[i] =
          evaluate_combo(i, edges, fixed, axes, spec, solver, options.unseen_nodes);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (std::size_t t = 0; t < worker_count; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < combos; i = next.fetch_add(1)) {
          report.rows[i] =
              evaluate_combo(i, edges, fixed, axes, spec, solver, options.unseen_nodes);
        }
      });
    }
    for (auto& th : pool) {
      th.join();
    }
  }

  for (std::size_t i = 0; i < combos; ++i) {
    if (report.rows[i].failed) continue;
    if (!report.has_best || report.rows[i].test_mae < report.rows[report.best].test_mae) {
      report.best = i;
      report.has_best = true;
    }
  }
  return report;
}

namespace {

std::string csv_cell(const nlohmann::json& value) {
  if (value.is_null()) return "";
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  if (value.is_number()) return detail::format_double(value.get<double>());
  return value.dump();
}

}  // namespace

std::string report_to_csv(const EvalReport& report) {
  std::string out;
  for (const auto& field : report.fields) {
    out += field;
    out += ',';
  }
  out += "train_mae,test_mae,failed\n";
  for (const auto& row : report.rows) {
    for (const auto& value : row.values) {
      out += csv_cell(value);
      out += ',';
    }
    if (!row.failed) {
      out += detail::format_double(row.train_mae);
      out += ',';
      out += detail::format_double(row.test_mae);
    } else {
      out += ',';
    }
    out += row.failed ? ",true\n" : ",false\n";
  }
  return out;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json doc;
  doc["fields"] = report.fields;
  auto rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json r;
    r["values"] = row.values;
    r["failed"] = row.failed;
    if (row.failed) {
      r["error"] = row.error;
    } else {
      r["train_mae"] = row.train_mae;
      r["test_mae"] = row.test_mae;
      auto folds = nlohmann::json::array();
      for (const auto& fold : row.folds) {
        folds.push_back({fold.run, fold.train_mae, fold.test_mae});
      }
      r["folds"] = std::move(folds);
    }
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  if (report.has_best) {
    doc["best"] = report.best;
  } else {
    doc["best"] = nullptr;
  }
  return doc;
}

}  // namespace skillease
