#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "skillease/core.hpp"
#include "skillease/ingest.hpp"
#include "skillease/solver.hpp"

namespace skillease {

// Deterministic random train/test partition. The same (seed, run) pair always
// yields the same split regardless of how many other runs happen in between,
// so every grid combination is scored against identical folds.
struct SplitSpec {
  double train_fraction = 0.8;
  int folds = 5;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<PreparedScore> train;
  std::vector<PreparedScore> test;
};

// |train| = round(train_fraction * n); both halves keep the input edge order.
Split split_edges(const std::vector<PreparedScore>& edges, const SplitSpec& spec, int run);

// What to do with test edges whose player or map never occurs in training.
enum class UnseenNodes {
  default_rating,  // score them with the initial rating
  skip,            // leave them out of the error
};

struct EvalOptions {
  UnseenNodes unseen_nodes = UnseenNodes::default_rating;
  int threads = 1;  // grid combinations evaluated concurrently
};

// Held-out error: absolute prediction errors on the test edges, averaged over
// the lowest half (same selection rule as the training error).
double test_error(const RatingState& state, const BipartiteIndex& train_graph,
                  const std::vector<PreparedScore>& test, const Hyperparams& hp,
                  UnseenNodes policy);

struct FoldResult {
  int run = 0;
  double train_mae = 0.0;
  double test_mae = 0.0;
};

struct CvResult {
  double train_mae = 0.0;  // means over folds
  double test_mae = 0.0;
  std::vector<FoldResult> folds;
};

CvResult cross_validate(const std::vector<PreparedScore>& edges, const Hyperparams& hp,
                        const SplitSpec& spec, const SolverOptions& solver,
                        UnseenNodes policy = UnseenNodes::default_rating);

// One grid dimension: a hyperparameter name and the values to sweep.
struct GridAxis {
  std::string field;
  std::vector<nlohmann::json> values;
};

struct EvalRow {
  std::vector<nlohmann::json> values;  // one entry per axis, same order as fields
  double train_mae = 0.0;
  double test_mae = 0.0;
  bool failed = false;
  std::string error;  // why this combination failed, if it did
  std::vector<FoldResult> folds;
};

struct EvalReport {
  std::vector<std::string> fields;
  std::vector<EvalRow> rows;   // Cartesian product, last axis varying fastest
  std::size_t best = 0;        // index into rows; valid only when has_best
  bool has_best = false;
};

// Exhaustive sweep. Unknown field names throw; combinations that produce an
// invalid configuration or a solver failure become failed rows instead of
// aborting the whole search.
EvalReport grid_search(const std::vector<PreparedScore>& edges, const Hyperparams& fixed,
                       const std::vector<GridAxis>& axes, const SplitSpec& spec,
                       const SolverOptions& solver, const EvalOptions& options);

std::string report_to_csv(const EvalReport& report);
nlohmann::json report_to_json(const EvalReport& report);

}  // namespace skillease
