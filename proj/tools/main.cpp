// Command-line front end: prepare / fit / grid (cv) / export / synth.
// Every command is a pure function of its input files and flags, so reruns
// produce byte-identical outputs.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skillease/config.hpp"
#include "skillease/core.hpp"
#include "skillease/detail/text.hpp"
#include "skillease/eval.hpp"
#include "skillease/export.hpp"
#include "skillease/ingest.hpp"
#include "skillease/solver.hpp"
#include "skillease/synth.hpp"

namespace {

using namespace skillease;

nlohmann::json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(std::string(what) + ": cannot open " + path);
  }
  return nlohmann::json::parse(in);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << text;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

// --config plus one override flag per config key; overrides are applied on
// top of the file before validation.
struct ConfigCli {
  std::string path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

constexpr const char* kConfigKeys[] = {
    "aggregation_topscores_p", "aggregation_topscores_sd_range", "beta_alpha",
    "beta_beta", "default_rating", "error_change_prop", "finish_early",
    "truncexp_base_mean", "truncexp_max", "min_raw_score",
    "recency_keep_fraction", "max_iterations", "update_schedule",
    "rank_map_edges_by", "sd_filter_two_sided", "unseen_nodes", "threads",
    "train_fraction", "folds"};

void add_config_flags(CLI::App& cmd, ConfigCli& cc) {
  cmd.add_option("--config", cc.path,
                 "JSON config; keys mirror the hyperparameter field names");
  for (const char* key : kConfigKeys) {
    cmd.add_option_function<std::string>(
        "--" + std::string(key),
        [&cc, key](const std::string& text) { cc.overrides.emplace_back(key, text); },
        "override config key " + std::string(key));
  }
}

RunConfig resolve_config(const ConfigCli& cc) {
  nlohmann::json doc = nlohmann::json::object();
  if (!cc.path.empty()) {
    doc = read_json_file(cc.path, "config");
  }
  for (const auto& [key, text] : cc.overrides) {
    auto value = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (value.is_discarded()) {
      value = text;  // bare words (enum names) are strings
    }
    doc[key] = std::move(value);
  }
  return load_config(doc);
}

std::vector<PreparedScore> read_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("dataset: cannot open " + path);
  }
  return read_dataset_jsonl(in);
}

// ---- prepare ----------------------------------------------------------

struct PrepareArgs {
  std::string input;
  std::string format = "csv";
  std::string out_dataset;
  std::string out_manifest;
  ConfigCli config;
};

int run_prepare(const PrepareArgs& args) {
  const RunConfig cfg = resolve_config(args.config);
  std::ifstream in(args.input, std::ios::binary);
  if (!in) {
    std::cerr << "prepare: cannot open " << args.input << "\n";
    return 1;
  }
  const auto format = args.format == "jsonl" ? ScoreFormat::jsonl : ScoreFormat::csv;
  const ParseResult parsed = parse_scores(in, format);
  if (!parsed.errors.empty()) {
    for (const auto& err : parsed.errors) {
      std::cerr << args.input << ":" << err.line << ": " << err.message << "\n";
    }
    return 1;
  }
  if (parsed.records.empty()) {
    std::cerr << "prepare: no records in " << args.input << "\n";
    return 1;
  }
  const Dataset ds = clean_and_filter(parsed.records, cfg.hp, ModifierTable{});
  if (ds.edges.empty()) {
    std::cerr << "prepare: no records survived cleaning\n";
    return 1;
  }
  std::ofstream out(args.out_dataset, std::ios::binary);
  if (!out) {
    std::cerr << "prepare: cannot open " << args.out_dataset << " for writing\n";
    return 1;
  }
  write_dataset_jsonl(out, ds.edges);
  write_json_file(args.out_manifest, manifest_to_json(ds.manifest));
  std::cout << "prepared " << ds.edges.size() << " edges ("
            << ds.players.size() << " players, " << ds.maps.size()
            << " maps), dropped " << ds.manifest.total_dropped() << "\n";
  return 0;
}

// ---- fit ---------------------------------------------------------------

struct FitArgs {
  std::string dataset;
  std::string out_state;
  std::string out_trace;
  ConfigCli config;
};

int run_fit(const FitArgs& args) {
  const RunConfig cfg = resolve_config(args.config);
  const auto edges = read_dataset_file(args.dataset);
  const auto graph = build_graph(edges);
  const auto [state, trace] = fit(graph, cfg.hp, cfg.solver);
  write_json_file(args.out_state, state_to_json(state, graph, trace));
  if (!args.out_trace.empty()) {
    write_text_file(args.out_trace, trace_series(trace));
  }
  std::cout << "halted (" << to_string(trace.halt_reason) << ") at iteration "
            << state.iteration << ", mae " << detail::format_double(state.mae)
            << "\n";
  return 0;
}

// ---- grid / cv ---------------------------------------------------------

struct GridArgs {
  std::string dataset;
  std::string grid_path;
  std::uint64_t seed = 0;
  std::string out_report;
  ConfigCli config;
};

std::vector<GridAxis> load_grid(const std::string& path) {
  std::vector<GridAxis> axes;
  if (path.empty()) {
    return axes;  // no grid: single combination, plain cross-validation
  }
  const auto doc = read_json_file(path, "grid");
  if (!doc.is_object()) {
    throw std::invalid_argument("grid: document must map field names to value lists");
  }
  for (const auto& [field, values] : doc.items()) {
    if (!values.is_array()) {
      throw std::invalid_argument("grid: values for \"" + field + "\" must be an array");
    }
    GridAxis axis;
    axis.field = field;
    axis.values.assign(values.begin(), values.end());
    axes.push_back(std::move(axis));
  }
  return axes;
}

std::string report_json_path(const std::string& csv_path) {
  if (csv_path.size() > 4 && csv_path.ends_with(".csv")) {
    return csv_path.substr(0, csv_path.size() - 4) + ".json";
  }
  return csv_path + ".json";
}

int run_grid(const GridArgs& args) {
  const RunConfig cfg = resolve_config(args.config);
  const auto json_out = report_json_path(args.out_report);
  if (!args.grid_path.empty() &&
      (args.grid_path == args.out_report || args.grid_path == json_out)) {
    throw std::invalid_argument("grid: report output " + json_out +
                                " would overwrite the grid file; pick a "
                                "different --out-report");
  }
  const auto edges = read_dataset_file(args.dataset);
  const auto axes = load_grid(args.grid_path);
  SplitSpec spec = cfg.split;
  spec.seed = args.seed;
  const EvalReport report = grid_search(edges, cfg.hp, axes, spec, cfg.solver, cfg.eval);
  write_text_file(args.out_report, report_to_csv(report));
  write_json_file(report_json_path(args.out_report), report_to_json(report));
  if (report.has_best) {
    const auto& best = report.rows[report.best];
    std::cout << "best:";
    for (std::size_t a = 0; a < report.fields.size(); ++a) {
      std::cout << " " << report.fields[a] << "=" << best.values[a].dump();
    }
    std::cout << " train_mae=" << detail::format_double(best.train_mae)
              << " test_mae=" << detail::format_double(best.test_mae) << "\n";
  } else {
    std::cout << "best: none (all combinations failed)\n";
  }
  return 0;
}

// ---- export ------------------------------------------------------------

struct ExportArgs {
  std::string state;
  std::string reference;
  std::string anchors;  // "hard,easy"
  double flag_threshold = 1.0;
  std::string out;
};

std::pair<double, double> parse_anchors(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument("anchors: expected \"hard,easy\"");
  }
  try {
    const double hard = std::stod(text.substr(0, comma));
    const double easy = std::stod(text.substr(comma + 1));
    return {hard, easy};
  } catch (const std::exception&) {
    throw std::invalid_argument("anchors: expected two numbers \"hard,easy\"");
  }
}

int run_export(const ExportArgs& args) {
  const StateFile sf = state_from_json(read_json_file(args.state, "state"));
  const auto [hard, easy] = parse_anchors(args.anchors);
  const auto difficulties = ease_to_difficulty(sf.maps, hard, easy);
  std::map<MapId, double> reference;
  if (!args.reference.empty()) {
    std::ifstream in(args.reference, std::ios::binary);
    if (in) {
      reference = read_reference_csv(in);
    } else {
      std::cerr << "export: reference " << args.reference
                << " not readable, leaving reference column blank\n";
    }
  }
  const auto rows = comparison_report(difficulties, reference, args.flag_threshold);
  write_text_file(args.out, comparison_to_csv(rows));
  std::cout << "exported " << rows.size() << " maps\n";
  return 0;
}

// ---- synth -------------------------------------------------------------

struct SynthArgs {
  int players = 100;
  int maps = 50;
  double density = 0.3;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out;
  std::string out_truth;
  std::string out_raw;
  ConfigCli config;
};

std::string raw_records_to_csv(const std::vector<ScoreRecord>& records) {
  std::string out = "player_id,map_id,score,timestamp,modifiers\n";
  for (const auto& rec : records) {
    out += rec.player.value;
    out += ',';
    out += rec.map.value;
    out += ',';
    out += detail::format_double(rec.raw);
    out += ',';
    out += std::to_string(rec.timestamp);
    out += ',';
    for (std::size_t i = 0; i < rec.modifiers.size(); ++i) {
      if (i > 0) out += '|';
      out += rec.modifiers[i];
    }
    out += '\n';
  }
  return out;
}

int run_synth(const SynthArgs& args) {
  const RunConfig cfg = resolve_config(args.config);
  const GroundTruth truth = random_truth(args.players, args.maps, args.noise, args.seed);
  const Dataset ds = generate(args.players, args.maps, args.density, truth,
                              cfg.hp.truncexp_max);
  std::ofstream out(args.out, std::ios::binary);
  if (!out) {
    std::cerr << "synth: cannot open " << args.out << " for writing\n";
    return 1;
  }
  write_dataset_jsonl(out, ds.edges);
  if (!args.out_truth.empty()) {
    write_json_file(args.out_truth, truth_to_json(truth));
  }
  if (!args.out_raw.empty()) {
    write_text_file(args.out_raw, raw_records_to_csv(to_raw_records(ds, cfg.hp)));
  }
  std::cout << "generated " << ds.edges.size() << " edges over " << args.players
            << " players x " << args.maps << " maps\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint player-skill / map-ease rating over score graphs"};
  app.require_subcommand(1);

  PrepareArgs prepare_args;
  auto* prepare = app.add_subcommand("prepare", "Clean raw scores into a prepared dataset");
  prepare->add_option("--input", prepare_args.input, "raw score dump")->required();
  prepare->add_option("--format", prepare_args.format, "input format")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  prepare->add_option("--out-dataset", prepare_args.out_dataset, "prepared JSONL path")
      ->required();
  prepare->add_option("--out-manifest", prepare_args.out_manifest,
                      "cleaning manifest JSON path")
      ->required();
  add_config_flags(*prepare, prepare_args.config);

  FitArgs fit_args;
  auto* fitc = app.add_subcommand("fit", "Fit skills and eases on a prepared dataset");
  fitc->add_option("--dataset", fit_args.dataset, "prepared JSONL")->required();
  fitc->add_option("--out-state", fit_args.out_state, "fitted state JSON path")
      ->required();
  fitc->add_option("--out-trace", fit_args.out_trace, "error-per-iteration CSV path");
  add_config_flags(*fitc, fit_args.config);

  GridArgs grid_args;
  auto* grid = app.add_subcommand(
      "grid", "Cross-validated hyperparameter sweep (alias: cv)");
  grid->alias("cv");
  grid->add_option("--dataset", grid_args.dataset, "prepared JSONL")->required();
  grid->add_option("--grid", grid_args.grid_path,
                   "JSON mapping hyperparameter names to value lists; omit for a "
                   "plain cross-validation run");
  grid->add_option("--seed", grid_args.seed, "split seed");
  grid->add_option("--out-report", grid_args.out_report,
                   "report CSV path (JSON written alongside)")
      ->required();
  add_config_flags(*grid, grid_args.config);

  ExportArgs export_args;
  auto* exportc = app.add_subcommand("export", "Rescale eases onto a difficulty scale");
  exportc->add_option("--state", export_args.state, "fitted state JSON")->required();
  exportc->add_option("--reference", export_args.reference,
                      "reference difficulty CSV (map_id,stars)");
  exportc->add_option("--anchors", export_args.anchors,
                      "target scale endpoints as \"hard,easy\"")
      ->required();
  exportc->add_option("--flag-threshold", export_args.flag_threshold,
                      "|ours - reference| at or above this is flagged");
  exportc->add_option("--out", export_args.out, "comparison CSV path")->required();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate ground-truth synthetic data");
  synth->add_option("--players", synth_args.players, "player count")
      ->check(CLI::PositiveNumber);
  synth->add_option("--maps", synth_args.maps, "map count")->check(CLI::PositiveNumber);
  synth->add_option("--density", synth_args.density, "edge sampling probability");
  synth->add_option("--noise", synth_args.noise, "log-normal noise sd");
  synth->add_option("--seed", synth_args.seed, "generator seed");
  synth->add_option("--out", synth_args.out, "prepared JSONL path")->required();
  synth->add_option("--out-truth", synth_args.out_truth, "ground truth JSON path");
  synth->add_option("--out-raw", synth_args.out_raw,
                    "also emit raw-percentage CSV (inverts the score transform)");
  add_config_flags(*synth, synth_args.config);

  CLI11_PARSE(app, argc, argv);

  try {
    if (prepare->parsed()) return run_prepare(prepare_args);
    if (fitc->parsed()) return run_fit(fit_args);
    if (grid->parsed()) return run_grid(grid_args);
    if (exportc->parsed()) return run_export(export_args);
    if (synth->parsed()) return run_synth(synth_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
