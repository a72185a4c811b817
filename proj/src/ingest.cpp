#include "skillease/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <utility>

namespace skillease {

namespace {

constexpr std::string_view kCsvHeader = "player_id,map_id,score,timestamp,modifiers";

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(text.substr(start));
      return fields;
    }
    fields.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_double(std::string_view field, double& out) {
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_int64(std::string_view field, std::int64_t& out) {
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

void parse_csv_row(std::string_view line, std::size_t line_no,
                   ParseResult& result) {
  const auto fields = split(line, ',');
  if (fields.size() != 5) {
    result.errors.push_back({line_no, "expected 5 fields, got " +
                                          std::to_string(fields.size())});
    return;
  }
  ScoreRecord rec;
  rec.player.value = std::string(fields[0]);
  rec.map.value = std::string(fields[1]);
  if (rec.player.value.empty() || rec.map.value.empty()) {
    result.errors.push_back({line_no, "player_id and map_id must be non-empty"});
    return;
  }
  if (!parse_double(fields[2], rec.raw)) {
    result.errors.push_back({line_no, "score is not a number"});
    return;
  }
  if (!(rec.raw >= 0.0 && rec.raw <= 1.0)) {
    result.errors.push_back({line_no, "raw out of [0,1]"});
    return;
  }
  if (!parse_int64(fields[3], rec.timestamp) || rec.timestamp < 0) {
    result.errors.push_back({line_no, "timestamp is not a non-negative integer"});
    return;
  }
  if (!fields[4].empty()) {
    for (const auto code : split(fields[4], '|')) {
      if (code.empty()) {
        result.errors.push_back({line_no, "empty modifier code"});
        return;
      }
      rec.modifiers.emplace_back(code);
    }
  }
  result.records.push_back(std::move(rec));
}

void parse_jsonl_row(std::string_view line, std::size_t line_no,
                     ParseResult& result) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    result.errors.push_back({line_no, std::string("invalid JSON: ") + e.what()});
    return;
  }
  if (!obj.is_object()) {
    result.errors.push_back({line_no, "row is not a JSON object"});
    return;
  }
  auto require = [&](const char* key) -> const nlohmann::json* {
    auto it = obj.find(key);
    if (it == obj.end()) {
      result.errors.push_back({line_no, std::string("missing key '") + key + "'"});
      return nullptr;
    }
    return &*it;
  };

  const auto* player = require("player_id");
  const auto* map = require("map_id");
  const auto* score = require("score");
  const auto* timestamp = require("timestamp");
  const auto* modifiers = require("modifiers");
  if (!player || !map || !score || !timestamp || !modifiers) return;

  ScoreRecord rec;
  if (!player->is_string() || player->get<std::string>().empty() ||
      !map->is_string() || map->get<std::string>().empty()) {
    result.errors.push_back({line_no, "player_id and map_id must be non-empty strings"});
    return;
  }
  rec.player.value = player->get<std::string>();
  rec.map.value = map->get<std::string>();
  if (!score->is_number()) {
    result.errors.push_back({line_no, "score is not a number"});
    return;
  }
  rec.raw = score->get<double>();
  if (!(rec.raw >= 0.0 && rec.raw <= 1.0)) {
    result.errors.push_back({line_no, "raw out of [0,1]"});
    return;
  }
  if (!timestamp->is_number_integer() || timestamp->get<std::int64_t>() < 0) {
    result.errors.push_back({line_no, "timestamp is not a non-negative integer"});
    return;
  }
  rec.timestamp = timestamp->get<std::int64_t>();
  if (!modifiers->is_array()) {
    result.errors.push_back({line_no, "modifiers is not an array"});
    return;
  }
  for (const auto& code : *modifiers) {
    if (!code.is_string() || code.get<std::string>().empty()) {
      result.errors.push_back({line_no, "modifiers must be non-empty strings"});
      return;
    }
    rec.modifiers.push_back(code.get<std::string>());
  }
  result.records.push_back(std::move(rec));
}

}  // namespace

ParseResult parse_scores(std::istream& in, ScoreFormat format) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;

  if (format == ScoreFormat::csv) {
    if (!std::getline(in, line))
      throw std::runtime_error("parse_scores: empty input, missing CSV header");
    ++line_no;
    if (strip_cr(line) != kCsvHeader)
      throw std::runtime_error(
          "parse_scores: bad CSV header, expected '" + std::string(kCsvHeader) + "'");
  }

  while (std::getline(in, line)) {
    ++line_no;
    const auto row = strip_cr(line);
    if (row.empty()) continue;
    if (format == ScoreFormat::csv)
      parse_csv_row(row, line_no, result);
    else
      parse_jsonl_row(row, line_no, result);
  }
  if (in.bad()) throw std::runtime_error("parse_scores: stream read failure");
  return result;
}

Dataset clean_and_filter(const std::vector<ScoreRecord>& records,
                         const Hyperparams& hp, const ModifierTable& table) {
  if (const auto errors = validate_hyperparams(hp); !errors.empty()) {
    std::string msg = "clean_and_filter: invalid hyperparameters:";
    for (const auto& e : errors) msg += " " + e + ";";
    throw std::invalid_argument(msg);
  }

  Dataset ds;

  struct Survivor {
    std::size_t input_index;
    const ScoreRecord* rec;
    double adjusted;
  };
  std::vector<Survivor> stage;
  stage.reserve(records.size());

  // steps 1-3: modifier adjustment, minimum threshold, perfect removal
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    const auto adjusted = apply_modifiers(rec.raw, rec.modifiers, table);
    if (!adjusted) {
      ++ds.manifest.unknown_modifier;
      continue;
    }
    if (*adjusted < hp.min_raw_score) {
      ++ds.manifest.below_min_raw;
      continue;
    }
    if (*adjusted == 1.0) {
      ++ds.manifest.perfect_score;
      continue;
    }
    stage.push_back({i, &rec, *adjusted});
  }

  // step 4: keep the ceil(fraction*n) most recent; ties stay in input order
  if (!stage.empty()) {
    const auto keep = static_cast<std::size_t>(
        std::ceil(hp.recency_keep_fraction * static_cast<double>(stage.size())));
    if (keep < stage.size()) {
      std::stable_sort(stage.begin(), stage.end(),
                       [](const Survivor& a, const Survivor& b) {
                         return a.rec->timestamp > b.rec->timestamp;
                       });
      ds.manifest.not_recent = static_cast<std::int64_t>(stage.size() - keep);
      stage.resize(keep);
      std::sort(stage.begin(), stage.end(),
                [](const Survivor& a, const Survivor& b) {
                  return a.input_index < b.input_index;
                });
    }
  }

  // step 5: dedup per (player, map), keeping the highest adjusted raw;
  // the survivor sits at the pair's first-appearance position
  std::vector<Survivor> unique;
  unique.reserve(stage.size());
  std::map<std::pair<PlayerId, MapId>, std::size_t> slot_of;
  for (const auto& s : stage) {
    const auto key = std::make_pair(s.rec->player, s.rec->map);
    auto [it, inserted] = slot_of.try_emplace(key, unique.size());
    if (inserted) {
      unique.push_back(s);
    } else {
      ++ds.manifest.duplicate;
      if (s.adjusted > unique[it->second].adjusted) unique[it->second] = s;
    }
  }

  // step 6: transform the survivors
  ds.edges.reserve(unique.size());
  for (const auto& s : unique) {
    PreparedScore edge;
    edge.player = s.rec->player;
    edge.map = s.rec->map;
    edge.adjusted_raw = s.adjusted;
    edge.value = score_to_value(s.adjusted, hp);
    edge.timestamp = s.rec->timestamp;
    ds.players.insert(edge.player);
    ds.maps.insert(edge.map);
    ds.edges.push_back(std::move(edge));
  }
  return ds;
}

BipartiteIndex build_graph(std::vector<PreparedScore> edges) {
  BipartiteIndex g;
  g.edges = std::move(edges);
  g.edge_player.reserve(g.edges.size());
  g.edge_map.reserve(g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& edge = g.edges[i];
    auto [pit, pnew] = g.player_index.try_emplace(edge.player, g.players.size());
    if (pnew) {
      g.players.push_back(edge.player);
      g.edges_of_player.emplace_back();
    }
    auto [mit, mnew] = g.map_index.try_emplace(edge.map, g.maps.size());
    if (mnew) {
      g.maps.push_back(edge.map);
      g.edges_of_map.emplace_back();
    }
    g.edge_player.push_back(pit->second);
    g.edge_map.push_back(mit->second);
    g.edges_of_player[pit->second].push_back(i);
    g.edges_of_map[mit->second].push_back(i);
  }
  return g;
}

BipartiteIndex build_graph(const Dataset& ds) { return build_graph(ds.edges); }

void write_dataset_jsonl(std::ostream& out,
                         const std::vector<PreparedScore>& edges) {
  for (const auto& edge : edges) {
    nlohmann::json obj{{"player_id", edge.player.value},
                       {"map_id", edge.map.value},
                       {"value", edge.value},
                       {"timestamp", edge.timestamp}};
    if (!std::isnan(edge.adjusted_raw)) obj["adjusted_raw"] = edge.adjusted_raw;
    out << obj.dump() << '\n';
  }
}

std::vector<PreparedScore> read_dataset_jsonl(std::istream& in) {
  std::vector<PreparedScore> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = strip_cr(line);
    if (row.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(row);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": invalid JSON: " + e.what());
    }
    PreparedScore edge;
    try {
      edge.player.value = obj.at("player_id").get<std::string>();
      edge.map.value = obj.at("map_id").get<std::string>();
      edge.value = obj.at("value").get<double>();
      edge.timestamp = obj.at("timestamp").get<std::int64_t>();
      edge.adjusted_raw = obj.contains("adjusted_raw")
                              ? obj["adjusted_raw"].get<double>()
                              : std::numeric_limits<double>::quiet_NaN();
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": bad record: " + e.what());
    }
    if (edge.player.value.empty() || edge.map.value.empty() ||
        !(edge.value > 0.0) || !std::isfinite(edge.value))
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": ids must be non-empty and value positive");
    edges.push_back(std::move(edge));
  }
  if (in.bad()) throw std::runtime_error("read_dataset_jsonl: stream read failure");
  return edges;
}

nlohmann::json manifest_to_json(const PrepManifest& manifest) {
  return nlohmann::json{{"unknown_modifier", manifest.unknown_modifier},
                        {"below_min_raw", manifest.below_min_raw},
                        {"perfect_score", manifest.perfect_score},
                        {"not_recent", manifest.not_recent},
                        {"duplicate", manifest.duplicate}};
}

}  // namespace skillease
