#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "skillease/core.hpp"
#include "skillease/transform.hpp"

namespace skillease {

/// One edge of the bipartite graph: the surviving, transformed score.
struct PreparedScore {
  PlayerId player;
  MapId map;
  ScoreValue value = 0.0;  // linearized score s
  // post-modifier, pre-transform fraction; NaN for synthetic data that
  // bypassed the transform
  double adjusted_raw = 0.0;
  std::int64_t timestamp = 0;
};

/// Per-rule drop counts from the cleaning pipeline.
struct PrepManifest {
  std::int64_t unknown_modifier = 0;
  std::int64_t below_min_raw = 0;
  std::int64_t perfect_score = 0;
  std::int64_t not_recent = 0;
  std::int64_t duplicate = 0;

  std::int64_t total_dropped() const {
    return unknown_modifier + below_min_raw + perfect_score + not_recent +
           duplicate;
  }
};

struct Dataset {
  std::vector<PreparedScore> edges;
  std::set<PlayerId> players;
  std::set<MapId> maps;
  PrepManifest manifest;
};

enum class ScoreFormat { csv, jsonl };

struct ParseError {
  std::size_t line = 0;  // 1-based, counting the header
  std::string message;
};

struct ParseResult {
  std::vector<ScoreRecord> records;
  std::vector<ParseError> errors;
};

/// Parses a score dump. Well-formed rows become records; malformed rows are
/// reported with line numbers, never silently dropped. Throws
/// std::runtime_error when the stream itself is unreadable (for CSV, a
/// missing or wrong header counts as unreadable).
ParseResult parse_scores(std::istream& in, ScoreFormat format);

/// The cleaning pipeline, in order: modifier adjustment; minimum-raw
/// threshold; perfect-score removal; recency filter keeping the
/// ceil(fraction*n) most recent (timestamp ties broken by input order);
/// per-(player,map) dedup keeping the highest adjusted raw; transform of the
/// survivors. The manifest counts drops per step. Throws
/// std::invalid_argument when hp is invalid.
Dataset clean_and_filter(const std::vector<ScoreRecord>& records,
                         const Hyperparams& hp, const ModifierTable& table);

/// Bidirectional adjacency over the prepared edges. Node indices follow
/// first appearance in edge order; both views reference the same edge slots.
struct BipartiteIndex {
  std::vector<PreparedScore> edges;
  std::vector<PlayerId> players;  // node index -> id
  std::vector<MapId> maps;
  std::unordered_map<PlayerId, std::size_t> player_index;
  std::unordered_map<MapId, std::size_t> map_index;
  std::vector<std::size_t> edge_player;  // edge index -> player node index
  std::vector<std::size_t> edge_map;     // edge index -> map node index
  std::vector<std::vector<std::size_t>> edges_of_player;
  std::vector<std::vector<std::size_t>> edges_of_map;

  std::size_t num_players() const { return players.size(); }
  std::size_t num_maps() const { return maps.size(); }
  std::size_t num_edges() const { return edges.size(); }
};

BipartiteIndex build_graph(std::vector<PreparedScore> edges);
BipartiteIndex build_graph(const Dataset& ds);

// Prepared-dataset serialization: one JSON object per line with keys
// player_id, map_id, value, adjusted_raw (omitted for synthetic data),
// timestamp.
void write_dataset_jsonl(std::ostream& out,
                         const std::vector<PreparedScore>& edges);
std::vector<PreparedScore> read_dataset_jsonl(std::istream& in);

nlohmann::json manifest_to_json(const PrepManifest& manifest);

}  // namespace skillease
