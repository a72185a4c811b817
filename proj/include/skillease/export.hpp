#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "skillease/core.hpp"
#include "skillease/solver.hpp"

namespace skillease {

// Affine rescale of fitted eases onto a familiar difficulty scale: the
// easiest map (largest ease) lands exactly on anchor_easy, the hardest
// (smallest ease) on anchor_hard, everything else in between. Requires
// anchor_hard > anchor_easy; throws if the eases are all equal (the scale
// would be degenerate) or the input is empty.
std::map<MapId, double> ease_to_difficulty(const std::map<MapId, double>& eases,
                                           double anchor_hard, double anchor_easy);

struct ComparisonRow {
  MapId map;
  double ours = 0.0;
  std::optional<double> reference;  // missing when the map has no reference entry
  std::optional<double> delta;      // ours - reference
  bool flagged = false;             // |delta| >= threshold
};

// Hardest first; ties broken by map id so output is stable.
std::vector<ComparisonRow> comparison_report(const std::map<MapId, double>& ours,
                                             const std::map<MapId, double>& reference,
                                             double flag_threshold);

// map_id,ours,reference,delta,flagged (reference/delta cells empty when absent)
std::string comparison_to_csv(const std::vector<ComparisonRow>& rows);

// Reference difficulties, header "map_id,stars". Throws on malformed rows,
// naming the line.
std::map<MapId, double> read_reference_csv(std::istream& in);

// The per-iteration error curve as "iteration,mae" CSV.
std::string trace_series(const FitTrace& trace);

}  // namespace skillease
