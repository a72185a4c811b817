#include "skillease/export.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <stdexcept>
#include <string_view>

#include "skillease/detail/text.hpp"

namespace skillease {

std::map<MapId, double> ease_to_difficulty(const std::map<MapId, double>& eases,
                                           double anchor_hard, double anchor_easy) {
  if (eases.empty()) {
    throw std::invalid_argument("difficulty: no maps to rescale");
  }
  if (!(anchor_hard > anchor_easy)) {
    throw std::invalid_argument("difficulty: hard anchor must exceed easy anchor");
  }
  double lo = eases.begin()->second;
  double hi = lo;
  for (const auto& [id, ease] : eases) {
    lo = std::min(lo, ease);
    hi = std::max(hi, ease);
  }
  if (!(hi > lo)) {
    throw std::invalid_argument("difficulty: all eases equal, scale is degenerate");
  }
  // Line through (lo, anchor_hard) and (hi, anchor_easy): harder maps (small
  // ease) get bigger numbers.
  const double slope = (anchor_easy - anchor_hard) / (hi - lo);
  std::map<MapId, double> out;
  for (const auto& [id, ease] : eases) {
    out.emplace(id, anchor_hard + slope * (ease - lo));
  }
  return out;
}

std::vector<ComparisonRow> comparison_report(const std::map<MapId, double>& ours,
                                             const std::map<MapId, double>& reference,
                                             double flag_threshold) {
  std::vector<ComparisonRow> rows;
  rows.reserve(ours.size());
  for (const auto& [id, difficulty] : ours) {
    ComparisonRow row;
    row.map = id;
    row.ours = difficulty;
    if (const auto it = reference.find(id); it != reference.end()) {
      row.reference = it->second;
      row.delta = difficulty - it->second;
      row.flagged = std::fabs(*row.delta) >= flag_threshold;
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    if (a.ours != b.ours) return a.ours > b.ours;
    return a.map < b.map;
  });
  return rows;
}

std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "map_id,ours,reference,delta,flagged\n";
  for (const auto& row : rows) {
    out += row.map.value;
    out += ',';
    out += detail::format_double(row.ours);
    out += ',';
    if (row.reference) out += detail::format_double(*row.reference);
    out += ',';
    if (row.delta) out += detail::format_double(*row.delta);
    out += row.flagged ? ",true\n" : ",false\n";
  }
  return out;
}

namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

double parse_stars(std::string_view text, int line_no) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw std::invalid_argument("reference csv line " + std::to_string(line_no) +
                                ": bad stars value");
  }
  return value;
}

}  // namespace

std::map<MapId, double> read_reference_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != "map_id,stars") {
    throw std::invalid_argument("reference csv: expected header \"map_id,stars\"");
  }
  std::map<MapId, double> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = strip_cr(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || comma == 0) {
      throw std::invalid_argument("reference csv line " + std::to_string(line_no) +
                                  ": expected map_id,stars");
    }
    MapId id{std::string(row.substr(0, comma))};
    out[std::move(id)] = parse_stars(row.substr(comma + 1), line_no);
  }
  return out;
}

std::string trace_series(const FitTrace& trace) {
  std::string out = "iteration,mae\n";
  for (const auto& [iteration, mae] : trace.entries) {
    out += std::to_string(iteration);
    out += ',';
    out += detail::format_double(mae);
    out += '\n';
  }
  return out;
}

}  // namespace skillease
