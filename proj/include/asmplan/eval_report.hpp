#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "asmplan/plan_eval.hpp"

namespace asmplan {

/// Percentage with one decimal, e.g. 0.7857 -> "78.6".
inline std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

/// Aligned text table in the bucket layout:
///
///   Number of Parts    2~4   5~6   7~8    9+  Average
///   Success Rate      78.6  55.6   8.3   0.0     32.4
///   Furniture Count     14    36    24    28      102
///
/// In simple/hard mode the rows are mean precision, recall and F1 instead.
inline std::string format_report_table(const EvaluationReport& report, MatchMode mode) {
  std::vector<std::string> header{"Number of Parts"};
  for (const auto& b : report.buckets) header.push_back(b.range.label);
  header.push_back("Average");

  std::vector<std::vector<std::string>> rows{header};
  auto cells = [&](const std::string& title, auto value) {
    std::vector<std::string> row{title};
    for (const auto& b : report.buckets) row.push_back(b.count ? value(b) : std::string("-"));
    row.push_back(report.overall.count ? value(report.overall) : std::string("-"));
    rows.push_back(row);
  };
  if (mode == MatchMode::exact) {
    cells("Success Rate", [](const BucketSummary& b) { return format_percent(b.success_rate); });
  } else {
    const bool simple = mode == MatchMode::simple;
    auto pick = [simple](const BucketSummary& b) -> const MatchScores& { return simple ? b.simple_mean : b.hard_mean; };
    auto scored = [](const BucketSummary& b, double v) { return b.scored_count ? format_percent(v) : std::string("-"); };
    cells("Precision", [&](const BucketSummary& b) { return scored(b, pick(b).precision); });
    cells("Recall", [&](const BucketSummary& b) { return scored(b, pick(b).recall); });
    cells("F1", [&](const BucketSummary& b) { return scored(b, pick(b).f1); });
  }
  {
    std::vector<std::string> row{"Furniture Count"};
    for (const auto& b : report.buckets) row.push_back(std::to_string(b.count));
    row.push_back(std::to_string(report.overall.count));
    rows.push_back(row);
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::ostringstream out;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c == 0) {
        out << r[c] << std::string(width[c] - r[c].size(), ' ');
      } else {
        out << "  " << std::string(width[c] - r[c].size(), ' ') << r[c];
      }
    }
    out << '\n';
  }
  if (!report.undecided.empty()) {
    out << "Undecided by permutation cap:";
    for (const auto& k : report.undecided) out << ' ' << k;
    out << '\n';
  }
  if (!report.errors.empty()) {
    out << "Items with errors:";
    for (const auto& k : report.errors) out << ' ' << k;
    out << '\n';
  }
  return out.str();
}

inline nlohmann::json scores_to_json(const MatchScores& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

inline nlohmann::json bucket_to_json(const BucketSummary& b) {
  nlohmann::json j{{"label", b.range.label},
                   {"count", b.count},
                   {"exact_count", b.exact_count},
                   {"success_rate", b.success_rate},
                   {"scored_count", b.scored_count},
                   {"simple", scores_to_json(b.simple_mean)},
                   {"hard", scores_to_json(b.hard_mean)}};
  return j;
}

inline nlohmann::json report_to_json(const EvaluationReport& report, MatchMode mode) {
  nlohmann::json j;
  j["mode"] = to_string(mode);
  j["items"] = nlohmann::json::array();
  for (const auto& it : report.items) {
    nlohmann::json e{{"key", it.key}, {"part_count", it.part_count}, {"exact", it.exact}, {"undecided_by_cap", it.undecided_by_cap}};
    e["simple"] = it.simple ? scores_to_json(*it.simple) : nlohmann::json(nullptr);
    e["hard"] = it.hard ? scores_to_json(*it.hard) : nlohmann::json(nullptr);
    e["error"] = it.error ? nlohmann::json(*it.error) : nlohmann::json(nullptr);
    j["items"].push_back(e);
  }
  j["buckets"] = nlohmann::json::array();
  for (const auto& b : report.buckets) j["buckets"].push_back(bucket_to_json(b));
  j["overall"] = bucket_to_json(report.overall);
  j["undecided"] = report.undecided;
  j["errors"] = report.errors;
  return j;
}

}  // namespace asmplan
