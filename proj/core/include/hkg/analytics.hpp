#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hkg/corpus.hpp"

namespace hkg {

enum class EventKind {
  kNodeClick,
  kEdgeClick,
  kSnippetView,
  kViewArticle,
  kViewArticleEnd,
  kLayerEnter,
  kLayerExit,
  kTaskStart,
  kTaskEnd,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

enum class View { kGlobal, kMiniMap, kDetailed };
inline constexpr std::size_t kViewCount = 3;
inline constexpr std::array<View, kViewCount> kAllViews = {View::kGlobal, View::kMiniMap,
                                                           View::kDetailed};

std::string_view to_string(View view);
std::optional<View> parse_view(std::string_view name);

// `kind` stays a string so logs holding kinds this build does not know can
// still be read (and skipped by the analysis).
struct InteractionEvent {
  std::string session;
  std::int64_t t_ms = 0;
  std::string kind;
  nlohmann::json payload = nlohmann::json::object();

  bool operator==(const InteractionEvent&) const = default;
};

// Throws kValidation: negative time, unknown kind, or a layer event whose
// payload "view" is not one of Global, MiniMap, Detailed.
void validate_event(const InteractionEvent& event);

struct Heatmap {
  // rows[bin][view]: share of the bin spent in each view.
  std::vector<std::array<double, kViewCount>> rows;

  double column_sum(View view) const;
};

struct SessionMetrics {
  std::string session;
  std::size_t nc = 0;
  std::size_t ec = 0;
  std::size_t v = 0;
  double vt_s = 0.0;
  double duration_s = 0.0;
  // Keyed by view name; empty when no view time was recorded.
  std::map<std::string, double> view_fractions;
  Heatmap heatmap;
};

inline constexpr std::size_t kHeatmapBins = 100;

SessionMetrics session_metrics(const std::vector<InteractionEvent>& events,
                               Warnings* warnings = nullptr,
                               std::size_t bins = kHeatmapBins);

// Throws kAnalysis for a session of zero duration.
Heatmap heatmap(const std::vector<InteractionEvent>& events, std::size_t bins = kHeatmapBins);

// Stable grouping by session id, each group sorted by t_ms.
std::map<std::string, std::vector<InteractionEvent>> group_by_session(
    const std::vector<InteractionEvent>& events);

struct FieldSummary {
  double mean = 0.0;
  double std = 0.0;  // sample (n - 1) standard deviation
};

struct AggregateReport {
  std::size_t sessions = 0;
  bool single_session = false;  // std forced to 0
  std::map<std::string, FieldSummary> fields;
};

// Fields: nc, ec, v, vt_s, duration_s and view_fraction.<View>.
AggregateReport aggregate(const std::vector<SessionMetrics>& metrics);

// Percent-of-time table with one row per labelled group and one column per
// view, formatted "mean% (std%)".
std::string format_view_table(
    const std::vector<std::pair<std::string, AggregateReport>>& groups);

// CSV, one row per session.
std::string metrics_csv(const std::vector<SessionMetrics>& metrics);

}  // namespace hkg
