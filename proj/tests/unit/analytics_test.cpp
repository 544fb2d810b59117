#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "hkg/analytics.hpp"
#include "hkg/error.hpp"
#include "hkg/serialization.hpp"
#include "hkg/store.hpp"

namespace hkg {
namespace {

using nlohmann::json;

InteractionEvent ev(std::int64_t t, const std::string& kind, json payload = json::object()) {
  return InteractionEvent{"s", t, kind, std::move(payload)};
}

InteractionEvent layer(std::int64_t t, const std::string& kind, const std::string& view) {
  return ev(t, kind, json{{"view", view}});
}

constexpr std::size_t G = 0, M = 1, D = 2;

TEST(SessionMetrics, CountsAndViewTime) {
  std::vector<InteractionEvent> log = {
      ev(0, "TaskStart"),          ev(1000, "NodeClick"),  ev(2000, "NodeClick"),
      ev(3000, "NodeClick"),       ev(4000, "EdgeClick"),  ev(5000, "EdgeClick"),
      ev(10000, "ViewArticle", {{"doc", "d1"}}), ev(55000, "ViewArticleEnd", {{"doc", "d1"}}),
      ev(60000, "TaskEnd")};
  SessionMetrics m = session_metrics(log);
  EXPECT_EQ(m.nc, 3u);
  EXPECT_EQ(m.ec, 2u);
  EXPECT_EQ(m.v, 1u);
  EXPECT_DOUBLE_EQ(m.vt_s, 45.0);
  EXPECT_DOUBLE_EQ(m.duration_s, 60.0);
}

TEST(SessionMetrics, EmptySession) {
  SessionMetrics m = session_metrics({ev(0, "TaskStart"), ev(1000, "TaskEnd")});
  EXPECT_EQ(m.nc + m.ec + m.v, 0u);
  EXPECT_EQ(m.vt_s, 0.0);
  EXPECT_TRUE(m.view_fractions.empty());
  EXPECT_EQ(m.heatmap.rows.size(), kHeatmapBins);
}

TEST(SessionMetrics, ViewFractions) {
  std::vector<InteractionEvent> log = {
      ev(0, "TaskStart"), layer(0, "LayerEnter", "Global"), layer(30000, "LayerEnter", "MiniMap"),
      layer(40000, "LayerEnter", "Detailed"), layer(100000, "LayerExit", "Detailed"), ev(100000, "TaskEnd")};
  SessionMetrics m = session_metrics(log);
  EXPECT_NEAR(m.view_fractions.at("Global"), 0.3, 1e-12);
  EXPECT_NEAR(m.view_fractions.at("MiniMap"), 0.1, 1e-12);
  EXPECT_NEAR(m.view_fractions.at("Detailed"), 0.6, 1e-12);
}

TEST(SessionMetrics, MissingTaskMarkersIsAnalysisError) {
  for (auto log : {std::vector<InteractionEvent>{ev(0, "NodeClick")},
                   std::vector<InteractionEvent>{ev(0, "TaskStart"), ev(1, "NodeClick")}}) {
    try {
      session_metrics(log);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kAnalysis);
    }
  }
}

TEST(SessionMetrics, UnknownKindSkippedWithWarning) {
  Warnings w;
  SessionMetrics m = session_metrics({ev(0, "TaskStart"), ev(1, "Wiggle"), ev(2, "TaskEnd")}, &w);
  EXPECT_EQ(m.nc, 0u);
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("Wiggle"), std::string::npos);
}

TEST(SessionMetrics, UnclosedViewTruncatesAtTaskEnd) {
  SessionMetrics m = session_metrics(
      {ev(0, "TaskStart"), ev(20000, "ViewArticle", {{"doc", "a"}}), ev(50000, "TaskEnd")});
  EXPECT_DOUBLE_EQ(m.vt_s, 30.0);
}

TEST(SessionMetrics, OverlappingViewsCountOnce) {
  SessionMetrics m = session_metrics({ev(0, "TaskStart"), ev(10000, "ViewArticle", {{"doc", "a"}}),
                                      ev(15000, "ViewArticle", {{"doc", "b"}}),
                                      ev(20000, "ViewArticleEnd", {{"doc", "a"}}),
                                      ev(30000, "ViewArticleEnd", {{"doc", "b"}}), ev(40000, "TaskEnd")});
  EXPECT_EQ(m.v, 2u);
  EXPECT_DOUBLE_EQ(m.vt_s, 20.0);
}

TEST(Heatmap, NoViewEventsAllZero) {
  Heatmap h = heatmap({ev(0, "TaskStart"), ev(1000, "TaskEnd")});
  ASSERT_EQ(h.rows.size(), 100u);
  for (const auto& r : h.rows) EXPECT_EQ(r[0] + r[1] + r[2], 0.0);
}

TEST(Heatmap, HalfAndHalf) {
  Heatmap h = heatmap({ev(0, "TaskStart"), layer(0, "LayerEnter", "Global"),
                       layer(50000, "LayerEnter", "Detailed"), ev(100000, "TaskEnd")});
  for (std::size_t k = 0; k < 50; ++k) EXPECT_DOUBLE_EQ(h.rows[k][G], 1.0) << k;
  for (std::size_t k = 50; k < 100; ++k) EXPECT_DOUBLE_EQ(h.rows[k][D], 1.0) << k;
}

TEST(Heatmap, TransitionMidBinSplitsProportionally) {
  Heatmap h = heatmap({ev(0, "TaskStart"), layer(0, "LayerEnter", "Global"),
                       layer(50500, "LayerEnter", "MiniMap"), ev(100000, "TaskEnd")});
  EXPECT_NEAR(h.rows[50][G], 0.5, 1e-12);
  EXPECT_NEAR(h.rows[50][M], 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(h.rows[49][G], 1.0);
  EXPECT_DOUBLE_EQ(h.rows[51][M], 1.0);
}

TEST(Heatmap, ZeroDurationIsAnalysisError) {
  try {
    heatmap({ev(5, "TaskStart"), ev(5, "TaskEnd")});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAnalysis);
  }
}

// Random layer sequences: fractions sum to one, rows stay within [0, 1], and
// column sums over the bin count give each view's share of the task.
TEST(Heatmap, RandomSessionsConsistent) {
  std::mt19937_64 rng(8);
  const char* views[] = {"Global", "MiniMap", "Detailed"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<InteractionEvent> log = {ev(0, "TaskStart"), layer(0, "LayerEnter", "Global")};
    std::int64_t t = 0;
    for (int i = 0; i < 12; ++i) {
      t += 1 + static_cast<std::int64_t>(rng() % 9000);
      log.push_back(layer(t, "LayerEnter", views[rng() % 3]));
    }
    t += 1 + static_cast<std::int64_t>(rng() % 9000);
    log.push_back(ev(t, "TaskEnd"));
    SessionMetrics m = session_metrics(log);
    double sum = 0;
    for (const auto& [_, f] : m.view_fractions) sum += f;
    ASSERT_NEAR(sum, 1.0, 1e-9);
    ASSERT_EQ(m.heatmap.rows.size(), 100u);
    for (const auto& r : m.heatmap.rows) ASSERT_LE(r[0] + r[1] + r[2], 1.0 + 1e-9);
    for (View v : kAllViews) {
      ASSERT_NEAR(m.heatmap.column_sum(v) / 100.0, m.view_fractions.at(std::string(to_string(v))), 1e-9);
    }
  }
}

TEST(SessionMetrics, InvariantUnderReserialization) {
  const auto events = read_events(testing::data_path("logs/synthetic_session.jsonl"));
  std::vector<InteractionEvent> again;
  for (const auto& e : events) again.push_back(parse_event_line(event_line(e)));
  EXPECT_EQ(json(session_metrics(events)).dump(), json(session_metrics(again)).dump());
}

TEST(Aggregate, MeanAndSampleStd) {
  SessionMetrics a, b;
  a.v = 2;
  b.v = 4;
  AggregateReport r = aggregate({a, b});
  EXPECT_DOUBLE_EQ(r.fields.at("v").mean, 3.0);
  EXPECT_DOUBLE_EQ(r.fields.at("v").std, std::sqrt(2.0));
  EXPECT_FALSE(r.single_session);
}

TEST(Aggregate, IdenticalSessionsZeroStd) {
  SessionMetrics a;
  a.nc = 5;
  a.vt_s = 12;
  AggregateReport r = aggregate({a, a, a});
  for (const auto& [name, f] : r.fields) EXPECT_EQ(f.std, 0.0) << name;
}

TEST(Aggregate, SingleSessionFlagged) {
  AggregateReport r = aggregate({SessionMetrics{}});
  EXPECT_TRUE(r.single_session);
  EXPECT_THROW(aggregate({}), Error);
}

TEST(Aggregate, ViewTableHasThreeViewRows) {
  SessionMetrics a;
  a.view_fractions = {{"Global", 0.3}, {"MiniMap", 0.1}, {"Detailed", 0.6}};
  const std::string table = format_view_table({{"simple", aggregate({a})}});
  EXPECT_NE(table.find("Global View"), std::string::npos);
  EXPECT_NE(table.find("Minimap"), std::string::npos);
  EXPECT_NE(table.find("Detailed View"), std::string::npos);
  EXPECT_NE(table.find("60.00"), std::string::npos);
}

TEST(Aggregate, CsvOneRowPerSession) {
  SessionMetrics a, b;
  a.session = "x";
  b.session = "y";
  const std::string csv = metrics_csv({a, b});
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(ValidateEvent, Rules) {
  EXPECT_NO_THROW(validate_event(layer(0, "LayerEnter", "Global")));
  EXPECT_THROW(validate_event(layer(0, "LayerEnter", "Sideways")), Error);
  EXPECT_THROW(validate_event(ev(-1, "NodeClick")), Error);
  EXPECT_THROW(validate_event(ev(0, "Nope")), Error);
}

TEST(SyntheticFixture, ReplaysDerivedValues) {
  const auto events = read_events(testing::data_path("logs/synthetic_session.jsonl"));
  SessionMetrics m = session_metrics(events);
  EXPECT_EQ(m.nc, 3u);
  EXPECT_EQ(m.ec, 2u);
  EXPECT_EQ(m.v, 1u);
  EXPECT_DOUBLE_EQ(m.vt_s, 45.0);
  EXPECT_NEAR(m.view_fractions.at("Global"), 0.3, 1e-9);
  EXPECT_NEAR(m.view_fractions.at("MiniMap"), 0.1, 1e-9);
  EXPECT_NEAR(m.view_fractions.at("Detailed"), 0.6, 1e-9);
}

}  // namespace
}  // namespace hkg
