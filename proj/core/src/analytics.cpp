#include "hkg/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>

#include "hkg/error.hpp"

namespace hkg {
namespace {

constexpr std::array<std::string_view, 9> kKindNames = {
    "NodeClick",  "EdgeClick", "SnippetView", "ViewArticle", "ViewArticleEnd",
    "LayerEnter", "LayerExit", "TaskStart",   "TaskEnd",
};

constexpr std::array<std::string_view, kViewCount> kViewNames = {"Global", "MiniMap",
                                                                 "Detailed"};

struct Interval {
  double begin;
  double end;
};

struct Segment {
  View view;
  double begin;
  double end;
};

struct Window {
  std::int64_t start;
  std::int64_t end;
};

Window task_window(const std::vector<InteractionEvent>& events) {
  std::optional<std::int64_t> start;
  std::optional<std::int64_t> end;
  for (const auto& e : events) {
    if (e.kind == "TaskStart" && !start) start = e.t_ms;
    if (e.kind == "TaskEnd" && start && !end) end = e.t_ms;
  }
  if (!start) throw Error(ErrorKind::kAnalysis, "session has no TaskStart event");
  if (!end) throw Error(ErrorKind::kAnalysis, "session has no TaskEnd after TaskStart");
  return {*start, *end};
}

std::optional<std::string> payload_string(const nlohmann::json& payload, const char* key) {
  if (!payload.is_object()) return std::nullopt;
  auto it = payload.find(key);
  if (it == payload.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

// Which view is on screen over time. Entering a view replaces the current
// one; exiting the current view leaves none.
std::vector<Segment> view_segments(const std::vector<InteractionEvent>& events, Window w,
                                   Warnings* warnings) {
  std::vector<Segment> out;
  View current = View::kGlobal;
  bool showing = false;
  double since = 0;
  auto close = [&](double t) {
    double b = std::max(since, static_cast<double>(w.start));
    double e = std::min(t, static_cast<double>(w.end));
    if (showing && e > b) out.push_back({current, b, e});
  };
  for (const auto& e : events) {
    if (e.kind != "LayerEnter" && e.kind != "LayerExit") continue;
    auto name = payload_string(e.payload, "view");
    auto view = name ? parse_view(*name) : std::nullopt;
    if (!view) {
      if (warnings) warnings->push_back(e.kind + " without a known view at t_ms=" + std::to_string(e.t_ms));
      continue;
    }
    const double t = static_cast<double>(e.t_ms);
    if (e.kind == "LayerEnter") {
      close(t);
      current = *view;
      showing = true;
      since = t;
    } else if (showing && current == *view) {
      close(t);
      showing = false;
    }
  }
  close(static_cast<double>(w.end));
  return out;
}

double union_length(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
  double total = 0;
  double cur_b = 0;
  double cur_e = 0;
  bool open = false;
  for (const auto& iv : intervals) {
    if (iv.end <= iv.begin) continue;
    if (!open || iv.begin > cur_e) {
      if (open) total += cur_e - cur_b;
      cur_b = iv.begin;
      cur_e = iv.end;
      open = true;
    } else {
      cur_e = std::max(cur_e, iv.end);
    }
  }
  if (open) total += cur_e - cur_b;
  return total;
}

Heatmap bin_segments(const std::vector<Segment>& segments, Window w, std::size_t bins) {
  Heatmap h;
  h.rows.assign(bins, {0.0, 0.0, 0.0});
  const double duration = static_cast<double>(w.end - w.start);
  const double width = duration / static_cast<double>(bins);
  for (const auto& s : segments) {
    const double a = s.begin - static_cast<double>(w.start);
    const double b = s.end - static_cast<double>(w.start);
    auto first = static_cast<std::size_t>(std::max(0.0, std::floor(a / width)));
    for (std::size_t k = first; k < bins; ++k) {
      const double lo = width * static_cast<double>(k);
      const double hi = width * static_cast<double>(k + 1);
      if (lo >= b) break;
      const double overlap = std::min(b, hi) - std::max(a, lo);
      if (overlap > 0) h.rows[k][static_cast<std::size_t>(s.view)] += overlap / width;
    }
  }
  return h;
}

std::string format_double(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

std::string_view to_string(EventKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(View view) { return kViewNames[static_cast<std::size_t>(view)]; }

std::optional<View> parse_view(std::string_view name) {
  for (std::size_t i = 0; i < kViewNames.size(); ++i) {
    if (kViewNames[i] == name) return static_cast<View>(i);
  }
  return std::nullopt;
}

void validate_event(const InteractionEvent& event) {
  if (event.session.empty()) throw Error(ErrorKind::kValidation, "event has no session");
  if (event.t_ms < 0) throw Error(ErrorKind::kValidation, "event time must be >= 0");
  auto kind = parse_event_kind(event.kind);
  if (!kind) throw Error(ErrorKind::kValidation, "unknown event kind: " + event.kind);
  if (!event.payload.is_object()) {
    throw Error(ErrorKind::kValidation, "event payload must be an object");
  }
  if (*kind == EventKind::kLayerEnter || *kind == EventKind::kLayerExit) {
    auto view = payload_string(event.payload, "view");
    if (!view || !parse_view(*view)) {
      throw Error(ErrorKind::kValidation, "layer event needs view Global, MiniMap or Detailed");
    }
  }
}

double Heatmap::column_sum(View view) const {
  double sum = 0;
  for (const auto& r : rows) sum += r[static_cast<std::size_t>(view)];
  return sum;
}

SessionMetrics session_metrics(const std::vector<InteractionEvent>& events, Warnings* warnings,
                               std::size_t bins) {
  const Window w = task_window(events);
  SessionMetrics m;
  if (!events.empty()) m.session = events.front().session;
  m.duration_s = static_cast<double>(w.end - w.start) / 1000.0;

  std::map<std::string, std::deque<double>> open_views;  // doc -> ViewArticle times
  std::vector<Interval> reading;
  for (const auto& e : events) {
    auto kind = parse_event_kind(e.kind);
    if (!kind) {
      if (warnings) warnings->push_back("skipping unknown event kind '" + e.kind + "'");
      continue;
    }
    const double t = static_cast<double>(e.t_ms);
    const std::string doc = payload_string(e.payload, "doc").value_or("");
    switch (*kind) {
      case EventKind::kNodeClick: ++m.nc; break;
      case EventKind::kEdgeClick: ++m.ec; break;
      case EventKind::kViewArticle:
        ++m.v;
        open_views[doc].push_back(t);
        break;
      case EventKind::kViewArticleEnd: {
        auto it = open_views.find(doc);
        if (it == open_views.end() || it->second.empty()) {
          if (warnings) warnings->push_back("ViewArticleEnd without open view of '" + doc + "'");
          break;
        }
        reading.push_back({it->second.front(), t});
        it->second.pop_front();
        break;
      }
      default: break;
    }
  }
  for (const auto& [_, starts] : open_views) {
    for (double t : starts) reading.push_back({t, static_cast<double>(w.end)});
  }
  for (auto& iv : reading) {
    iv.begin = std::max(iv.begin, static_cast<double>(w.start));
    iv.end = std::min(iv.end, static_cast<double>(w.end));
  }
  m.vt_s = union_length(std::move(reading)) / 1000.0;

  const auto segments = view_segments(events, w, warnings);
  std::array<double, kViewCount> dwell{};
  for (const auto& s : segments) dwell[static_cast<std::size_t>(s.view)] += s.end - s.begin;
  const double total = dwell[0] + dwell[1] + dwell[2];
  if (total > 0) {
    for (View v : kAllViews) {
      m.view_fractions[std::string(to_string(v))] = dwell[static_cast<std::size_t>(v)] / total;
    }
  }
  if (w.end > w.start) {
    m.heatmap = bin_segments(segments, w, bins);
  } else {
    m.heatmap.rows.assign(bins, {0.0, 0.0, 0.0});
  }
  return m;
}

Heatmap heatmap(const std::vector<InteractionEvent>& events, std::size_t bins) {
  if (bins == 0) throw Error(ErrorKind::kAnalysis, "heatmap needs at least one bin");
  const Window w = task_window(events);
  if (w.end <= w.start) throw Error(ErrorKind::kAnalysis, "session has zero duration");
  return bin_segments(view_segments(events, w, nullptr), w, bins);
}

std::map<std::string, std::vector<InteractionEvent>> group_by_session(
    const std::vector<InteractionEvent>& events) {
  std::map<std::string, std::vector<InteractionEvent>> out;
  for (const auto& e : events) out[e.session].push_back(e);
  for (auto& [_, list] : out) {
    std::stable_sort(list.begin(), list.end(),
                     [](const InteractionEvent& a, const InteractionEvent& b) { return a.t_ms < b.t_ms; });
  }
  return out;
}

AggregateReport aggregate(const std::vector<SessionMetrics>& metrics) {
  if (metrics.empty()) throw Error(ErrorKind::kAnalysis, "no sessions to aggregate");
  std::map<std::string, std::vector<double>> columns;
  for (const auto& m : metrics) {
    columns["nc"].push_back(static_cast<double>(m.nc));
    columns["ec"].push_back(static_cast<double>(m.ec));
    columns["v"].push_back(static_cast<double>(m.v));
    columns["vt_s"].push_back(m.vt_s);
    columns["duration_s"].push_back(m.duration_s);
    for (View v : kAllViews) {
      auto it = m.view_fractions.find(std::string(to_string(v)));
      columns["view_fraction." + std::string(to_string(v))].push_back(
          it == m.view_fractions.end() ? 0.0 : it->second);
    }
  }
  AggregateReport r;
  r.sessions = metrics.size();
  r.single_session = metrics.size() == 1;
  for (const auto& [name, xs] : columns) {
    const double n = static_cast<double>(xs.size());
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    r.fields[name] = {mean, r.single_session ? 0.0 : std::sqrt(ss / (n - 1))};
  }
  return r;
}

std::string format_view_table(
    const std::vector<std::pair<std::string, AggregateReport>>& groups) {
  std::size_t label_width = 0;
  for (const auto& [label, _] : groups) label_width = std::max(label_width, label.size());
  std::ostringstream out;
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };
  const std::array<std::string, kViewCount> headers = {"Global View", "Minimap", "Detailed View"};
  out << pad("", label_width);
  for (const auto& h : headers) out << " | " << pad(h, 16);
  out << "\n";
  for (const auto& [label, report] : groups) {
    out << pad(label, label_width);
    for (View v : kAllViews) {
      const auto& f = report.fields.at("view_fraction." + std::string(to_string(v)));
      out << " | "
          << pad(format_double(100 * f.mean, 2) + "% (" + format_double(100 * f.std, 2) + "%)", 16);
    }
    out << "\n";
  }
  return out.str();
}

std::string metrics_csv(const std::vector<SessionMetrics>& metrics) {
  std::ostringstream out;
  out << "session,nc,ec,v,vt_s,duration_s,global,minimap,detailed\n";
  for (const auto& m : metrics) {
    out << m.session << ',' << m.nc << ',' << m.ec << ',' << m.v << ','
        << format_double(m.vt_s, 3) << ',' << format_double(m.duration_s, 3);
    for (View v : kAllViews) {
      auto it = m.view_fractions.find(std::string(to_string(v)));
      out << ',' << format_double(it == m.view_fractions.end() ? 0.0 : it->second, 6);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace hkg
