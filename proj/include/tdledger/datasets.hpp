#pragma once

// Dataset builders behind the dashboard views. Every payload has the same
// shape so that CLI and HTTP render it identically:
//
//   {"dataset": id, "as_of": ts|null, "parameters": {...},
//    "config": {...}, "columns": [...], "rows": [{...}, ...]}
//
// Serialization is canonical: object keys sorted, no insignificant
// whitespace.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdledger/config.hpp"
#include "tdledger/monitor.hpp"
#include "tdledger/store.hpp"

namespace tdledger {

struct DatasetRequest {
  std::string id;
  std::map<std::string, std::string> params;
  std::optional<Timestamp> as_of;
};

inline const std::vector<std::string>& known_datasets() {
  static const std::vector<std::string> ids = {"v1", "v2", "v3", "v4",  "v5",           "v7",
                                               "v8", "v9", "v10", "opened_closed", "shares"};
  return ids;
}

inline std::string canonical_json(const nlohmann::json& j) { return j.dump(); }

namespace detail {

inline const std::string* param(const DatasetRequest& r, const std::string& key) {
  auto it = r.params.find(key);
  return it == r.params.end() || it->second.empty() ? nullptr : &it->second;
}

inline nlohmann::json payload(const DatasetRequest& req, const LedgerConfig& cfg,
                              std::vector<std::string> columns, nlohmann::json rows) {
  return {{"dataset", req.id},
          {"as_of", req.as_of ? nlohmann::json(format_timestamp(*req.as_of)) : nlohmann::json(nullptr)},
          {"parameters", req.params},
          {"config", cfg.to_json()},
          {"columns", std::move(columns)},
          {"rows", std::move(rows)}};
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline nlohmann::json ticket_row(const Ticket& t, const RoiAssessment& a) {
  return {{"id", t.id},
          {"title", t.title},
          {"component", t.component.str()},
          {"roim", a.roim},
          {"roi_priority", std::string(label_of(a.roi_priority))},
          {"educated_guess", std::string(label_of(a.educated_guess))},
          {"contagious", t.td->contagious}};
}

// Lowest ROIM first; ties by id.
inline std::vector<std::pair<Ticket, RoiAssessment>> by_roim(const std::vector<Ticket>& tickets,
                                                             const LedgerConfig& cfg) {
  std::vector<std::pair<Ticket, RoiAssessment>> out;
  for (const auto& t : tickets) {
    if (t.is_open_td()) out.emplace_back(t, assess(t, cfg.constants, cfg.quadrants));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second.roim != b.second.roim) return a.second.roim < b.second.roim;
    return a.first.id < b.first.id;
  });
  return out;
}

}  // namespace detail

// Builds a dataset over a fixed ticket snapshot. `cfg` is copied because
// request parameters (e.g. priority_source) may override it; the payload
// embeds the effective configuration.
inline nlohmann::json dataset(const DatasetRequest& req, const std::vector<Ticket>& tickets,
                              LedgerConfig cfg) {
  using detail::param;
  using detail::payload;
  if (req.id == "v6") {
    throw Error(errc::unknown_dataset,
                "dataset v6 (work that only one person can repay) is deliberately not provided: "
                "per-person performance views are not offered",
                {"v6"});
  }
  if (std::find(known_datasets().begin(), known_datasets().end(), req.id) == known_datasets().end()) {
    throw Error(errc::unknown_dataset, "unknown dataset '" + req.id + "'", {req.id});
  }
  if (const auto* ps = param(req, "priority_source")) {
    cfg.quadrants.priority_source = priority_source_from_string(*ps);
  }
  const PrioritySource source = cfg.quadrants.priority_source;

  if (req.id == "v1") {
    const auto* story_id = param(req, "story");
    if (!story_id) throw Error(errc::missing_parameter, "v1 requires parameter 'story'", {"story"});
    auto story = std::find_if(tickets.begin(), tickets.end(),
                              [&](const Ticket& t) { return t.id == *story_id; });
    if (story == tickets.end()) {
      throw Error(errc::unknown_ticket, "unknown story '" + *story_id + "'", {"story"});
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& hit : td_affecting_story(tickets, *story)) {
      auto row = detail::ticket_row(hit.ticket, assess(hit.ticket, cfg.constants, cfg.quadrants));
      row["depth"] = hit.depth;
      rows.push_back(std::move(row));
    }
    return payload(req, cfg,
                   {"id", "title", "component", "depth", "educated_guess", "roi_priority", "roim",
                    "contagious"},
                   std::move(rows));
  }

  if (req.id == "v2") {
    const auto h = headline(tickets, source, cfg.constants);
    nlohmann::json row = {{"td_count", h.all.count},
                          {"td_effort_days", h.all.effort_days},
                          {"very_high_count", h.very_high.count},
                          {"very_high_effort_days", h.very_high.effort_days},
                          {"very_low_count", h.very_low.count},
                          {"very_low_effort_days", h.very_low.effort_days},
                          {"open_tickets", h.open_tickets},
                          {"td_share", h.td_share}};
    return payload(req, cfg,
                   {"td_count", "td_effort_days", "very_high_count", "very_high_effort_days",
                    "very_low_count", "very_low_effort_days", "open_tickets", "td_share"},
                   nlohmann::json::array({row}));
  }

  if (req.id == "v3" || req.id == "v10") {
    const auto ranked = detail::by_roim(tickets, cfg);
    nlohmann::json rows = nlohmann::json::array();
    std::size_t rank = 0;
    for (const auto& [t, a] : ranked) {
      if (req.id == "v10" && !t.td->contagious) continue;
      if (req.id == "v3" && rank >= cfg.v3_limit) break;
      auto row = detail::ticket_row(t, a);
      row["rank"] = ++rank;
      rows.push_back(std::move(row));
    }
    return payload(req, cfg,
                   {"rank", "id", "title", "component", "roim", "roi_priority", "educated_guess",
                    "contagious"},
                   std::move(rows));
  }

  if (req.id == "v4") {
    double horizon = cfg.v4_default_horizon_months;
    if (const auto* h = param(req, "horizon")) horizon = parse_number(*h, "horizon");
    if (!(horizon >= 0 && horizon <= 1200)) {
      throw Error(errc::invalid_argument, "horizon must be between 0 and 1200 months", {"horizon"});
    }
    std::vector<Ticket> selected;
    if (const auto* ids = param(req, "tickets")) {
      for (const auto& id : detail::split_list(*ids)) {
        auto it = std::find_if(tickets.begin(), tickets.end(), [&](const Ticket& t) { return t.id == id; });
        if (it == tickets.end() || !it->td) {
          throw Error(errc::unknown_ticket, "unknown td ticket '" + id + "'", {"tickets"});
        }
        selected.push_back(*it);
      }
    } else {
      for (const auto& t : tickets) {
        if (t.is_open_td()) selected.push_back(t);
      }
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& t : selected) {
      std::vector<double> points;
      for (double m = 0; m <= horizon; m += 1) points.push_back(m);
      if (points.back() != horizon) points.push_back(horizon);
      for (double m : points) {
        rows.push_back({{"id", t.id},
                        {"month", m},
                        {"accumulated_interest_minutes", accumulated_interest(*t.td, m, cfg.constants)},
                        {"effort_minutes", effort_minutes(*t.td, cfg.constants)}});
      }
    }
    return payload(req, cfg, {"id", "month", "accumulated_interest_minutes", "effort_minutes"},
                   std::move(rows));
  }

  if (req.id == "v5") {
    std::optional<MonthRange> range = activity_range(tickets, TicketKind::td);
    if (range && req.as_of) range->last = std::max(range->first, YearMonth::of(*req.as_of));
    if (const auto* from = param(req, "from")) {
      const auto ym = YearMonth::of(parse_timestamp(*from + "-01"));
      range = MonthRange{ym, range ? std::max(range->last, ym) : ym};
    }
    if (const auto* to = param(req, "to")) {
      const auto ym = YearMonth::of(parse_timestamp(*to + "-01"));
      range = MonthRange{range ? std::min(range->first, ym) : ym, ym};
    }
    nlohmann::json rows = nlohmann::json::array();
    if (range) {
      for (const auto& p : open_effort_per_month(tickets, range)) {
        rows.push_back({{"month", p.month.str()}, {"open_effort_days", p.value}});
      }
    }
    return payload(req, cfg, {"month", "open_effort_days"}, std::move(rows));
  }

  if (req.id == "v7") {
    std::vector<std::pair<Ticket, RoiAssessment>> items;
    for (const auto& t : tickets) {
      if (t.is_open_td()) items.emplace_back(t, assess(t, cfg.constants, cfg.quadrants));
    }
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      const int da = std::abs(a.second.discrepancy), db = std::abs(b.second.discrepancy);
      if (da != db) return da > db;
      return a.first.id < b.first.id;
    });
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [t, a] : items) {
      rows.push_back({{"id", t.id},
                      {"title", t.title},
                      {"educated_guess", std::string(label_of(a.educated_guess))},
                      {"educated_guess_id", level_id(a.educated_guess)},
                      {"roi_priority", std::string(label_of(a.roi_priority))},
                      {"roi_priority_id", level_id(a.roi_priority)},
                      {"discrepancy", a.discrepancy}});
    }
    return payload(req, cfg,
                   {"id", "title", "educated_guess", "educated_guess_id", "roi_priority",
                    "roi_priority_id", "discrepancy"},
                   std::move(rows));
  }

  if (req.id == "v8") {
    if (!cfg.enable_v8) {
      throw Error(errc::dataset_disabled, "dataset v8 is disabled (set enable_v8 to show it)", {"v8"});
    }
    std::map<std::pair<std::string, int>, std::size_t> counts;
    for (const auto& t : tickets) {
      if (!t.is_open_td() || !t.td->re_submission_date) continue;
      const auto a = assess(t, cfg.constants, cfg.quadrants);
      counts[{format_date(*t.td->re_submission_date), level_id(a.priority(source))}]++;
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [k, n] : counts) {
      rows.push_back({{"re_submission_date", k.first},
                      {"priority", std::string(label_of(level_from_id(k.second)))},
                      {"count", n}});
    }
    return payload(req, cfg, {"re_submission_date", "priority", "count"}, std::move(rows));
  }

  if (req.id == "opened_closed") {
    std::optional<TicketKind> kind = TicketKind::td;
    if (const auto* k = param(req, "kind")) {
      kind = *k == "all" ? std::nullopt : std::optional(kind_from_string(*k));
    }
    const auto series = opened_closed_per_month(tickets, kind);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < series.opened.size(); ++i) {
      rows.push_back({{"month", series.opened[i].month.str()},
                      {"opened", series.opened[i].value},
                      {"closed", series.closed[i].value}});
    }
    return payload(req, cfg, {"month", "opened", "closed"}, std::move(rows));
  }

  if (req.id == "shares") {
    const auto* dim = param(req, "dimension");
    if (!dim) throw Error(errc::missing_parameter, "shares requires parameter 'dimension'", {"dimension"});
    ShareOptions opt;
    opt.priority_source = source;
    opt.constants = cfg.constants;
    if (const auto* ic = param(req, "include_closed")) opt.include_closed = parse_bool(*ic, "include_closed");
    const auto table = shares(tickets, share_dimension_from_string(*dim), opt);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : table.entries) {
      rows.push_back({{"category", e.category}, {"count", e.count}, {"share", e.share}});
    }
    return payload(req, cfg, {"category", "count", "share"}, std::move(rows));
  }

  // v9
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& cell : risk_effort_grid(tickets, GridAxis::priority, source, cfg.constants)) {
    const auto level = level_from_id(cell.row);
    rows.push_back({{"priority", cell.row_label},
                    {"priority_id", cell.row},
                    {"effort_days", cell.effort_days},
                    {"count", cell.count},
                    {"quadrant", std::string(to_string(classify_quadrant(level, cell.effort_days, cfg.quadrants)))},
                    {"ticket_ids", cell.ticket_ids}});
  }
  return payload(req, cfg, {"priority", "priority_id", "effort_days", "count", "quadrant", "ticket_ids"},
                 std::move(rows));
}

inline nlohmann::json dataset(const DatasetRequest& req, const TicketStore& store,
                              const LedgerConfig& cfg) {
  return dataset(req, req.as_of ? store.snapshot_at(*req.as_of) : store.tickets(), cfg);
}

// Re-submission queue in dataset shape.
inline nlohmann::json due_payload(const std::vector<Ticket>& tickets, Date meeting,
                                  const LedgerConfig& cfg) {
  DatasetRequest req{"due", {{"date", format_date(meeting)}}, std::nullopt};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& t : due_for_resubmission(tickets, meeting)) {
    rows.push_back({{"id", t.id},
                    {"title", t.title},
                    {"status", std::string(to_string(t.status))},
                    {"re_submission_date", format_date(*t.td->re_submission_date)},
                    {"educated_guess", std::string(label_of(t.td->educated_guess))}});
  }
  return detail::payload(req, cfg, {"id", "title", "status", "re_submission_date", "educated_guess"},
                         std::move(rows));
}

// Per-ticket ROI assessment table (all open TD tickets, in id order).
inline nlohmann::json roi_payload(const std::vector<Ticket>& tickets, const LedgerConfig& cfg) {
  DatasetRequest req{"roi", {}, std::nullopt};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& t : tickets) {
    if (!t.is_open_td()) continue;
    const auto a = assess(t, cfg.constants, cfg.quadrants);
    rows.push_back({{"id", t.id},
                    {"interest", std::string(label_of(t.td->interest))},
                    {"interest_probability", std::string(label_of(t.td->interest_probability))},
                    {"effort_person_days", t.td->effort_person_days},
                    {"effort_scale", std::string(to_string(t.td->effort_scale))},
                    {"interest_rate", a.interest_rate},
                    {"effort_minutes", a.effort_minutes},
                    {"roim", a.roim},
                    {"roi_priority", std::string(label_of(a.roi_priority))},
                    {"educated_guess", std::string(label_of(a.educated_guess))},
                    {"discrepancy", a.discrepancy},
                    {"interest_risk", a.interest_risk},
                    {"quadrant", std::string(to_string(a.quadrant))}});
  }
  return detail::payload(req, cfg,
                         {"id", "interest", "interest_probability", "effort_person_days",
                          "effort_scale", "interest_rate", "effort_minutes", "roim", "roi_priority",
                          "educated_guess", "discrepancy", "interest_risk", "quadrant"},
                         std::move(rows));
}

// ---------------------------------------------------------------------------
// Rendering

inline std::string cell_text(const nlohmann::json& v) {
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ';';
      out += cell_text(v[i]);
    }
    return out;
  }
  return json_scalar_to_string(v);
}

inline std::string render_csv(const nlohmann::json& payload) {
  std::vector<csv::Row> out;
  csv::Row header;
  for (const auto& c : payload.at("columns")) header.push_back(c.get<std::string>());
  out.push_back(header);
  for (const auto& r : payload.at("rows")) {
    csv::Row row;
    for (const auto& c : header) row.push_back(r.contains(c) ? cell_text(r.at(c)) : "");
    out.push_back(std::move(row));
  }
  return csv::write(out);
}

// Human-readable table with the configuration on a leading comment line.
inline std::string render_table(const nlohmann::json& payload) {
  std::vector<std::string> header;
  for (const auto& c : payload.at("columns")) header.push_back(c.get<std::string>());
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
  for (const auto& r : payload.at("rows")) {
    std::vector<std::string> row;
    for (std::size_t i = 0; i < header.size(); ++i) {
      row.push_back(r.contains(header[i]) ? cell_text(r.at(header[i])) : "");
      width[i] = std::max(width[i], row.back().size());
    }
    cells.push_back(std::move(row));
  }
  std::ostringstream os;
  os << "# " << payload.at("dataset").get<std::string>() << " config: "
     << canonical_json(payload.at("config")) << "\n";
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << std::left << std::setw(static_cast<int>(width[i])) << row[i];
      if (i + 1 < row.size()) os << "  ";
    }
    os << "\n";
  };
  line(header);
  std::vector<std::string> rule;
  for (auto w : width) rule.emplace_back(w, '-');
  line(rule);
  for (const auto& r : cells) line(r);
  return os.str();
}

enum class OutputFormat { json, csv, table };

inline OutputFormat output_format_from_string(std::string_view s) {
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  if (s == "table") return OutputFormat::table;
  throw Error(errc::invalid_argument, "unknown format '" + std::string(s) + "'");
}

inline std::string render(const nlohmann::json& payload, OutputFormat f) {
  switch (f) {
    case OutputFormat::json: return canonical_json(payload) + "\n";
    case OutputFormat::csv: return render_csv(payload);
    default: return render_table(payload);
  }
}

}  // namespace tdledger
