#pragma once

// Monitoring aggregates over a ticket snapshot: per-month series, categorical
// shares and the headline/grid datasets. Deleted tickets never count.
//
// "Open in month m" means open at the last instant of m: created_at <= end(m)
// and closed_at absent or > end(m). A ticket opened and closed inside one
// month therefore never shows up in the open-effort series.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdledger/prioritize.hpp"

namespace tdledger {

struct SeriesPoint {
  YearMonth month;
  double value = 0;
  std::string series;

  bool operator==(const SeriesPoint&) const = default;
};

using Series = std::vector<SeriesPoint>;

struct MonthRange {
  YearMonth first;
  YearMonth last;  // inclusive
};

inline std::vector<YearMonth> months_in(const MonthRange& r) {
  std::vector<YearMonth> out;
  for (YearMonth m = r.first; m <= r.last; m = m.next()) out.push_back(m);
  return out;
}

inline bool matches_kind(const Ticket& t, std::optional<TicketKind> kind) {
  return !kind || t.kind == *kind;
}

// Months spanned by creation and closure of the matching tickets.
inline std::optional<MonthRange> activity_range(const std::vector<Ticket>& tickets,
                                                std::optional<TicketKind> kind) {
  std::optional<MonthRange> r;
  auto extend = [&](YearMonth m) {
    if (!r) {
      r = MonthRange{m, m};
    } else {
      r->first = std::min(r->first, m);
      r->last = std::max(r->last, m);
    }
  };
  for (const auto& t : tickets) {
    if (t.deleted || !matches_kind(t, kind)) continue;
    extend(YearMonth::of(t.created_at));
    if (t.closed_at) extend(YearMonth::of(*t.closed_at));
  }
  return r;
}

struct OpenedClosed {
  Series opened;
  Series closed;
};

inline OpenedClosed opened_closed_per_month(const std::vector<Ticket>& tickets,
                                            std::optional<TicketKind> kind = TicketKind::td) {
  OpenedClosed out;
  const auto range = activity_range(tickets, kind);
  if (!range) return out;
  std::map<YearMonth, double> opened, closed;
  for (const auto& t : tickets) {
    if (t.deleted || !matches_kind(t, kind)) continue;
    opened[YearMonth::of(t.created_at)] += 1;
    if (t.closed_at) closed[YearMonth::of(*t.closed_at)] += 1;
  }
  for (const auto& m : months_in(*range)) {
    out.opened.push_back({m, opened[m], "opened"});
    out.closed.push_back({m, closed[m], "closed"});
  }
  return out;
}

inline bool open_at(const Ticket& t, Timestamp instant) {
  return !t.deleted && t.created_at <= instant && (!t.closed_at || *t.closed_at > instant);
}

// Count of matching tickets open at each month end.
inline Series open_count_per_month(const std::vector<Ticket>& tickets,
                                   std::optional<TicketKind> kind,
                                   std::optional<MonthRange> range = std::nullopt) {
  Series out;
  if (!range) range = activity_range(tickets, kind);
  if (!range) return out;
  for (const auto& m : months_in(*range)) {
    double n = 0;
    for (const auto& t : tickets) {
      if (matches_kind(t, kind) && open_at(t, m.end())) n += 1;
    }
    out.push_back({m, n, "open"});
  }
  return out;
}

// Sum of recorded effort (person-days, as estimated) over TD tickets open at
// each month end.
inline Series open_effort_per_month(const std::vector<Ticket>& tickets,
                                    std::optional<MonthRange> range = std::nullopt) {
  Series out;
  if (!range) range = activity_range(tickets, TicketKind::td);
  if (!range) return out;
  for (const auto& m : months_in(*range)) {
    double sum = 0;
    for (const auto& t : tickets) {
      if (t.kind == TicketKind::td && t.td && open_at(t, m.end())) sum += t.td->effort_person_days;
    }
    out.push_back({m, sum, "open_effort"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shares

enum class ShareDimension { td_type, priority, interest_risk, contagiousness, breaking_change };

constexpr std::string_view to_string(ShareDimension d) {
  switch (d) {
    case ShareDimension::td_type: return "td_type";
    case ShareDimension::priority: return "priority";
    case ShareDimension::interest_risk: return "interest_risk";
    case ShareDimension::contagiousness: return "contagiousness";
    default: return "breaking_change";
  }
}

inline ShareDimension share_dimension_from_string(std::string_view s) {
  for (auto d : {ShareDimension::td_type, ShareDimension::priority, ShareDimension::interest_risk,
                 ShareDimension::contagiousness, ShareDimension::breaking_change}) {
    if (normalize_token(to_string(d)) == normalize_token(s)) return d;
  }
  if (normalize_token(s) == "contagious") return ShareDimension::contagiousness;
  throw Error(errc::unsupported_dimension, "unsupported share dimension '" + std::string(s) + "'");
}

struct ShareEntry {
  std::string category;
  std::size_t count = 0;
  double share = 0;
};

struct ShareTable {
  ShareDimension dimension = ShareDimension::td_type;
  std::size_t total = 0;
  std::vector<ShareEntry> entries;  // in natural category order

  const ShareEntry* find(std::string_view category) const {
    for (const auto& e : entries) {
      if (e.category == category) return &e;
    }
    return nullptr;
  }
};

struct ShareOptions {
  bool include_closed = false;
  PrioritySource priority_source = PrioritySource::educated_guess;
  CostConstants constants;
};

inline ShareTable shares(const std::vector<Ticket>& tickets, ShareDimension dim,
                         const ShareOptions& opt = {}) {
  // Sort key keeps ordinal categories in scale order.
  std::map<std::pair<int, std::string>, std::size_t> counts;
  ShareTable table;
  table.dimension = dim;
  for (const auto& t : tickets) {
    if (t.deleted || t.kind != TicketKind::td || !t.td) continue;
    if (!opt.include_closed && !t.is_open()) continue;
    const auto& td = *t.td;
    std::pair<int, std::string> key;
    switch (dim) {
      case ShareDimension::td_type: key = {0, td.td_type.empty() ? "unspecified" : td.td_type}; break;
      case ShareDimension::priority: {
        const auto p = opt.priority_source == PrioritySource::educated_guess
                           ? td.educated_guess
                           : roi_priority(roim(td, opt.constants));
        key = {level_id(p), std::string(label_of(p))};
        break;
      }
      case ShareDimension::interest_risk: {
        const int r = interest_risk(td);
        key = {r, std::to_string(r)};
        break;
      }
      case ShareDimension::contagiousness: key = {td.contagious, format_bool(td.contagious)}; break;
      case ShareDimension::breaking_change:
        key = {td.breaking_change, format_bool(td.breaking_change)};
        break;
    }
    ++counts[key];
    ++table.total;
  }
  for (const auto& [key, n] : counts) {
    table.entries.push_back({key.second, n, static_cast<double>(n) / static_cast<double>(table.total)});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Headline (count and effort of open TD)

struct CountEffort {
  std::size_t count = 0;
  double effort_days = 0;
};

struct Headline {
  CountEffort all;
  CountEffort very_high;
  CountEffort very_low;
  std::size_t open_tickets = 0;  // open tickets of any kind
  double td_share = 0;           // all.count / open_tickets
};

inline Headline headline(const std::vector<Ticket>& tickets,
                         PrioritySource source = PrioritySource::educated_guess,
                         const CostConstants& c = {}) {
  Headline h;
  for (const auto& t : tickets) {
    if (!t.is_open()) continue;
    ++h.open_tickets;
    if (!t.is_open_td()) continue;
    const double e = t.td->effort_person_days;
    h.all.count++;
    h.all.effort_days += e;
    const auto p = source == PrioritySource::educated_guess ? t.td->educated_guess
                                                            : roi_priority(roim(*t.td, c));
    if (p == OrdinalLevel::very_high) {
      h.very_high.count++;
      h.very_high.effort_days += e;
    } else if (p == OrdinalLevel::very_low) {
      h.very_low.count++;
      h.very_low.effort_days += e;
    }
  }
  h.td_share = h.open_tickets ? static_cast<double>(h.all.count) / static_cast<double>(h.open_tickets) : 0.0;
  return h;
}

// ---------------------------------------------------------------------------
// Priority/risk versus effort grid

enum class GridAxis { priority, interest_risk };

struct GridCell {
  int row = 0;              // priority id or interest-risk product
  std::string row_label;
  double effort_days = 0;   // effective person-days
  std::size_t count = 0;
  std::vector<std::string> ticket_ids;
};

inline std::vector<GridCell> risk_effort_grid(const std::vector<Ticket>& tickets,
                                              GridAxis axis = GridAxis::interest_risk,
                                              PrioritySource source = PrioritySource::educated_guess,
                                              const CostConstants& c = {}) {
  std::map<std::pair<int, double>, GridCell> cells;
  for (const auto& t : tickets) {
    if (!t.is_open_td()) continue;
    const auto& td = *t.td;
    int row = 0;
    std::string label;
    if (axis == GridAxis::priority) {
      const auto p = source == PrioritySource::educated_guess ? td.educated_guess
                                                              : roi_priority(roim(td, c));
      row = level_id(p);
      label = std::string(label_of(p));
    } else {
      row = interest_risk(td);
      label = std::to_string(row);
    }
    const double days = effort_days(td, c);
    auto& cell = cells[{row, days}];
    cell.row = row;
    cell.row_label = label;
    cell.effort_days = days;
    cell.count++;
    cell.ticket_ids.push_back(t.id);
  }
  std::vector<GridCell> out;
  for (auto& [k, cell] : cells) {
    std::sort(cell.ticket_ids.begin(), cell.ticket_ids.end());
    out.push_back(std::move(cell));
  }
  return out;
}

// ---------------------------------------------------------------------------
// TDM process effort

inline constexpr double kCapacityHoursPerMonth = 8.0 * 22.0;

struct CycleEffort {
  double establishment_hours = 0;
  double maintenance_hours = 0;
  double cycle_length_months = 1;
};

struct EffortStats {
  double establishment_per_month = 0;
  double maintenance_per_month = 0;
  double establishment_fraction = 0;
  double maintenance_fraction = 0;

  bool below_three_percent() const {
    return establishment_fraction < 0.03 && maintenance_fraction < 0.03;
  }
};

// Mean of the per-cycle monthly rates, and that mean over a 176 h month.
inline EffortStats effort_stats(const std::vector<CycleEffort>& cycles) {
  EffortStats s;
  if (cycles.empty()) return s;
  for (const auto& c : cycles) {
    if (!(c.cycle_length_months > 0)) {
      throw Error(errc::invalid_argument, "cycle length must be positive");
    }
    s.establishment_per_month += c.establishment_hours / c.cycle_length_months;
    s.maintenance_per_month += c.maintenance_hours / c.cycle_length_months;
  }
  const auto n = static_cast<double>(cycles.size());
  s.establishment_per_month /= n;
  s.maintenance_per_month /= n;
  s.establishment_fraction = s.establishment_per_month / kCapacityHoursPerMonth;
  s.maintenance_fraction = s.maintenance_per_month / kCapacityHoursPerMonth;
  return s;
}

}  // namespace tdledger
