#pragma once

// Domain model shared by every module: ordinal scales, ticket kinds and
// statuses, component paths, TD attributes and the ticket itself.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "tdledger/chrono.hpp"
#include "tdledger/error.hpp"

namespace tdledger {

// Lowercases and drops separators so "Very High", "very_high" and
// "VERY-HIGH" compare equal.
inline std::string normalize_token(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    if (c == ' ' || c == '_' || c == '-' || c == '.' || c == '\t') continue;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// OrdinalLevel

enum class OrdinalLevel : std::uint8_t { very_low = 0, low = 1, medium = 2, high = 3, very_high = 4 };

inline constexpr std::array<OrdinalLevel, 5> kAllLevels = {
    OrdinalLevel::very_low, OrdinalLevel::low, OrdinalLevel::medium, OrdinalLevel::high,
    OrdinalLevel::very_high};

constexpr int level_id(OrdinalLevel l) { return static_cast<int>(l); }

inline OrdinalLevel level_from_id(int id) {
  if (id < 0 || id > 4) {
    throw Error(errc::unknown_label, "ordinal id out of range: " + std::to_string(id));
  }
  return static_cast<OrdinalLevel>(id);
}

constexpr std::string_view label_of(OrdinalLevel l) {
  constexpr std::array<std::string_view, 5> labels = {"very_low", "low", "medium", "high",
                                                      "very_high"};
  return labels[static_cast<std::size_t>(l)];
}

inline std::optional<OrdinalLevel> try_level_from_label(std::string_view label) {
  const auto key = normalize_token(label);
  for (auto l : kAllLevels) {
    if (normalize_token(label_of(l)) == key) return l;
  }
  return std::nullopt;
}

inline OrdinalLevel level_from_label(std::string_view label) {
  if (auto l = try_level_from_label(label)) return *l;
  throw Error(errc::unknown_label, "unknown ordinal label '" + std::string(label) + "'");
}

// ---------------------------------------------------------------------------
// Ticket kinds and statuses

enum class TicketKind : std::uint8_t { initiative, epic, feature, user_story, task, bug, td };

inline constexpr std::array<TicketKind, 7> kAllKinds = {
    TicketKind::initiative, TicketKind::epic, TicketKind::feature, TicketKind::user_story,
    TicketKind::task,       TicketKind::bug,  TicketKind::td};

constexpr std::string_view to_string(TicketKind k) {
  constexpr std::array<std::string_view, 7> names = {"initiative", "epic", "feature", "user_story",
                                                     "task",       "bug",  "td"};
  return names[static_cast<std::size_t>(k)];
}

// Hierarchy rank, initiative highest. bug and td sit outside the hierarchy.
constexpr std::optional<int> hierarchy_rank(TicketKind k) {
  switch (k) {
    case TicketKind::initiative: return 5;
    case TicketKind::epic: return 4;
    case TicketKind::feature: return 3;
    case TicketKind::user_story: return 2;
    case TicketKind::task: return 1;
    default: return std::nullopt;
  }
}

inline TicketKind kind_from_string(std::string_view s) {
  const auto key = normalize_token(s);
  for (auto k : kAllKinds) {
    if (normalize_token(to_string(k)) == key) return k;
  }
  if (key == "story") return TicketKind::user_story;
  if (key == "technicaldebt") return TicketKind::td;
  throw Error(errc::unknown_label, "unknown ticket kind '" + std::string(s) + "'");
}

enum class TicketStatus : std::uint8_t {
  backlog,
  in_proposal,
  planned,
  in_progress,
  blocked,
  testing,
  done
};

inline constexpr std::array<TicketStatus, 7> kAllStatuses = {
    TicketStatus::backlog, TicketStatus::in_proposal, TicketStatus::planned,
    TicketStatus::in_progress, TicketStatus::blocked, TicketStatus::testing,
    TicketStatus::done};

constexpr std::string_view to_string(TicketStatus s) {
  constexpr std::array<std::string_view, 7> names = {
      "backlog", "in_proposal", "planned", "in_progress", "blocked", "testing", "done"};
  return names[static_cast<std::size_t>(s)];
}

inline TicketStatus status_from_string(std::string_view s) {
  const auto key = normalize_token(s);
  for (auto st : kAllStatuses) {
    if (normalize_token(to_string(st)) == key) return st;
  }
  throw Error(errc::unknown_label, "unknown ticket status '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// ComponentPath

struct ComponentPath {
  std::vector<std::string> segments;  // root first

  auto operator<=>(const ComponentPath&) const = default;

  std::size_t depth() const { return segments.size(); }

  // Both '/' and '\' separate segments; empty segments are dropped.
  static ComponentPath parse(std::string_view s) {
    ComponentPath p;
    std::string cur;
    for (char c : s) {
      if (c == '/' || c == '\\') {
        if (!cur.empty()) p.segments.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) p.segments.push_back(std::move(cur));
    return p;
  }

  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (i) out.push_back('/');
      out += segments[i];
    }
    return out;
  }
};

// A path is its own ancestor.
inline bool is_ancestor(const ComponentPath& a, const ComponentPath& b) {
  if (a.segments.size() > b.segments.size()) return false;
  return std::equal(a.segments.begin(), a.segments.end(), b.segments.begin());
}

// ---------------------------------------------------------------------------
// TD attributes

enum class EffortScale : std::uint8_t { legacy_1to5, continuous };

constexpr std::string_view to_string(EffortScale s) {
  return s == EffortScale::legacy_1to5 ? "legacy_1to5" : "continuous";
}

inline EffortScale effort_scale_from_string(std::string_view s) {
  const auto key = normalize_token(s);
  if (key == "legacy1to5" || key == "legacy") return EffortScale::legacy_1to5;
  if (key == "continuous") return EffortScale::continuous;
  throw Error(errc::unknown_label, "unknown effort scale '" + std::string(s) + "'");
}

enum class InterestScenario : std::uint8_t { worst_case, medium_case };

constexpr std::string_view to_string(InterestScenario s) {
  return s == InterestScenario::worst_case ? "worst_case" : "medium_case";
}

inline InterestScenario scenario_from_string(std::string_view s) {
  const auto key = normalize_token(s);
  if (key == "worstcase" || key == "worst") return InterestScenario::worst_case;
  if (key == "mediumcase" || key == "medium") return InterestScenario::medium_case;
  throw Error(errc::unknown_label, "unknown interest scenario '" + std::string(s) + "'");
}

struct TdAttributes {
  OrdinalLevel interest = OrdinalLevel::medium;
  OrdinalLevel interest_probability = OrdinalLevel::medium;
  bool contagious = false;
  bool breaking_change = false;
  double effort_person_days = 1.0;
  EffortScale effort_scale = EffortScale::legacy_1to5;
  OrdinalLevel educated_guess = OrdinalLevel::medium;
  std::string td_type;
  std::optional<Date> re_submission_date;
  InterestScenario interest_scenario = InterestScenario::medium_case;

  bool operator==(const TdAttributes&) const = default;
};

// ---------------------------------------------------------------------------
// Deliberation template

enum class DeliberationField : std::uint8_t { alternatives, benefits, drawbacks, risks };

constexpr std::string_view to_string(DeliberationField f) {
  constexpr std::array<std::string_view, 4> names = {"alternatives", "benefits", "drawbacks",
                                                     "risks"};
  return names[static_cast<std::size_t>(f)];
}

inline DeliberationField deliberation_field_from_string(std::string_view s) {
  for (auto f : {DeliberationField::alternatives, DeliberationField::benefits,
                 DeliberationField::drawbacks, DeliberationField::risks}) {
    if (normalize_token(to_string(f)) == normalize_token(s)) return f;
  }
  throw Error(errc::unknown_label, "unknown deliberation field '" + std::string(s) + "'");
}

using RequiredDeliberation = std::set<DeliberationField>;

inline RequiredDeliberation default_required_deliberation() {
  return {DeliberationField::drawbacks, DeliberationField::risks};
}

struct DeliberationNotes {
  std::string alternatives;
  std::string benefits;
  std::string drawbacks;
  std::string risks;

  bool operator==(const DeliberationNotes&) const = default;

  const std::string& get(DeliberationField f) const {
    switch (f) {
      case DeliberationField::alternatives: return alternatives;
      case DeliberationField::benefits: return benefits;
      case DeliberationField::drawbacks: return drawbacks;
      case DeliberationField::risks: return risks;
    }
    return alternatives;
  }
};

inline bool is_deliberated(const DeliberationNotes& notes,
                           const RequiredDeliberation& required = default_required_deliberation()) {
  return std::all_of(required.begin(), required.end(),
                     [&](DeliberationField f) { return !notes.get(f).empty(); });
}

// ---------------------------------------------------------------------------
// Ticket

struct Ticket {
  std::string id;
  std::string title;
  TicketKind kind = TicketKind::task;
  TicketStatus status = TicketStatus::backlog;
  ComponentPath component;
  std::optional<std::string> parent;
  Timestamp created_at{};
  std::optional<Timestamp> closed_at;
  bool deleted = false;
  bool talked_about_td = false;
  DeliberationNotes notes;
  std::optional<TdAttributes> td;
  std::uint64_t version = 1;
  // Source columns/keys without a canonical home, kept for round-trips.
  std::map<std::string, std::string> extra;

  bool operator==(const Ticket&) const = default;

  bool is_open() const { return !deleted && status != TicketStatus::done; }
  bool is_open_td() const { return is_open() && kind == TicketKind::td && td.has_value(); }
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  std::string ticket_id;
  std::string field;
  std::string message;
  std::optional<std::size_t> row;  // 1-based data row, when from an import

  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

inline ValidationReport validate_ticket(const Ticket& t) {
  ValidationReport r;
  auto add = [&](std::string field, std::string msg) {
    r.push_back({t.id, std::move(field), std::move(msg), std::nullopt});
  };

  if (t.id.empty()) add("id", "empty id");
  if (t.title.empty()) add("title", "empty title");
  if (t.component.depth() == 0) add("component", "component path is empty");
  for (const auto& s : t.component.segments) {
    if (s.empty()) add("component", "empty component segment");
  }
  if (t.parent && *t.parent == t.id) add("parent", "ticket is its own parent");
  if (t.version == 0) add("version", "version must start at 1");

  if (t.closed_at && *t.closed_at < t.created_at) add("closed_at", "closed before created");
  if (t.status == TicketStatus::done && !t.closed_at) add("closed_at", "done ticket without closure timestamp");
  if (t.status != TicketStatus::done && t.closed_at) add("closed_at", "closure timestamp on a ticket that is not done");

  if (t.kind == TicketKind::td && !t.td) add("td", "td ticket without td attributes");
  if (t.kind != TicketKind::td && t.td) add("td", "td attributes on non-td kind");

  if (t.td) {
    const auto& td = *t.td;
    const double e = td.effort_person_days;
    if (td.effort_scale == EffortScale::legacy_1to5) {
      if (!(e >= 1 && e <= 5) || std::floor(e) != e) {
        add("effort_person_days", "effort out of legacy range");
      }
    } else if (!(e > 0) || !std::isfinite(e)) {
      add("effort_person_days", "effort must be positive");
    }
    if (td.re_submission_date && !td.re_submission_date->ok()) {
      add("re_submission_date", "invalid calendar date");
    }
  }
  return r;
}

}  // namespace tdledger
