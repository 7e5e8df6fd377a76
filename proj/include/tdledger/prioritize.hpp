#pragma once

// ROI-based cost model for TD tickets.
//
//   interest rate [min/month] = interest minutes x occurrences per month
//   effort        [min]       = effort days x minutes per person-day
//   ROIM          [months]    = effort / interest rate
//
// ROIM is bucketed into a five-step priority; interest risk is the product
// of the two ordinal ids. Constants are configurable and default to the
// values the method was calibrated with.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdledger/core.hpp"

namespace tdledger {

struct CostConstants {
  // Indexed by level id (very_low .. very_high).
  std::array<double, 5> interest_minutes = {1, 15, 60, 480, 960};
  // Occurrences per month. Assigned by label meaning: very_high is "once a
  // day", hence the largest value.
  std::array<double, 5> probability_per_month = {0.0013, 0.0027, 1, 4.5, 30};
  double effort_day_minutes = 60;
  double legacy_five_means_days = 10;

  bool operator==(const CostConstants&) const = default;

  double interest(OrdinalLevel l) const { return interest_minutes[level_id(l)]; }
  double probability(OrdinalLevel l) const { return probability_per_month[level_id(l)]; }

  void check() const {
    for (std::size_t i = 0; i < 5; ++i) {
      if (!(interest_minutes[i] > 0) || !(probability_per_month[i] > 0)) {
        throw Error(errc::invalid_argument, "cost constants must be strictly positive");
      }
      if (i > 0 && !(interest_minutes[i] > interest_minutes[i - 1])) {
        throw Error(errc::invalid_argument, "interest minutes must increase with level");
      }
    }
    if (!(effort_day_minutes > 0) || !(legacy_five_means_days > 0)) {
      throw Error(errc::invalid_argument, "effort constants must be strictly positive");
    }
  }

  static CostConstants defaults() { return {}; }

  // Low frequencies expressed consistently in occurrences per month.
  static CostConstants unit_consistent() {
    CostConstants c;
    c.probability_per_month = {1.0 / 36.0, 1.0 / 12.0, 1, 4.5, 30};
    return c;
  }

  // Eight-hour person-day.
  static CostConstants workday() {
    CostConstants c;
    c.effort_day_minutes = 480;
    return c;
  }

  static CostConstants preset(std::string_view name) {
    if (name == "default") return defaults();
    if (name == "unit-consistent") return unit_consistent();
    if (name == "workday") return workday();
    throw Error(errc::invalid_argument, "unknown constants preset '" + std::string(name) + "'");
  }

  nlohmann::json to_json() const {
    nlohmann::json im = nlohmann::json::object(), pm = nlohmann::json::object();
    for (auto l : kAllLevels) {
      im[std::string(label_of(l))] = interest(l);
      pm[std::string(label_of(l))] = probability(l);
    }
    return {{"interest_minutes", im},
            {"probability_per_month", pm},
            {"effort_day_minutes", effort_day_minutes},
            {"legacy_five_means_days", legacy_five_means_days}};
  }

  // Partial documents override defaults; a string selects a preset.
  static CostConstants from_json(const nlohmann::json& j) {
    if (j.is_string()) return preset(j.get<std::string>());
    CostConstants c = j.contains("preset") ? preset(j.at("preset").get<std::string>()) : defaults();
    auto table = [&](const char* key, std::array<double, 5>& out) {
      if (!j.contains(key)) return;
      for (auto it = j.at(key).begin(); it != j.at(key).end(); ++it) {
        out[level_id(level_from_label(it.key()))] = it->get<double>();
      }
    };
    table("interest_minutes", c.interest_minutes);
    table("probability_per_month", c.probability_per_month);
    c.effort_day_minutes = j.value("effort_day_minutes", c.effort_day_minutes);
    c.legacy_five_means_days = j.value("legacy_five_means_days", c.legacy_five_means_days);
    c.check();
    return c;
  }
};

enum class PrioritySource { educated_guess, roi_based };

constexpr std::string_view to_string(PrioritySource s) {
  return s == PrioritySource::educated_guess ? "educated_guess" : "roi_based";
}

inline PrioritySource priority_source_from_string(std::string_view s) {
  const auto key = normalize_token(s);
  if (key == "educatedguess" || key == "educated") return PrioritySource::educated_guess;
  if (key == "roibased" || key == "roi") return PrioritySource::roi_based;
  throw Error(errc::invalid_argument, "unknown priority source '" + std::string(s) + "'");
}

enum class Quadrant { low_hanging_fruit, wait, neutral };

constexpr std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::low_hanging_fruit: return "low_hanging_fruit";
    case Quadrant::wait: return "wait";
    default: return "neutral";
  }
}

struct QuadrantConfig {
  OrdinalLevel min_priority_for_lhf = OrdinalLevel::high;
  double max_effort_days_for_lhf = 2;
  OrdinalLevel max_priority_for_wait = OrdinalLevel::low;
  double min_effort_days_for_wait = 5;
  PrioritySource priority_source = PrioritySource::educated_guess;

  bool operator==(const QuadrantConfig&) const = default;

  nlohmann::json to_json() const {
    return {{"min_priority_for_lhf", std::string(label_of(min_priority_for_lhf))},
            {"max_effort_days_for_lhf", max_effort_days_for_lhf},
            {"max_priority_for_wait", std::string(label_of(max_priority_for_wait))},
            {"min_effort_days_for_wait", min_effort_days_for_wait},
            {"priority_source", std::string(to_string(priority_source))}};
  }

  static QuadrantConfig from_json(const nlohmann::json& j) {
    QuadrantConfig q;
    if (j.contains("min_priority_for_lhf")) {
      q.min_priority_for_lhf = level_from_label(j.at("min_priority_for_lhf").get<std::string>());
    }
    if (j.contains("max_priority_for_wait")) {
      q.max_priority_for_wait = level_from_label(j.at("max_priority_for_wait").get<std::string>());
    }
    q.max_effort_days_for_lhf = j.value("max_effort_days_for_lhf", q.max_effort_days_for_lhf);
    q.min_effort_days_for_wait = j.value("min_effort_days_for_wait", q.min_effort_days_for_wait);
    if (j.contains("priority_source")) {
      q.priority_source = priority_source_from_string(j.at("priority_source").get<std::string>());
    }
    return q;
  }
};

struct RoiAssessment {
  std::string ticket_id;
  double interest_rate = 0;   // minutes per month
  double effort_minutes = 0;  // minutes
  double effort_days = 0;     // effective person-days
  double roim = 0;            // months
  OrdinalLevel roi_priority = OrdinalLevel::very_low;
  OrdinalLevel educated_guess = OrdinalLevel::very_low;
  int discrepancy = 0;    // educated id - roi id
  int interest_risk = 0;  // 0..16
  Quadrant quadrant = Quadrant::neutral;

  OrdinalLevel priority(PrioritySource s) const {
    return s == PrioritySource::educated_guess ? educated_guess : roi_priority;
  }
};

inline double interest_rate(const TdAttributes& td, const CostConstants& c = {}) {
  return c.interest(td.interest) * c.probability(td.interest_probability);
}

// Legacy estimates of 5 mean "more than five days".
inline double effort_days(const TdAttributes& td, const CostConstants& c = {}) {
  if (td.effort_scale == EffortScale::legacy_1to5 && td.effort_person_days == 5) {
    return c.legacy_five_means_days;
  }
  return td.effort_person_days;
}

inline double effort_minutes(const TdAttributes& td, const CostConstants& c = {}) {
  return effort_days(td, c) * c.effort_day_minutes;
}

inline double roim(const TdAttributes& td, const CostConstants& c = {}) {
  const double rate = interest_rate(td, c);
  if (!(rate > 0)) throw Error(errc::degenerate_rate, "interest rate is zero; ROIM undefined");
  return effort_minutes(td, c) / rate;
}

inline OrdinalLevel roi_priority(double roim_months) {
  if (roim_months < 1) return OrdinalLevel::very_high;
  if (roim_months < 2) return OrdinalLevel::high;
  if (roim_months < 12) return OrdinalLevel::medium;
  if (roim_months < 36) return OrdinalLevel::low;
  return OrdinalLevel::very_low;
}

inline int interest_risk(const TdAttributes& td) {
  return level_id(td.interest) * level_id(td.interest_probability);
}

inline int discrepancy(OrdinalLevel educated, OrdinalLevel roi) {
  return level_id(educated) - level_id(roi);
}

inline int discrepancy(const RoiAssessment& a) { return discrepancy(a.educated_guess, a.roi_priority); }

inline Quadrant classify_quadrant(OrdinalLevel priority, double effort_days,
                                  const QuadrantConfig& cfg = {}) {
  if (priority >= cfg.min_priority_for_lhf && effort_days <= cfg.max_effort_days_for_lhf) {
    return Quadrant::low_hanging_fruit;
  }
  if (priority <= cfg.max_priority_for_wait && effort_days >= cfg.min_effort_days_for_wait) {
    return Quadrant::wait;
  }
  return Quadrant::neutral;
}

inline Quadrant classify_quadrant(const RoiAssessment& a, const QuadrantConfig& cfg = {}) {
  return classify_quadrant(a.priority(cfg.priority_source), a.effort_days, cfg);
}

inline double accumulated_interest(const TdAttributes& td, double horizon_months,
                                   const CostConstants& c = {}) {
  if (horizon_months < 0) throw Error(errc::invalid_argument, "horizon must be non-negative");
  return interest_rate(td, c) * horizon_months;
}

// Full assessment for a ticket carrying TD attributes.
inline RoiAssessment assess(const Ticket& t, const CostConstants& c = {},
                            const QuadrantConfig& q = {}) {
  if (!t.td) throw Error(errc::invalid_argument, "ticket '" + t.id + "' has no td attributes");
  const auto& td = *t.td;
  RoiAssessment a;
  a.ticket_id = t.id;
  a.interest_rate = interest_rate(td, c);
  a.effort_days = effort_days(td, c);
  a.effort_minutes = effort_minutes(td, c);
  a.roim = roim(td, c);
  a.roi_priority = roi_priority(a.roim);
  a.educated_guess = td.educated_guess;
  a.discrepancy = discrepancy(a);
  a.interest_risk = interest_risk(td);
  a.quadrant = classify_quadrant(a, q);
  return a;
}

inline std::vector<RoiAssessment> assess_open_td(const std::vector<Ticket>& tickets,
                                                 const CostConstants& c = {},
                                                 const QuadrantConfig& q = {}) {
  std::vector<RoiAssessment> out;
  for (const auto& t : tickets) {
    if (t.is_open_td()) out.push_back(assess(t, c, q));
  }
  return out;
}

// Open TD tickets whose re-submission date has arrived. Earliest date first,
// then higher educated-guess priority, then id.
inline std::vector<Ticket> due_for_resubmission(const std::vector<Ticket>& tickets, Date meeting) {
  std::vector<Ticket> out;
  for (const auto& t : tickets) {
    if (!t.is_open() || !t.td || !t.td->re_submission_date) continue;
    if (std::chrono::sys_days{*t.td->re_submission_date} <= std::chrono::sys_days{meeting}) {
      out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end(), [](const Ticket& a, const Ticket& b) {
    const auto da = std::chrono::sys_days{*a.td->re_submission_date};
    const auto db = std::chrono::sys_days{*b.td->re_submission_date};
    if (da != db) return da < db;
    if (a.td->educated_guess != b.td->educated_guess) return a.td->educated_guess > b.td->educated_guess;
    return a.id < b.id;
  });
  return out;
}

struct AffectingTd {
  Ticket ticket;
  std::size_t depth = 0;  // levels below the story's component
};

inline std::vector<AffectingTd> td_affecting_story(const std::vector<Ticket>& tickets,
                                                   const Ticket& story) {
  if (!hierarchy_rank(story.kind) || story.kind == TicketKind::task) {
    throw Error(errc::invalid_argument, "ticket '" + story.id + "' is not a story-level item");
  }
  std::vector<AffectingTd> out;
  for (const auto& t : tickets) {
    if (!t.is_open_td() || !is_ancestor(story.component, t.component)) continue;
    out.push_back({t, t.component.depth() - story.component.depth()});
  }
  std::sort(out.begin(), out.end(), [](const AffectingTd& a, const AffectingTd& b) {
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.ticket.id < b.ticket.id;
  });
  return out;
}

}  // namespace tdledger
