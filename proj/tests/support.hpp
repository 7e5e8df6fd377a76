#pragma once

// Ticket builders and random store generators shared by the test binaries.

#include <random>
#include <string>
#include <vector>

#include "tdledger/tdledger.hpp"

namespace tdledger::testing {

inline Timestamp ts(const char* iso) { return parse_timestamp(iso); }
inline Date day(const char* iso) { return parse_date(iso); }

inline Ticket story(std::string id, std::vector<std::string> component,
                    TicketKind kind = TicketKind::user_story) {
  Ticket t;
  t.id = std::move(id);
  t.title = "story " + t.id;
  t.kind = kind;
  t.component.segments = std::move(component);
  t.created_at = ts("2024-01-01");
  return t;
}

inline Ticket td_ticket(std::string id, OrdinalLevel interest = OrdinalLevel::medium,
                        OrdinalLevel probability = OrdinalLevel::medium, double effort = 1,
                        OrdinalLevel educated = OrdinalLevel::medium,
                        EffortScale scale = EffortScale::legacy_1to5) {
  Ticket t;
  t.id = std::move(id);
  t.title = "td " + t.id;
  t.kind = TicketKind::td;
  t.component.segments = {"fw"};
  t.created_at = ts("2024-01-01");
  TdAttributes td;
  td.interest = interest;
  td.interest_probability = probability;
  td.effort_person_days = effort;
  td.effort_scale = scale;
  td.educated_guess = educated;
  td.td_type = "code";
  t.td = td;
  return t;
}

inline Ticket closed(Ticket t, const char* when) {
  t.status = TicketStatus::done;
  t.closed_at = ts(when);
  return t;
}

// Random but valid store: mixed kinds, creation and closure spread over
// 2023-2024, some deleted, TD attributes over the full scales.
inline std::vector<Ticket> random_store(std::mt19937_64& rng, std::size_t max_tickets = 200) {
  std::uniform_int_distribution<std::size_t> count_dist(0, max_tickets);
  std::uniform_int_distribution<int> level(0, 4), kind(0, 6), day_offset(0, 729), dur(0, 200),
      coin(0, 9), legacy(1, 5), types(0, 3), comp(0, 2);
  const std::size_t n = count_dist(rng);
  const char* type_names[] = {"code", "architecture", "test", "documentation"};
  const char* components[] = {"fw", "algo", "ui"};
  std::vector<Ticket> out;
  for (std::size_t i = 0; i < n; ++i) {
    Ticket t;
    t.id = "R" + std::to_string(i);
    t.title = "random " + t.id;
    t.kind = static_cast<TicketKind>(kind(rng));
    t.component.segments = {components[comp(rng)]};
    if (coin(rng) < 5) t.component.segments.push_back("sub" + std::to_string(comp(rng)));
    t.created_at = ts("2023-01-01") + std::chrono::days{day_offset(rng)} +
                   std::chrono::seconds{static_cast<long>(rng() % 86400)};
    if (coin(rng) < 4) {
      t.status = TicketStatus::done;
      t.closed_at = t.created_at + std::chrono::days{dur(rng)} + std::chrono::seconds{static_cast<long>(rng() % 86400)};
    } else {
      t.status = static_cast<TicketStatus>(rng() % 6);
    }
    t.deleted = coin(rng) == 0;
    if (t.kind == TicketKind::td) {
      TdAttributes td;
      td.interest = level_from_id(level(rng));
      td.interest_probability = level_from_id(level(rng));
      td.educated_guess = level_from_id(level(rng));
      td.contagious = coin(rng) < 3;
      td.breaking_change = coin(rng) < 2;
      if (coin(rng) < 6) {
        td.effort_scale = EffortScale::legacy_1to5;
        td.effort_person_days = legacy(rng);
      } else {
        td.effort_scale = EffortScale::continuous;
        td.effort_person_days = 0.25 * (1 + static_cast<int>(rng() % 60));
      }
      td.td_type = type_names[types(rng)];
      if (coin(rng) < 5) {
        td.re_submission_date = Date{std::chrono::floor<std::chrono::days>(ts("2024-01-01") + std::chrono::days{day_offset(rng) % 120})};
      }
      t.td = td;
    }
    out.push_back(std::move(t));
  }
  return out;
}

// Hand-written tracker export: `total` open tickets, the first `td` of them
// TD items with attributes cycling over the scales.
inline std::string synthetic_export_csv(int total, int td) {
  const char* levels[] = {"very_low", "low", "medium", "high", "very_high"};
  const char* others[] = {"user_story", "task", "bug", "feature"};
  std::string out =
      "id,title,kind,status,component,created_at,interest,interest_probability,"
      "effort_person_days,educated_guess,td_type\r\n";
  for (int i = 0; i < total; ++i) {
    const std::string id = "PX-" + std::to_string(1000 + i);
    if (i < td) {
      out += id + ",debt item " + std::to_string(i) + ",td,backlog,fw/io,2024-01-" +
             std::to_string(10 + i % 18) + "," + levels[i % 5] + "," + levels[(i / 5) % 5] + "," +
             std::to_string(1 + i % 5) + "," + levels[(i / 25) % 5] + ",code\r\n";
    } else {
      out += id + ",work item " + std::to_string(i) + "," + others[i % 4] +
             ",in_progress,fw,2024-02-01,,,,,\r\n";
    }
  }
  return out;
}

// Small but varied backlog used by the dataset, HTTP and CLI tests: 30 open TD
// tickets across two components, three stories, and some closed work.
inline std::vector<Ticket> demo_backlog() {
  std::vector<Ticket> out;
  for (int i = 0; i < 30; ++i) {
    auto t = td_ticket("TD-" + std::to_string(100 + i), level_from_id(i % 5), level_from_id((i * 3) % 5),
                       1 + i % 5, level_from_id((i * 7) % 5));
    t.component.segments = i % 3 == 0 ? std::vector<std::string>{"fw", "io"}
                                      : (i % 3 == 1 ? std::vector<std::string>{"fw"}
                                                    : std::vector<std::string>{"algo"});
    t.created_at = ts("2024-01-03") + std::chrono::days{9 * i};
    t.td->contagious = i % 4 == 0;
    t.td->td_type = i % 2 ? "code" : "architecture";
    if (i % 3 == 0) t.td->re_submission_date = Date{std::chrono::floor<std::chrono::days>(ts("2024-03-01") + std::chrono::days{i})};
    out.push_back(std::move(t));
  }
  for (int i = 0; i < 4; ++i) {
    auto t = td_ticket("TD-C" + std::to_string(i), OrdinalLevel::high, OrdinalLevel::high, 2);
    t.created_at = ts("2024-02-01");
    out.push_back(closed(t, i % 2 ? "2024-04-10" : "2024-05-20"));
  }
  out.push_back(story("US-1", {"fw"}));
  out.push_back(story("US-2", {"ui"}));
  out.push_back(story("EP-1", {"algo"}, TicketKind::epic));
  auto bug = story("BUG-1", {"fw", "io"}, TicketKind::bug);
  out.push_back(closed(bug, "2024-03-03"));
  return out;
}

}  // namespace tdledger::testing
