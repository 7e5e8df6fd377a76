#pragma once

// Situation-awareness measurement for TD decisions.
//
// A refinement meeting is interrupted two or three times; every participant
// answers ten yes/no questions (one per decision prerequisite, in a random
// order) about the ticket just discussed. Independently, an observer records
// per discussed ticket which prerequisites were actually talked about.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdledger/codec.hpp"
#include "tdledger/csv.hpp"

namespace tdledger {

enum class Prerequisite : std::uint8_t {
  alternatives,
  benefits,
  drawbacks,
  risks,
  effort,
  principal,
  interest,
  component,
  competing_requirement,
  quality_attributes
};

inline constexpr std::size_t kPrerequisiteCount = 10;

inline constexpr std::array<Prerequisite, kPrerequisiteCount> kAllPrerequisites = {
    Prerequisite::alternatives, Prerequisite::benefits,  Prerequisite::drawbacks,
    Prerequisite::risks,        Prerequisite::effort,    Prerequisite::principal,
    Prerequisite::interest,     Prerequisite::component, Prerequisite::competing_requirement,
    Prerequisite::quality_attributes};

// 1-based, as numbered on the questionnaire.
constexpr int prerequisite_index(Prerequisite p) { return static_cast<int>(p) + 1; }

constexpr std::string_view to_string(Prerequisite p) {
  constexpr std::array<std::string_view, kPrerequisiteCount> names = {
      "alternatives", "benefits",  "drawbacks", "risks",     "effort",
      "principal",    "interest",  "component", "competing_requirement",
      "quality_attributes"};
  return names[static_cast<std::size_t>(p)];
}

inline Prerequisite prerequisite_from_string(std::string_view s) {
  for (auto p : kAllPrerequisites) {
    if (normalize_token(to_string(p)) == normalize_token(s)) return p;
  }
  throw Error(errc::unknown_label, "unknown prerequisite '" + std::string(s) + "'");
}

enum class PrerequisiteCategory : std::uint8_t {
  comparing_solutions,
  evaluating_costs,
  considering_consequences
};

inline constexpr std::array<PrerequisiteCategory, 3> kAllCategories = {
    PrerequisiteCategory::comparing_solutions, PrerequisiteCategory::evaluating_costs,
    PrerequisiteCategory::considering_consequences};

constexpr std::string_view to_string(PrerequisiteCategory c) {
  switch (c) {
    case PrerequisiteCategory::comparing_solutions: return "comparing_solutions";
    case PrerequisiteCategory::evaluating_costs: return "evaluating_costs";
    default: return "considering_consequences";
  }
}

constexpr PrerequisiteCategory category_of(Prerequisite p) {
  switch (p) {
    case Prerequisite::alternatives:
    case Prerequisite::benefits:
    case Prerequisite::drawbacks:
    case Prerequisite::risks: return PrerequisiteCategory::comparing_solutions;
    case Prerequisite::effort:
    case Prerequisite::principal:
    case Prerequisite::interest: return PrerequisiteCategory::evaluating_costs;
    default: return PrerequisiteCategory::considering_consequences;
  }
}

using Answers = std::array<bool, kPrerequisiteCount>;       // indexed by Prerequisite
using QuestionOrder = std::array<int, kPrerequisiteCount>;  // permutation of 1..10

struct SagatResponse {
  int interruption = 1;  // 1-based index into the session's interruptions
  std::string participant;
  Answers answers{};
  QuestionOrder question_order{};

  bool operator==(const SagatResponse&) const = default;
};

struct MeetingSession {
  std::string meeting_id;
  Date date{};
  Timestamp start{};
  Timestamp end{};
  std::uint64_t seed = 0;
  std::vector<Timestamp> interruptions;
  std::vector<SagatResponse> responses;
};

// ---------------------------------------------------------------------------
// Randomness. mt19937_64 output is fully specified by the standard; the
// helpers below avoid the implementation-defined std distributions so that
// schedules are reproducible across toolchains.

namespace detail {

// Uniform integer in [0, n) by rejection.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = 0;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

inline constexpr std::chrono::seconds kMinMeetingLength{10 * 60};
inline constexpr std::chrono::seconds kWarmUp{5 * 60};
inline constexpr std::chrono::seconds kCoolDown{2 * 60};
inline constexpr std::chrono::seconds kMinGap{5 * 60};

// Two or three interruptions (equally likely), uniformly placed strictly
// inside (start + warm-up, end - cool-down) with pairwise gaps of at least
// five minutes. When the window is too narrow for that gap, the gap shrinks
// to what fits.
inline std::vector<Timestamp> schedule_interruptions(Timestamp start, Timestamp end,
                                                     std::uint64_t seed) {
  if (end - start < kMinMeetingLength) {
    throw Error(errc::meeting_too_short, "meeting must last at least 10 minutes");
  }
  std::mt19937_64 rng(seed);
  const int k = 2 + static_cast<int>(detail::uniform_below(rng, 2));
  const Timestamp lo = start + kWarmUp;
  const std::int64_t window = (end - kCoolDown - lo).count();  // seconds, >= 180
  const std::int64_t gap = std::min<std::int64_t>(kMinGap.count(), (window - 2) / (k - 1));
  // Offsets q_1 <= ... <= q_k drawn uniformly from [1, window-1-(k-1)gap];
  // p_i = q_i + i*gap then has gaps >= gap and lies in (0, window).
  const std::int64_t span = window - 1 - (k - 1) * gap;
  std::vector<std::int64_t> q(static_cast<std::size_t>(k));
  for (auto& v : q) v = 1 + static_cast<std::int64_t>(detail::uniform_below(rng, static_cast<std::uint64_t>(span)));
  std::sort(q.begin(), q.end());
  std::vector<Timestamp> out;
  for (int i = 0; i < k; ++i) {
    out.push_back(lo + std::chrono::seconds{q[static_cast<std::size_t>(i)] + i * gap});
  }
  return out;
}

// Fisher-Yates permutation of the ten question numbers, derived from the
// session seed, the interruption and the participant.
inline QuestionOrder make_question_order(std::uint64_t seed, int interruption,
                                         std::string_view participant) {
  std::uint64_t h = detail::fnv1a(participant);
  h ^= seed + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  h ^= static_cast<std::uint64_t>(interruption) * 0xbf58476d1ce4e5b9ull;
  std::mt19937_64 rng(h);
  QuestionOrder order{};
  std::iota(order.begin(), order.end(), 1);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    std::swap(order[i], order[detail::uniform_below(rng, i + 1)]);
  }
  return order;
}

inline bool is_permutation_of_questions(const QuestionOrder& order) {
  QuestionOrder sorted = order;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 10; ++i) {
    if (sorted[static_cast<std::size_t>(i)] != i + 1) return false;
  }
  return true;
}

inline MeetingSession make_session(std::string meeting_id, Timestamp start, Timestamp end,
                                   std::uint64_t seed) {
  MeetingSession s;
  s.meeting_id = std::move(meeting_id);
  s.date = Date{std::chrono::floor<std::chrono::days>(start)};
  s.start = start;
  s.end = end;
  s.seed = seed;
  s.interruptions = schedule_interruptions(start, end, seed);
  return s;
}

// Throws on an invalid response or a repeated (participant, interruption).
inline void validate_response(const MeetingSession& s, const SagatResponse& r) {
  if (r.participant.empty()) {
    throw Error(errc::validation_failed, "participant is empty", {"participant"});
  }
  if (r.interruption < 1 || static_cast<std::size_t>(r.interruption) > s.interruptions.size()) {
    throw Error(errc::validation_failed,
                "interruption " + std::to_string(r.interruption) + " does not exist in session",
                {"interruption"});
  }
  if (!is_permutation_of_questions(r.question_order)) {
    throw Error(errc::validation_failed, "question_order is not a permutation of 1..10",
                {"question_order"});
  }
  for (const auto& prev : s.responses) {
    if (prev.participant == r.participant && prev.interruption == r.interruption) {
      throw Error(errc::duplicate_response,
                  "participant '" + r.participant + "' already answered interruption " +
                      std::to_string(r.interruption));
    }
  }
}

inline void add_response(MeetingSession& s, SagatResponse r) {
  validate_response(s, r);
  s.responses.push_back(std::move(r));
}

// Answers arrive either as an array of ten booleans in prerequisite order or
// as an object keyed by prerequisite name.
inline Answers answers_from_json(const nlohmann::json& j) {
  Answers a{};
  std::array<bool, kPrerequisiteCount> seen{};
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size() && i < kPrerequisiteCount; ++i) {
      if (!j[i].is_boolean()) {
        throw Error(errc::validation_failed,
                    std::string(to_string(kAllPrerequisites[i])) + " answer must be yes/no",
                    {std::string(to_string(kAllPrerequisites[i]))});
      }
      a[i] = j[i].get<bool>();
      seen[i] = true;
    }
    if (j.size() > kPrerequisiteCount) {
      throw Error(errc::validation_failed, "more than ten answers", {"answers"});
    }
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto p = prerequisite_from_string(it.key());
      const auto i = static_cast<std::size_t>(p);
      if (!it->is_boolean()) {
        throw Error(errc::validation_failed, it.key() + " answer must be yes/no", {it.key()});
      }
      a[i] = it->get<bool>();
      seen[i] = true;
    }
  } else {
    throw Error(errc::validation_failed, "answers must be an array or object", {"answers"});
  }
  for (std::size_t i = 0; i < kPrerequisiteCount; ++i) {
    if (!seen[i]) {
      const std::string key(to_string(kAllPrerequisites[i]));
      throw Error(errc::missing_answer, key + " unanswered", {key});
    }
  }
  return a;
}

inline nlohmann::json answers_to_json(const Answers& a) {
  nlohmann::json j = nlohmann::json::object();
  for (auto p : kAllPrerequisites) j[std::string(to_string(p))] = a[static_cast<std::size_t>(p)];
  return j;
}

inline nlohmann::json to_json(const SagatResponse& r) {
  return {{"interruption", r.interruption},
          {"participant", r.participant},
          {"answers", answers_to_json(r.answers)},
          {"question_order", r.question_order}};
}

inline nlohmann::json to_json(const MeetingSession& s) {
  nlohmann::json interruptions = nlohmann::json::array();
  for (auto t : s.interruptions) interruptions.push_back(format_timestamp(t));
  nlohmann::json responses = nlohmann::json::array();
  for (const auto& r : s.responses) responses.push_back(to_json(r));
  return {{"meeting_id", s.meeting_id},   {"date", format_date(s.date)},
          {"start", format_timestamp(s.start)}, {"end", format_timestamp(s.end)},
          {"seed", s.seed},               {"interruptions", interruptions},
          {"responses", responses}};
}

// Reads a stored session. Interruptions are taken as recorded; responses
// are validated as if submitted in order.
inline MeetingSession session_from_json(const nlohmann::json& j) {
  MeetingSession s;
  s.meeting_id = j.at("meeting_id").get<std::string>();
  s.start = parse_timestamp(j.at("start").get<std::string>());
  s.end = parse_timestamp(j.at("end").get<std::string>());
  s.date = j.contains("date") ? parse_date(j.at("date").get<std::string>())
                              : Date{std::chrono::floor<std::chrono::days>(s.start)};
  s.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("interruptions")) {
    for (const auto& t : j.at("interruptions")) s.interruptions.push_back(parse_timestamp(t.get<std::string>()));
  } else {
    s.interruptions = schedule_interruptions(s.start, s.end, s.seed);
  }
  if (s.interruptions.size() < 2 || s.interruptions.size() > 3 ||
      !std::is_sorted(s.interruptions.begin(), s.interruptions.end())) {
    throw Error(errc::validation_failed, "session needs 2-3 sorted interruptions", {"interruptions"});
  }
  for (auto t : s.interruptions) {
    if (!(t > s.start && t < s.end)) {
      throw Error(errc::validation_failed, "interruption outside the meeting", {"interruptions"});
    }
  }
  for (const auto& rj : j.value("responses", nlohmann::json::array())) {
    SagatResponse r;
    r.interruption = rj.at("interruption").get<int>();
    r.participant = rj.at("participant").get<std::string>();
    r.answers = answers_from_json(rj.at("answers"));
    r.question_order = rj.contains("question_order")
                           ? rj.at("question_order").get<QuestionOrder>()
                           : make_question_order(s.seed, r.interruption, r.participant);
    add_response(s, std::move(r));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Aggregation

struct SagatAggregate {
  std::string meeting_id;
  std::size_t responses = 0;
  std::array<double, kPrerequisiteCount> per_prerequisite{};  // yes fraction
  std::map<PrerequisiteCategory, double> per_category;        // pooled yes fraction
};

inline SagatAggregate sagat_aggregate(const MeetingSession& s) {
  if (s.responses.empty()) {
    throw Error(errc::empty_session, "session '" + s.meeting_id + "' has no responses");
  }
  SagatAggregate agg;
  agg.meeting_id = s.meeting_id;
  agg.responses = s.responses.size();
  std::array<std::size_t, kPrerequisiteCount> yes{};
  for (const auto& r : s.responses) {
    for (std::size_t i = 0; i < kPrerequisiteCount; ++i) yes[i] += r.answers[i] ? 1 : 0;
  }
  std::map<PrerequisiteCategory, std::pair<std::size_t, std::size_t>> pooled;
  for (auto p : kAllPrerequisites) {
    const auto i = static_cast<std::size_t>(p);
    agg.per_prerequisite[i] = static_cast<double>(yes[i]) / static_cast<double>(agg.responses);
    auto& [y, n] = pooled[category_of(p)];
    y += yes[i];
    n += agg.responses;
  }
  for (const auto& [c, yn] : pooled) {
    agg.per_category[c] = static_cast<double>(yn.first) / static_cast<double>(yn.second);
  }
  return agg;
}

inline nlohmann::json to_json(const SagatAggregate& a) {
  nlohmann::json per = nlohmann::json::object(), cat = nlohmann::json::object();
  for (auto p : kAllPrerequisites) {
    per[std::string(to_string(p))] = a.per_prerequisite[static_cast<std::size_t>(p)];
  }
  for (const auto& [c, v] : a.per_category) cat[std::string(to_string(c))] = v;
  return {{"meeting_id", a.meeting_id},
          {"responses", a.responses},
          {"prerequisites", per},
          {"categories", cat}};
}

inline double mean_responses_per_session(const std::vector<MeetingSession>& sessions) {
  if (sessions.empty()) return 0;
  std::size_t n = 0;
  for (const auto& s : sessions) n += s.responses.size();
  return static_cast<double>(n) / static_cast<double>(sessions.size());
}

// ---------------------------------------------------------------------------
// Observation protocol

struct ObservationRow {
  std::string meeting_id;
  std::string ticket_id;
  TicketKind ticket_kind = TicketKind::task;
  bool team_says_td = false;
  bool researcher_says_td = false;
  bool risk_unconscious_td = false;
  bool intentional_td = false;
  std::array<bool, kPrerequisiteCount> discussed{};
  bool discussed_contagiousness = false;
  std::string remark;

  bool operator==(const ObservationRow&) const = default;
};

// Observable names: the ten prerequisites plus "contagiousness".
inline constexpr const char* kContagiousness = "contagiousness";

// These use the meeting's TD tickets as the base.
inline bool is_td_observable(std::string_view name) {
  return name == "interest" || name == kContagiousness || name == "competing_requirement";
}

inline std::vector<std::string> observation_columns() {
  std::vector<std::string> cols = {"meeting_id",         "ticket_id",          "ticket_kind",
                                   "team_says_td",       "researcher_says_td", "risk_unconscious_td",
                                   "intentional_td"};
  for (auto p : kAllPrerequisites) cols.emplace_back(to_string(p));
  cols.emplace_back(kContagiousness);
  cols.emplace_back("remark");
  return cols;
}

inline std::vector<ObservationRow> import_observations_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  std::vector<ObservationRow> out;
  if (rows.empty()) return out;
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[rows[0][i]] = i;
  for (const auto& c : observation_columns()) {
    if (c != "remark" && !col.count(c)) {
      throw Error(errc::missing_column, "observation protocol lacks column '" + c + "'", {c});
    }
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != rows[0].size()) {
      throw Error(errc::parse_error, "observation row " + std::to_string(r) + " has wrong width");
    }
    auto cell = [&](const std::string& c) -> const std::string& { return row[col.at(c)]; };
    ObservationRow o;
    o.meeting_id = cell("meeting_id");
    o.ticket_id = cell("ticket_id");
    o.ticket_kind = kind_from_string(cell("ticket_kind"));
    o.team_says_td = parse_bool(cell("team_says_td"), "team_says_td");
    o.researcher_says_td = parse_bool(cell("researcher_says_td"), "researcher_says_td");
    o.risk_unconscious_td = parse_bool(cell("risk_unconscious_td"), "risk_unconscious_td");
    o.intentional_td = parse_bool(cell("intentional_td"), "intentional_td");
    for (auto p : kAllPrerequisites) {
      const std::string name(to_string(p));
      o.discussed[static_cast<std::size_t>(p)] = parse_bool(cell(name), name);
    }
    o.discussed_contagiousness = parse_bool(cell(kContagiousness), kContagiousness);
    if (col.count("remark")) o.remark = cell("remark");
    out.push_back(std::move(o));
  }
  return out;
}

inline std::string export_observations_csv(const std::vector<ObservationRow>& rows) {
  std::vector<csv::Row> out{observation_columns()};
  for (const auto& o : rows) {
    csv::Row r = {o.meeting_id,
                  o.ticket_id,
                  std::string(to_string(o.ticket_kind)),
                  format_bool(o.team_says_td),
                  format_bool(o.researcher_says_td),
                  format_bool(o.risk_unconscious_td),
                  format_bool(o.intentional_td)};
    for (auto p : kAllPrerequisites) r.push_back(format_bool(o.discussed[static_cast<std::size_t>(p)]));
    r.push_back(format_bool(o.discussed_contagiousness));
    r.push_back(o.remark);
    out.push_back(std::move(r));
  }
  return csv::write(out);
}

struct ObservationAggregate {
  std::string meeting_id;
  std::size_t tickets = 0;
  std::size_t td_tickets = 0;
  // Observable -> fraction; nullopt when the base is zero (no TD tickets).
  std::map<std::string, std::optional<double>> observables;
  std::map<PrerequisiteCategory, std::optional<double>> categories;
};

// Rows of a single meeting.
inline ObservationAggregate observation_aggregate(const std::vector<ObservationRow>& rows) {
  if (rows.empty()) throw Error(errc::invalid_argument, "no observation rows");
  ObservationAggregate agg;
  agg.meeting_id = rows.front().meeting_id;
  agg.tickets = rows.size();
  for (const auto& r : rows) agg.td_tickets += r.ticket_kind == TicketKind::td ? 1 : 0;

  auto count = [&](auto&& pred, bool td_only) {
    std::size_t n = 0;
    for (const auto& r : rows) {
      if (td_only && r.ticket_kind != TicketKind::td) continue;
      n += pred(r) ? 1 : 0;
    }
    return n;
  };
  std::map<PrerequisiteCategory, std::pair<std::size_t, std::size_t>> pooled;
  for (auto p : kAllPrerequisites) {
    const std::string name(to_string(p));
    const bool td_base = is_td_observable(name);
    const std::size_t base = td_base ? agg.td_tickets : agg.tickets;
    const auto i = static_cast<std::size_t>(p);
    const std::size_t hits = count([i](const ObservationRow& r) { return r.discussed[i]; }, td_base);
    if (base == 0) {
      agg.observables[name] = std::nullopt;
      continue;
    }
    agg.observables[name] = static_cast<double>(hits) / static_cast<double>(base);
    auto& [h, b] = pooled[category_of(p)];
    h += hits;
    b += base;
  }
  agg.observables[kContagiousness] =
      agg.td_tickets == 0
          ? std::nullopt
          : std::optional<double>(
                static_cast<double>(count([](const ObservationRow& r) { return r.discussed_contagiousness; }, true)) /
                static_cast<double>(agg.td_tickets));
  for (auto c : kAllCategories) {
    auto it = pooled.find(c);
    agg.categories[c] = it == pooled.end() || it->second.second == 0
                            ? std::nullopt
                            : std::optional<double>(static_cast<double>(it->second.first) /
                                                    static_cast<double>(it->second.second));
  }
  return agg;
}

// Groups by meeting, in first-appearance order.
inline std::vector<std::vector<ObservationRow>> group_by_meeting(const std::vector<ObservationRow>& rows) {
  std::vector<std::vector<ObservationRow>> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    auto [it, inserted] = index.try_emplace(r.meeting_id, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(r);
  }
  return groups;
}

inline nlohmann::json to_json(const ObservationAggregate& a) {
  nlohmann::json obs = nlohmann::json::object(), cat = nlohmann::json::object();
  for (const auto& [k, v] : a.observables) obs[k] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  for (const auto& [c, v] : a.categories) {
    cat[std::string(to_string(c))] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  }
  return {{"meeting_id", a.meeting_id}, {"tickets", a.tickets}, {"td_tickets", a.td_tickets},
          {"observables", obs},         {"categories", cat}};
}

struct DisputeStats {
  std::string meeting_id;
  std::size_t tickets = 0;
  double disagreement = 0;     // team vs researcher TD identification
  double risk_unconscious = 0;
};

inline std::vector<DisputeStats> identification_dispute(const std::vector<ObservationRow>& rows) {
  if (rows.empty()) throw Error(errc::invalid_argument, "no observation rows");
  std::vector<DisputeStats> out;
  for (const auto& g : group_by_meeting(rows)) {
    DisputeStats d;
    d.meeting_id = g.front().meeting_id;
    d.tickets = g.size();
    std::size_t dis = 0, risk = 0;
    for (const auto& r : g) {
      dis += r.team_says_td != r.researcher_says_td ? 1 : 0;
      risk += r.risk_unconscious_td ? 1 : 0;
    }
    d.disagreement = static_cast<double>(dis) / static_cast<double>(d.tickets);
    d.risk_unconscious = static_cast<double>(risk) / static_cast<double>(d.tickets);
    out.push_back(d);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Workshop questionnaire: the same ten questions are asked once framed as
// TD incurrence and once as TD repayment. Solution-level prerequisites come
// from the incurrence framing, TD-item-level ones from the repayment framing.

inline bool answered_under_repayment(Prerequisite p) {
  return p == Prerequisite::principal || p == Prerequisite::interest ||
         p == Prerequisite::component || p == Prerequisite::quality_attributes;
}

// Questionnaire label ("1a".."10a") for a prerequisite. The questionnaire
// asks about competing requirements (8a) before components (9a), the reverse
// of the prerequisite numbering.
inline std::string question_id(Prerequisite p) {
  if (p == Prerequisite::component) return "9a";
  if (p == Prerequisite::competing_requirement) return "8a";
  return std::to_string(prerequisite_index(p)) + "a";
}

inline Answers merge_questionnaire(const std::map<Prerequisite, bool>& incurrence,
                                   const std::map<Prerequisite, bool>& repayment) {
  Answers merged{};
  for (auto p : kAllPrerequisites) {
    const auto& source = answered_under_repayment(p) ? repayment : incurrence;
    auto it = source.find(p);
    if (it == source.end()) {
      const std::string key(to_string(p));
      throw Error(errc::missing_answer, key + " unanswered (question " + question_id(p) + ")", {key});
    }
    merged[static_cast<std::size_t>(p)] = it->second;
  }
  return merged;
}

}  // namespace tdledger
