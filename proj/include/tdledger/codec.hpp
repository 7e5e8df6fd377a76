#pragma once

// Canonical flat-record view of a ticket. Import, export, the change log and
// the HTTP layer all read and write tickets through these records, so a
// field has exactly one textual form everywhere.

#include <charconv>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdledger/core.hpp"

namespace tdledger {

using Record = std::map<std::string, std::string>;

inline const std::vector<std::string>& canonical_fields() {
  static const std::vector<std::string> fields = {
      "id",          "title",           "kind",         "status",
      "component",   "parent",          "created_at",   "closed_at",
      "deleted",     "talked_about_td", "alternatives", "benefits",
      "drawbacks",   "risks",           "interest",     "interest_probability",
      "contagious",  "breaking_change", "effort_person_days",
      "effort_scale", "educated_guess", "td_type",      "re_submission_date",
      "interest_scenario", "version"};
  return fields;
}

inline const std::vector<std::string>& mandatory_fields() {
  static const std::vector<std::string> fields = {"id", "title", "kind", "status", "created_at"};
  return fields;
}

inline const std::vector<std::string>& td_fields() {
  static const std::vector<std::string> fields = {
      "interest",       "interest_probability", "contagious",        "breaking_change",
      "effort_person_days", "effort_scale",     "educated_guess",    "td_type",
      "re_submission_date", "interest_scenario"};
  return fields;
}

inline bool is_canonical_field(std::string_view name) {
  for (const auto& f : canonical_fields()) {
    if (f == name) return true;
  }
  return false;
}

inline bool is_td_field(std::string_view name) {
  for (const auto& f : td_fields()) {
    if (f == name) return true;
  }
  return false;
}

// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline double parse_number(std::string_view s, const std::string& field) {
  std::string_view t = s;
  while (!t.empty() && t.front() == ' ') t.remove_prefix(1);
  while (!t.empty() && t.back() == ' ') t.remove_suffix(1);
  std::string buf(t);
  for (auto& c : buf) {
    if (c == ',') c = '.';  // decimal comma from localized exports
  }
  double v = 0;
  auto [p, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{} || p != buf.data() + buf.size() || buf.empty()) {
    throw Error(errc::parse_error, field + ": not a number '" + std::string(s) + "'", {field});
  }
  return v;
}

inline bool parse_bool(std::string_view s, const std::string& field) {
  const auto key = normalize_token(s);
  if (key.empty() || key == "false" || key == "no" || key == "n" || key == "0" ||
      key == "unchecked") {
    return false;
  }
  if (key == "true" || key == "yes" || key == "y" || key == "1" || key == "x" ||
      key == "checked") {
    return true;
  }
  throw Error(errc::parse_error, field + ": not a boolean '" + std::string(s) + "'", {field});
}

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

inline Record to_record(const Ticket& t) {
  Record r;
  r["id"] = t.id;
  r["title"] = t.title;
  r["kind"] = std::string(to_string(t.kind));
  r["status"] = std::string(to_string(t.status));
  r["component"] = t.component.str();
  r["parent"] = t.parent.value_or("");
  r["created_at"] = format_timestamp(t.created_at);
  r["closed_at"] = t.closed_at ? format_timestamp(*t.closed_at) : "";
  r["deleted"] = format_bool(t.deleted);
  r["talked_about_td"] = format_bool(t.talked_about_td);
  r["alternatives"] = t.notes.alternatives;
  r["benefits"] = t.notes.benefits;
  r["drawbacks"] = t.notes.drawbacks;
  r["risks"] = t.notes.risks;
  if (t.td) {
    const auto& td = *t.td;
    r["interest"] = std::string(label_of(td.interest));
    r["interest_probability"] = std::string(label_of(td.interest_probability));
    r["contagious"] = format_bool(td.contagious);
    r["breaking_change"] = format_bool(td.breaking_change);
    r["effort_person_days"] = format_number(td.effort_person_days);
    r["effort_scale"] = std::string(to_string(td.effort_scale));
    r["educated_guess"] = std::string(label_of(td.educated_guess));
    r["td_type"] = td.td_type;
    r["re_submission_date"] = td.re_submission_date ? format_date(*td.re_submission_date) : "";
    r["interest_scenario"] = std::string(to_string(td.interest_scenario));
  } else {
    for (const auto& f : td_fields()) r[f] = "";
  }
  r["version"] = std::to_string(t.version);
  return r;
}

namespace detail {
inline const std::string& get_or_empty(const Record& r, const std::string& key) {
  static const std::string empty;
  auto it = r.find(key);
  return it == r.end() ? empty : it->second;
}

inline bool any_td_value(const Record& r) {
  for (const auto& f : td_fields()) {
    if (!get_or_empty(r, f).empty()) return true;
  }
  return false;
}
}  // namespace detail

// Parse failures throw Error(parse_error / unknown_label) naming the field.
// TD columns on non-td kinds are ignored here; callers that care report it.
inline Ticket from_record(const Record& r, std::string_view date_pattern = "iso") {
  using detail::get_or_empty;
  Ticket t;
  for (const auto& f : mandatory_fields()) {
    if (get_or_empty(r, f).empty()) throw Error(errc::parse_error, "missing " + f, {f});
  }
  auto labelled = [&](const std::string& field, auto&& fn) {
    try {
      return fn(get_or_empty(r, field));
    } catch (const Error& e) {
      throw Error(e.code(), field + ": " + e.what(), {field});
    }
  };
  t.id = get_or_empty(r, "id");
  t.title = get_or_empty(r, "title");
  t.kind = labelled("kind", kind_from_string);
  t.status = labelled("status", status_from_string);
  t.component = ComponentPath::parse(get_or_empty(r, "component"));
  if (const auto& p = get_or_empty(r, "parent"); !p.empty()) t.parent = p;
  auto ts = [&](const std::string& field) {
    auto v = try_parse_timestamp(get_or_empty(r, field), date_pattern);
    if (!v) {
      throw Error(errc::parse_error,
                  field + ": unparseable date '" + get_or_empty(r, field) + "'", {field});
    }
    return *v;
  };
  t.created_at = ts("created_at");
  if (!get_or_empty(r, "closed_at").empty()) t.closed_at = ts("closed_at");
  t.deleted = parse_bool(get_or_empty(r, "deleted"), "deleted");
  t.talked_about_td = parse_bool(get_or_empty(r, "talked_about_td"), "talked_about_td");
  t.notes.alternatives = get_or_empty(r, "alternatives");
  t.notes.benefits = get_or_empty(r, "benefits");
  t.notes.drawbacks = get_or_empty(r, "drawbacks");
  t.notes.risks = get_or_empty(r, "risks");

  if (t.kind == TicketKind::td) {
    TdAttributes td;
    auto level = [&](const std::string& field) {
      const auto& v = get_or_empty(r, field);
      if (v.empty()) throw Error(errc::parse_error, "missing " + field, {field});
      return labelled(field, level_from_label);
    };
    td.interest = level("interest");
    td.interest_probability = level("interest_probability");
    td.educated_guess = level("educated_guess");
    td.contagious = parse_bool(get_or_empty(r, "contagious"), "contagious");
    td.breaking_change = parse_bool(get_or_empty(r, "breaking_change"), "breaking_change");
    if (get_or_empty(r, "effort_person_days").empty()) {
      throw Error(errc::parse_error, "missing effort_person_days", {"effort_person_days"});
    }
    td.effort_person_days = parse_number(get_or_empty(r, "effort_person_days"), "effort_person_days");
    if (const auto& s = get_or_empty(r, "effort_scale"); !s.empty()) {
      td.effort_scale = labelled("effort_scale", effort_scale_from_string);
    }
    td.td_type = get_or_empty(r, "td_type");
    if (const auto& d = get_or_empty(r, "re_submission_date"); !d.empty()) {
      auto date = try_parse_date(d, date_pattern);
      if (!date) {
        throw Error(errc::parse_error, "re_submission_date: unparseable date '" + d + "'",
                    {"re_submission_date"});
      }
      td.re_submission_date = *date;
    }
    if (const auto& s = get_or_empty(r, "interest_scenario"); !s.empty()) {
      td.interest_scenario = labelled("interest_scenario", scenario_from_string);
    }
    t.td = td;
  }
  if (const auto& v = get_or_empty(r, "version"); !v.empty()) {
    const double d = parse_number(v, "version");
    if (d < 1 || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
      throw Error(errc::parse_error, "version: not a positive integer '" + v + "'", {"version"});
    }
    t.version = static_cast<std::uint64_t>(d);
  }
  return t;
}

// Typed JSON object for one ticket: booleans and numbers are native, absent
// optionals are null, unknown keys live under "extra".
inline nlohmann::json to_json(const Ticket& t) {
  const Record r = to_record(t);
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : r) {
    if (!t.td && is_td_field(k)) {
      j[k] = nullptr;
    } else if (k == "deleted" || k == "talked_about_td" ||
        ((k == "contagious" || k == "breaking_change") && t.td)) {
      j[k] = v == "true";
    } else if (k == "effort_person_days" && t.td) {
      j[k] = t.td->effort_person_days;
    } else if (k == "version") {
      j[k] = t.version;
    } else if (v.empty() && k != "title" && k != "alternatives" && k != "benefits" &&
               k != "drawbacks" && k != "risks" && k != "td_type") {
      j[k] = nullptr;
    } else {
      j[k] = v;
    }
  }
  j["extra"] = t.extra;
  return j;
}

inline std::string json_scalar_to_string(const nlohmann::json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return format_bool(v.get<bool>());
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return format_number(v.get<double>());
  return v.dump();
}

inline Ticket ticket_from_json(const nlohmann::json& j) {
  Record r;
  std::map<std::string, std::string> extra;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "extra" && it->is_object()) {
      for (auto e = it->begin(); e != it->end(); ++e) extra[e.key()] = json_scalar_to_string(*e);
    } else if (is_canonical_field(it.key())) {
      r[it.key()] = json_scalar_to_string(*it);
    } else {
      extra[it.key()] = json_scalar_to_string(*it);
    }
  }
  Ticket t = from_record(r);
  t.extra = std::move(extra);
  return t;
}

}  // namespace tdledger
