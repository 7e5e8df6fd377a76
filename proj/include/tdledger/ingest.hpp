#pragma once

// Tracker-export import and canonical export. Imports are row tolerant:
// rows that cannot be parsed are skipped and reported, rows that parse but
// violate ticket invariants are imported and reported.

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdledger/codec.hpp"
#include "tdledger/csv.hpp"

namespace tdledger {

struct FieldMapping {
  std::string name = "canonical";
  std::map<std::string, std::string> columns;  // source column -> canonical field
  // canonical field -> (source value -> canonical value)
  std::map<std::string, std::map<std::string, std::string>> values;
  std::string date_format = "iso";

  // Missing mandatory targets, empty when the mapping is usable.
  std::vector<std::string> unmapped_mandatory() const {
    std::set<std::string> targets;
    for (const auto& [src, dst] : columns) targets.insert(dst);
    std::vector<std::string> missing;
    for (const auto& f : mandatory_fields()) {
      if (!targets.count(f)) missing.push_back(f);
    }
    return missing;
  }

  void check() const {
    for (const auto& [src, dst] : columns) {
      if (!is_canonical_field(dst)) {
        throw Error(errc::invalid_mapping, "mapping targets unknown field '" + dst + "'", {dst});
      }
    }
    if (auto m = unmapped_mandatory(); !m.empty()) {
      throw Error(errc::invalid_mapping, "mapping lacks mandatory field '" + m.front() + "'", m);
    }
  }

  static FieldMapping canonical() {
    FieldMapping m;
    for (const auto& f : canonical_fields()) m.columns[f] = f;
    return m;
  }

  static FieldMapping from_json(const nlohmann::json& j) {
    FieldMapping m;
    m.name = j.value("name", std::string("custom"));
    m.date_format = j.value("date_format", std::string("iso"));
    if (j.contains("columns")) m.columns = j.at("columns").get<std::map<std::string, std::string>>();
    if (j.contains("values")) {
      m.values = j.at("values").get<std::map<std::string, std::map<std::string, std::string>>>();
    }
    m.check();
    return m;
  }

  nlohmann::json to_json() const {
    return {{"name", name}, {"columns", columns}, {"values", values}, {"date_format", date_format}};
  }
};

namespace presets {

inline const std::map<std::string, std::string>& level_dictionary() {
  static const std::map<std::string, std::string> d = {
      {"1 - Very Low", "very_low"}, {"2 - Low", "low"},         {"3 - Medium", "medium"},
      {"4 - High", "high"},         {"5 - Very High", "very_high"}};
  return d;
}

inline FieldMapping azure_devops() {
  FieldMapping m;
  m.name = "azure-devops";
  m.columns = {{"ID", "id"},
               {"Title", "title"},
               {"Work Item Type", "kind"},
               {"State", "status"},
               {"Area Path", "component"},
               {"Parent", "parent"},
               {"Created Date", "created_at"},
               {"Closed Date", "closed_at"},
               {"Talked About TD", "talked_about_td"},
               {"Alternatives", "alternatives"},
               {"Benefits", "benefits"},
               {"Drawbacks", "drawbacks"},
               {"Risks", "risks"},
               {"Interest", "interest"},
               {"Interest Probability", "interest_probability"},
               {"Contagious", "contagious"},
               {"Breaking Change", "breaking_change"},
               {"Effort", "effort_person_days"},
               {"Effort Scale", "effort_scale"},
               {"Educated Guess", "educated_guess"},
               {"TD Type", "td_type"},
               {"Re-Submission Date", "re_submission_date"},
               {"Interest Scenario", "interest_scenario"}};
  m.values["kind"] = {{"Technical Debt", "td"},
                      {"User Story", "user_story"},
                      {"Product Backlog Item", "user_story"},
                      {"Epic", "epic"},
                      {"Feature", "feature"},
                      {"Task", "task"},
                      {"Bug", "bug"},
                      {"Initiative", "initiative"}};
  m.values["status"] = {{"New", "backlog"},         {"Proposed", "in_proposal"},
                        {"Approved", "in_proposal"}, {"Committed", "planned"},
                        {"Active", "in_progress"},   {"Blocked", "blocked"},
                        {"Resolved", "testing"},     {"Closed", "done"},
                        {"Done", "done"}};
  for (const char* f : {"interest", "interest_probability", "educated_guess"}) {
    m.values[f] = level_dictionary();
  }
  m.date_format = "%m/%d/%Y %H:%M:%S";
  return m;
}

inline FieldMapping jira() {
  FieldMapping m;
  m.name = "jira";
  m.columns = {{"Issue key", "id"},
               {"Summary", "title"},
               {"Issue Type", "kind"},
               {"Status", "status"},
               {"Component/s", "component"},
               {"Parent id", "parent"},
               {"Created", "created_at"},
               {"Resolved", "closed_at"},
               {"Custom field (Talked About TD)", "talked_about_td"},
               {"Custom field (Alternatives)", "alternatives"},
               {"Custom field (Benefits)", "benefits"},
               {"Custom field (Drawbacks)", "drawbacks"},
               {"Custom field (Risks)", "risks"},
               {"Custom field (Interest)", "interest"},
               {"Custom field (Interest Probability)", "interest_probability"},
               {"Custom field (Contagious)", "contagious"},
               {"Custom field (Breaking Change)", "breaking_change"},
               {"Custom field (Effort)", "effort_person_days"},
               {"Custom field (Effort Scale)", "effort_scale"},
               {"Custom field (Educated Guess)", "educated_guess"},
               {"Custom field (TD Type)", "td_type"},
               {"Custom field (Re-Submission Date)", "re_submission_date"},
               {"Custom field (Interest Scenario)", "interest_scenario"}};
  m.values["kind"] = {{"Technical Debt", "td"}, {"Story", "user_story"}, {"Sub-task", "task"},
                      {"Task", "task"},         {"Bug", "bug"},          {"Epic", "epic"},
                      {"Initiative", "initiative"}, {"Feature", "feature"}};
  m.values["status"] = {{"To Do", "backlog"},       {"Open", "backlog"},
                        {"In Proposal", "in_proposal"},
                        {"Selected for Development", "planned"},
                        {"In Progress", "in_progress"},
                        {"Blocked", "blocked"},     {"In Review", "testing"},
                        {"Testing", "testing"},     {"Done", "done"},
                        {"Closed", "done"}};
  m.date_format = "%Y-%m-%d %H:%M";
  return m;
}

}  // namespace presets

inline FieldMapping mapping_preset(std::string_view name) {
  if (name == "canonical") return FieldMapping::canonical();
  if (name == "azure-devops") return presets::azure_devops();
  if (name == "jira") return presets::jira();
  throw Error(errc::invalid_argument, "unknown mapping preset '" + std::string(name) + "'");
}

// Preset name or path to a JSON mapping document.
inline FieldMapping load_mapping(const std::string& name_or_path) {
  if (name_or_path == "canonical" || name_or_path == "azure-devops" || name_or_path == "jira") {
    return mapping_preset(name_or_path);
  }
  std::ifstream in(name_or_path);
  if (!in) throw Error(errc::io_error, "cannot read mapping file '" + name_or_path + "'");
  try {
    return FieldMapping::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::invalid_mapping, std::string("malformed mapping: ") + e.what());
  }
}

struct ImportResult {
  std::vector<Ticket> tickets;
  ValidationReport report;
};

enum class ExportFormat { csv, json };

inline ExportFormat format_for_path(const std::filesystem::path& p) {
  return p.extension() == ".json" ? ExportFormat::json : ExportFormat::csv;
}

namespace detail {

struct RawRow {
  std::size_t row = 0;
  std::map<std::string, std::string> cells;
};

inline std::string extra_key(const std::string& column) {
  return column.rfind("extra.", 0) == 0 ? column.substr(6) : column;
}

inline void convert_rows(const std::vector<RawRow>& rows, const FieldMapping& mapping,
                         ImportResult& out) {
  std::set<std::string> seen_ids;
  for (const auto& raw : rows) {
    Record rec;
    std::map<std::string, std::string> extra;
    for (const auto& [col, value] : raw.cells) {
      auto it = mapping.columns.find(col);
      if (it == mapping.columns.end()) {
        // Empty cells are indistinguishable from "no such key" in a CSV union header.
        if (!value.empty()) extra[extra_key(col)] = value;
        continue;
      }
      std::string v = value;
      if (auto dict = mapping.values.find(it->second); dict != mapping.values.end()) {
        if (auto hit = dict->second.find(v); hit != dict->second.end()) v = hit->second;
      }
      rec[it->second] = std::move(v);
    }
    const std::string id = rec.count("id") ? rec["id"] : std::string{};
    try {
      Ticket t = from_record(rec, mapping.date_format);
      t.extra = std::move(extra);
      if (!seen_ids.insert(t.id).second) {
        out.report.push_back({t.id, "id", "duplicate ticket id, row skipped", raw.row});
        continue;
      }
      if (t.kind != TicketKind::td && any_td_value(rec)) {
        out.report.push_back(
            {t.id, "td", "td attributes on non-td kind (ignored)", raw.row});
      }
      for (auto v : validate_ticket(t)) {
        v.row = raw.row;
        out.report.push_back(std::move(v));
      }
      out.tickets.push_back(std::move(t));
    } catch (const Error& e) {
      const std::string field = e.fields().empty() ? std::string{} : e.fields().front();
      out.report.push_back({id, field, std::string(e.what()) + " (row skipped)", raw.row});
    }
  }
}

}  // namespace detail

inline ImportResult import_csv_text(std::string_view text, const FieldMapping& mapping) {
  mapping.check();
  ImportResult out;
  const auto rows = csv::parse(text);
  if (rows.empty()) return out;
  const auto& header = rows.front();
  {
    std::set<std::string> mapped;
    for (const auto& col : header) {
      if (auto it = mapping.columns.find(col); it != mapping.columns.end()) mapped.insert(it->second);
    }
    for (const auto& f : mandatory_fields()) {
      if (!mapped.count(f)) {
        throw Error(errc::missing_column, "missing mandatory column for '" + f + "'", {f});
      }
    }
  }
  std::vector<detail::RawRow> raw;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    detail::RawRow r;
    r.row = i;
    if (rows[i].size() != header.size()) {
      out.report.push_back({"", "", "row has " + std::to_string(rows[i].size()) +
                                        " fields, header has " + std::to_string(header.size()) +
                                        " (row skipped)",
                            i});
      continue;
    }
    for (std::size_t c = 0; c < header.size(); ++c) r.cells[header[c]] = rows[i][c];
    raw.push_back(std::move(r));
  }
  detail::convert_rows(raw, mapping, out);
  return out;
}

inline ImportResult import_json_text(std::string_view text, const FieldMapping& mapping) {
  mapping.check();
  ImportResult out;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(errc::parse_error, std::string("malformed JSON export: ") + e.what());
  }
  if (!doc.is_array()) throw Error(errc::parse_error, "JSON export must be an array of records");
  std::vector<detail::RawRow> raw;
  std::size_t i = 0;
  for (const auto& obj : doc) {
    ++i;
    if (!obj.is_object()) {
      out.report.push_back({"", "", "record is not an object (row skipped)", i});
      continue;
    }
    detail::RawRow r;
    r.row = i;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (it.key() == "extra" && it->is_object()) {
        for (auto e = it->begin(); e != it->end(); ++e) {
          r.cells["extra." + e.key()] = json_scalar_to_string(*e);
        }
      } else {
        r.cells[it.key()] = json_scalar_to_string(*it);
      }
    }
    raw.push_back(std::move(r));
  }
  detail::convert_rows(raw, mapping, out);
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(errc::io_error, "cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error(errc::io_error, "write failed for '" + path.string() + "'");
}

inline ImportResult import_export_file(const std::filesystem::path& path,
                                       const FieldMapping& mapping) {
  const std::string text = read_file(path);
  return format_for_path(path) == ExportFormat::json ? import_json_text(text, mapping)
                                                     : import_csv_text(text, mapping);
}

inline std::string export_csv(const std::vector<Ticket>& tickets) {
  std::set<std::string> extra_keys;
  for (const auto& t : tickets) {
    for (const auto& [k, v] : t.extra) extra_keys.insert(k);
  }
  std::vector<csv::Row> rows;
  csv::Row header = canonical_fields();
  for (const auto& k : extra_keys) header.push_back("extra." + k);
  rows.push_back(header);
  for (const auto& t : tickets) {
    const Record r = to_record(t);
    csv::Row row;
    for (const auto& f : canonical_fields()) row.push_back(r.at(f));
    for (const auto& k : extra_keys) {
      auto it = t.extra.find(k);
      row.push_back(it == t.extra.end() ? "" : it->second);
    }
    rows.push_back(std::move(row));
  }
  return csv::write(rows);
}

inline std::string export_json(const std::vector<Ticket>& tickets) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tickets) arr.push_back(to_json(t));
  return arr.dump(2) + "\n";
}

inline std::string export_tickets(const std::vector<Ticket>& tickets, ExportFormat format) {
  return format == ExportFormat::json ? export_json(tickets) : export_csv(tickets);
}

inline void export_tickets(const std::vector<Ticket>& tickets, ExportFormat format,
                           const std::filesystem::path& path) {
  write_file(path, export_tickets(tickets, format));
}

}  // namespace tdledger
