#pragma once

// Append-only ticket store. Every mutation is a ChangeEvent; the current
// state is the fold of the log, and any past state is the fold of a
// timestamp-bounded prefix. Optional on-disk persistence writes the log as
// JSON lines plus periodic full snapshots in the export format.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdledger/codec.hpp"
#include "tdledger/ingest.hpp"

namespace tdledger {

inline constexpr const char* kCreateField = "@create";

struct ChangeEvent {
  std::uint64_t sequence = 0;  // global, strictly increasing
  std::string ticket_id;
  Timestamp timestamp{};
  std::string actor;
  std::string field;  // canonical field name or "@create"
  std::string old_value;
  std::string new_value;
  std::uint64_t version = 0;  // ticket version after the event

  bool operator==(const ChangeEvent&) const = default;

  nlohmann::json to_json() const {
    return {{"seq", sequence},      {"ticket", ticket_id}, {"ts", format_timestamp(timestamp)},
            {"actor", actor},       {"field", field},      {"old", old_value},
            {"new", new_value},     {"version", version}};
  }

  static ChangeEvent from_json(const nlohmann::json& j) {
    ChangeEvent e;
    e.sequence = j.value("seq", std::uint64_t{0});
    e.ticket_id = j.at("ticket").get<std::string>();
    e.timestamp = parse_timestamp(j.at("ts").get<std::string>());
    e.actor = j.value("actor", std::string{});
    e.field = j.at("field").get<std::string>();
    e.old_value = j.value("old", std::string{});
    e.new_value = j.value("new", std::string{});
    e.version = j.value("version", std::uint64_t{0});
    return e;
  }
};

struct FieldChange {
  std::string field;
  std::optional<std::string> old_value;  // optimistic value check when present
  std::string new_value;
};

struct ChangeRequest {
  std::string ticket_id;
  std::uint64_t expected_version = 0;
  std::vector<FieldChange> changes;
  std::string actor = "unknown";
  std::optional<Timestamp> timestamp;  // defaults to now
};

inline bool is_editable_field(std::string_view field) {
  if (field == "id" || field == "kind" || field == "created_at" || field == "closed_at" ||
      field == "version") {
    return false;
  }
  return is_canonical_field(field);
}

// Applies one already-validated event to a ticket. Used by live mutations and
// by replay, so both paths produce identical state.
inline void apply_event(std::map<std::string, Ticket>& state, const ChangeEvent& e) {
  if (e.field == kCreateField) {
    Ticket t = ticket_from_json(nlohmann::json::parse(e.new_value));
    t.version = e.version;
    state[e.ticket_id] = std::move(t);
    return;
  }
  Ticket& t = state.at(e.ticket_id);
  Record rec = to_record(t);
  rec[e.field] = e.new_value;
  // Status drives closure: entering done stamps closed_at, leaving clears it.
  if (e.field == "status") {
    const bool now_done = e.new_value == to_string(TicketStatus::done);
    if (now_done && !t.closed_at) rec["closed_at"] = format_timestamp(e.timestamp);
    if (!now_done) rec["closed_at"] = "";
  }
  auto extra = std::move(t.extra);
  t = from_record(rec);
  t.extra = std::move(extra);
  t.version = e.version;
}

class TicketStore {
 public:
  TicketStore() = default;

  // Opens (or creates) a store directory and replays its log.
  explicit TicketStore(std::filesystem::path dir, std::uint64_t checkpoint_interval = 500)
      : dir_(std::move(dir)), checkpoint_interval_(checkpoint_interval) {
    std::filesystem::create_directories(*dir_);
    const auto log_path = *dir_ / "events.jsonl";
    if (std::filesystem::exists(log_path)) {
      std::ifstream in(log_path);
      std::string line;
      std::size_t n = 0;
      while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
          ChangeEvent e = ChangeEvent::from_json(nlohmann::json::parse(line));
          apply_event(current_, e);
          last_ts_[e.ticket_id] = e.timestamp;
          next_seq_ = std::max(next_seq_, e.sequence + 1);
          log_.push_back(std::move(e));
        } catch (const std::exception& ex) {
          throw Error(errc::parse_error, "corrupt event log line " + std::to_string(n) + ": " +
                                             ex.what());
        }
      }
    }
  }

  TicketStore(const TicketStore&) = delete;
  TicketStore& operator=(const TicketStore&) = delete;

  const std::optional<std::filesystem::path>& directory() const { return dir_; }

  // Adds a ticket. Without history, a done ticket gets a synthesized
  // creation event at created_at (status backlog) and a closing event at
  // closed_at, so snapshots before closure see it open.
  Ticket create(Ticket t, const std::string& actor = "import") {
    std::unique_lock lock(mu_);
    if (current_.count(t.id)) {
      throw Error(errc::duplicate_ticket, "ticket '" + t.id + "' already exists", {"id"});
    }
    if (auto report = validate_ticket(t); !report.empty()) {
      throw validation_error(report);
    }
    Ticket initial = t;
    const bool synth_close = t.status == TicketStatus::done && t.closed_at;
    if (synth_close) {
      initial.status = TicketStatus::backlog;
      initial.closed_at.reset();
    }
    initial.version = 1;
    ChangeEvent create_ev;
    create_ev.ticket_id = t.id;
    create_ev.timestamp = t.created_at;
    create_ev.actor = actor;
    create_ev.field = kCreateField;
    create_ev.new_value = to_json(initial).dump();
    create_ev.version = 1;
    std::vector<ChangeEvent> batch{create_ev};
    if (synth_close) {
      ChangeEvent close_ev;
      close_ev.ticket_id = t.id;
      close_ev.timestamp = *t.closed_at;
      close_ev.actor = actor;
      close_ev.field = "status";
      close_ev.old_value = std::string(to_string(TicketStatus::backlog));
      close_ev.new_value = std::string(to_string(TicketStatus::done));
      close_ev.version = 2;
      batch.push_back(close_ev);
    }
    commit(batch);
    return current_.at(t.id);
  }

  // Loads a batch of tickets; failures are reported per ticket.
  ValidationReport load(const std::vector<Ticket>& tickets, const std::string& actor = "import") {
    ValidationReport report;
    for (const auto& t : tickets) {
      try {
        create(t, actor);
      } catch (const Error& e) {
        report.push_back({t.id, e.fields().empty() ? "" : e.fields().front(), e.what(), {}});
      }
    }
    return report;
  }

  // Atomically applies all changes or none. Returns the new version.
  std::uint64_t apply_change(const ChangeRequest& req) {
    std::unique_lock lock(mu_);
    auto it = current_.find(req.ticket_id);
    if (it == current_.end()) {
      throw Error(errc::unknown_ticket, "unknown ticket '" + req.ticket_id + "'");
    }
    const Ticket& cur = it->second;
    if (req.expected_version != cur.version) {
      throw Error(errc::version_conflict,
                  "ticket '" + req.ticket_id + "' is at version " + std::to_string(cur.version) +
                      ", change was based on version " + std::to_string(req.expected_version));
    }
    if (req.changes.empty()) throw Error(errc::invalid_argument, "no changes submitted");
    const Timestamp ts = req.timestamp.value_or(now_utc());
    if (auto last = last_ts_.find(req.ticket_id); last != last_ts_.end() && ts < last->second) {
      throw Error(errc::out_of_order, "change predates the ticket's latest event");
    }

    std::map<std::string, Ticket> scratch{{cur.id, cur}};
    std::vector<ChangeEvent> batch;
    std::uint64_t version = cur.version;
    for (const auto& ch : req.changes) {
      if (!is_canonical_field(ch.field)) {
        throw Error(errc::unknown_field, "unknown field '" + ch.field + "'", {ch.field});
      }
      if (!is_editable_field(ch.field)) {
        throw Error(errc::read_only_field, "field '" + ch.field + "' is read-only", {ch.field});
      }
      const Ticket& before = scratch.at(cur.id);
      if (is_td_field(ch.field) && !before.td) {
        throw Error(errc::unknown_field, "field '" + ch.field + "' requires a td ticket",
                    {ch.field});
      }
      const std::string current_value = to_record(before).at(ch.field);
      const std::string new_value = canonical_value(before, ch.field, ch.new_value);
      if (ch.old_value && canonical_value(before, ch.field, *ch.old_value) != current_value) {
        throw Error(errc::version_conflict,
                    "field '" + ch.field + "' is '" + current_value + "', expected '" +
                        *ch.old_value + "'",
                    {ch.field});
      }
      ChangeEvent e;
      e.ticket_id = cur.id;
      e.timestamp = ts;
      e.actor = req.actor;
      e.field = ch.field;
      e.old_value = current_value;
      e.new_value = new_value;
      e.version = ++version;
      apply_event(scratch, e);
      batch.push_back(std::move(e));
    }
    if (auto report = validate_ticket(scratch.at(cur.id)); !report.empty()) {
      throw validation_error(report);
    }
    commit(batch);
    return version;
  }

  // Appends an externally recorded event (e.g. imported tracker history).
  // The event's version must be the ticket's next version.
  void append_history(ChangeEvent e) {
    if (e.field == kCreateField) {
      Ticket t = ticket_from_json(nlohmann::json::parse(e.new_value));
      t.created_at = e.timestamp;
      create(t, e.actor);
      return;
    }
    ChangeRequest req;
    req.ticket_id = e.ticket_id;
    req.expected_version = e.version - 1;
    req.actor = e.actor;
    req.timestamp = e.timestamp;
    req.changes.push_back({e.field, e.old_value.empty() ? std::nullopt
                                                        : std::optional<std::string>(e.old_value),
                           e.new_value});
    apply_change(req);
  }

  std::vector<Ticket> tickets() const {
    std::shared_lock lock(mu_);
    std::vector<Ticket> out;
    out.reserve(current_.size());
    for (const auto& [id, t] : current_) out.push_back(t);
    return out;
  }

  std::optional<Ticket> find(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = current_.find(id);
    if (it == current_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return current_.size();
  }

  std::vector<ChangeEvent> log() const {
    std::shared_lock lock(mu_);
    return log_;
  }

  // State as of an instant: fold of every event with timestamp <= instant.
  std::vector<Ticket> snapshot_at(Timestamp instant) const {
    std::shared_lock lock(mu_);
    std::map<std::string, Ticket> state;
    for (const auto& e : log_) {
      if (e.timestamp <= instant) apply_event(state, e);
    }
    std::vector<Ticket> out;
    for (auto& [id, t] : state) out.push_back(std::move(t));
    return out;
  }

  static std::vector<Ticket> replay(std::span<const ChangeEvent> events) {
    std::map<std::string, Ticket> state;
    for (const auto& e : events) apply_event(state, e);
    std::vector<Ticket> out;
    for (auto& [id, t] : state) out.push_back(std::move(t));
    return out;
  }

  // Writes a full snapshot (export JSON) tagged with the last sequence number.
  std::optional<std::filesystem::path> checkpoint() const {
    std::shared_lock lock(mu_);
    return write_snapshot();
  }

 private:
  static Error validation_error(const ValidationReport& report) {
    std::vector<std::string> fields;
    std::string msg = "validation failed:";
    for (const auto& v : report) {
      fields.push_back(v.field);
      msg += " " + v.field + " (" + v.message + ");";
    }
    return Error(errc::validation_failed, msg, fields);
  }

  // Canonical spelling of a value for a field, e.g. "Very High" -> "very_high".
  static std::string canonical_value(const Ticket& t, const std::string& field,
                                     const std::string& value) {
    Record rec = to_record(t);
    rec[field] = value;
    try {
      return to_record(from_record(rec)).at(field);
    } catch (const Error& e) {
      throw Error(errc::validation_failed, e.what(), {field});
    }
  }

  // Caller holds the unique lock.
  void commit(std::vector<ChangeEvent>& batch) {
    for (auto& e : batch) e.sequence = next_seq_++;
    if (dir_) {
      std::ofstream out(*dir_ / "events.jsonl", std::ios::app);
      if (!out) throw Error(errc::io_error, "cannot append to event log");
      for (const auto& e : batch) out << e.to_json().dump() << '\n';
      out.flush();
      if (!out) throw Error(errc::io_error, "event log write failed");
    }
    for (auto& e : batch) {
      apply_event(current_, e);
      last_ts_[e.ticket_id] = std::max(last_ts_[e.ticket_id], e.timestamp);
      log_.push_back(std::move(e));
      if (dir_ && checkpoint_interval_ && log_.size() % checkpoint_interval_ == 0) {
        write_snapshot();
      }
    }
  }

  std::optional<std::filesystem::path> write_snapshot() const {
    if (!dir_) return std::nullopt;
    const auto snap_dir = *dir_ / "snapshots";
    std::filesystem::create_directories(snap_dir);
    char name[64];
    std::snprintf(name, sizeof name, "snapshot-%012llu.json",
                  static_cast<unsigned long long>(log_.empty() ? 0 : log_.back().sequence));
    std::vector<Ticket> all;
    for (const auto& [id, t] : current_) all.push_back(t);
    const auto path = snap_dir / name;
    write_file(path, export_json(all));
    return path;
  }

  std::optional<std::filesystem::path> dir_;
  std::uint64_t checkpoint_interval_ = 500;
  mutable std::shared_mutex mu_;
  std::vector<ChangeEvent> log_;
  std::map<std::string, Ticket> current_;
  std::map<std::string, Timestamp> last_ts_;
  std::uint64_t next_seq_ = 1;
};

}  // namespace tdledger
