#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <thread>

#include <unistd.h>

#include "support.hpp"

using namespace tdledger;
using namespace tdledger::testing;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() /
           ("tdl-store-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  return p;
}

ChangeRequest change(const std::string& id, std::uint64_t version, const std::string& field,
                     std::optional<std::string> old_value, const std::string& new_value,
                     const char* when) {
  ChangeRequest r;
  r.ticket_id = id;
  r.expected_version = version;
  r.actor = "alice";
  r.timestamp = ts(when);
  r.changes.push_back({field, std::move(old_value), new_value});
  return r;
}

std::string dump_state(const std::vector<Ticket>& tickets) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : tickets) arr.push_back(to_json(t));
  return arr.dump();
}

// Independent fold over the log: start empty, apply each event's field value
// through the canonical record, with the closing rule for status.
std::map<std::string, Record> fold(const std::vector<ChangeEvent>& log) {
  std::map<std::string, Record> state;
  for (const auto& e : log) {
    if (e.field == kCreateField) {
      state[e.ticket_id] = to_record(ticket_from_json(nlohmann::json::parse(e.new_value)));
    } else {
      auto& r = state.at(e.ticket_id);
      r[e.field] = e.new_value;
      if (e.field == "status") {
        if (e.new_value == "done" && r["closed_at"].empty()) r["closed_at"] = format_timestamp(e.timestamp);
        if (e.new_value != "done") r["closed_at"] = "";
      }
    }
    state[e.ticket_id]["version"] = std::to_string(e.version);
  }
  return state;
}

}  // namespace

TEST(Store, ApplyChangeBumpsVersionAndLog) {
  TicketStore store;
  store.create(td_ticket("T1"));
  store.apply_change(change("T1", 1, "interest", "medium", "high", "2024-01-02"));
  store.apply_change(change("T1", 2, "effort_person_days", "1", "2", "2024-01-03"));
  store.apply_change(change("T1", 3, "td_type", std::nullopt, "architecture", "2024-01-04"));
  ASSERT_EQ(store.find("T1")->version, 4u);
  const auto before = store.log().size();
  EXPECT_EQ(store.apply_change(change("T1", 4, "educated_guess", "medium", "high", "2024-01-05")), 5u);
  EXPECT_EQ(store.log().size(), before + 1);
  EXPECT_EQ(store.find("T1")->td->educated_guess, OrdinalLevel::high);

  try {
    store.apply_change(change("T1", 4, "educated_guess", "medium", "high", "2024-01-06"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::version_conflict);
  }
  EXPECT_EQ(store.find("T1")->version, 5u);
}

TEST(Store, OldValueMismatchIsConflict) {
  TicketStore store;
  store.create(td_ticket("T1"));
  try {
    store.apply_change(change("T1", 1, "interest", "low", "high", "2024-01-02"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::version_conflict);
  }
  // Labels compare after normalization.
  EXPECT_EQ(store.apply_change(change("T1", 1, "interest", "Medium", "Very High", "2024-01-02")), 2u);
  EXPECT_EQ(store.log().back().new_value, "very_high");
}

TEST(Store, ErrorsLeaveStateUntouched) {
  TicketStore store;
  store.create(td_ticket("T1"));
  store.create(story("S1", {"fw"}));
  const auto log_size = store.log().size();
  auto code_of = [&](const ChangeRequest& r) {
    try {
      store.apply_change(r);
    } catch (const Error& e) {
      return e.code();
    }
    return std::string("none");
  };
  EXPECT_EQ(code_of(change("NOPE", 1, "title", std::nullopt, "x", "2024-01-02")), errc::unknown_ticket);
  EXPECT_EQ(code_of(change("T1", 1, "colour", std::nullopt, "x", "2024-01-02")), errc::unknown_field);
  EXPECT_EQ(code_of(change("T1", 1, "id", std::nullopt, "x", "2024-01-02")), errc::read_only_field);
  EXPECT_EQ(code_of(change("S1", 1, "interest", std::nullopt, "high", "2024-01-02")), errc::unknown_field);
  EXPECT_EQ(code_of(change("T1", 1, "interest", std::nullopt, "extreme", "2024-01-02")), errc::validation_failed);
  EXPECT_EQ(code_of(change("T1", 1, "effort_person_days", std::nullopt, "9", "2024-01-02")), errc::validation_failed);
  EXPECT_EQ(code_of(change("T1", 1, "title", std::nullopt, "x", "2023-06-01")), errc::out_of_order);

  // A multi-field request is all or nothing.
  auto multi = change("T1", 1, "interest", std::nullopt, "high", "2024-01-02");
  multi.changes.push_back({"effort_person_days", std::nullopt, "12"});
  EXPECT_EQ(code_of(multi), errc::validation_failed);
  EXPECT_EQ(store.find("T1")->td->interest, OrdinalLevel::medium);
  EXPECT_EQ(store.log().size(), log_size);
  EXPECT_THROW(store.create(td_ticket("T1")), Error);
}

TEST(Store, StatusDrivesClosure) {
  TicketStore store;
  store.create(td_ticket("T1"));
  store.apply_change(change("T1", 1, "status", std::nullopt, "done", "2024-02-10T08:00:00Z"));
  EXPECT_EQ(format_timestamp(*store.find("T1")->closed_at), "2024-02-10T08:00:00Z");
  store.apply_change(change("T1", 2, "status", std::nullopt, "in_progress", "2024-02-11"));
  EXPECT_FALSE(store.find("T1")->closed_at);
}

TEST(Store, ClosedImportSynthesizesHistory) {
  TicketStore store;
  store.create(closed(td_ticket("T1"), "2024-03-15"));
  ASSERT_EQ(store.log().size(), 2u);
  EXPECT_EQ(store.find("T1")->version, 2u);
  EXPECT_TRUE(store.snapshot_at(ts("2024-03-01"))[0].is_open());
  EXPECT_FALSE(store.snapshot_at(ts("2024-03-16"))[0].is_open());
}

TEST(Store, SnapshotAt) {
  TicketStore store;
  store.create(td_ticket("T1"));
  store.apply_change(change("T1", 1, "interest", std::nullopt, "high", "2024-02-01"));
  store.apply_change(change("T1", 2, "interest", std::nullopt, "very_high", "2024-03-01"));
  EXPECT_TRUE(store.snapshot_at(ts("2023-12-31")).empty());
  EXPECT_EQ(dump_state(store.snapshot_at(ts("2030-01-01"))), dump_state(store.tickets()));
  const auto mid = store.snapshot_at(ts("2024-02-15"));
  ASSERT_EQ(mid.size(), 1u);
  EXPECT_EQ(mid[0].td->interest, OrdinalLevel::high);
  EXPECT_EQ(mid[0].version, 2u);
}

TEST(Store, ReplayMatchesFoldOracleAndIsDeterministic) {
  std::mt19937_64 rng(2024);
  TicketStore store;
  store.load(random_store(rng, 80));
  const auto ids = store.tickets();
  const char* fields[] = {"title", "interest", "educated_guess", "status", "talked_about_td", "effort_person_days"};
  const char* levels[] = {"very_low", "low", "medium", "high", "very_high"};
  for (int i = 0; i < 300; ++i) {
    const auto& pick = ids[rng() % ids.size()];
    const auto cur = *store.find(pick.id);
    std::string field = fields[rng() % 6];
    if (!cur.td && (field == "interest" || field == "educated_guess" || field == "effort_person_days")) field = "title";
    std::string value;
    if (field == "title") value = "renamed " + std::to_string(i);
    else if (field == "status") value = (rng() % 3 == 0) ? "done" : "in_progress";
    else if (field == "talked_about_td") value = (rng() % 2) ? "true" : "false";
    else if (field == "effort_person_days") value = cur.td->effort_scale == EffortScale::legacy_1to5 ? std::to_string(1 + rng() % 5) : "0.5";
    else value = levels[rng() % 5];
    ChangeRequest r;
    r.ticket_id = cur.id;
    r.expected_version = cur.version;
    r.timestamp = ts("2025-06-01") + std::chrono::hours{i};
    r.changes.push_back({field, std::nullopt, value});
    store.apply_change(r);
  }
  const auto log = store.log();
  const auto a = dump_state(TicketStore::replay(log));
  const auto b = dump_state(TicketStore::replay(log));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, dump_state(store.tickets()));

  const auto oracle = fold(log);
  for (const auto& t : store.tickets()) {
    auto rec = to_record(t);
    EXPECT_EQ(rec, oracle.at(t.id)) << t.id;
  }

  // (ticket, version) pairs are unique and versions step by one.
  std::map<std::string, std::uint64_t> last;
  for (const auto& e : log) {
    EXPECT_EQ(e.version, last[e.ticket_id] + 1);
    last[e.ticket_id] = e.version;
  }
}

TEST(Store, PersistsAndReopens) {
  const auto dir = temp_dir("persist");
  std::string before;
  {
    TicketStore store(dir, 3);
    store.create(td_ticket("T1"));
    store.create(closed(story("S1", {"fw"}), "2024-02-01"));
    store.apply_change(change("T1", 1, "interest", std::nullopt, "high", "2024-02-02"));
    before = dump_state(store.tickets());
    EXPECT_TRUE(store.checkpoint().has_value());
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "events.jsonl"));
  EXPECT_FALSE(std::filesystem::is_empty(dir / "snapshots"));
  TicketStore reopened(dir);
  EXPECT_EQ(dump_state(reopened.tickets()), before);
  EXPECT_EQ(reopened.apply_change(change("T1", 2, "interest", "high", "low", "2024-02-03")), 3u);
  std::filesystem::remove_all(dir);
}

TEST(Store, AppendHistory) {
  TicketStore store;
  ChangeEvent create;
  create.ticket_id = "T1";
  create.timestamp = ts("2024-01-01");
  create.field = kCreateField;
  create.new_value = to_json(td_ticket("T1")).dump();
  create.version = 1;
  store.append_history(create);
  ChangeEvent edit{0, "T1", ts("2024-01-05"), "bob", "interest", "medium", "high", 2};
  store.append_history(edit);
  EXPECT_EQ(store.find("T1")->td->interest, OrdinalLevel::high);
  ChangeEvent stale{0, "T1", ts("2024-01-06"), "bob", "interest", "medium", "low", 3};
  EXPECT_THROW(store.append_history(stale), Error);
}

TEST(Store, ConcurrentReadersSeeWholeChanges) {
  TicketStore store;
  store.create(td_ticket("T1"));
  std::atomic<bool> done{false};
  std::atomic<int> torn{0};
  std::thread reader([&] {
    while (!done) {
      auto t = store.find("T1");
      // Writer always moves interest and educated_guess together.
      if (t->td->interest != t->td->educated_guess) ++torn;
    }
  });
  const char* levels[] = {"very_low", "low", "medium", "high", "very_high"};
  for (int i = 0; i < 200; ++i) {
    ChangeRequest r;
    r.ticket_id = "T1";
    r.expected_version = store.find("T1")->version;
    r.timestamp = ts("2024-02-01") + std::chrono::minutes{i};
    r.changes = {{"interest", std::nullopt, levels[i % 5]}, {"educated_guess", std::nullopt, levels[i % 5]}};
    store.apply_change(r);
  }
  done = true;
  reader.join();
  EXPECT_EQ(torn.load(), 0);
}
