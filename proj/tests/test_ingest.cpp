#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include <unistd.h>

#include "support.hpp"

using namespace tdledger;
using namespace tdledger::testing;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("tdl-ingest-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

std::vector<Ticket> sample_tickets() {
  auto a = td_ticket("A-1", OrdinalLevel::high, OrdinalLevel::medium, 2, OrdinalLevel::very_high);
  a.td->contagious = true;
  a.td->re_submission_date = day("2024-03-01");
  a.notes.drawbacks = "harder onboarding";
  a.talked_about_td = true;
  auto b = closed(story("B-2", {"fw", "io"}), "2024-02-15T09:30:00Z");
  b.parent = "E-9";
  auto c = td_ticket("C-3", OrdinalLevel::low, OrdinalLevel::very_low, 0.75, OrdinalLevel::low,
                     EffortScale::continuous);
  c.td->interest_scenario = InterestScenario::worst_case;
  c.deleted = true;
  return {a, b, c};
}

}  // namespace

TEST(Import, HeadlineExportCounts) {
  const auto res = import_csv_text(synthetic_export_csv(127, 65), FieldMapping::canonical());
  EXPECT_TRUE(res.report.empty());
  ASSERT_EQ(res.tickets.size(), 127u);
  EXPECT_EQ(std::count_if(res.tickets.begin(), res.tickets.end(),
                          [](const Ticket& t) { return t.kind == TicketKind::td; }),
            65);
}

TEST(Import, HeaderOnly) {
  const auto res = import_csv_text("id,title,kind,status,created_at\r\n", FieldMapping::canonical());
  EXPECT_TRUE(res.tickets.empty());
  EXPECT_TRUE(res.report.empty());
}

TEST(Import, ValueDictionary) {
  auto m = FieldMapping::canonical();
  m.columns["Zins"] = "interest";
  m.columns.erase("interest");
  m.values["interest"] = {{"Hoch/high", "high"}};
  const std::string text =
      "id,title,kind,status,component,created_at,Zins,interest_probability,effort_person_days,"
      "educated_guess\n"
      "T-1,cache,td,backlog,fw,2024-01-02,Hoch/high,medium,2,high\n";
  const auto res = import_csv_text(text, m);
  ASSERT_EQ(res.tickets.size(), 1u);
  EXPECT_EQ(level_id(res.tickets[0].td->interest), 3);
}

TEST(Import, MissingMandatoryColumn) {
  try {
    import_csv_text("id,title,kind,status\nX,y,task,backlog\n", FieldMapping::canonical());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::missing_column);
    EXPECT_EQ(e.fields(), std::vector<std::string>{"created_at"});
  }
}

TEST(Import, BadDateRowSkippedAndReported) {
  const std::string text =
      "id,title,kind,status,component,created_at\n"
      "X-1,ok,task,backlog,fw,2024-01-02\n"
      "X-2,bad,task,backlog,fw,2024-13-45\n"
      "X-3,ok,bug,backlog,fw,2024-01-03T10:00:00Z\n";
  const auto res = import_csv_text(text, FieldMapping::canonical());
  ASSERT_EQ(res.tickets.size(), 2u);
  ASSERT_EQ(res.report.size(), 1u);
  EXPECT_EQ(res.report[0].ticket_id, "X-2");
  EXPECT_EQ(res.report[0].field, "created_at");
  EXPECT_EQ(res.report[0].row, 2u);
}

TEST(Import, InvalidRowImportedWithViolation) {
  const std::string text =
      "id,title,kind,status,component,created_at,interest,interest_probability,effort_person_days,"
      "educated_guess\n"
      "T-1,big,td,backlog,fw,2024-01-02,high,medium,7,high\n";
  const auto res = import_csv_text(text, FieldMapping::canonical());
  ASSERT_EQ(res.tickets.size(), 1u);
  ASSERT_EQ(res.report.size(), 1u);
  EXPECT_EQ(res.report[0].message, "effort out of legacy range");
}

TEST(Import, OptionalFieldsDefault) {
  const auto res = import_csv_text("id,title,kind,status,created_at\nS-1,s,user_story,backlog,2024-01-01\n",
                                   FieldMapping::canonical());
  ASSERT_EQ(res.tickets.size(), 1u);
  const auto& t = res.tickets[0];
  EXPECT_FALSE(t.deleted);
  EXPECT_FALSE(t.talked_about_td);
  EXPECT_FALSE(t.parent);
  EXPECT_FALSE(t.closed_at);
}

TEST(Import, DuplicateIdSkipped) {
  const auto res = import_csv_text(
      "id,title,kind,status,component,created_at\nA,a,task,backlog,fw,2024-01-01\nA,b,task,backlog,fw,2024-01-01\n",
      FieldMapping::canonical());
  EXPECT_EQ(res.tickets.size(), 1u);
  EXPECT_EQ(res.report.size(), 1u);
}

TEST(Import, AzurePreset) {
  const std::string text =
      "ID,Title,Work Item Type,State,Area Path,Created Date,Closed Date,Interest,Interest Probability,"
      "Effort,Educated Guess,Custom Col\n"
      "101,Old parser,Technical Debt,Active,Product\\Firmware\\IO,03/04/2024 10:00:00,,4 - High,"
      "3 - Medium,2,5 - Very High,abc\n"
      "102,Login,Product Backlog Item,Closed,Product\\Web,01/02/2024 08:00:00,02/01/2024 17:30:00,,,,,\n";
  const auto res = import_csv_text(text, presets::azure_devops());
  ASSERT_TRUE(res.report.empty()) << res.report[0].message;
  ASSERT_EQ(res.tickets.size(), 2u);
  const auto& td = res.tickets[0];
  EXPECT_EQ(td.kind, TicketKind::td);
  EXPECT_EQ(td.status, TicketStatus::in_progress);
  EXPECT_EQ(td.component.str(), "Product/Firmware/IO");
  EXPECT_EQ(format_timestamp(td.created_at), "2024-03-04T10:00:00Z");
  EXPECT_EQ(td.td->interest, OrdinalLevel::high);
  EXPECT_EQ(td.td->educated_guess, OrdinalLevel::very_high);
  EXPECT_EQ(td.extra.at("Custom Col"), "abc");
  EXPECT_EQ(res.tickets[1].status, TicketStatus::done);
  EXPECT_EQ(format_timestamp(*res.tickets[1].closed_at), "2024-02-01T17:30:00Z");
}

TEST(Import, JiraPreset) {
  const std::string text =
      "Issue key,Summary,Issue Type,Status,Component/s,Created\n"
      "PRJ-1,Do it,Story,To Do,core,2024-05-06 07:08\n";
  const auto res = import_csv_text(text, presets::jira());
  ASSERT_EQ(res.tickets.size(), 1u);
  EXPECT_EQ(res.tickets[0].kind, TicketKind::user_story);
  EXPECT_EQ(format_timestamp(res.tickets[0].created_at), "2024-05-06T07:08:00Z");
}

TEST(Export, CsvRoundTrip) {
  const auto tickets = sample_tickets();
  const auto csv_text = export_csv(tickets);
  const auto back = import_csv_text(csv_text, FieldMapping::canonical());
  EXPECT_TRUE(back.report.empty());
  EXPECT_EQ(back.tickets, tickets);
}

TEST(Export, QuotingRoundTrip) {
  auto t = story("Q-1", {"fw"});
  t.title = "comma, \"quote\"\nand newline";
  t.notes.risks = "line1\r\nline2";
  const auto text = export_csv({t});
  EXPECT_NE(text.find("\"comma, \"\"quote\"\"\nand newline\""), std::string::npos);
  const auto back = import_csv_text(text, FieldMapping::canonical());
  ASSERT_EQ(back.tickets.size(), 1u);
  EXPECT_EQ(back.tickets[0], t);
}

TEST(Export, EmptyStoreIsHeaderOnly) {
  const auto text = export_csv({});
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_EQ(text.rfind("id,title,kind", 0), 0u);
  EXPECT_TRUE(import_csv_text(text, FieldMapping::canonical()).tickets.empty());
  EXPECT_EQ(export_json({}), "[]\n");
}

TEST(Export, JsonRoundTripPreservesExtra) {
  auto tickets = sample_tickets();
  tickets[0].extra["Sprint"] = "42";
  const auto text = export_json(tickets);
  const auto doc = nlohmann::json::parse(text);
  EXPECT_EQ(doc[0]["extra"]["Sprint"], "42");
  EXPECT_EQ(doc[0]["effort_person_days"], 2);
  EXPECT_TRUE(doc[1]["td_type"].is_null());
  const auto back = import_json_text(text, FieldMapping::canonical());
  EXPECT_TRUE(back.report.empty());
  EXPECT_EQ(back.tickets, tickets);
}

TEST(Export, CsvExtraColumns) {
  auto tickets = sample_tickets();
  tickets[1].extra["Sprint"] = "7";
  const auto text = export_csv(tickets);
  EXPECT_NE(text.find(",extra.Sprint\r\n"), std::string::npos);
  EXPECT_EQ(import_csv_text(text, FieldMapping::canonical()).tickets, tickets);
}

TEST(Export, FileRoundTripBothFormats) {
  const auto dir = temp_dir("files");
  const auto tickets = sample_tickets();
  for (const char* name : {"out.csv", "out.json"}) {
    const auto path = dir / name;
    export_tickets(tickets, format_for_path(path), path);
    EXPECT_EQ(import_export_file(path, FieldMapping::canonical()).tickets, tickets) << name;
  }
  EXPECT_THROW(import_export_file(dir / "missing.csv", FieldMapping::canonical()), Error);
  std::filesystem::remove_all(dir);
}

TEST(Export, RandomStoresRoundTrip) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20; ++i) {
    const auto tickets = random_store(rng, 60);
    EXPECT_EQ(import_csv_text(export_csv(tickets), FieldMapping::canonical()).tickets, tickets);
    EXPECT_EQ(import_json_text(export_json(tickets), FieldMapping::canonical()).tickets, tickets);
  }
}

TEST(Mapping, RejectsUnknownTargetsAndMissingMandatory) {
  EXPECT_THROW(FieldMapping::from_json({{"columns", {{"A", "nope"}}}}), Error);
  EXPECT_THROW(FieldMapping::from_json({{"columns", {{"A", "id"}}}}), Error);
  const auto m = FieldMapping::from_json(presets::jira().to_json());
  EXPECT_EQ(m.columns, presets::jira().columns);
}

TEST(Csv, ParserEdgeCases) {
  const auto rows = csv::parse("\xEF\xBB\xBF" "a,b\r\n\"x,1\",\"\"\r\n\r\nlast,\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "x,1");
  EXPECT_EQ(rows[1][1], "");
  EXPECT_EQ(rows[2][1], "");
  EXPECT_THROW(csv::parse("a,\"b\n"), Error);
}
