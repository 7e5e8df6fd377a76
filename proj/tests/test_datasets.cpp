#include <gtest/gtest.h>

#include "support.hpp"

using namespace tdledger;
using namespace tdledger::testing;

namespace {

nlohmann::json build(const std::string& id, std::map<std::string, std::string> params = {},
                     LedgerConfig cfg = {}) {
  return dataset(DatasetRequest{id, std::move(params), std::nullopt}, demo_backlog(), cfg);
}

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "none";
}

}  // namespace

TEST(Datasets, V3LowestTwenty) {
  const auto p = build("v3");
  const auto& rows = p.at("rows");
  ASSERT_EQ(rows.size(), 20u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(rows[i - 1].at("roim").get<double>(), rows[i].at("roim").get<double>());
    EXPECT_EQ(rows[i].at("rank"), i + 1);
  }
  // The 20 rows are the 20 smallest ROIM values among the 30 open TD tickets.
  std::vector<double> all;
  for (const auto& t : demo_backlog()) {
    if (t.is_open_td()) all.push_back(roim(*t.td));
  }
  ASSERT_EQ(all.size(), 30u);
  std::sort(all.begin(), all.end());
  EXPECT_DOUBLE_EQ(rows.back().at("roim").get<double>(), all[19]);
  EXPECT_TRUE(rows[0].contains("contagious"));
  EXPECT_TRUE(rows[0].contains("educated_guess"));
}

TEST(Datasets, V1StorySubtree) {
  const auto fw = build("v1", {{"story", "US-1"}});
  for (const auto& r : fw.at("rows")) {
    EXPECT_EQ(r.at("component").get<std::string>().rfind("fw", 0), 0u);
  }
  EXPECT_EQ(fw.at("rows").size(), 20u);
  EXPECT_TRUE(build("v1", {{"story", "US-2"}}).at("rows").empty());
  EXPECT_EQ(code_of([] { build("v1"); }), errc::missing_parameter);
  EXPECT_EQ(code_of([] { build("v1", {{"story", "NOPE"}}); }), errc::unknown_ticket);
  EXPECT_EQ(code_of([] { build("v1", {{"story", "BUG-1"}}); }), errc::invalid_argument);
}

TEST(Datasets, V6Refused) {
  try {
    build("v6");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), errc::unknown_dataset);
    EXPECT_NE(std::string(e.what()).find("deliberately"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { build("v11"); }), errc::unknown_dataset);
}

TEST(Datasets, V8DisabledByDefault) {
  EXPECT_EQ(code_of([] { build("v8"); }), errc::dataset_disabled);
  LedgerConfig cfg;
  cfg.enable_v8 = true;
  const auto p = build("v8", {}, cfg);
  std::size_t total = 0;
  for (const auto& r : p.at("rows")) total += r.at("count").get<std::size_t>();
  EXPECT_EQ(total, 10u);
}

TEST(Datasets, EveryPayloadEmbedsConfig) {
  LedgerConfig cfg;
  cfg.enable_v8 = true;
  cfg.constants = CostConstants::workday();
  for (const auto& id : known_datasets()) {
    std::map<std::string, std::string> params;
    if (id == "v1") params["story"] = "US-1";
    if (id == "shares") params["dimension"] = "td_type";
    const auto p = build(id, params, cfg);
    EXPECT_EQ(p.at("config"), cfg.to_json()) << id;
    EXPECT_EQ(p.at("dataset"), id);
    for (const auto& r : p.at("rows")) {
      for (const auto& c : p.at("columns")) EXPECT_TRUE(r.contains(c.get<std::string>())) << id;
    }
  }
}

TEST(Datasets, PrioritySourceOverride) {
  const auto p = build("v9", {{"priority_source", "roi_based"}});
  EXPECT_EQ(p.at("config").at("quadrants").at("priority_source"), "roi_based");
  std::size_t n = 0;
  for (const auto& r : p.at("rows")) {
    n += r.at("count").get<std::size_t>();
    const auto q = classify_quadrant(level_from_label(r.at("priority").get<std::string>()),
                                     r.at("effort_days").get<double>());
    EXPECT_EQ(r.at("quadrant"), std::string(to_string(q)));
  }
  EXPECT_EQ(n, 30u);
  EXPECT_EQ(code_of([] { build("v9", {{"priority_source", "vibes"}}); }), errc::invalid_argument);
}

TEST(Datasets, V4Curve) {
  const auto p = build("v4", {{"tickets", "TD-113"}, {"horizon", "2.5"}});
  const auto& rows = p.at("rows");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[3].at("month"), 2.5);
  const auto t = demo_backlog()[13];
  EXPECT_DOUBLE_EQ(rows[2].at("accumulated_interest_minutes").get<double>(), 2 * interest_rate(*t.td));
  EXPECT_EQ(build("v4").at("rows").size(), 30u * 37u);
  EXPECT_EQ(code_of([] { build("v4", {{"tickets", "US-1"}}); }), errc::unknown_ticket);
  EXPECT_EQ(code_of([] { build("v4", {{"horizon", "-1"}}); }), errc::invalid_argument);
}

TEST(Datasets, V5AndV7) {
  const auto v5 = build("v5", {{"from", "2024-01"}, {"to", "2024-03"}});
  ASSERT_EQ(v5.at("rows").size(), 3u);
  EXPECT_EQ(v5.at("rows")[0].at("month"), "2024-01");
  const auto v7 = build("v7");
  int prev = 5;
  for (const auto& r : v7.at("rows")) {
    const int d = std::abs(r.at("discrepancy").get<int>());
    EXPECT_LE(d, prev);
    prev = d;
    EXPECT_EQ(r.at("discrepancy").get<int>(),
              r.at("educated_guess_id").get<int>() - r.at("roi_priority_id").get<int>());
  }
}

TEST(Datasets, V10ContagiousOnly) {
  const auto p = build("v10");
  EXPECT_EQ(p.at("rows").size(), 8u);
  for (const auto& r : p.at("rows")) EXPECT_TRUE(r.at("contagious").get<bool>());
}

TEST(Datasets, AsOfUsesSnapshot) {
  TicketStore store;
  store.load(demo_backlog());
  DatasetRequest req{"v2", {}, ts("2024-01-20")};
  const auto p = dataset(req, store, LedgerConfig{});
  EXPECT_EQ(p.at("rows")[0].at("td_count"), 2);
  EXPECT_EQ(p.at("as_of"), "2024-01-20T00:00:00Z");
}

TEST(Render, Formats) {
  const auto p = build("v2");
  const auto json = render(p, OutputFormat::json);
  EXPECT_EQ(json, canonical_json(p) + "\n");
  EXPECT_EQ(nlohmann::json::parse(json), p);
  const auto csv_text = render(p, OutputFormat::csv);
  EXPECT_EQ(csv_text.rfind("td_count,td_effort_days", 0), 0u);
  EXPECT_EQ(std::count(csv_text.begin(), csv_text.end(), '\n'), 2);
  const auto table = render(p, OutputFormat::table);
  EXPECT_EQ(table.rfind("# v2 config: {", 0), 0u);
}

TEST(Config, JsonRoundTripAndEnv) {
  LedgerConfig c;
  c.enable_v8 = true;
  c.v3_limit = 5;
  c.deliberation = {DeliberationField::alternatives};
  EXPECT_EQ(LedgerConfig::from_json(c.to_json()).to_json(), c.to_json());
  const auto path = std::filesystem::temp_directory_path() / "tdl-config-test.json";
  write_file(path, R"({"constants": "unit-consistent", "v3_limit": 3})");
  ::setenv("TD_LEDGER_CONFIG", path.c_str(), 1);
  const auto env = resolve_config(std::nullopt);
  EXPECT_EQ(env.constants, CostConstants::unit_consistent());
  EXPECT_EQ(env.v3_limit, 3u);
  ::unsetenv("TD_LEDGER_CONFIG");
  EXPECT_EQ(resolve_config(std::nullopt).v3_limit, 20u);
  std::filesystem::remove(path);
}
