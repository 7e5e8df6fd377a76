#pragma once

// td-ledger command line. Exit codes: 0 success, 1 validation findings or
// data errors, 2 usage errors.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tdledger/awareness.hpp"
#include "tdledger/datasets.hpp"
#include "tdledger/http_api.hpp"

namespace tdledger {

namespace cli_detail {

struct Globals {
  std::string constants;
  std::string quadrants;
  std::string format = "table";
  std::string config;
  std::string mapping = "canonical";
};

inline LedgerConfig effective_config(const Globals& g) {
  LedgerConfig cfg = resolve_config(g.config.empty() ? std::nullopt : std::optional(g.config));
  if (!g.constants.empty()) {
    if (std::filesystem::is_regular_file(g.constants)) {
      cfg.constants = CostConstants::from_json(read_json_file(g.constants));
    } else {
      cfg.constants = CostConstants::preset(g.constants);
    }
  }
  if (!g.quadrants.empty()) cfg.quadrants = QuadrantConfig::from_json(read_json_file(g.quadrants));
  return cfg;
}

// A store directory, or an export file read through the mapping.
inline void load_into(TicketStore& store, const std::string& data, const std::string& mapping,
                      std::ostream& err) {
  const auto imported = import_export_file(data, load_mapping(mapping));
  for (const auto& v : imported.report) {
    err << "warning: row " << (v.row ? std::to_string(*v.row) : "-") << " " << v.ticket_id << " "
        << v.field << ": " << v.message << "\n";
  }
  store.load(imported.tickets);
}

inline std::vector<Ticket> load_tickets(const std::string& data, const std::string& mapping,
                                        std::ostream& err) {
  if (std::filesystem::is_directory(data)) return TicketStore(data).tickets();
  TicketStore store;
  load_into(store, data, mapping, err);
  return store.tickets();
}

inline void print_report(const ValidationReport& report, std::ostream& os) {
  for (const auto& v : report) {
    os << (v.row ? "row " + std::to_string(*v.row) + ": " : std::string{})
       << (v.ticket_id.empty() ? "?" : v.ticket_id) << ": " << (v.field.empty() ? "-" : v.field)
       << ": " << v.message << "\n";
  }
}

inline bool is_usage_code(const std::string& code) {
  return code == errc::invalid_argument || code == errc::unknown_dataset ||
         code == errc::dataset_disabled || code == errc::missing_parameter ||
         code == errc::unsupported_dimension;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace cli_detail;
  CLI::App app{"td-ledger: technical-debt backlog analytics", "td-ledger"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--constants", g.constants, "Cost constants: preset (default, unit-consistent, workday) or JSON file");
  app.add_option("--quadrants", g.quadrants, "Quadrant configuration JSON file");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json", "table"}));
  app.add_option("--config", g.config, "Configuration file (default: $TD_LEDGER_CONFIG)");
  app.add_option("--mapping", g.mapping, "Field mapping: canonical, azure-devops, jira or JSON file");

  std::function<int()> action;
  auto sub = [&](const char* name, const char* desc) {
    auto* s = app.add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };

  auto emit = [&](const nlohmann::json& payload) {
    out << render(payload, output_format_from_string(g.format));
  };

  // import
  std::string import_file, store_dir, history_file;
  auto* import_cmd = sub("import", "Import a tracker export into a store directory");
  import_cmd->add_option("file", import_file, "CSV or JSON export")->required();
  import_cmd->add_option("--store", store_dir, "Store directory")->required();
  import_cmd->add_option("--history", history_file, "Change history (JSON lines) to append");
  import_cmd->callback([&] {
    action = [&] {
      const auto res = import_export_file(import_file, load_mapping(g.mapping));
      TicketStore store(store_dir);
      auto report = res.report;
      auto load_report = store.load(res.tickets);
      report.insert(report.end(), load_report.begin(), load_report.end());
      if (!history_file.empty()) {
        std::ifstream in(history_file);
        if (!in) throw Error(errc::io_error, "cannot read '" + history_file + "'");
        std::string line;
        while (std::getline(in, line)) {
          if (!line.empty()) store.append_history(ChangeEvent::from_json(nlohmann::json::parse(line)));
        }
      }
      store.checkpoint();
      std::size_t td = 0;
      for (const auto& t : store.tickets()) td += t.kind == TicketKind::td ? 1 : 0;
      out << "imported " << res.tickets.size() << " tickets (" << td << " td) into " << store_dir << "\n";
      print_report(report, err);
      return report.empty() ? 0 : 1;
    };
  });

  // export
  std::string data, export_out;
  auto* export_cmd = sub("export", "Export tickets in canonical CSV or JSON");
  export_cmd->add_option("--data", data, "Store directory or export file")->required();
  export_cmd->add_option("--out", export_out, "Output file (.csv or .json); stdout when absent");
  export_cmd->callback([&] {
    action = [&] {
      const auto tickets = load_tickets(data, g.mapping, err);
      if (export_out.empty()) {
        out << export_tickets(tickets, g.format == "json" ? ExportFormat::json : ExportFormat::csv);
      } else {
        export_tickets(tickets, format_for_path(export_out), export_out);
      }
      return 0;
    };
  });

  // validate
  std::string validate_file;
  auto* validate_cmd = sub("validate", "Validate an export against the ticket invariants");
  validate_cmd->add_option("file", validate_file, "CSV or JSON export")->required();
  validate_cmd->callback([&] {
    action = [&] {
      const auto res = import_export_file(validate_file, load_mapping(g.mapping));
      print_report(res.report, out);
      out << res.tickets.size() << " tickets, " << res.report.size() << " findings\n";
      return res.report.empty() ? 0 : 1;
    };
  });

  // roi / lhf
  auto* roi_cmd = sub("roi", "Per-ticket ROI assessment");
  roi_cmd->add_option("--data", data, "Store directory or export file")->required();
  roi_cmd->callback([&] {
    action = [&] {
      emit(roi_payload(load_tickets(data, g.mapping, err), effective_config(g)));
      return 0;
    };
  });

  bool show_wait = false;
  auto* lhf_cmd = sub("lhf", "Low-hanging fruits (or wait items with --wait)");
  lhf_cmd->add_option("--data", data, "Store directory or export file")->required();
  lhf_cmd->add_flag("--wait", show_wait, "List the wait region instead");
  lhf_cmd->callback([&] {
    action = [&] {
      auto payload = roi_payload(load_tickets(data, g.mapping, err), effective_config(g));
      const std::string wanted(to_string(show_wait ? Quadrant::wait : Quadrant::low_hanging_fruit));
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : payload["rows"]) {
        if (r.at("quadrant") == wanted) rows.push_back(r);
      }
      payload["rows"] = rows;
      payload["dataset"] = show_wait ? "wait" : "lhf";
      emit(payload);
      return 0;
    };
  });

  // due
  std::string due_date;
  auto* due_cmd = sub("due", "Tickets due for re-submission at a meeting date");
  due_cmd->add_option("--data", data, "Store directory or export file")->required();
  due_cmd->add_option("--date", due_date, "Meeting date YYYY-MM-DD")->required();
  due_cmd->callback([&] {
    action = [&] {
      emit(due_payload(load_tickets(data, g.mapping, err), parse_date(due_date), effective_config(g)));
      return 0;
    };
  });

  // report
  std::string report_id, as_of;
  std::vector<std::string> params;
  std::string story, horizon, ticket_list, priority_source, dimension;
  auto* report_cmd = sub("report", "Visualization dataset (v1-v5, v7-v10, opened_closed, shares)");
  report_cmd->add_option("dataset", report_id, "Dataset id")->required();
  report_cmd->add_option("--data", data, "Store directory or export file")->required();
  report_cmd->add_option("--story", story, "Story id (v1)");
  report_cmd->add_option("--horizon", horizon, "Horizon in months (v4)");
  report_cmd->add_option("--tickets", ticket_list, "Comma-separated ticket ids (v4)");
  report_cmd->add_option("--priority-source", priority_source, "educated_guess or roi_based");
  report_cmd->add_option("--dimension", dimension, "Share dimension (shares)");
  report_cmd->add_option("--param", params, "Extra key=value parameter");
  report_cmd->add_option("--as-of", as_of, "Evaluate against the store as of this instant");
  report_cmd->callback([&] {
    action = [&] {
      DatasetRequest req;
      req.id = report_id;
      if (!story.empty()) req.params["story"] = story;
      if (!horizon.empty()) req.params["horizon"] = horizon;
      if (!ticket_list.empty()) req.params["tickets"] = ticket_list;
      if (!priority_source.empty()) req.params["priority_source"] = priority_source;
      if (!dimension.empty()) req.params["dimension"] = dimension;
      for (const auto& p : params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw Error(errc::invalid_argument, "--param expects key=value");
        req.params[p.substr(0, eq)] = p.substr(eq + 1);
      }
      if (!as_of.empty()) req.as_of = parse_timestamp(as_of);
      const auto cfg = effective_config(g);
      if (std::filesystem::is_directory(data)) {
        TicketStore store(data);
        emit(dataset(req, store, cfg));
      } else {
        TicketStore store;
        load_into(store, data, g.mapping, err);
        emit(dataset(req, store, cfg));
      }
      return 0;
    };
  });

  // sagat
  auto* sagat_cmd = sub("sagat", "TD-SAGAT interruption scheduling and aggregation");
  sagat_cmd->require_subcommand(1);
  std::string start, end, meeting_id = "M1";
  std::uint64_t seed = 0;
  auto* schedule_cmd = sagat_cmd->add_subcommand("schedule", "Draw interruption times for a meeting");
  schedule_cmd->fallthrough();
  schedule_cmd->add_option("--start", start, "Meeting start (ISO-8601)")->required();
  schedule_cmd->add_option("--end", end, "Meeting end (ISO-8601)")->required();
  schedule_cmd->add_option("--seed", seed, "Random seed")->required();
  schedule_cmd->add_option("--meeting", meeting_id, "Meeting id");
  schedule_cmd->callback([&] {
    action = [&] {
      const auto s = make_session(meeting_id, parse_timestamp(start), parse_timestamp(end), seed);
      if (g.format == "json") {
        out << canonical_json(to_json(s)) << "\n";
      } else {
        for (std::size_t i = 0; i < s.interruptions.size(); ++i) {
          out << (i + 1) << "  " << format_timestamp(s.interruptions[i]) << "\n";
        }
      }
      return 0;
    };
  });
  std::string sessions_file;
  auto* sagat_agg_cmd = sagat_cmd->add_subcommand("aggregate", "Aggregate recorded sessions (JSON)");
  sagat_agg_cmd->fallthrough();
  sagat_agg_cmd->add_option("file", sessions_file, "JSON array of sessions")->required();
  sagat_agg_cmd->callback([&] {
    action = [&] {
      auto doc = read_json_file(sessions_file);
      if (doc.is_object()) doc = nlohmann::json::array({doc});
      std::vector<MeetingSession> sessions;
      for (const auto& sj : doc) sessions.push_back(session_from_json(sj));
      nlohmann::json rows = nlohmann::json::array();
      std::vector<std::string> columns = {"meeting_id", "responses"};
      for (auto p : kAllPrerequisites) columns.emplace_back(to_string(p));
      for (auto c : kAllCategories) columns.emplace_back(to_string(c));
      for (const auto& s : sessions) {
        if (s.responses.empty()) {
          err << "warning: session " << s.meeting_id << " has no responses\n";
          continue;
        }
        const auto a = sagat_aggregate(s);
        nlohmann::json row = {{"meeting_id", a.meeting_id}, {"responses", a.responses}};
        for (auto p : kAllPrerequisites) {
          row[std::string(to_string(p))] = a.per_prerequisite[static_cast<std::size_t>(p)];
        }
        for (const auto& [c, v] : a.per_category) row[std::string(to_string(c))] = v;
        rows.push_back(row);
      }
      DatasetRequest req{"sagat", {}, std::nullopt};
      auto payload = detail::payload(req, effective_config(g), columns, rows);
      payload["mean_responses_per_session"] = mean_responses_per_session(sessions);
      emit(payload);
      if (g.format == "table") {
        out << "mean responses per session: " << mean_responses_per_session(sessions) << "\n";
      }
      return 0;
    };
  });

  // observe
  auto* observe_cmd = sub("observe", "Observation protocol import and aggregation");
  observe_cmd->require_subcommand(1);
  std::string observe_file;
  auto* observe_import = observe_cmd->add_subcommand("import", "Check an observation protocol CSV");
  observe_import->fallthrough();
  observe_import->add_option("file", observe_file, "Observation CSV")->required();
  observe_import->callback([&] {
    action = [&] {
      const auto rows = import_observations_csv(read_file(observe_file));
      out << rows.size() << " observation rows in " << group_by_meeting(rows).size() << " meetings\n";
      return 0;
    };
  });
  auto* observe_agg = observe_cmd->add_subcommand("aggregate", "Per-meeting observation shares");
  observe_agg->fallthrough();
  observe_agg->add_option("file", observe_file, "Observation CSV")->required();
  observe_agg->callback([&] {
    action = [&] {
      const auto rows = import_observations_csv(read_file(observe_file));
      std::vector<std::string> columns = {"meeting_id", "tickets", "td_tickets"};
      for (auto p : kAllPrerequisites) columns.emplace_back(to_string(p));
      columns.emplace_back(kContagiousness);
      for (auto c : kAllCategories) columns.emplace_back(to_string(c));
      columns.emplace_back("disagreement");
      columns.emplace_back("risk_unconscious");
      const auto disputes = identification_dispute(rows);
      nlohmann::json out_rows = nlohmann::json::array();
      std::size_t i = 0;
      for (const auto& group : group_by_meeting(rows)) {
        const auto a = observation_aggregate(group);
        nlohmann::json row = {{"meeting_id", a.meeting_id}, {"tickets", a.tickets}, {"td_tickets", a.td_tickets}};
        for (const auto& [k, v] : a.observables) row[k] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
        for (const auto& [c, v] : a.categories) {
          row[std::string(to_string(c))] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
        }
        row["disagreement"] = disputes[i].disagreement;
        row["risk_unconscious"] = disputes[i].risk_unconscious;
        ++i;
        out_rows.push_back(row);
      }
      DatasetRequest req{"observations", {}, std::nullopt};
      emit(detail::payload(req, effective_config(g), columns, out_rows));
      return 0;
    };
  });

  // effort
  std::string cycles_file;
  auto* effort_cmd = sub("effort", "TDM process effort per month and share of capacity");
  effort_cmd->add_option("file", cycles_file,
                         "CSV with establishment_hours,maintenance_hours,cycle_length_months")
      ->required();
  effort_cmd->callback([&] {
    action = [&] {
      const auto rows = csv::parse(read_file(cycles_file));
      if (rows.empty()) throw Error(errc::parse_error, "empty cycles file");
      std::map<std::string, std::size_t> col;
      for (std::size_t i = 0; i < rows[0].size(); ++i) col[rows[0][i]] = i;
      for (const char* c : {"establishment_hours", "maintenance_hours", "cycle_length_months"}) {
        if (!col.count(c)) throw Error(errc::missing_column, std::string("missing column ") + c, {c});
      }
      std::vector<CycleEffort> cycles;
      for (std::size_t r = 1; r < rows.size(); ++r) {
        cycles.push_back({parse_number(rows[r][col["establishment_hours"]], "establishment_hours"),
                          parse_number(rows[r][col["maintenance_hours"]], "maintenance_hours"),
                          parse_number(rows[r][col["cycle_length_months"]], "cycle_length_months")});
      }
      const auto s = effort_stats(cycles);
      nlohmann::json row = {{"establishment_hours_per_month", s.establishment_per_month},
                            {"maintenance_hours_per_month", s.maintenance_per_month},
                            {"establishment_capacity_fraction", s.establishment_fraction},
                            {"maintenance_capacity_fraction", s.maintenance_fraction},
                            {"below_three_percent", s.below_three_percent()}};
      DatasetRequest req{"effort", {}, std::nullopt};
      emit(detail::payload(req, effective_config(g),
                           {"establishment_hours_per_month", "maintenance_hours_per_month",
                            "establishment_capacity_fraction", "maintenance_capacity_fraction",
                            "below_three_percent"},
                           nlohmann::json::array({row})));
      return 0;
    };
  });

  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = sub("serve", "Run the HTTP/JSON service");
  serve_cmd->add_option("--data", data, "Store directory or export file")->required();
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port");
  serve_cmd->callback([&] {
    action = [&] {
      const auto cfg = effective_config(g);
      std::unique_ptr<TicketStore> store;
      if (std::filesystem::is_directory(data)) {
        store = std::make_unique<TicketStore>(data);
      } else {
        store = std::make_unique<TicketStore>();
        load_into(*store, data, g.mapping, err);
      }
      HttpService service(*store, cfg);
      err << "serving " << store->size() << " tickets on http://" << host << ":" << port << "\n";
      return service.listen(host, port) ? 0 : 1;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }
  try {
    return action ? action() : 2;
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what() << "\n";
    if (is_usage_code(e.code())) {
      err << app.help();
      return 2;
    }
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tdledger
