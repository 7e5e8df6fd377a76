#pragma once

// HTTP/JSON service over a TicketStore. Reads run concurrently on store
// snapshots; mutations go through the store's single writer.
//
//   GET   /health
//   GET   /tickets?kind=&status=&component=&include_deleted=
//   GET   /tickets/{id}
//   PATCH /tickets/{id}          {"version": n, "actor": "...", "changes": {...} | [...]}
//   GET   /datasets/{id}?<params>&as_of=
//   GET   /due?date=YYYY-MM-DD
//   POST  /sagat/sessions        {"meeting_id", "start", "end", "seed"}
//   GET   /sagat/sessions/{id}
//   POST  /sagat/responses       {"session", "interruption", "participant", "answers"}
//   GET   /sagat/sessions/{id}/aggregate
//
// Errors: {"error": {"code": ..., "message": ..., "fields": [...]}}.

#include <map>
#include <mutex>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "tdledger/awareness.hpp"
#include "tdledger/datasets.hpp"

namespace tdledger {

inline int http_status_for(const std::string& code) {
  if (code == errc::unknown_ticket || code == errc::unknown_session || code == errc::unknown_dataset ||
      code == errc::dataset_disabled) {
    return 404;
  }
  if (code == errc::version_conflict || code == errc::duplicate_response ||
      code == errc::duplicate_ticket || code == errc::out_of_order || code == errc::empty_session) {
    return 409;
  }
  if (code == errc::io_error) return 500;
  return 400;
}

inline nlohmann::json error_body(const std::string& code, const std::string& message,
                                 const std::vector<std::string>& fields = {}) {
  return {{"error", {{"code", code}, {"message", message}, {"fields", fields}}}};
}

// In-memory TD-SAGAT sessions, optionally persisted as one JSON document.
class SagatRegistry {
 public:
  explicit SagatRegistry(std::optional<std::filesystem::path> file = std::nullopt)
      : file_(std::move(file)) {
    if (file_ && std::filesystem::exists(*file_)) {
      for (const auto& sj : read_json_file(*file_)) {
        auto s = session_from_json(sj);
        sessions_[s.meeting_id] = std::move(s);
      }
    }
  }

  MeetingSession create(std::string meeting_id, Timestamp start, Timestamp end, std::uint64_t seed) {
    std::lock_guard lock(mu_);
    if (meeting_id.empty()) meeting_id = "S" + std::to_string(sessions_.size() + 1);
    if (sessions_.count(meeting_id)) {
      throw Error(errc::duplicate_response, "session '" + meeting_id + "' already exists",
                  {"meeting_id"});
    }
    auto s = make_session(meeting_id, start, end, seed);
    sessions_[meeting_id] = s;
    persist();
    return s;
  }

  SagatResponse respond(const std::string& session_id, int interruption,
                        const std::string& participant, const Answers& answers) {
    std::lock_guard lock(mu_);
    auto& s = get_locked(session_id);
    SagatResponse r{interruption, participant, answers,
                    make_question_order(s.seed, interruption, participant)};
    add_response(s, r);
    persist();
    return r;
  }

  MeetingSession get(const std::string& id) const {
    std::lock_guard lock(mu_);
    return const_cast<SagatRegistry*>(this)->get_locked(id);
  }

  std::vector<MeetingSession> all() const {
    std::lock_guard lock(mu_);
    std::vector<MeetingSession> out;
    for (const auto& [id, s] : sessions_) out.push_back(s);
    return out;
  }

 private:
  MeetingSession& get_locked(const std::string& id) {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(errc::unknown_session, "unknown session '" + id + "'");
    return it->second;
  }

  void persist() const {
    if (!file_) return;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [id, s] : sessions_) arr.push_back(to_json(s));
    write_file(*file_, arr.dump(2));
  }

  std::optional<std::filesystem::path> file_;
  mutable std::mutex mu_;
  std::map<std::string, MeetingSession> sessions_;
};

class HttpService {
 public:
  HttpService(TicketStore& store, LedgerConfig cfg)
      : store_(store),
        cfg_(std::move(cfg)),
        sagat_(store.directory() ? std::optional(*store.directory() / "sagat.json") : std::nullopt) {
    routes();
  }

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Blocks until stop().
  bool listen(const std::string& host, int port) { return server_.listen(host, port); }

  // Binds an ephemeral port; pair with listen_after_bind() on another thread.
  int bind_any(const std::string& host = "127.0.0.1") { return server_.bind_to_any_port(host); }
  bool listen_after_bind() { return server_.listen_after_bind(); }
  void wait_until_ready() const { server_.wait_until_ready(); }
  void stop() { server_.stop(); }

  SagatRegistry& sagat() { return sagat_; }

 private:
  using Handler = std::function<nlohmann::json(const httplib::Request&, httplib::Response&)>;

  static void send(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(canonical_json(body) + "\n", "application/json");
  }

  static httplib::Server::Handler wrap(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        res.status = 200;
        auto body = h(req, res);
        send(res, res.status, body);
      } catch (const Error& e) {
        send(res, http_status_for(e.code()), error_body(e.code(), e.what(), e.fields()));
      } catch (const nlohmann::json::exception& e) {
        send(res, 400, error_body(errc::parse_error, e.what()));
      } catch (const std::exception& e) {
        send(res, 500, error_body("internal", e.what()));
      }
    };
  }

  static nlohmann::json parse_body(const httplib::Request& req) {
    try {
      return nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(errc::parse_error, std::string("malformed JSON body: ") + e.what());
    }
  }

  static std::string query(const httplib::Request& req, const std::string& key) {
    return req.has_param(key) ? req.get_param_value(key) : std::string{};
  }

  void routes() {
    server_.Get("/health", wrap([](const auto&, auto&) { return nlohmann::json{{"status", "ok"}}; }));

    server_.Get("/tickets", wrap([this](const httplib::Request& req, auto&) {
      const auto kind = query(req, "kind");
      const auto status = query(req, "status");
      const auto component = query(req, "component");
      const bool include_deleted = parse_bool(query(req, "include_deleted"), "include_deleted");
      std::optional<TicketKind> k;
      std::optional<TicketStatus> st;
      if (!kind.empty()) k = kind_from_string(kind);
      if (!status.empty()) st = status_from_string(status);
      const auto path = ComponentPath::parse(component);
      nlohmann::json out = nlohmann::json::array();
      for (const auto& t : store_.tickets()) {
        if (t.deleted && !include_deleted) continue;
        if (k && t.kind != *k) continue;
        if (st && t.status != *st) continue;
        if (!component.empty() && !is_ancestor(path, t.component)) continue;
        out.push_back(to_json(t));
      }
      return nlohmann::json{{"tickets", out}};
    }));

    server_.Get(R"(/tickets/([^/]+))", wrap([this](const httplib::Request& req, auto&) {
      const std::string id = req.matches[1];
      auto t = store_.find(id);
      if (!t) throw Error(errc::unknown_ticket, "unknown ticket '" + id + "'");
      return to_json(*t);
    }));

    server_.Patch(R"(/tickets/([^/]+))", wrap([this](const httplib::Request& req, auto&) {
      const std::string id = req.matches[1];
      const auto body = parse_body(req);
      if (!body.contains("version")) {
        throw Error(errc::validation_failed, "PATCH requires 'version'", {"version"});
      }
      ChangeRequest cr;
      cr.ticket_id = id;
      cr.expected_version = body.at("version").get<std::uint64_t>();
      cr.actor = body.value("actor", std::string("api"));
      const auto& changes = body.at("changes");
      if (changes.is_object()) {
        for (auto it = changes.begin(); it != changes.end(); ++it) {
          cr.changes.push_back({it.key(), std::nullopt, json_scalar_to_string(*it)});
        }
      } else {
        for (const auto& c : changes) {
          FieldChange fc{c.at("field").get<std::string>(), std::nullopt,
                         json_scalar_to_string(c.at("new"))};
          if (c.contains("old")) fc.old_value = json_scalar_to_string(c.at("old"));
          cr.changes.push_back(std::move(fc));
        }
      }
      if (!store_.find(id)) throw Error(errc::unknown_ticket, "unknown ticket '" + id + "'");
      store_.apply_change(cr);
      return to_json(*store_.find(id));
    }));

    server_.Get(R"(/datasets/([^/]+))", wrap([this](const httplib::Request& req, auto&) {
      DatasetRequest dr;
      dr.id = req.matches[1];
      for (const auto& [k, v] : req.params) {
        if (k == "as_of") {
          dr.as_of = parse_timestamp(v);
        } else {
          dr.params[k] = v;
        }
      }
      return dataset(dr, store_, cfg_);
    }));

    server_.Get("/due", wrap([this](const httplib::Request& req, auto&) {
      const auto date = query(req, "date");
      if (date.empty()) throw Error(errc::missing_parameter, "due requires 'date'", {"date"});
      return due_payload(store_.tickets(), parse_date(date), cfg_);
    }));

    server_.Post("/sagat/sessions", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      auto s = sagat_.create(body.value("meeting_id", std::string{}),
                             parse_timestamp(body.at("start").get<std::string>()),
                             parse_timestamp(body.at("end").get<std::string>()),
                             body.value("seed", std::uint64_t{0}));
      res.status = 201;
      return to_json(s);
    }));

    server_.Get(R"(/sagat/sessions/([^/]+))", wrap([this](const httplib::Request& req, auto&) {
      return to_json(sagat_.get(req.matches[1]));
    }));

    server_.Get(R"(/sagat/sessions/([^/]+)/aggregate)", wrap([this](const httplib::Request& req, auto&) {
      return to_json(sagat_aggregate(sagat_.get(req.matches[1])));
    }));

    server_.Post("/sagat/responses", wrap([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = parse_body(req);
      for (const char* key : {"session", "interruption", "participant", "answers"}) {
        if (!body.contains(key)) {
          throw Error(errc::validation_failed, std::string("missing '") + key + "'", {key});
        }
      }
      auto r = sagat_.respond(body.at("session").get<std::string>(), body.at("interruption").get<int>(),
                              body.at("participant").get<std::string>(),
                              answers_from_json(body.at("answers")));
      res.status = 201;
      return to_json(r);
    }));
  }

  TicketStore& store_;
  const LedgerConfig cfg_;
  SagatRegistry sagat_;
  httplib::Server server_;
};

}  // namespace tdledger
