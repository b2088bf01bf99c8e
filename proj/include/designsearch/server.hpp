#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "session.hpp"

namespace designsearch {

namespace detail {

inline int http_status(SessionError::Kind k) {
  switch (k) {
    case SessionError::Kind::not_found: return 404;
    case SessionError::Kind::conflict: return 409;
    case SessionError::Kind::invalid:
    case SessionError::Kind::unsupported: return 422;
  }
  return 500;
}

inline void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

// Parses the body, runs fn, and maps exceptions to status codes.
template <class Fn>
void handle(const httplib::Request& req, httplib::Response& res, Fn&& fn) {
  try {
    nlohmann::json body;
    if (!req.body.empty()) body = nlohmann::json::parse(req.body);
    fn(body);
  } catch (const SessionError& e) {
    send_error(res, http_status(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    send_error(res, 400, std::string("malformed request: ") + e.what());
  } catch (const ParseError& e) {
    send_error(res, 422, e.what());
  } catch (const ValidationError& e) {
    send_error(res, 422, e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

inline SessionConfig session_config_from(const nlohmann::json& body) {
  SessionConfig cfg;
  cfg.engine = parse_session_engine(body.at("engine").get<std::string>());
  if (body.contains("config")) {
    const auto& o = body["config"];
    for (auto it = o.begin(); it != o.end(); ++it) {
      const auto& k = it.key();
      if (k == "cap")
        cfg.evaluation_cap = it->get<long>();
      else if (k == "a")
        cfg.structure_weight = it->get<double>();
      else if (k == "alpha")
        cfg.alpha = it->get<double>();
      else if (k == "mu")
        cfg.mu = it->get<double>();
      else if (k == "rho")
        cfg.rho = it->get<double>();
      else
        throw SessionError(SessionError::Kind::invalid, "unknown config override '" + k + "'");
    }
  }
  return cfg;
}

}  // namespace detail

// Installs the session routes on `server`.
inline void mount_sessions(httplib::Server& server, SessionStore& store) {
  using detail::handle;
  using detail::send_json;
  using nlohmann::json;

  server.Get("/problems", [&](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const json&) { send_json(res, 200, store.problem_names()); });
  });

  server.Post("/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const json& body) {
      if (!body.is_object()) throw SessionError(SessionError::Kind::invalid, "request body must be an object");
      const auto& p = body.at("problem");
      auto problem = p.is_string() ? store.problem(p.get<std::string>())
                                   : std::make_shared<const DesignProblem>(problem_from_json(p));
      auto cfg = detail::session_config_from(body);
      std::optional<std::uint64_t> seed;
      if (body.contains("seed")) seed = body["seed"].get<std::uint64_t>();
      const auto id = store.create(problem, cfg, seed);
      send_json(res, 201, store.read(id, [](const Session& s) { return status_json(s); }));
    });
  });

  server.Get(R"(/sessions/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const json&) {
      send_json(res, 200, store.read(req.matches[1], [](const Session& s) { return status_json(s); }));
    });
  });

  server.Get(R"(/sessions/([^/]+)/population)", [&](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const json&) {
      send_json(res, 200, store.read(req.matches[1], [](const Session& s) { return population_json(s); }));
    });
  });

  server.Get(R"(/sessions/([^/]+)/log)", [&](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const json&) {
      send_json(res, 200, store.read(req.matches[1], [](const Session& s) { return s.event_log(); }));
    });
  });

  server.Post(R"(/sessions/([^/]+)/ratings)", [&](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const json& body) {
      if (!body.is_array()) throw SessionError(SessionError::Kind::invalid, "ratings must be an array");
      std::vector<Rating> ratings;
      for (const auto& r : body) {
        if (!r.is_object() || !r.contains("index") || !r.contains("level") || !r["index"].is_number_integer() ||
            !r["level"].is_number_integer())
          throw SessionError(SessionError::Kind::invalid, "each rating needs integer index and level");
        ratings.push_back({r["index"].get<int>(), r["level"].get<int>()});
      }
      const auto out = store.mutate(req.matches[1], [&](Session& s) {
        const auto step = s.submit_ratings(ratings);
        return json{{"generation", step.generation},
                    {"evaluations", step.evaluations},
                    {"status", to_string(step.status)},
                    {"fitness", step.fitness}};
      });
      send_json(res, 200, out);
    });
  });

  server.Post(R"(/sessions/([^/]+)/freeze)", [&](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const json& body) {
      const int candidate = body.at("candidate").get<int>();
      const int cls = body.at("class").get<int>();
      const int handle_id = store.mutate(req.matches[1], [&](Session& s) { return s.freeze(candidate, cls); });
      send_json(res, 200, {{"frozen", handle_id}});
    });
  });

  server.Delete(R"(/sessions/([^/]+)/freeze)", [&](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const json& body) {
      const int cls = body.at("class").get<int>();
      store.mutate(req.matches[1], [&](Session& s) {
        s.unfreeze(cls);
        return 0;
      });
      send_json(res, 200, {{"unfrozen", cls}});
    });
  });
}

}  // namespace designsearch
