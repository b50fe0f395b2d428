#include <spdlog/spdlog.h>

#include "claimspot/error.hpp"
#include "claimspot/service.hpp"
#include "httplib.h"

namespace claimspot {

using nlohmann::json;

struct HttpServer::Impl {
  LiveService& service;
  httplib::Server server;

  explicit Impl(LiveService& s) : service(s) {}
};

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SessionNotFound:
    case ErrorCode::ItemNotFound: return 404;
    case ErrorCode::DuplicateSession: return 409;
    case ErrorCode::ModelNotLoaded: return 503;
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParseError: return 400;
    default: return 500;
  }
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send_json(res, {{"error", code}, {"message", message}}, status);
}

json parse_body(const httplib::Request& req) {
  try {
    auto body = json::parse(req.body.empty() ? "{}" : req.body);
    if (!body.is_object()) throw Error(ErrorCode::ParseError, "request body must be a JSON object");
    return body;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, status_for(e.code()), error_code_name(e.code()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "ParseError", e.what());
    } catch (const std::exception& e) {
      spdlog::error("request {} {} failed: {}", req.method, req.path, e.what());
      send_error(res, 500, "InternalError", e.what());
    }
  };
}

json items_json(const std::vector<FeedItem>& items) {
  json arr = json::array();
  for (const auto& item : items) arr.push_back(to_wire(item));
  return {{"items", std::move(arr)}};
}

}  // namespace

HttpServer::HttpServer(LiveService& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  auto& svc = impl_->service;

  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Get("/health", guarded([&svc](const httplib::Request&, httplib::Response& res) {
            send_json(res, {{"status", "ok"}, {"model_loaded", svc.model_loaded()}});
          }));

  srv.Post("/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             std::optional<std::string> id;
             if (body.contains("id") && !body.at("id").is_null()) id = body.at("id").get<std::string>();
             const auto session = svc.create_session(body.value("title", std::string{}), id);
             send_json(res, to_wire(session));
           }));

  srv.Get("/sessions", guarded([&svc](const httplib::Request&, httplib::Response& res) {
            json arr = json::array();
            for (const auto& s : svc.list_sessions()) arr.push_back(to_wire(s));
            send_json(res, arr);
          }));

  srv.Post(R"(/sessions/([^/]+)/text)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             const auto body = parse_body(req);
             if (!body.contains("text") || !body.at("text").is_string()) {
               throw Error(ErrorCode::InvalidArgument, "body needs a string 'text'");
             }
             send_json(res, items_json(svc.append_text(req.matches[1], body.at("text").get<std::string>())));
           }));

  srv.Get(R"(/sessions/([^/]+)/feed)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            std::int64_t since = -1;
            if (req.has_param("since")) {
              try {
                since = std::stoll(req.get_param_value("since"));
              } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidArgument, "since must be an integer");
              }
            }
            send_json(res, items_json(svc.get_feed(req.matches[1], since)));
          }));

  srv.Put(R"(/sessions/([^/]+)/items/(-?\d+)/highlight)",
          guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const auto body = parse_body(req);
            if (!body.contains("value") || !body.at("value").is_boolean()) {
              throw Error(ErrorCode::InvalidArgument, "body needs a boolean 'value'");
            }
            const auto item = svc.set_highlight(req.matches[1], std::stoll(req.matches[2]), body.at("value").get<bool>());
            send_json(res, to_wire(item));
          }));

  srv.Get(R"(/sessions/([^/]+)/export)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            const auto filter =
                export_filter_from_string(req.has_param("filter") ? req.get_param_value("filter") : "both");
            res.set_content(svc.export_claims(req.matches[1], filter), "text/tab-separated-values");
          }));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace claimspot
