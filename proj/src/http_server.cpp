#include "treasure/http_server.hpp"

#include <httplib.h>

namespace treasure {

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

nlohmann::json parse_body(const httplib::Request& req) {
    try {
        auto j = nlohmann::json::parse(req.body);
        if (!j.is_object()) throw ApiError(400, "request body must be a JSON object");
        return j;
    } catch (const nlohmann::json::parse_error&) {
        throw ApiError(400, "request body is not valid JSON");
    }
}

template <class T>
T field(const nlohmann::json& body, const char* key) {
    if (!body.contains(key)) throw ApiError(400, std::string("missing field '") + key + "'");
    try {
        return body.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ApiError(400, std::string("field '") + key + "' has the wrong type");
    }
}

template <class F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const ApiError& e) {
            send_json(res, e.status(), e.body());
        } catch (const std::exception& e) {
            send_json(res, 500, {{"error", e.what()}});
        }
    };
}

}  // namespace

void register_routes(httplib::Server& server, SessionManager& manager) {
    server.Post("/sessions", guarded([&manager](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    send_json(res, 201, manager.create_session(field<std::string>(body, "participantId")));
                }));
    server.Get(R"(/sessions/([0-9a-f]+)/state)",
               guarded([&manager](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, 200, manager.get_state(req.matches[1]));
               }));
    server.Post(R"(/sessions/([0-9a-f]+)/move)",
                guarded([&manager](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    send_json(res, 200, manager.post_move(req.matches[1], field<std::string>(body, "cell")));
                }));
    server.Post(R"(/sessions/([0-9a-f]+)/questionnaire)",
                guarded([&manager](const httplib::Request& req, httplib::Response& res) {
                    const auto body = parse_body(req);
                    send_json(res, 200,
                              manager.post_questionnaire(req.matches[1], field<int>(body, "trust"),
                                                         field<int>(body, "selfConfidence")));
                }));
    server.Get(R"(/sessions/([0-9a-f]+)/export)",
               guarded([&manager](const httplib::Request& req, httplib::Response& res) {
                   res.status = 200;
                   res.set_content(manager.export_csv(req.matches[1]), "text/csv");
               }));
}

HttpService::HttpService(SessionManager& manager, const std::filesystem::path& static_dir)
    : server_(std::make_unique<httplib::Server>()) {
    register_routes(*server_, manager);
    if (!static_dir.empty()) server_->set_mount_point("/", static_dir.string());
}

HttpService::~HttpService() { stop(); }

bool HttpService::listen(const std::string& host, int port) { return server_->listen(host, port); }

int HttpService::bind_any(const std::string& host) { return server_->bind_to_any_port(host); }

bool HttpService::listen_after_bind() { return server_->listen_after_bind(); }

void HttpService::stop() {
    if (server_) server_->stop();
}

}  // namespace treasure
