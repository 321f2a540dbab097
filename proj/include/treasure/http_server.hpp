#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "treasure/service.hpp"

namespace httplib {
class Server;
}

namespace treasure {

// Routes:
//   POST /sessions                         {"participantId": "..."}
//   GET  /sessions/{token}/state
//   POST /sessions/{token}/move            {"cell": "B1"}
//   POST /sessions/{token}/questionnaire   {"trust": 1..9, "selfConfidence": 1..9}
//   GET  /sessions/{token}/export          text/csv, after the last map
void register_routes(httplib::Server& server, SessionManager& manager);

class HttpService {
public:
    HttpService(SessionManager& manager, const std::filesystem::path& static_dir = {});
    ~HttpService();

    // Binds and serves until stop(). Returns false if the bind failed.
    bool listen(const std::string& host, int port);
    // Binds to an ephemeral port and returns it, or -1.
    int bind_any(const std::string& host);
    bool listen_after_bind();
    void stop();

private:
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace treasure
