#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace splitlabel {

class SessionManager;

// HTTP+JSON front end for a SessionManager:
//   GET  /health
//   GET  /datasets
//   POST /sessions
//   GET  /sessions/{id}/query
//   POST /sessions/{id}/labels
//   GET  /sessions/{id}/state
//   POST /sessions/{id}/finalize
//   GET  /sessions/{id}/labels.csv
class HttpServer {
public:
    explicit HttpServer(SessionManager& sessions,
                        std::optional<std::filesystem::path> static_dir = std::nullopt);
    ~HttpServer();

    // Binds the port (0 picks a free one) and returns it. Throws
    // std::runtime_error when the port is unavailable.
    int bind(const std::string& host, int port);
    // Serves until stop(); call after bind.
    void serve();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace splitlabel
