#include "splitlabel/http_server.hpp"

#include <stdexcept>

// Eigen must precede httplib.h, which brings in the _res macro from <resolv.h>.
#include "splitlabel/service.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace splitlabel {
namespace {

void reply(httplib::Response& res, const ServiceResponse& out) {
    res.status = out.status;
    res.set_content(out.payload(), out.content_type);
}

std::optional<nlohmann::json> parse_body(const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body.empty() ? std::string("{}") : req.body, nullptr,
                                      /*allow_exceptions=*/false);
    if (body.is_discarded()) {
        reply(res, {400, nlohmann::json{{"error", "request body is not valid JSON"}}});
        return std::nullopt;
    }
    return body;
}

}  // namespace

struct HttpServer::Impl {
    explicit Impl(SessionManager& s) : sessions(s) {}
    SessionManager& sessions;
    httplib::Server server;
};

HttpServer::HttpServer(SessionManager& sessions, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(sessions)) {
    auto& svr = impl_->server;
    auto& mgr = impl_->sessions;

    // Without SO_REUSEPORT a second server on the same port fails to bind.
    svr.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    svr.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                             {"Access-Control-Allow-Headers", "Content-Type"},
                             {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    svr.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    svr.Get("/health", [&mgr](const httplib::Request&, httplib::Response& res) {
        reply(res, mgr.health());
    });
    svr.Get("/datasets", [&mgr](const httplib::Request&, httplib::Response& res) {
        reply(res, mgr.list_datasets());
    });
    svr.Post("/sessions", [&mgr](const httplib::Request& req, httplib::Response& res) {
        if (auto body = parse_body(req, res)) {
            reply(res, mgr.create_session(*body));
        }
    });
    svr.Get(R"(/sessions/([A-Za-z0-9]+)/query)",
            [&mgr](const httplib::Request& req, httplib::Response& res) {
                reply(res, mgr.get_query(req.matches[1]));
            });
    svr.Post(R"(/sessions/([A-Za-z0-9]+)/labels)",
             [&mgr](const httplib::Request& req, httplib::Response& res) {
                 if (auto body = parse_body(req, res)) {
                     reply(res, mgr.submit_label(req.matches[1], *body));
                 }
             });
    svr.Get(R"(/sessions/([A-Za-z0-9]+)/state)",
            [&mgr](const httplib::Request& req, httplib::Response& res) {
                reply(res, mgr.get_state(req.matches[1]));
            });
    svr.Post(R"(/sessions/([A-Za-z0-9]+)/finalize)",
             [&mgr](const httplib::Request& req, httplib::Response& res) {
                 reply(res, mgr.finalize(req.matches[1]));
             });
    svr.Get(R"(/sessions/([A-Za-z0-9]+)/labels\.csv)",
            [&mgr](const httplib::Request& req, httplib::Response& res) {
                reply(res, mgr.labels_csv(req.matches[1]));
            });

    if (static_dir) {
        svr.set_mount_point("/", static_dir->string());
    }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int chosen = impl_->server.bind_to_any_port(host);
        if (chosen < 0) {
            throw std::runtime_error("could not bind any port on " + host);
        }
        return chosen;
    }
    if (!impl_->server.bind_to_port(host, port)) {
        throw std::runtime_error("could not bind " + host + ":" + std::to_string(port) +
                                 " (port in use?)");
    }
    return port;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) {
        impl_->server.stop();
    }
}

}  // namespace splitlabel
