#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "splitlabel/dataset.hpp"

namespace splitlabel {

// Transport-neutral reply: HTTP-style status plus a JSON body, or a raw
// payload when content_type is not JSON (the label CSV).
struct ServiceResponse {
    ServiceResponse() = default;
    ServiceResponse(int status_code, nlohmann::json json_body)
        : status(status_code), body(std::move(json_body)) {}

    int status = 200;
    nlohmann::json body;
    std::string content_type = "application/json";
    std::string raw;

    std::string payload() const { return content_type == "application/json" ? body.dump() : raw; }
};

class Session;

// Holds labeling sessions, each wrapping one engine whose oracle is a human
// answering through submit_label. Commands on one session run one at a time;
// different sessions proceed independently.
class SessionManager {
public:
    using DatasetMap = std::map<std::string, std::shared_ptr<const Dataset>>;

    explicit SessionManager(DatasetMap datasets,
                            std::optional<std::filesystem::path> checkpoint_dir = std::nullopt);
    ~SessionManager();

    SessionManager(const SessionManager&) = delete;
    SessionManager& operator=(const SessionManager&) = delete;

    // Base config for new sessions; a session's own config keys override it.
    void set_default_config(nlohmann::json config);

    ServiceResponse health() const;
    ServiceResponse list_datasets() const;

    // body: {"dataset": name, "config": RunConfig JSON}
    ServiceResponse create_session(const nlohmann::json& body);
    ServiceResponse get_query(const std::string& session_id);
    // body: {"query_id": k, "label": c}
    ServiceResponse submit_label(const std::string& session_id, const nlohmann::json& body);
    ServiceResponse get_state(const std::string& session_id);
    ServiceResponse finalize(const std::string& session_id);
    // Label CSV of a finalized session.
    ServiceResponse labels_csv(const std::string& session_id);

    // Reloads every <id>.json in the checkpoint directory. Returns the count.
    std::size_t load_checkpoints();

private:
    std::shared_ptr<Session> find(const std::string& session_id) const;
    std::string next_session_id();
    void persist(const Session& session) const;

    DatasetMap datasets_;
    nlohmann::json default_config_ = nlohmann::json::object();
    std::optional<std::filesystem::path> checkpoint_dir_;
    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t id_counter_ = 0;
    std::uint64_t id_salt_;
};

}  // namespace splitlabel
