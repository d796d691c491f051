#include "splitlabel/service.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <variant>
#include <vector>

#include "splitlabel/engine.hpp"
#include "splitlabel/error.hpp"

namespace splitlabel {
namespace {

constexpr std::size_t kHistoryTail = 20;

ServiceResponse error(int status, const std::string& message) {
    return {status, nlohmann::json{{"error", message}}};
}

nlohmann::json render_hint_json(const Dataset& data) {
    if (!data.render_hint) {
        return nullptr;
    }
    return {{"height", data.render_hint->height}, {"width", data.render_hint->width}};
}

}  // namespace

enum class SessionStatus { awaiting_label, finished };

class Session {
public:
    Session(std::string id, std::string dataset_name, std::shared_ptr<const Dataset> dataset,
            Engine engine)
        : id_(std::move(id)),
          dataset_name_(std::move(dataset_name)),
          dataset_(std::move(dataset)),
          engine_(std::move(engine)),
          initial_budget_(engine_.config().budget) {}

    std::mutex& mutex() { return mutex_; }
    const std::string& id() const { return id_; }

    // Steps until the engine needs a human answer or the run ends.
    void advance() {
        if (finalized_) {
            status_ = SessionStatus::finished;
            return;
        }
        while (true) {
            auto outcome = engine_.begin_step();
            if (std::holds_alternative<RunFinished>(outcome)) {
                status_ = SessionStatus::finished;
                return;
            }
            if (std::holds_alternative<PendingQuery>(outcome)) {
                ++query_id_;
                status_ = SessionStatus::awaiting_label;
                return;
            }
            record(std::get<ActionRecord>(outcome));
        }
    }

    ServiceResponse query_view() const {
        if (status_ == SessionStatus::finished) {
            return {200, {{"status", "finished"}, {"session_id", id_}}};
        }
        const PendingQuery& q = *engine_.pending();
        const auto row = dataset_->row(q.example_id);
        return {200,
                {{"status", "awaiting_label"},
                 {"session_id", id_},
                 {"query_id", query_id_},
                 {"example_id", q.example_id},
                 {"node", q.node.value},
                 {"features", std::vector<double>(row.begin(), row.end())},
                 {"render_hint", render_hint_json(*dataset_)},
                 {"num_classes", dataset_->num_classes}}};
    }

    ServiceResponse submit(const nlohmann::json& body) {
        if (!body.contains("query_id") || !body.contains("label") ||
            !body["query_id"].is_number_integer() || !body["label"].is_number_integer()) {
            return error(400, "body needs integer query_id and label");
        }
        if (status_ != SessionStatus::awaiting_label ||
            body["query_id"].get<std::int64_t>() != static_cast<std::int64_t>(query_id_)) {
            return {409,
                    {{"error", "stale or unknown query_id"},
                     {"current_query_id",
                      status_ == SessionStatus::awaiting_label ? nlohmann::json(query_id_)
                                                               : nlohmann::json(nullptr)}}};
        }
        const auto label = body["label"].get<std::int64_t>();
        if (label < 0 || static_cast<std::size_t>(label) >= dataset_->num_classes) {
            return error(422, "label " + std::to_string(label) + " outside [0, " +
                                  std::to_string(dataset_->num_classes) + ")");
        }
        record(engine_.complete_label(static_cast<ClassId>(label)));
        advance();
        nlohmann::json reply = {{"status", status_name()},
                                {"budget_remaining", engine_.budget_remaining()},
                                {"step_index", engine_.step_index()},
                                {"leaves", leaves_json()}};
        if (status_ == SessionStatus::awaiting_label) {
            reply["query"] = query_view().body;
        }
        return {200, reply};
    }

    ServiceResponse state_view() const {
        const std::size_t first = history_.size() > kHistoryTail ? history_.size() - kHistoryTail : 0;
        auto tail = nlohmann::json::array();
        for (std::size_t i = first; i < history_.size(); ++i) {
            tail.push_back(history_[i]);
        }
        return {200,
                {{"session_id", id_},
                 {"dataset", dataset_name_},
                 {"status", status_name()},
                 {"finalized", finalized_},
                 {"step_index", engine_.step_index()},
                 {"budget_initial", initial_budget_},
                 {"budget_remaining", engine_.budget_remaining()},
                 {"num_classes", dataset_->num_classes},
                 {"leaves", leaves_json()},
                 {"total_bound", engine_.total_bound()},
                 {"bound_curve", curve_},
                 {"history_tail", tail}}};
    }

    ServiceResponse finalize() {
        if (!finalized_) {
            engine_.abort_label();
            export_ = export_labels_string(engine_.finalize());
            finalized_ = true;
            status_ = SessionStatus::finished;
        }
        return csv();
    }

    ServiceResponse csv() const {
        if (!finalized_) {
            return error(409, "session not finalized");
        }
        ServiceResponse r;
        r.content_type = "text/csv";
        r.raw = export_;
        return r;
    }

    nlohmann::json checkpoint() const {
        return {{"session_id", id_},
                {"dataset", dataset_name_},
                {"engine", engine_.checkpoint()},
                {"query_id", query_id_},
                {"initial_budget", initial_budget_},
                {"history", history_},
                {"bound_curve", curve_},
                {"finalized", finalized_},
                {"status", status_name()}};
    }

    static std::shared_ptr<Session> restore(const nlohmann::json& doc,
                                            std::shared_ptr<const Dataset> dataset) {
        auto engine = Engine::restore(doc.at("engine"), *dataset);
        auto session = std::make_shared<Session>(doc.at("session_id").get<std::string>(),
                                                 doc.at("dataset").get<std::string>(),
                                                 std::move(dataset), std::move(engine));
        session->initial_budget_ = doc.at("initial_budget").get<std::size_t>();
        session->history_ = doc.at("history").get<std::vector<nlohmann::json>>();
        session->curve_ = doc.at("bound_curve");
        // advance() re-derives the pending query and bumps the id again.
        session->query_id_ = doc.at("query_id").get<std::uint64_t>();
        if (session->query_id_ > 0 && doc.at("status").get<std::string>() == "awaiting_label") {
            --session->query_id_;
        }
        if (doc.at("finalized").get<bool>()) {
            session->finalize();
        } else {
            session->advance();
        }
        return session;
    }

    std::string status_name() const {
        return status_ == SessionStatus::finished ? "finished" : "awaiting_label";
    }

private:
    void record(const ActionRecord& r) {
        history_.push_back(to_json(r));
        nlohmann::json point = {{"step", r.step_index}, {"total_bound", r.total_bound_after}};
        if (r.true_correct_after) {
            point["true_correct"] = *r.true_correct_after;
        }
        curve_.push_back(point);
    }

    nlohmann::json leaves_json() const {
        auto leaves = engine_.tree().leaf_summary();
        for (auto& leaf : leaves) {
            const Node& node = engine_.tree().node(NodeId{leaf["id"].get<std::uint64_t>()});
            leaf["bound"] = maximize_bound(node.stats(), engine_.config().bound).value;
        }
        return leaves;
    }

    std::mutex mutex_;
    std::string id_;
    std::string dataset_name_;
    std::shared_ptr<const Dataset> dataset_;
    Engine engine_;
    std::size_t initial_budget_;
    SessionStatus status_ = SessionStatus::awaiting_label;
    std::uint64_t query_id_ = 0;
    std::vector<nlohmann::json> history_;
    nlohmann::json curve_ = nlohmann::json::array();
    bool finalized_ = false;
    std::string export_;
};

SessionManager::SessionManager(DatasetMap datasets,
                               std::optional<std::filesystem::path> checkpoint_dir)
    : datasets_(std::move(datasets)),
      checkpoint_dir_(std::move(checkpoint_dir)),
      id_salt_(std::random_device{}()) {
    if (checkpoint_dir_) {
        std::filesystem::create_directories(*checkpoint_dir_);
    }
}

SessionManager::~SessionManager() = default;

void SessionManager::set_default_config(nlohmann::json config) {
    default_config_ = std::move(config);
}

ServiceResponse SessionManager::health() const { return {200, {{"status", "ok"}}}; }

ServiceResponse SessionManager::list_datasets() const {
    auto out = nlohmann::json::array();
    for (const auto& [name, data] : datasets_) {
        out.push_back({{"name", name},
                       {"size", data->size()},
                       {"dims", data->dims()},
                       {"num_classes", data->num_classes},
                       {"render_hint", render_hint_json(*data)}});
    }
    return {200, out};
}

std::string SessionManager::next_session_id() {
    std::ostringstream id;
    id << 's' << std::hex << derive_seed(id_salt_, ++id_counter_);
    return id.str();
}

ServiceResponse SessionManager::create_session(const nlohmann::json& body) {
    if (!body.is_object() || !body.contains("dataset") || !body["dataset"].is_string()) {
        return error(400, "body needs a dataset name");
    }
    const auto name = body["dataset"].get<std::string>();
    const auto it = datasets_.find(name);
    if (it == datasets_.end()) {
        return error(404, "unknown dataset '" + name + "'");
    }
    RunConfig config;
    try {
        auto merged = default_config_;
        merged.merge_patch(body.value("config", nlohmann::json::object()));
        config = run_config_from_json(merged);
    } catch (const std::exception& e) {
        return error(400, std::string("bad config: ") + e.what());
    }

    std::shared_ptr<Session> session;
    {
        std::unique_lock lock(sessions_mutex_);
        const std::string id = next_session_id();
        session = std::make_shared<Session>(id, name, it->second, Engine(config, *it->second));
        sessions_.emplace(id, session);
    }
    std::lock_guard guard(session->mutex());
    session->advance();
    persist(*session);
    ServiceResponse reply{201,
                          {{"session_id", session->id()},
                           {"config", to_json(config)},
                           {"status", session->status_name()}}};
    if (session->status_name() == "awaiting_label") {
        reply.body["query"] = session->query_view().body;
    }
    return reply;
}

std::shared_ptr<Session> SessionManager::find(const std::string& session_id) const {
    std::shared_lock lock(sessions_mutex_);
    const auto it = sessions_.find(session_id);
    return it == sessions_.end() ? nullptr : it->second;
}

ServiceResponse SessionManager::get_query(const std::string& session_id) {
    auto session = find(session_id);
    if (!session) {
        return error(404, "unknown session");
    }
    std::lock_guard guard(session->mutex());
    return session->query_view();
}

ServiceResponse SessionManager::submit_label(const std::string& session_id,
                                             const nlohmann::json& body) {
    auto session = find(session_id);
    if (!session) {
        return error(404, "unknown session");
    }
    std::lock_guard guard(session->mutex());
    auto reply = session->submit(body);
    if (reply.status == 200) {
        persist(*session);
    }
    return reply;
}

ServiceResponse SessionManager::get_state(const std::string& session_id) {
    auto session = find(session_id);
    if (!session) {
        return error(404, "unknown session");
    }
    std::lock_guard guard(session->mutex());
    return session->state_view();
}

ServiceResponse SessionManager::finalize(const std::string& session_id) {
    auto session = find(session_id);
    if (!session) {
        return error(404, "unknown session");
    }
    std::lock_guard guard(session->mutex());
    auto reply = session->finalize();
    persist(*session);
    return reply;
}

ServiceResponse SessionManager::labels_csv(const std::string& session_id) {
    auto session = find(session_id);
    if (!session) {
        return error(404, "unknown session");
    }
    std::lock_guard guard(session->mutex());
    return session->csv();
}

void SessionManager::persist(const Session& session) const {
    if (!checkpoint_dir_) {
        return;
    }
    const auto path = *checkpoint_dir_ / (session.id() + ".json");
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        out << session.checkpoint().dump();
    }
    std::filesystem::rename(tmp, path);
}

std::size_t SessionManager::load_checkpoints() {
    if (!checkpoint_dir_) {
        return 0;
    }
    std::size_t loaded = 0;
    for (const auto& entry : std::filesystem::directory_iterator(*checkpoint_dir_)) {
        if (entry.path().extension() != ".json") {
            continue;
        }
        std::ifstream in(entry.path(), std::ios::binary);
        const auto doc = nlohmann::json::parse(in);
        const auto it = datasets_.find(doc.at("dataset").get<std::string>());
        if (it == datasets_.end()) {
            continue;
        }
        auto session = Session::restore(doc, it->second);
        std::unique_lock lock(sessions_mutex_);
        sessions_[session->id()] = std::move(session);
        ++loaded;
    }
    return loaded;
}

}  // namespace splitlabel
