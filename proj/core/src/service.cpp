#include "scribe/service.hpp"

#include <httplib.h>

#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

#include "json_codec.hpp"
#include "scribe/engine.hpp"
#include "scribe/errors.hpp"
#include "scribe/persistence.hpp"
#include "scribe/text.hpp"

namespace scribe {
namespace {

namespace fs = std::filesystem;
using detail::json;

constexpr std::uint64_t kMaxAutorunSteps = 10000;
constexpr std::size_t kMaxQueryK = 1000;

struct Reply {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

// Raised for request-shape problems detected before any session work.
struct BadRequest {
    int status;
    std::string code;
    std::string message;
};

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_meta: return 400;
        case ErrorCode::session_not_found: return 404;
        case ErrorCode::session_busy: return 409;
        case ErrorCode::invalid_argument:
        case ErrorCode::invalid_edit:
        case ErrorCode::empty_input:
        case ErrorCode::budget_exceeded:
        case ErrorCode::template_invalid:
        case ErrorCode::template_slot_missing: return 422;
        case ErrorCode::provider_transport:
        case ErrorCode::provider_client:
        case ErrorCode::provider_response:
        case ErrorCode::parse_missing_section:
        case ErrorCode::parse_missing_plans:
        case ErrorCode::parse_bad_selection: return 502;
        default: return 500;
    }
}

Reply error_reply(int status, const std::string& code, const std::string& message) {
    return Reply{status, json{{"error", code}, {"message", message}}.dump()};
}

Reply json_reply(int status, const json& body) {
    return Reply{status, body.dump()};
}

json parse_object(const std::string& body) {
    auto doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw BadRequest{400, "malformed-request", "body must be a JSON object"};
    return doc;
}

std::string require_string(const json& doc, const char* key, int status) {
    if (!doc.contains(key) || !doc.at(key).is_string()) {
        throw BadRequest{status, "invalid-argument", std::string("'") + key + "' must be a string"};
    }
    return doc.at(key).get<std::string>();
}

std::optional<std::uint64_t> optional_count(const json& doc, const char* key) {
    if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
    const auto& value = doc.at(key);
    if (!value.is_number_integer() || (value.is_number_integer() && !value.is_number_unsigned() &&
                                       value.get<std::int64_t>() < 0)) {
        throw BadRequest{422, "invalid-argument", std::string("'") + key + "' must be a non-negative integer"};
    }
    return value.get<std::uint64_t>();
}

bool valid_id(const std::string& id) {
    static const std::regex pattern("[A-Za-z0-9_-]{1,128}");
    return std::regex_match(id, pattern);
}

std::string random_id() {
    std::random_device device;
    const std::uint64_t value = (static_cast<std::uint64_t>(device()) << 32) ^ device();
    std::ostringstream out;
    out << "s-" << std::hex << value;
    return out.str();
}

std::uint64_t random_seed() {
    std::random_device device;
    return (static_cast<std::uint64_t>(device()) << 32) ^ device();
}

json content_json(const Content& content) {
    return {{"timestep", content.timestep()}, {"text", content.text()}, {"word_count", content.word_count()}};
}

json view_json(const SessionState& state) {
    json pending = json::array();
    for (std::size_t i = 0; i < state.pending_plans.size(); ++i) {
        const auto& plan = state.pending_plans[i];
        pending.push_back({{"index", i + 1},
                           {"text", plan.text()},
                           {"origin", to_string(plan.origin())},
                           {"sentence_count", plan.sentence_count()}});
    }
    json transcript = json::array();
    for (const auto& content : state.transcript) transcript.push_back(content_json(content));
    return {{"id", state.id},
            {"title", state.meta.title},
            {"genre", state.meta.genre},
            {"background", state.meta.background},
            {"mode", to_string(state.meta.mode)},
            {"perspective", to_string(state.meta.perspective)},
            {"seed", std::to_string(state.rng_seed)},
            {"step", state.step},
            {"short_term",
             {{"text", state.short_term.text()}, {"sentence_count", state.short_term.sentence_count()}}},
            {"current_plan", state.current_plan ? detail::plan_to_json(*state.current_plan) : json()},
            {"pending_plans", std::move(pending)},
            {"last_content", content_json(state.last_content())},
            {"transcript", std::move(transcript)},
            {"memory_size", state.transcript.size()},
            {"settings", detail::settings_to_json(state.settings)}};
}

Range range_from_json(const json& doc, Range fallback) {
    if (doc.is_null()) return fallback;
    if (!doc.is_array() || doc.size() != 2) throw Error(ErrorCode::invalid_argument, "a range is [min, max]");
    Range range{doc.at(0).get<std::size_t>(), doc.at(1).get<std::size_t>()};
    if (range.min > range.max) throw Error(ErrorCode::invalid_argument, "range min exceeds max");
    return range;
}

struct Entry {
    Entry(SessionState state, AuditLog audit, std::shared_ptr<Engine> engine, SessionPaths paths)
        : live(std::move(state), std::move(audit)), engine(std::move(engine)), paths(std::move(paths)) {}

    LiveSession live;
    std::shared_ptr<Engine> engine;
    SessionPaths paths;
};

// Shared with in-flight request workers, which may outlive a timed-out request.
struct Shared {
    ServiceConfig config;
    ProviderFactory factory;
    PromptConfig prompt;
    std::mutex sessions_mutex;
    std::map<std::string, std::shared_ptr<Entry>> sessions;

    std::shared_ptr<Engine> make_engine(std::uint64_t seed) const {
        auto providers = factory(config.provider, seed);
        return std::make_shared<Engine>(std::move(providers.chat), std::move(providers.embedder),
                                        engine_config_for(config.provider, prompt));
    }

    std::shared_ptr<Entry> find(const std::string& id) {
        if (!valid_id(id)) throw Error(ErrorCode::session_not_found, "no session '" + id + "'");
        std::lock_guard lock(sessions_mutex);
        if (auto it = sessions.find(id); it != sessions.end()) return it->second;
        auto paths = session_paths(config.data_dir, id);
        std::error_code ec;
        if (!fs::exists(paths.file, ec)) throw Error(ErrorCode::session_not_found, "no session '" + id + "'");
        auto loaded = load_session(paths.file);
        auto engine = make_engine(loaded.state.rng_seed);
        auto entry =
            std::make_shared<Entry>(std::move(loaded.state), std::move(loaded.audit), std::move(engine), paths);
        sessions.emplace(id, entry);
        return entry;
    }
};

Reply guarded(const std::function<Reply()>& fn) {
    try {
        return fn();
    } catch (const BadRequest& e) {
        return error_reply(e.status, e.code, e.message);
    } catch (const Error& e) {
        return error_reply(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
        return error_reply(500, "internal", e.what());
    }
}

// Runs `fn` on a worker thread; answers 504 if it outlasts the timeout. The
// worker keeps running and still commits, since the session stays busy until it ends.
Reply with_timeout(std::chrono::milliseconds timeout, std::function<Reply()> fn) {
    auto promise = std::make_shared<std::promise<Reply>>();
    auto future = promise->get_future();
    std::thread([promise, fn = std::move(fn)] { promise->set_value(guarded(fn)); }).detach();
    if (future.wait_for(timeout) == std::future_status::timeout) {
        return error_reply(504, "timeout", "the step did not finish within the server timeout");
    }
    return future.get();
}

Reply create_session(const std::shared_ptr<Shared>& shared, const std::string& body) {
    const auto doc = parse_object(body);
    SessionMeta meta;
    try {
        meta.title = doc.value("title", std::string());
        meta.genre = doc.value("genre", std::string());
        meta.background = doc.value("background", std::string());
        meta.mode = mode_from_string(doc.value("mode", std::string("writer")));
        const auto default_perspective = meta.mode == Mode::fiction ? "first-person" : "third-person";
        meta.perspective = perspective_from_string(doc.value("perspective", std::string(default_perspective)));
        if (doc.contains("initial_short_term") && !doc.at("initial_short_term").is_null()) {
            meta.initial_short_term = doc.at("initial_short_term").get<std::string>();
        }
        if (doc.contains("initial_plan") && !doc.at("initial_plan").is_null()) {
            meta.initial_plan = doc.at("initial_plan").get<std::string>();
        }
        meta.validate();
    } catch (const Error& e) {
        throw BadRequest{400, "invalid-meta", e.what()};
    } catch (const json::exception& e) {
        throw BadRequest{400, "invalid-meta", e.what()};
    }

    std::uint64_t seed = random_seed();
    if (doc.contains("seed") && doc.at("seed").is_string()) {
        try {
            seed = std::stoull(doc.at("seed").get<std::string>());
        } catch (const std::exception&) {
            throw BadRequest{422, "invalid-argument", "'seed' must be an unsigned integer"};
        }
    } else if (auto value = optional_count(doc, "seed")) {
        seed = *value;
    }

    InitOptions options;
    options.settings.plan_count = shared->config.plan_count;
    options.settings.retrieval_k = shared->config.retrieval_k;
    if (auto value = optional_count(doc, "plan_count")) options.settings.plan_count = *value;
    if (auto value = optional_count(doc, "retrieval_k")) options.settings.retrieval_k = *value;
    if (options.settings.plan_count == 0 || options.settings.plan_count > 10 || options.settings.retrieval_k == 0 ||
        options.settings.retrieval_k > 100) {
        throw BadRequest{422, "invalid-argument", "plan_count must be 1..10 and retrieval_k 1..100"};
    }

    std::string id;
    SessionPaths paths;
    {
        std::error_code ec;
        do {
            id = random_id();
            paths = session_paths(shared->config.data_dir, id);
        } while (fs::exists(paths.file, ec) || fs::exists(paths.memory_dir, ec));
        fs::create_directories(paths.file.parent_path(), ec);
    }
    options.id = id;
    options.memory_dir = paths.memory_dir;

    return with_timeout(shared->config.step_timeout, [shared, meta, seed, options, paths]() -> Reply {
        auto engine = shared->make_engine(seed);
        try {
            auto state = engine->init_session(meta, seed, options);
            AuditLog audit;
            save_session(state, audit, paths.file);
            auto view = view_json(state);
            std::lock_guard lock(shared->sessions_mutex);
            shared->sessions.emplace(state.id, std::make_shared<Entry>(std::move(state), std::move(audit),
                                                                       std::move(engine), paths));
            return json_reply(201, view);
        } catch (...) {
            std::error_code ec;
            fs::remove(paths.file, ec);
            fs::remove(paths.file.string() + ".timings", ec);
            fs::remove_all(paths.memory_dir, ec);
            throw;
        }
    });
}

Reply advance(const std::shared_ptr<Shared>& shared, const std::string& id, const std::string& body) {
    auto entry = shared->find(id);
    const auto doc = parse_object(body);
    const bool has_index = doc.contains("plan_index") && !doc.at("plan_index").is_null();
    const bool has_text = doc.contains("plan_text") && !doc.at("plan_text").is_null();
    if (has_index == has_text) {
        throw BadRequest{422, "invalid-argument", "send exactly one of 'plan_index' and 'plan_text'"};
    }
    std::optional<std::uint64_t> index;
    std::optional<std::string> text;
    if (has_index) {
        index = optional_count(doc, "plan_index");
        if (*index == 0) throw BadRequest{422, "invalid-argument", "'plan_index' is 1-based"};
    } else {
        text = require_string(doc, "plan_text", 422);
        if (is_blank(*text)) throw BadRequest{422, "invalid-argument", "'plan_text' must not be empty"};
    }

    return with_timeout(shared->config.step_timeout, [entry, index, text]() -> Reply {
        return entry->live.mutate([&](SessionState& state, AuditLog& audit) {
            const Plan plan = text ? Plan(*text, PlanOrigin::human)
                                   : Engine::pending_plan(state, static_cast<std::size_t>(*index));
            auto record = entry->engine->step(state, plan);
            auto record_json = detail::step_record_to_json(record);
            audit.steps.push_back(std::move(record));
            save_session(state, audit, entry->paths.file);
            auto view = view_json(state);
            view["record"] = std::move(record_json);
            return json_reply(200, view);
        });
    });
}

Reply edit(const std::shared_ptr<Shared>& shared, const std::string& id, const std::string& body) {
    auto entry = shared->find(id);
    const auto doc = parse_object(body);
    const auto op = require_string(doc, "op", 422);
    const auto kind = edit_kind_from_string(op);
    const auto text = require_string(doc, "text", 422);
    Edit change;
    switch (kind) {
        case EditKind::replace_short_term: change = ReplaceShortTerm{text}; break;
        case EditKind::replace_last_content: change = ReplaceLastContent{text}; break;
        case EditKind::replace_plan: {
            const auto index = optional_count(doc, "index");
            if (!index) throw BadRequest{422, "invalid-argument", "'index' is required for replace_plan"};
            change = ReplacePlan{static_cast<std::size_t>(*index), text};
            break;
        }
    }
    return entry->live.mutate([&](SessionState& state, AuditLog& audit) {
        audit.edits.push_back(entry->engine->apply_edit(state, change));
        save_session(state, audit, entry->paths.file);
        return json_reply(200, view_json(state));
    });
}

Reply memory_query(const std::shared_ptr<Shared>& shared, const std::string& id, const httplib::Request& req) {
    auto entry = shared->find(id);
    const auto query = req.get_param_value("query");
    if (is_blank(query)) throw BadRequest{422, "invalid-argument", "'query' must not be empty"};
    std::size_t k = 0;
    if (req.has_param("k")) {
        const auto raw = req.get_param_value("k");
        if (raw.empty() || raw.size() > 6 || raw.find_first_not_of("0123456789") != std::string::npos) {
            throw BadRequest{422, "invalid-argument", "'k' must be a positive integer"};
        }
        k = std::stoul(raw);
        if (k == 0 || k > kMaxQueryK) throw BadRequest{422, "invalid-argument", "'k' must be 1..1000"};
    }
    const auto embedding = embed_text(entry->engine->embedder(), query);
    return entry->live.read([&](const SessionState& state, const AuditLog&) {
        const auto hits =
            state.long_term->retrieve(embedding, k == 0 ? state.settings.retrieval_k : k, state.transcript.size());
        json entries = json::array();
        for (const auto& hit : hits) {
            entries.push_back({{"timestep", hit.entry.timestep},
                               {"text", hit.entry.content_text},
                               {"similarity", hit.similarity}});
        }
        return json_reply(200, {{"query", query}, {"entries", std::move(entries)}});
    });
}

Reply export_session(const std::shared_ptr<Shared>& shared, const std::string& id, const httplib::Request& req) {
    auto entry = shared->find(id);
    const auto name = req.has_param("format") ? req.get_param_value("format") : std::string("plain");
    ExportFormat format;
    try {
        format = export_format_from_string(name);
    } catch (const Error& e) {
        throw BadRequest{422, "invalid-argument", e.what()};
    }
    auto text = entry->live.read([&](const SessionState& state, const AuditLog&) { return export_transcript(state, format); });
    return Reply{200, std::move(text),
                 format == ExportFormat::markdown ? "text/markdown; charset=utf-8" : "text/plain; charset=utf-8"};
}

Reply autorun(const std::shared_ptr<Shared>& shared, const std::string& id, const std::string& body) {
    auto entry = shared->find(id);
    const auto doc = parse_object(body);
    const auto n = optional_count(doc, "n_steps");
    if (!n || *n > kMaxAutorunSteps) throw BadRequest{422, "invalid-argument", "'n_steps' must be 0..10000"};
    if (entry->live.busy()) throw Error(ErrorCode::session_busy, "a step is already in flight for this session");

    return with_timeout(shared->config.step_timeout, [entry, n]() -> Reply {
        const auto start_step = entry->live.read([](const SessionState& s, const AuditLog&) { return s.step; });
        std::uint64_t completed = 0;
        json failure;
        for (; completed < *n; ++completed) {
            try {
                entry->live.mutate([&](SessionState& state, AuditLog& audit) {
                    const auto selection = entry->engine->select_plan_auto(state);
                    audit.steps.push_back(entry->engine->step(state, selection.plan));
                    save_session(state, audit, entry->paths.file);
                });
            } catch (const Error& e) {
                if (completed == 0 && e.code() == ErrorCode::session_busy) throw;
                const auto* step_error = dynamic_cast<const StepError*>(&e);
                failure = {{"step", start_step + completed + 1},
                           {"phase", step_error ? json(to_string(step_error->phase())) : json()},
                           {"error", to_string(e.code())},
                           {"message", e.what()}};
                break;
            }
        }
        auto view = entry->live.read([](const SessionState& s, const AuditLog&) { return view_json(s); });
        json result = {{"requested", *n},
                       {"completed", completed},
                       {"first_step", completed > 0 ? json(start_step + 1) : json()},
                       {"last_step", completed > 0 ? json(start_step + completed) : json()},
                       {"failure", std::move(failure)},
                       {"session", std::move(view)}};
        return json_reply(200, result);
    });
}

void send(httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
}

}  // namespace

ServiceConfig parse_service_config(const std::string& text) {
    const auto doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::invalid_argument, "service config must be a JSON object");
    }
    ServiceConfig config;
    try {
        if (doc.contains("bind")) {
            const auto bind = doc.at("bind").get<std::string>();
            const auto colon = bind.rfind(':');
            if (colon == std::string::npos) throw Error(ErrorCode::invalid_argument, "bind must be host:port");
            config.host = bind.substr(0, colon);
            config.port = std::stoi(bind.substr(colon + 1));
        }
        if (doc.contains("data_dir")) config.data_dir = doc.at("data_dir").get<std::string>();
        config.context_budget = doc.value("context_budget", config.context_budget);
        config.safety_margin = doc.value("safety_margin", config.safety_margin);
        config.plan_count = doc.value("plan_count", config.plan_count);
        config.retrieval_k = doc.value("retrieval_k", config.retrieval_k);
        config.step_timeout = std::chrono::milliseconds(doc.value("step_timeout_ms", config.step_timeout.count()));
        if (doc.contains("templates_dir")) config.templates_dir = doc.at("templates_dir").get<std::string>();
        if (doc.contains("limits")) {
            const auto& limits = doc.at("limits");
            config.limits.content_words = range_from_json(limits.value("content_words", json()), config.limits.content_words);
            config.limits.memory_sentences =
                range_from_json(limits.value("memory_sentences", json()), config.limits.memory_sentences);
            config.limits.plan_sentences =
                range_from_json(limits.value("plan_sentences", json()), config.limits.plan_sentences);
        }
        if (doc.contains("provider")) {
            const auto& p = doc.at("provider");
            auto& out = config.provider;
            if (p.contains("kind")) out.kind = provider_kind_from_string(p.at("kind").get<std::string>());
            out.endpoint = p.value("endpoint", out.endpoint);
            out.model_name = p.value("model_name", p.value("model", out.model_name));
            out.temperature = p.value("temperature", out.temperature);
            out.selector_temperature = p.value("selector_temperature", out.selector_temperature);
            out.max_response_tokens = p.value("max_response_tokens", out.max_response_tokens);
            out.timeout = std::chrono::milliseconds(p.value("timeout_ms", out.timeout.count()));
            out.max_retries = p.value("max_retries", out.max_retries);
            out.backoff_base = std::chrono::milliseconds(p.value("backoff_base_ms", out.backoff_base.count()));
            out.credential_source = p.value("credential_source", p.value("credential_env", out.credential_source));
            out.embedding_endpoint = p.value("embedding_endpoint", out.embedding_endpoint);
            out.embedding_model = p.value("embedding_model", out.embedding_model);
            out.embedding_dimension = p.value("embedding_dimension", out.embedding_dimension);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::invalid_argument, std::string("invalid service config: ") + e.what());
    } catch (const std::logic_error& e) {
        throw Error(ErrorCode::invalid_argument, std::string("invalid service config: ") + e.what());
    }
    if (config.plan_count == 0 || config.retrieval_k == 0 || config.context_budget == 0) {
        throw Error(ErrorCode::invalid_argument, "plan_count, retrieval_k and context_budget must be positive");
    }
    if (config.safety_margin < 0.0 || config.safety_margin >= 1.0) {
        throw Error(ErrorCode::invalid_argument, "safety_margin must be in [0, 1)");
    }
    if (config.provider.temperature < 0.0 || config.provider.selector_temperature < 0.0) {
        throw Error(ErrorCode::invalid_argument, "temperatures must be non-negative");
    }
    return config;
}

ServiceConfig load_service_config(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::invalid_argument, "cannot read service config " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_service_config(buffer.str());
}

struct Service::Impl {
    std::shared_ptr<Shared> shared;
    httplib::Server server;
    std::thread thread;
};

Service::Service(ServiceConfig config, ProviderFactory factory) : impl_(std::make_unique<Impl>()) {
    auto shared = std::make_shared<Shared>();
    shared->factory = std::move(factory);
    shared->prompt.limits = config.limits;
    shared->prompt.context_budget = config.context_budget;
    shared->prompt.safety_margin = config.safety_margin;
    if (config.templates_dir) shared->prompt.templates.load_overrides(*config.templates_dir);

    std::error_code ec;
    fs::create_directories(config.data_dir / "sessions", ec);
    const auto probe = config.data_dir / "sessions" / ".write-probe";
    if (!std::ofstream(probe)) {
        throw Error(ErrorCode::persistence_io, "data_dir " + config.data_dir.string() + " is not writable");
    }
    fs::remove(probe, ec);
    shared->config = std::move(config);
    impl_->shared = shared;

    auto& server = impl_->server;
    server.Post("/sessions", [shared](const httplib::Request& req, httplib::Response& res) {
        send(res, guarded([&] { return create_session(shared, req.body); }));
    });
    server.Get(R"(/sessions/([^/]+))", [shared](const httplib::Request& req, httplib::Response& res) {
        send(res, guarded([&] {
                 auto entry = shared->find(req.matches[1]);
                 return entry->live.read(
                     [](const SessionState& state, const AuditLog&) { return json_reply(200, view_json(state)); });
             }));
    });
    server.Patch(R"(/sessions/([^/]+))", [shared](const httplib::Request& req, httplib::Response& res) {
        send(res, guarded([&] { return edit(shared, req.matches[1], req.body); }));
    });
    server.Post(R"(/sessions/([^/]+)/step)", [shared](const httplib::Request& req, httplib::Response& res) {
        send(res, guarded([&] { return advance(shared, req.matches[1], req.body); }));
    });
    server.Get(R"(/sessions/([^/]+)/memory)", [shared](const httplib::Request& req, httplib::Response& res) {
        send(res, guarded([&] { return memory_query(shared, req.matches[1], req); }));
    });
    server.Get(R"(/sessions/([^/]+)/export)", [shared](const httplib::Request& req, httplib::Response& res) {
        send(res, guarded([&] { return export_session(shared, req.matches[1], req); }));
    });
    server.Post(R"(/sessions/([^/]+)/autorun)", [shared](const httplib::Request& req, httplib::Response& res) {
        send(res, guarded([&] { return autorun(shared, req.matches[1], req.body); }));
    });
}

Service::~Service() {
    stop();
}

int Service::start() {
    auto& server = impl_->server;
    const auto& config = impl_->shared->config;
    int port = config.port;
    if (port == 0) {
        port = server.bind_to_any_port(config.host);
        if (port < 0) throw Error(ErrorCode::invalid_argument, "cannot bind " + config.host);
    } else if (!server.bind_to_port(config.host, port)) {
        throw Error(ErrorCode::invalid_argument, "cannot bind " + config.host + ":" + std::to_string(port));
    }
    impl_->thread = std::thread([&server] { server.listen_after_bind(); });
    server.wait_until_ready();
    return port;
}

void Service::run() {
    const auto& config = impl_->shared->config;
    if (!impl_->server.listen(config.host, config.port)) {
        throw Error(ErrorCode::invalid_argument,
                    "cannot listen on " + config.host + ":" + std::to_string(config.port));
    }
}

void Service::stop() {
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

const ServiceConfig& Service::config() const noexcept {
    return impl_->shared->config;
}

}  // namespace scribe
