#include "scribe/persistence.hpp"

#include <fstream>
#include <sstream>

#include "fs_util.hpp"
#include "json_codec.hpp"

namespace scribe {
namespace {

namespace fs = std::filesystem;
using detail::json;

constexpr const char* kFormatName = "scribe-session";

Error corrupt(const fs::path& path, const std::string& what) {
    return Error(ErrorCode::persistence_corrupt, "session file " + path.string() + " is corrupt: " + what);
}

fs::path timings_path(const fs::path& path) {
    return fs::path(path.string() + ".timings");
}

json state_to_json(const SessionState& state, const fs::path& file) {
    const auto& store_path = state.long_term->storage_path();
    const auto base = fs::absolute(file).parent_path();
    const auto relative = fs::absolute(*store_path).lexically_relative(base);

    json transcript = json::array();
    for (const auto& content : state.transcript) {
        transcript.push_back({{"timestep", content.timestep()}, {"text", content.text()}});
    }
    json pending = json::array();
    for (const auto& plan : state.pending_plans) pending.push_back(detail::plan_to_json(plan));

    return {{"id", state.id},
            {"meta", detail::meta_to_json(state.meta)},
            {"current_plan", state.current_plan ? detail::plan_to_json(*state.current_plan) : json()},
            {"short_term", state.short_term.text()},
            {"memory",
             {{"path", relative.generic_string()},
              {"dimension", state.long_term->dimension()},
              {"entry_count", state.long_term->size()}}},
            {"transcript", std::move(transcript)},
            {"step", state.step},
            {"rng_seed", state.rng_seed},
            {"pending_plans", std::move(pending)},
            {"settings", detail::settings_to_json(state.settings)}};
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::persistence_io, "cannot read session file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw Error(ErrorCode::persistence_io, "cannot read session file " + path.string());
    return buffer.str();
}

void attach_timings(AuditLog& audit, const fs::path& path) {
    std::error_code ec;
    if (!fs::exists(timings_path(path), ec)) return;
    try {
        const auto doc = json::parse(read_file(timings_path(path)));
        const auto& times = doc.at("wall_time_us");
        for (std::size_t i = 0; i < audit.steps.size() && i < times.size(); ++i) {
            audit.steps[i].wall_time = std::chrono::microseconds(times[i].get<std::int64_t>());
        }
    } catch (const std::exception&) {
        // Timings are informational; a damaged sidecar leaves them at zero.
    }
}

}  // namespace

SessionPaths session_paths(const fs::path& data_dir, const std::string& id) {
    const auto dir = data_dir / "sessions";
    return SessionPaths{dir / (id + ".json"), dir / (id + ".memory")};
}

std::string serialize_session(const SessionState& state, const AuditLog& audit, const fs::path& path) {
    if (!state.long_term || !state.long_term->storage_path()) {
        throw Error(ErrorCode::persistence_io, "only sessions with a disk-backed memory can be saved");
    }
    json steps = json::array();
    for (const auto& record : audit.steps) steps.push_back(detail::step_record_to_json(record));
    json edits = json::array();
    for (const auto& record : audit.edits) edits.push_back(detail::edit_record_to_json(record));

    const json doc = {{"format", kFormatName},
                      {"format_version", kSessionFormatVersion},
                      {"state", state_to_json(state, path)},
                      {"audit", {{"steps", std::move(steps)}, {"edits", std::move(edits)}}}};
    return doc.dump(2) + "\n";
}

void save_session(const SessionState& state, const AuditLog& audit, const fs::path& path,
                  const SaveOptions& options) {
    state.check_invariants();
    const auto body = serialize_session(state, audit, path);
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);

    json times = json::array();
    for (const auto& record : audit.steps) times.push_back(record.wall_time.count());
    detail::write_file_atomic(timings_path(path), json{{"wall_time_us", std::move(times)}}.dump() + "\n",
                              ErrorCode::persistence_io);
    detail::write_file_atomic(path, body, ErrorCode::persistence_io, options.before_rename);
}

LoadedSession load_session(const fs::path& path) {
    const auto raw = read_file(path);
    const auto doc = json::parse(raw, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw corrupt(path, "not a JSON object");
    if (doc.value("format", std::string()) != kFormatName) throw corrupt(path, "not a session file");
    const auto& version = doc.value("format_version", json());
    if (!version.is_number_integer()) throw corrupt(path, "format_version is missing");
    if (version.get<std::int64_t>() != kSessionFormatVersion) {
        throw Error(ErrorCode::persistence_version,
                    "session file " + path.string() + " has unsupported format_version " + version.dump());
    }

    try {
        const auto& s = doc.at("state");
        const auto& memory = s.at("memory");
        const auto store_dir = fs::absolute(path).parent_path() / memory.at("path").get<std::string>();
        std::error_code ec;
        if (!fs::exists(store_dir / "manifest.json", ec)) {
            throw Error(ErrorCode::persistence_missing_store, "memory store " + store_dir.string() + " is missing");
        }
        auto store = LongTermMemory::open(store_dir);
        if (store->dimension() != memory.at("dimension").get<std::size_t>()) {
            throw corrupt(path, "memory store dimension differs from the session file");
        }

        std::vector<Content> transcript;
        for (const auto& c : s.at("transcript")) {
            transcript.emplace_back(c.at("text").get<std::string>(), c.at("timestep").get<std::uint64_t>());
        }
        bool recovered = false;
        if (store->size() > transcript.size()) {
            store->truncate_to(transcript.size());
            recovered = true;
        }

        std::vector<Plan> pending;
        for (const auto& p : s.at("pending_plans")) pending.push_back(detail::plan_from_json(p));
        std::optional<Plan> current;
        if (!s.at("current_plan").is_null()) current = detail::plan_from_json(s.at("current_plan"));

        LoadedSession loaded{
            SessionState{
                s.at("id").get<std::string>(),
                detail::meta_from_json(s.at("meta")),
                std::move(current),
                ShortTermMemory(s.at("short_term").get<std::string>()),
                std::move(store),
                std::move(transcript),
                s.at("step").get<std::uint64_t>(),
                s.at("rng_seed").get<std::uint64_t>(),
                std::move(pending),
                detail::settings_from_json(s.at("settings")),
            },
            {},
            recovered,
        };
        for (const auto& r : doc.at("audit").at("steps")) {
            loaded.audit.steps.push_back(detail::step_record_from_json(r));
        }
        for (const auto& r : doc.at("audit").at("edits")) {
            loaded.audit.edits.push_back(detail::edit_record_from_json(r));
        }
        loaded.state.meta.validate();
        loaded.state.check_invariants();
        attach_timings(loaded.audit, path);
        return loaded;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::persistence_missing_store || e.code() == ErrorCode::persistence_corrupt) throw;
        throw corrupt(path, e.what());
    } catch (const std::exception& e) {
        throw corrupt(path, e.what());
    }
}

const char* to_string(ExportFormat format) noexcept {
    switch (format) {
        case ExportFormat::plain: return "plain";
        case ExportFormat::markdown: return "markdown";
    }
    return "unknown";
}

ExportFormat export_format_from_string(std::string_view name) {
    if (name == "plain") return ExportFormat::plain;
    if (name == "markdown") return ExportFormat::markdown;
    throw Error(ErrorCode::invalid_argument, "unknown export format: " + std::string(name));
}

std::string export_transcript(const SessionState& state, ExportFormat format) {
    std::string out;
    if (format == ExportFormat::markdown) {
        out = "# " + (state.meta.title.empty() ? std::string("Untitled") : state.meta.title) + "\n";
        for (const auto& content : state.transcript) {
            out += "\n## Step " + std::to_string(content.timestep()) + "\n\n" + content.text() + "\n";
        }
        return out;
    }
    for (std::size_t i = 0; i < state.transcript.size(); ++i) {
        if (i > 0) out += "\n\n";
        out += state.transcript[i].text();
    }
    return out;
}

}  // namespace scribe
