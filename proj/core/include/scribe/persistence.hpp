#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "scribe/engine.hpp"
#include "scribe/session.hpp"

namespace scribe {

// Session file, pretty-printed JSON with sorted keys:
//
//   {"audit": {"edits": [...], "steps": [...]},
//    "format": "scribe-session", "format_version": 1,
//    "state": {..., "memory": {"path": "<relative to the file>", ...}}}
//
// Step wall times are kept out of the body, in "<file>.timings", so saving
// the same state twice produces identical bytes.
inline constexpr int kSessionFormatVersion = 1;

struct SessionPaths {
    std::filesystem::path file;
    std::filesystem::path memory_dir;
};

// <data_dir>/sessions/<id>.json and <data_dir>/sessions/<id>.memory/.
SessionPaths session_paths(const std::filesystem::path& data_dir, const std::string& id);

struct SaveOptions {
    // Runs with the synced temp file before it replaces the session file.
    std::function<void(const std::filesystem::path& temp)> before_rename;
};

// The canonical body that save_session writes.
std::string serialize_session(const SessionState& state, const AuditLog& audit, const std::filesystem::path& path);

// Atomic replace. The long-term memory must be disk-backed.
void save_session(const SessionState& state, const AuditLog& audit, const std::filesystem::path& path,
                  const SaveOptions& options = {});

struct LoadedSession {
    SessionState state;
    AuditLog audit;
    // The memory store held an uncommitted step, which was discarded.
    bool recovered = false;
};

// Throws Error with persistence_io, persistence_version, persistence_corrupt
// or persistence_missing_store.
LoadedSession load_session(const std::filesystem::path& path);

enum class ExportFormat { plain, markdown };

const char* to_string(ExportFormat format) noexcept;
ExportFormat export_format_from_string(std::string_view name);

// plain: contents joined by blank lines. markdown: a title heading, then a
// "## Step <t>" heading before each content.
std::string export_transcript(const SessionState& state, ExportFormat format);

}  // namespace scribe
