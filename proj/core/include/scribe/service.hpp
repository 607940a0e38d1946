#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "scribe/provider.hpp"
#include "scribe/types.hpp"

namespace scribe {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "scribe-data";
    ProviderConfig provider;
    std::size_t context_budget = 3000;
    double safety_margin = 0.15;
    LengthLimits limits;
    std::size_t plan_count = 3;
    std::size_t retrieval_k = 3;
    std::chrono::milliseconds step_timeout{120000};
    std::optional<std::filesystem::path> templates_dir;
};

// JSON config file. Every key is optional:
//   {"bind": "127.0.0.1:8080", "data_dir": "...", "context_budget": 3000,
//    "safety_margin": 0.15, "plan_count": 3, "retrieval_k": 3,
//    "step_timeout_ms": 120000, "templates_dir": "...",
//    "limits": {"content_words": [200, 400], "memory_sentences": [10, 20],
//               "plan_sentences": [3, 5]},
//    "provider": {"kind": "mock" | "http-chat", "endpoint": "...", "model": "...",
//                 "temperature": 1.0, "selector_temperature": 0.3,
//                 "max_response_tokens": 1024, "timeout_ms": 60000,
//                 "max_retries": 3, "backoff_base_ms": 1000,
//                 "credential_env": "RECURRENT_SCRIBE_API_KEY",
//                 "embedding_endpoint": "...", "embedding_model": "...",
//                 "embedding_dimension": 64}}
// Throws Error(invalid_argument).
ServiceConfig parse_service_config(const std::string& text);
ServiceConfig load_service_config(const std::filesystem::path& path);

using ProviderFactory = std::function<Providers(const ProviderConfig& config, std::uint64_t seed)>;

// HTTP facade over sessions stored in <data_dir>/sessions. Endpoints:
//   POST  /sessions                      create (201)
//   GET   /sessions/{id}                 full observable state
//   POST  /sessions/{id}/step            {"plan_index": n} | {"plan_text": "..."}
//   PATCH /sessions/{id}                 {"op": "replace_short_term" | "replace_plan" |
//                                         "replace_last_content", "text": "...", "index": n}
//   GET   /sessions/{id}/memory?query=&k=
//   GET   /sessions/{id}/export?format=plain|markdown
//   POST  /sessions/{id}/autorun         {"n_steps": n}
// Errors are {"error": <code>, "message": <text>}: 400 malformed request,
// 404 unknown session, 409 step in flight, 422 invalid parameters,
// 502 provider failure, 504 step timeout.
class Service {
public:
    explicit Service(ServiceConfig config, ProviderFactory factory = make_providers);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Binds (port 0 picks a free port) and serves on a background thread.
    // Returns the bound port.
    int start();
    // Binds and serves on the calling thread until stop().
    void run();
    void stop();

    const ServiceConfig& config() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace scribe
