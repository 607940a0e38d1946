#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "scribe/errors.hpp"
#include "scribe/prompt.hpp"
#include "scribe/provider.hpp"
#include "scribe/session.hpp"

namespace scribe {

struct EngineConfig {
    PromptConfig prompt;
    double temperature = 1.0;
    double selector_temperature = 0.3;
    int max_response_tokens = 1024;
    // Re-sends after a parse failure, each with a format reminder appended.
    int repair_retries = 1;
};

// Sampling settings and limits copied from a provider configuration.
EngineConfig engine_config_for(const ProviderConfig& provider, PromptConfig prompt = {});

// Stages of one step, in execution order. commit_io fires after the memory
// record is on disk and before it is committed.
enum class StepPhase { embed, retrieve, build, complete, parse, commit_io };

const char* to_string(StepPhase phase) noexcept;

// A failed step. code() is the underlying cause.
class StepError : public Error {
public:
    StepError(StepPhase phase, ErrorCode cause, const std::string& message)
        : Error(cause, std::string(to_string(phase)) + ": " + message), phase_(phase) {}

    StepPhase phase() const noexcept { return phase_; }

private:
    StepPhase phase_;
};

struct StepRecord {
    std::uint64_t step = 0;  // timestep produced
    Plan chosen_plan;
    std::vector<std::uint64_t> retrieved_timesteps;
    std::size_t prompt_tokens = 0;  // largest estimate sent, repairs included
    std::uint64_t consumed_content_timestep = 0;
    std::string consumed_short_term;
    std::size_t memory_size_before = 0;
    std::size_t memory_size_after = 0;
    StepOutput output;
    ValidationReport validation;
    bool repaired = false;
    std::chrono::microseconds wall_time{0};
};

enum class EditKind { replace_short_term, replace_plan, replace_last_content };

const char* to_string(EditKind kind) noexcept;
EditKind edit_kind_from_string(std::string_view name);

struct ReplaceShortTerm {
    std::string text;
};

struct ReplacePlan {
    std::size_t index = 0;  // 1-based position in pending_plans
    std::string text;
};

struct ReplaceLastContent {
    std::string text;
};

using Edit = std::variant<ReplaceShortTerm, ReplacePlan, ReplaceLastContent>;

struct EditRecord {
    std::uint64_t step = 0;
    EditKind kind = EditKind::replace_short_term;
    std::optional<std::size_t> index;
    std::string previous_text;
    std::string new_text;

    bool operator==(const EditRecord&) const = default;
};

struct AuditLog {
    std::vector<StepRecord> steps;
    std::vector<EditRecord> edits;
};

struct AutoSelection {
    std::size_t index = 0;  // 1-based
    Plan plan;
    bool fallback = false;
};

struct AutorunFailure {
    std::uint64_t step = 0;  // the timestep that was not produced
    std::optional<StepPhase> phase;
    ErrorCode code = ErrorCode::invalid_argument;
    std::string message;
};

struct AutorunResult {
    std::size_t completed = 0;
    std::optional<AutorunFailure> failure;
};

struct InitOptions {
    SessionSettings settings;
    std::string id;  // derived from seed and meta when empty
    // Directory for a disk-backed long-term memory; in-memory when unset.
    std::optional<std::filesystem::path> memory_dir;
};

// Standard splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Plan picked when the selector reply is unusable:
// 1 + splitmix64(rng_seed ^ step) % plan_count.
std::size_t fallback_plan_index(std::uint64_t rng_seed, std::uint64_t step, std::size_t plan_count);

std::string derive_session_id(const SessionMeta& meta, std::uint64_t seed);

class Engine {
public:
    using FaultHook = std::function<void(StepPhase)>;
    using StepObserver = std::function<void(const StepRecord&)>;
    using AfterStep = std::function<void(const SessionState&, const StepRecord&)>;

    Engine(std::shared_ptr<ChatProvider> chat, std::shared_ptr<EmbeddingProvider> embedder, EngineConfig config);

    SessionState init_session(const SessionMeta& meta, std::uint64_t seed, const InitOptions& options = {});

    // Either the step commits fully or `state` is left untouched. Model plans
    // are accepted only while candidates are pending; human plans always.
    StepRecord step(SessionState& state, const Plan& chosen);

    // pending_plans[index - 1]; throws Error(invalid_argument) when out of range.
    static Plan pending_plan(const SessionState& state, std::size_t index);

    AutoSelection select_plan_auto(const SessionState& state);

    // Stops at the first failure and keeps every completed step. `after_step`
    // runs after each commit; its failures end the run like a step failure.
    AutorunResult run_autonomous(SessionState& state, std::size_t n_steps, const AfterStep& after_step = {});

    EditRecord apply_edit(SessionState& state, const Edit& edit);

    void set_fault_hook(FaultHook hook) { fault_ = std::move(hook); }
    // Called once per committed step, in commit order.
    void set_observer(StepObserver observer) { observer_ = std::move(observer); }

    const EngineConfig& config() const noexcept { return config_; }
    EmbeddingProvider& embedder() const noexcept { return *embedder_; }

private:
    void fault(StepPhase phase) const;
    SamplingParams generation_sampling() const;

    std::shared_ptr<ChatProvider> chat_;
    std::shared_ptr<EmbeddingProvider> embedder_;
    EngineConfig config_;
    FaultHook fault_;
    StepObserver observer_;
};

// One session's live state behind an exclusivity slot. Mutations run on a
// working copy that replaces the live state only when they return normally;
// a second mutation while one is in flight fails with Error(session_busy).
// Reads may run alongside a mutation and see the last committed state.
class LiveSession {
public:
    LiveSession(SessionState state, AuditLog audit) : state_(std::move(state)), audit_(std::move(audit)) {}

    template <class Fn>
    auto mutate(Fn&& fn) -> std::invoke_result_t<Fn&, SessionState&, AuditLog&> {
        bool expected = false;
        if (!busy_.compare_exchange_strong(expected, true)) {
            throw Error(ErrorCode::session_busy, "a step or edit is already in flight for this session");
        }
        struct Release {
            std::atomic<bool>& flag;
            ~Release() { flag.store(false); }
        } release{busy_};

        auto [work, audit] = snapshot();
        const auto mark = mark_store(work);
        try {
            if constexpr (std::is_void_v<std::invoke_result_t<Fn&, SessionState&, AuditLog&>>) {
                fn(work, audit);
                publish(std::move(work), std::move(audit));
            } else {
                auto result = fn(work, audit);
                publish(std::move(work), std::move(audit));
                return result;
            }
        } catch (...) {
            restore_store(mark);
            throw;
        }
    }

    template <class Fn>
    auto read(Fn&& fn) const -> std::invoke_result_t<Fn&, const SessionState&, const AuditLog&> {
        std::shared_lock lock(mutex_);
        return fn(static_cast<const SessionState&>(state_), static_cast<const AuditLog&>(audit_));
    }

    bool busy() const noexcept { return busy_.load(); }

private:
    struct StoreMark {
        std::shared_ptr<LongTermMemory> store;
        std::size_t size = 0;
        std::optional<MemoryEntry> latest;
    };

    std::pair<SessionState, AuditLog> snapshot() const;
    void publish(SessionState state, AuditLog audit);
    static StoreMark mark_store(const SessionState& state);
    static void restore_store(const StoreMark& mark) noexcept;

    mutable std::shared_mutex mutex_;
    std::atomic<bool> busy_{false};
    SessionState state_;
    AuditLog audit_;
};

}  // namespace scribe
