#include "scribe/engine.hpp"

#include <cstdio>

#include "scribe/text.hpp"

namespace scribe {
namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::uint64_t hash, std::string_view bytes) {
    for (char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= kFnvPrime;
    }
    return hash;
}

void append_report(ValidationReport& into, const ValidationReport& from) {
    into.violations.insert(into.violations.end(), from.violations.begin(), from.violations.end());
}

ValidationReport validate_output(const Content& content, const std::optional<ShortTermMemory>& memory,
                                 const std::vector<Plan>& plans, const LengthLimits& limits) {
    ValidationReport report = validate_content(content, limits);
    if (memory) append_report(report, validate_short_term(*memory, limits));
    for (const auto& plan : plans) append_report(report, validate_plan(plan, limits));
    return report;
}

// Runs one phase, tagging any library error with the phase it came from.
template <class Fn>
auto in_phase(StepPhase phase, Fn&& fn) {
    try {
        return fn();
    } catch (const StepError&) {
        throw;
    } catch (const Error& e) {
        throw StepError(phase, e.code(), e.what());
    }
}

// Sends `bundle`, retrying with a repair instruction after parse failures.
template <class Parse>
auto complete_and_parse(ChatProvider& chat, PromptBundle bundle, const SamplingParams& sampling, int repairs,
                        Parse&& parse, std::size_t& peak_tokens, bool& repaired,
                        const std::function<void(StepPhase)>& fault) {
    for (int attempt = 0;; ++attempt) {
        peak_tokens = std::max(peak_tokens, bundle.token_estimate);
        const auto raw = in_phase(StepPhase::complete, [&] {
            if (fault) fault(StepPhase::complete);
            return chat.complete(bundle, sampling);
        });
        try {
            if (fault && attempt == 0) in_phase(StepPhase::parse, [&] { fault(StepPhase::parse); });
            return parse(raw);
        } catch (const ParseError& e) {
            if (attempt >= repairs) throw StepError(StepPhase::parse, e.code(), e.what());
            repaired = true;
            bundle = with_repair_instruction(std::move(bundle), e.what());
        }
    }
}

}  // namespace

EngineConfig engine_config_for(const ProviderConfig& provider, PromptConfig prompt) {
    EngineConfig config;
    config.prompt = std::move(prompt);
    config.temperature = provider.temperature;
    config.selector_temperature = provider.selector_temperature;
    config.max_response_tokens = provider.max_response_tokens;
    return config;
}

const char* to_string(StepPhase phase) noexcept {
    switch (phase) {
        case StepPhase::embed: return "embed";
        case StepPhase::retrieve: return "retrieve";
        case StepPhase::build: return "build";
        case StepPhase::complete: return "complete";
        case StepPhase::parse: return "parse";
        case StepPhase::commit_io: return "commit-io";
    }
    return "unknown";
}

const char* to_string(EditKind kind) noexcept {
    switch (kind) {
        case EditKind::replace_short_term: return "replace_short_term";
        case EditKind::replace_plan: return "replace_plan";
        case EditKind::replace_last_content: return "replace_last_content";
    }
    return "unknown";
}

EditKind edit_kind_from_string(std::string_view name) {
    if (name == "replace_short_term") return EditKind::replace_short_term;
    if (name == "replace_plan") return EditKind::replace_plan;
    if (name == "replace_last_content") return EditKind::replace_last_content;
    throw Error(ErrorCode::invalid_edit, "unknown edit op: " + std::string(name));
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::size_t fallback_plan_index(std::uint64_t rng_seed, std::uint64_t step, std::size_t plan_count) {
    if (plan_count == 0) throw Error(ErrorCode::invalid_argument, "no plans to fall back on");
    return 1 + static_cast<std::size_t>(splitmix64(rng_seed ^ step) % plan_count);
}

std::string derive_session_id(const SessionMeta& meta, std::uint64_t seed) {
    std::uint64_t hash = kFnvOffset;
    for (int i = 0; i < 8; ++i) {
        const char byte = static_cast<char>((seed >> (8 * i)) & 0xFF);
        hash = fnv1a(hash, std::string_view(&byte, 1));
    }
    for (std::string_view field : {std::string_view(meta.title), std::string_view(meta.genre),
                                   std::string_view(meta.background), std::string_view(to_string(meta.mode)),
                                   std::string_view(to_string(meta.perspective))}) {
        hash = fnv1a(hash, field);
        hash = fnv1a(hash, std::string_view("\x1f", 1));
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return std::string("s-") + buffer;
}

Engine::Engine(std::shared_ptr<ChatProvider> chat, std::shared_ptr<EmbeddingProvider> embedder, EngineConfig config)
    : chat_(std::move(chat)), embedder_(std::move(embedder)), config_(std::move(config)) {
    if (!chat_ || !embedder_) throw Error(ErrorCode::invalid_argument, "engine needs a chat and an embedding provider");
}

void Engine::fault(StepPhase phase) const {
    if (fault_) fault_(phase);
}

SamplingParams Engine::generation_sampling() const {
    return SamplingParams{config_.temperature, config_.max_response_tokens};
}

SessionState Engine::init_session(const SessionMeta& meta, std::uint64_t seed, const InitOptions& options) {
    meta.validate();
    if (options.settings.plan_count == 0 || options.settings.retrieval_k == 0) {
        throw Error(ErrorCode::invalid_argument, "plan_count and retrieval_k must be positive");
    }
    std::optional<ShortTermMemory> supplied_memory;
    std::optional<Plan> supplied_plan;
    try {
        if (meta.initial_short_term) supplied_memory.emplace(*meta.initial_short_term);
        if (meta.initial_plan) supplied_plan.emplace(*meta.initial_plan, PlanOrigin::human);
    } catch (const Error& e) {
        throw Error(ErrorCode::invalid_meta, e.what());
    }

    const auto bundle = build_init_prompt(meta, options.settings.plan_count, config_.prompt);
    std::size_t peak = 0;
    bool repaired = false;
    auto parsed = complete_and_parse(
        *chat_, bundle, generation_sampling(), config_.repair_retries,
        [&](const std::string& raw) { return parse_init_output(raw, bundle.output); }, peak, repaired, {});
    auto embedding = embed_text(*embedder_, parsed.content.text());

    std::shared_ptr<LongTermMemory> store;
    if (options.memory_dir) {
        store = LongTermMemory::create(*options.memory_dir, embedder_->dimension());
    } else {
        store = std::make_shared<LongTermMemory>(embedder_->dimension());
    }
    try {
        store->append(parsed.content, std::move(embedding));
    } catch (...) {
        if (options.memory_dir) {
            std::error_code ignored;
            std::filesystem::remove_all(*options.memory_dir, ignored);
        }
        throw;
    }

    std::vector<Plan> pending;
    if (supplied_plan) {
        pending.push_back(*supplied_plan);
    } else {
        pending = std::move(parsed.plans);
    }
    SessionState state{
        options.id.empty() ? derive_session_id(meta, seed) : options.id,
        meta,
        std::nullopt,
        supplied_memory ? *supplied_memory : *parsed.short_term,
        std::move(store),
        {parsed.content},
        0,
        seed,
        std::move(pending),
        options.settings,
    };
    state.check_invariants();
    return state;
}

Plan Engine::pending_plan(const SessionState& state, std::size_t index) {
    if (index < 1 || index > state.pending_plans.size()) {
        throw Error(ErrorCode::invalid_argument, "plan index " + std::to_string(index) + " is outside 1.." +
                                                     std::to_string(state.pending_plans.size()));
    }
    return state.pending_plans[index - 1];
}

StepRecord Engine::step(SessionState& state, const Plan& chosen) {
    const auto started = std::chrono::steady_clock::now();
    if (chosen.origin() == PlanOrigin::model && state.pending_plans.empty()) {
        throw Error(ErrorCode::invalid_argument, "no candidate plans are pending; supply a human plan");
    }
    auto& store = *state.long_term;
    const std::size_t memory_before = store.size();

    const auto query = in_phase(StepPhase::embed, [&] {
        fault(StepPhase::embed);
        return embed_text(*embedder_, chosen.text());
    });
    const auto retrieved = in_phase(StepPhase::retrieve, [&] {
        fault(StepPhase::retrieve);
        // The newest entry is already in the prompt as the previous content.
        return store.retrieve(query, state.settings.retrieval_k, static_cast<std::size_t>(state.step));
    });
    const auto bundle = in_phase(StepPhase::build, [&] {
        fault(StepPhase::build);
        return build_generation_prompt(state, retrieved, chosen, config_.prompt);
    });

    std::size_t peak = 0;
    bool repaired = false;
    auto output = complete_and_parse(
        *chat_, bundle, generation_sampling(), config_.repair_retries,
        [&](const std::string& raw) {
            return parse_step_output(raw, state.settings.plan_count, state.step, config_.prompt.labels);
        },
        peak, repaired, fault_);

    auto embedding = in_phase(StepPhase::embed, [&] { return embed_text(*embedder_, output.content.text()); });
    auto validation = validate_output(output.content, output.short_term, output.plans, config_.prompt.limits);

    StepRecord record{
        state.step + 1,
        chosen,
        bundle.excerpt_timesteps(),
        peak,
        state.last_content().timestep(),
        state.short_term.text(),
        memory_before,
        memory_before + 1,
        output,
        std::move(validation),
        repaired,
        {},
    };
    // Reserve first so that nothing after the store append can throw.
    state.transcript.reserve(state.transcript.size() + 1);

    in_phase(StepPhase::commit_io, [&] { store.append(output.content, std::move(embedding), [&] { fault(StepPhase::commit_io); }); });

    state.transcript.push_back(std::move(output.content));
    state.short_term = std::move(output.short_term);
    state.current_plan = chosen;
    state.pending_plans = std::move(output.plans);
    state.step += 1;

    record.wall_time =
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - started);
    if (observer_) observer_(record);
    return record;
}

AutoSelection Engine::select_plan_auto(const SessionState& state) {
    const auto& plans = state.pending_plans;
    if (plans.empty()) throw Error(ErrorCode::invalid_argument, "no pending plans to select from");
    if (plans.size() == 1) return AutoSelection{1, plans.front(), false};

    const auto bundle = build_selector_prompt(state, plans, config_.prompt);
    const auto raw =
        chat_->complete(bundle, SamplingParams{config_.selector_temperature, config_.max_response_tokens});
    try {
        auto selection = parse_selector_output(raw, plans, config_.prompt.labels);
        return AutoSelection{selection.index, std::move(selection.plan), false};
    } catch (const ParseError&) {
        const auto index = fallback_plan_index(state.rng_seed, state.step, plans.size());
        return AutoSelection{index, plans[index - 1], true};
    }
}

AutorunResult Engine::run_autonomous(SessionState& state, std::size_t n_steps, const AfterStep& after_step) {
    AutorunResult result;
    for (std::size_t i = 0; i < n_steps; ++i) {
        const std::uint64_t target = state.step + 1;
        try {
            const auto selection = select_plan_auto(state);
            const auto record = step(state, selection.plan);
            ++result.completed;
            if (after_step) after_step(state, record);
        } catch (const StepError& e) {
            result.failure = AutorunFailure{target, e.phase(), e.code(), e.what()};
            break;
        } catch (const Error& e) {
            result.failure = AutorunFailure{target, std::nullopt, e.code(), e.what()};
            break;
        }
    }
    return result;
}

EditRecord Engine::apply_edit(SessionState& state, const Edit& edit) {
    auto invalid = [](const std::string& what) { return Error(ErrorCode::invalid_edit, what); };
    auto require_text = [&](const std::string& text) {
        if (is_blank(text)) throw invalid("edit text must not be empty");
    };

    return std::visit(
        [&](const auto& op) -> EditRecord {
            using Op = std::decay_t<decltype(op)>;
            require_text(op.text);
            if constexpr (std::is_same_v<Op, ReplaceShortTerm>) {
                EditRecord record{state.step, EditKind::replace_short_term, std::nullopt, state.short_term.text(),
                                  op.text};
                state.short_term = ShortTermMemory(op.text);
                return record;
            } else if constexpr (std::is_same_v<Op, ReplacePlan>) {
                if (op.index < 1 || op.index > state.pending_plans.size()) {
                    throw invalid("plan index " + std::to_string(op.index) + " is outside 1.." +
                                  std::to_string(state.pending_plans.size()));
                }
                auto& slot = state.pending_plans[op.index - 1];
                EditRecord record{state.step, EditKind::replace_plan, op.index, slot.text(), op.text};
                slot = Plan(op.text, PlanOrigin::human_edited);
                return record;
            } else {
                const auto& last = state.last_content();
                Content replacement(op.text, last.timestep());
                auto embedding = embed_text(*embedder_, op.text);
                EditRecord record{state.step, EditKind::replace_last_content, std::nullopt, last.text(), op.text};
                state.long_term->replace_latest(op.text, std::move(embedding));
                state.transcript.back() = std::move(replacement);
                return record;
            }
        },
        edit);
}

std::pair<SessionState, AuditLog> LiveSession::snapshot() const {
    std::shared_lock lock(mutex_);
    return {state_, audit_};
}

void LiveSession::publish(SessionState state, AuditLog audit) {
    std::unique_lock lock(mutex_);
    state_ = std::move(state);
    audit_ = std::move(audit);
}

LiveSession::StoreMark LiveSession::mark_store(const SessionState& state) {
    StoreMark mark;
    mark.store = state.long_term;
    if (mark.store) {
        mark.size = mark.store->size();
        mark.latest = mark.store->latest();
    }
    return mark;
}

void LiveSession::restore_store(const StoreMark& mark) noexcept {
    if (!mark.store) return;
    try {
        if (mark.store->size() > mark.size) mark.store->truncate_to(mark.size);
        const auto latest = mark.store->latest();
        if (mark.latest && latest && !(*latest == *mark.latest)) {
            mark.store->replace_latest(mark.latest->content_text, mark.latest->embedding);
        }
    } catch (...) {
        // The session file still describes the committed state; a reload repairs the store.
    }
}

}  // namespace scribe
