#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scribe/memory.hpp"
#include "scribe/types.hpp"

namespace scribe {

// Per-session knobs that are persisted with the session.
struct SessionSettings {
    std::size_t plan_count = 3;
    std::size_t retrieval_k = 3;

    bool operator==(const SessionSettings&) const = default;
};

// Complete recurrent state at a timestep. The latest content is transcript.back().
struct SessionState {
    std::string id;
    SessionMeta meta;
    std::optional<Plan> current_plan;
    ShortTermMemory short_term;
    std::shared_ptr<LongTermMemory> long_term;
    std::vector<Content> transcript;
    std::uint64_t step = 0;
    std::uint64_t rng_seed = 0;
    std::vector<Plan> pending_plans;
    SessionSettings settings;

    const Content& last_content() const { return transcript.back(); }

    // Throws Error(invalid_argument) naming the first broken invariant.
    void check_invariants() const;
};

// Value comparison; the long-term memory is compared entry by entry.
bool same_state(const SessionState& a, const SessionState& b);

}  // namespace scribe
