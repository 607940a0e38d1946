#include "scribe/session.hpp"

#include "scribe/errors.hpp"

namespace scribe {
namespace {

[[noreturn]] void broken(const std::string& what) {
    throw Error(ErrorCode::invalid_argument, "session invariant violated: " + what);
}

}  // namespace

void SessionState::check_invariants() const {
    if (transcript.empty()) broken("transcript is empty");
    if (transcript.size() != step + 1) broken("transcript length must equal step + 1");
    for (std::size_t i = 0; i < transcript.size(); ++i) {
        if (transcript[i].timestep() != i) broken("transcript timesteps must be 0..step");
    }
    if (!long_term) broken("long-term memory is missing");
    const auto entries = long_term->entries();
    if (entries.size() != transcript.size()) broken("long-term memory size must equal transcript length");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].content_text != transcript[i].text()) broken("long-term memory text differs from transcript");
    }
    if (settings.plan_count == 0) broken("plan_count must be positive");
    if (settings.retrieval_k == 0) broken("retrieval_k must be positive");
}

bool same_state(const SessionState& a, const SessionState& b) {
    if (a.id != b.id || !(a.meta == b.meta) || a.current_plan != b.current_plan || !(a.short_term == b.short_term) ||
        a.transcript != b.transcript || a.step != b.step || a.rng_seed != b.rng_seed ||
        a.pending_plans != b.pending_plans || !(a.settings == b.settings)) {
        return false;
    }
    if (!a.long_term || !b.long_term) return a.long_term == b.long_term;
    return a.long_term->dimension() == b.long_term->dimension() && a.long_term->entries() == b.long_term->entries();
}

}  // namespace scribe
