#include "scribe/mock_provider.hpp"

#include <array>
#include <cctype>
#include <random>

#include "scribe/errors.hpp"

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

constexpr std::array<std::string_view, 96> kWords = {
    "lantern", "river",   "shadow",  "harbor",   "captain", "signal",  "orchard", "engine",  "whisper", "valley",
    "archive", "compass", "ember",   "glacier",  "market",  "tower",   "stranger", "letter", "storm",   "bridge",
    "forest",  "mirror",  "garden",  "station",  "winter",  "voice",   "door",    "map",     "island",  "machine",
    "silver",  "quiet",   "ancient", "hidden",   "restless", "distant", "bright", "hollow",  "narrow",  "broken",
    "gentle",  "sudden",  "careful", "patient",  "weary",   "eager",   "crimson", "golden",  "frozen",  "secret",
    "walked",  "listened", "waited", "followed", "carried", "opened",  "watched", "noticed", "turned",  "found",
    "lifted",  "crossed", "painted", "gathered", "traced",  "counted", "mended",  "hummed",  "shifted", "paused",
    "toward",  "beneath", "beyond",  "across",   "inside",  "along",   "behind",  "under",   "through", "near",
    "the",     "a",       "her",     "his",      "their",   "every",   "one",     "old",     "new",     "last",
    "slowly",  "again",   "softly",  "already",  "never",   "still",
};

class Generator {
public:
    Generator(std::uint64_t seed, std::string_view prompt) : rng_(seed ^ fnv1a(kFnvOffset, prompt)) {}

    std::string sentence(std::size_t words) {
        std::string out;
        for (std::size_t i = 0; i < words; ++i) {
            std::string word(kWords[rng_() % kWords.size()]);
            if (i == 0) word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
            if (i > 0) out += ' ';
            out += word;
        }
        out += '.';
        return out;
    }

    std::string sentences(std::size_t count, std::size_t words_each) {
        std::string out;
        for (std::size_t i = 0; i < count; ++i) {
            if (i > 0) out += ' ';
            out += sentence(words_each);
        }
        return out;
    }

    std::uint64_t next() { return rng_(); }

private:
    std::mt19937_64 rng_;
};

constexpr std::size_t kParagraphSentenceWords = 10;
constexpr std::size_t kMemorySentenceWords = 9;
constexpr std::size_t kPlanSentenceWords = 8;
static_assert(kMockParagraphWords % kParagraphSentenceWords == 0);

}  // namespace

std::string generate_mock_response(const PromptBundle& bundle, std::uint64_t seed) {
    Generator gen(seed, bundle.flatten());
    const auto& labels = bundle.output.labels;
    std::string out;
    if (bundle.output.choices > 0) {
        const auto index = 1 + gen.next() % bundle.output.choices;
        out = labels.chosen + ": " + std::to_string(index) + "\n\n" + labels.revised + ": " +
              gen.sentences(kMockPlanSentences, kPlanSentenceWords) + "\n";
        return out;
    }
    auto section = [&out](const std::string& label, const std::string& body) {
        if (!out.empty()) out += "\n\n";
        out += label + ":\n" + body;
    };
    if (bundle.output.paragraph) {
        section(labels.paragraph, gen.sentences(kMockParagraphWords / kParagraphSentenceWords, kParagraphSentenceWords));
    }
    if (bundle.output.memory) section(labels.memory, gen.sentences(kMockMemorySentences, kMemorySentenceWords));
    for (std::size_t i = 1; i <= bundle.output.plans; ++i) {
        section(labels.plan_prefix + " " + std::to_string(i), gen.sentences(kMockPlanSentences, kPlanSentenceWords));
    }
    out += "\n";
    return out;
}

MockChatProvider::MockChatProvider(MockScript script) : script_(std::move(script)) {}

std::string MockChatProvider::complete(const PromptBundle& bundle, const SamplingParams& sampling) {
    CallHook hook;
    std::size_t index = 0;
    {
        std::lock_guard lock(mutex_);
        index = calls_++;
        sampling_.push_back(sampling);
        kinds_.push_back(bundle.kind);
        hook = hook_;
    }
    // Outside the lock so a hook may stall without blocking other callers.
    if (hook) hook(bundle, index);

    std::lock_guard lock(mutex_);
    if (cursor_ < script_.responses.size()) return script_.responses[cursor_++];
    if (script_.generator_seed) return generate_mock_response(bundle, *script_.generator_seed);
    throw ProviderError(ErrorCode::provider_response, "mock script exhausted", false);
}

void MockChatProvider::set_call_hook(CallHook hook) {
    std::lock_guard lock(mutex_);
    hook_ = std::move(hook);
}

std::size_t MockChatProvider::calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

std::vector<SamplingParams> MockChatProvider::sampling_history() const {
    std::lock_guard lock(mutex_);
    return sampling_;
}

std::vector<TemplateName> MockChatProvider::kind_history() const {
    std::lock_guard lock(mutex_);
    return kinds_;
}

std::vector<double> mock_embedding(std::string_view text, std::size_t dimension, std::uint64_t seed) {
    if (dimension == 0) throw Error(ErrorCode::invalid_argument, "mock embedding dimension must be positive");
    std::string lowered(text);
    for (char& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));

    std::string seed_bytes;
    for (int i = 0; i < 8; ++i) seed_bytes.push_back(static_cast<char>((seed >> (8 * i)) & 0xFF));
    const std::uint64_t seeded = fnv1a(kFnvOffset, seed_bytes);

    std::vector<double> values(dimension, 0.0);
    const std::string_view view(lowered);
    if (view.size() < 3) {
        if (!view.empty()) values[fnv1a(seeded, view) % dimension] += 1.0;
        return values;
    }
    for (std::size_t i = 0; i + 3 <= view.size(); ++i) values[fnv1a(seeded, view.substr(i, 3)) % dimension] += 1.0;
    return values;
}

MockEmbeddingProvider::MockEmbeddingProvider(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
    if (dimension == 0) throw Error(ErrorCode::invalid_argument, "mock embedding dimension must be positive");
}

std::vector<double> MockEmbeddingProvider::embed_raw(std::string_view text) {
    CallHook hook;
    {
        std::lock_guard lock(mutex_);
        hook = hook_;
    }
    if (hook) hook(text);
    return mock_embedding(text, dimension_, seed_);
}

void MockEmbeddingProvider::set_call_hook(CallHook hook) {
    std::lock_guard lock(mutex_);
    hook_ = std::move(hook);
}

}  // namespace scribe
