#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scribe/provider.hpp"

namespace scribe {

// Sizes emitted by the seeded generator. They sit inside the default length
// limits so validators stay quiet.
inline constexpr std::size_t kMockParagraphWords = 250;
inline constexpr std::size_t kMockMemorySentences = 12;
inline constexpr std::size_t kMockPlanSentences = 4;

// Canned responses, consumed in order. Once they run out the seeded
// generator takes over if a seed is set; otherwise calls fail.
struct MockScript {
    std::vector<std::string> responses;
    std::optional<std::uint64_t> generator_seed;
};

// Deterministic well-formed reply to `bundle`. The RNG is std::mt19937_64
// seeded with `seed ^ fnv1a64(bundle.flatten())`, so the output depends only
// on the seed and the prompt:
//   - generation/init prompts: a paragraph of exactly kMockParagraphWords
//     words, a memory of kMockMemorySentences sentences and the requested
//     plans of kMockPlanSentences sentences each, under the bundle's labels;
//   - selector prompts: "Chosen Plan: <1 + rng() % choices>" followed by a
//     freshly generated revised plan.
std::string generate_mock_response(const PromptBundle& bundle, std::uint64_t seed);

class MockChatProvider : public ChatProvider {
public:
    // Runs before each call is answered; throwing from it fails the call.
    using CallHook = std::function<void(const PromptBundle& bundle, std::size_t call_index)>;

    explicit MockChatProvider(MockScript script);

    std::string complete(const PromptBundle& bundle, const SamplingParams& sampling) override;

    void set_call_hook(CallHook hook);
    std::size_t calls() const;
    std::vector<SamplingParams> sampling_history() const;
    std::vector<TemplateName> kind_history() const;

private:
    mutable std::mutex mutex_;
    MockScript script_;
    std::size_t cursor_ = 0;
    std::size_t calls_ = 0;
    CallHook hook_;
    std::vector<SamplingParams> sampling_;
    std::vector<TemplateName> kinds_;
};

// Documented mock embedding rule, before normalization. Every character
// trigram of the ASCII-lowercased text (the whole text when it is shorter
// than three bytes) is hashed with FNV-1a 64 over the 8 little-endian bytes
// of `seed` followed by the trigram bytes; component (hash % dimension) is
// incremented by one.
std::vector<double> mock_embedding(std::string_view text, std::size_t dimension, std::uint64_t seed = 0);

class MockEmbeddingProvider : public EmbeddingProvider {
public:
    using CallHook = std::function<void(std::string_view text)>;

    explicit MockEmbeddingProvider(std::size_t dimension = 64, std::uint64_t seed = 0);

    std::size_t dimension() const override { return dimension_; }
    std::vector<double> embed_raw(std::string_view text) override;

    void set_call_hook(CallHook hook);

private:
    std::size_t dimension_;
    std::uint64_t seed_;
    mutable std::mutex mutex_;
    CallHook hook_;
};

}  // namespace scribe
