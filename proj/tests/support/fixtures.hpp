#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "scribe/engine.hpp"
#include "scribe/mock_provider.hpp"

namespace scribe::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device device;
        path_ = std::filesystem::temp_directory_path() /
                ("scribe-test-" + std::to_string(device()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// `n` distinct-looking words with no sentence punctuation.
inline std::string words(std::size_t n, const std::string& stem = "word") {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) out += ' ';
        out += stem + std::to_string(i);
    }
    return out;
}

// `n` period-terminated sentences of four words each.
inline std::string sentences(std::size_t n, const std::string& stem = "Line") {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) out += ' ';
        out += stem + " number " + std::to_string(i) + " here.";
    }
    return out;
}

inline SessionMeta writer_meta(const std::string& background = "A keeper finds a letter washed ashore.") {
    SessionMeta meta;
    meta.title = "The Lighthouse";
    meta.genre = "mystery";
    meta.background = background;
    meta.mode = Mode::writer;
    meta.perspective = Perspective::third_person;
    return meta;
}

inline SessionMeta fiction_meta() {
    SessionMeta meta = writer_meta("I wake aboard a drifting airship.");
    meta.genre = "fantasy";
    meta.mode = Mode::fiction;
    meta.perspective = Perspective::first_person;
    return meta;
}

// Labeled response with the given section bodies.
inline std::string labeled_response(const std::string& paragraph, const std::string& memory,
                                    const std::vector<std::string>& plans) {
    std::string out = "Output Paragraph:\n" + paragraph + "\n\nOutput Memory:\n" + memory;
    for (std::size_t i = 0; i < plans.size(); ++i) {
        out += "\n\nOutput Plan " + std::to_string(i + 1) + ":\n" + plans[i];
    }
    return out + "\n";
}

inline std::string well_formed_step(std::size_t tag, std::size_t plan_count = 3) {
    std::vector<std::string> plans;
    for (std::size_t p = 0; p < plan_count; ++p) {
        plans.push_back(sentences(4, "Plan" + std::to_string(tag) + "x" + std::to_string(p)));
    }
    return labeled_response(words(250, "s" + std::to_string(tag) + "w") + ".", sentences(12, "Mem" + std::to_string(tag)),
                            plans);
}

struct MockBundle {
    std::shared_ptr<MockChatProvider> chat;
    std::shared_ptr<MockEmbeddingProvider> embedder;
    std::unique_ptr<Engine> engine;
};

inline MockBundle mock_engine(MockScript script, EngineConfig config = {}, std::size_t dimension = 64) {
    MockBundle out;
    out.chat = std::make_shared<MockChatProvider>(std::move(script));
    out.embedder = std::make_shared<MockEmbeddingProvider>(dimension);
    out.engine = std::make_unique<Engine>(out.chat, out.embedder, std::move(config));
    return out;
}

// Copy of `state` with its own in-memory long-term store, for before/after comparisons.
inline SessionState deep_copy(const SessionState& state) {
    SessionState copy = state;
    auto store = std::make_shared<LongTermMemory>(state.long_term->dimension());
    for (const auto& entry : state.long_term->entries()) {
        store->append(Content(entry.content_text, entry.timestep), entry.embedding);
    }
    copy.long_term = std::move(store);
    return copy;
}

}  // namespace scribe::testing
