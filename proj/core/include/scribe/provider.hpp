#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "scribe/memory.hpp"
#include "scribe/prompt.hpp"

namespace scribe {

enum class ProviderKind { http_chat, mock };

const char* to_string(ProviderKind kind) noexcept;
ProviderKind provider_kind_from_string(std::string_view name);

// The frozen backbone model and its embedder. Holds the *name* of the
// environment variable with the API key, never the key itself.
struct ProviderConfig {
    ProviderKind kind = ProviderKind::mock;
    std::string endpoint;  // full chat-completions URL, http-chat only
    std::string model_name = "gpt-3.5-turbo";
    double temperature = 1.0;
    double selector_temperature = 0.3;
    int max_response_tokens = 1024;
    std::chrono::milliseconds timeout{60000};
    int max_retries = 3;
    std::chrono::milliseconds backoff_base{1000};
    std::string credential_source = "RECURRENT_SCRIBE_API_KEY";

    std::string embedding_endpoint;  // full embeddings URL, http-chat only
    std::string embedding_model = "text-embedding-3-small";
    std::size_t embedding_dimension = 64;  // fixed for the mock; checked for http
};

struct SamplingParams {
    double temperature = 1.0;
    int max_tokens = 1024;
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    // Returns the raw response text. Throws ProviderError.
    virtual std::string complete(const PromptBundle& bundle, const SamplingParams& sampling) = 0;
};

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::size_t dimension() const = 0;
    // Unnormalized vector of length dimension(). Throws ProviderError.
    virtual std::vector<double> embed_raw(std::string_view text) = 0;
};

// Rejects empty text, checks the dimension and normalizes.
EmbeddingVector embed_text(EmbeddingProvider& provider, std::string_view text);

struct Providers {
    std::shared_ptr<ChatProvider> chat;
    std::shared_ptr<EmbeddingProvider> embedder;
};

// Builds both providers from `config`. A mock chat provider runs the seeded
// generator with `mock_seed`.
Providers make_providers(const ProviderConfig& config, std::uint64_t mock_seed);

}  // namespace scribe
