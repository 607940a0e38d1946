#include "scribe/provider.hpp"

#include "scribe/errors.hpp"
#include "scribe/http_provider.hpp"
#include "scribe/mock_provider.hpp"
#include "scribe/text.hpp"

namespace scribe {

const char* to_string(ProviderKind kind) noexcept {
    switch (kind) {
        case ProviderKind::http_chat: return "http-chat";
        case ProviderKind::mock: return "mock";
    }
    return "unknown";
}

ProviderKind provider_kind_from_string(std::string_view name) {
    if (name == "http-chat" || name == "http") return ProviderKind::http_chat;
    if (name == "mock") return ProviderKind::mock;
    throw Error(ErrorCode::invalid_argument, "unknown provider kind: " + std::string(name));
}

EmbeddingVector embed_text(EmbeddingProvider& provider, std::string_view text) {
    if (is_blank(text)) throw Error(ErrorCode::empty_input, "cannot embed empty text");
    auto raw = provider.embed_raw(text);
    if (raw.size() != provider.dimension()) {
        throw Error(ErrorCode::dimension_mismatch, "embedder returned " + std::to_string(raw.size()) +
                                                       " components, expected " +
                                                       std::to_string(provider.dimension()));
    }
    return EmbeddingVector::normalized(std::move(raw));
}

Providers make_providers(const ProviderConfig& config, std::uint64_t mock_seed) {
    if (config.kind == ProviderKind::mock) {
        return Providers{std::make_shared<MockChatProvider>(MockScript{{}, mock_seed}),
                         std::make_shared<MockEmbeddingProvider>(config.embedding_dimension)};
    }
    return Providers{std::make_shared<HttpChatProvider>(config), std::make_shared<HttpEmbeddingProvider>(config)};
}

}  // namespace scribe
