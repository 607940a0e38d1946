#pragma once

#include <chrono>
#include <functional>
#include <mutex>
#include <random>
#include <string>

#include "scribe/provider.hpp"

namespace scribe {

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url);

// POSTs JSON with retries on transport failures, 429 and 5xx. Backoff before
// retry i (0-based) is uniform in [0, base * 2^i].
class JsonPoster {
public:
    JsonPoster(const ProviderConfig& config, const std::string& url);

    std::string post(const std::string& body);
    void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

private:
    std::chrono::milliseconds backoff(int retry);

    ProviderConfig config_;
    SplitUrl url_;
    Sleeper sleeper_;
    std::mutex rng_mutex_;
    std::mt19937_64 rng_;
};

class HttpChatProvider : public ChatProvider {
public:
    explicit HttpChatProvider(const ProviderConfig& config);

    std::string complete(const PromptBundle& bundle, const SamplingParams& sampling) override;
    void set_sleeper(Sleeper sleeper) { poster_.set_sleeper(std::move(sleeper)); }

private:
    std::string model_;
    JsonPoster poster_;
};

class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(const ProviderConfig& config);

    std::size_t dimension() const override { return dimension_; }
    std::vector<double> embed_raw(std::string_view text) override;
    void set_sleeper(Sleeper sleeper) { poster_.set_sleeper(std::move(sleeper)); }

private:
    std::string model_;
    std::size_t dimension_;
    JsonPoster poster_;
};

}  // namespace scribe
