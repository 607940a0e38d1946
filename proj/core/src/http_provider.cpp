#include "scribe/http_provider.hpp"

#include <httplib.h>

#include <cstdlib>
#include <json.hpp>
#include <regex>
#include <thread>

#include "scribe/errors.hpp"

namespace scribe {
namespace {

using json = nlohmann::json;

bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status <= 599);
}

ProviderError response_error(const std::string& what) {
    return ProviderError(ErrorCode::provider_response, "malformed provider response: " + what, false);
}

json parse_body(const std::string& body) {
    auto doc = json::parse(body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw response_error("body is not a JSON object");
    return doc;
}

}  // namespace

SplitUrl split_url(const std::string& url) {
    static const std::regex pattern(R"(^(https?://[^/?#]+)(/[^#]*)?$)", std::regex::icase);
    std::smatch match;
    if (!std::regex_match(url, match, pattern)) {
        throw Error(ErrorCode::invalid_argument, "endpoint is not an http(s) URL: " + url);
    }
    return SplitUrl{match[1].str(), match[2].matched ? match[2].str() : std::string("/")};
}

JsonPoster::JsonPoster(const ProviderConfig& config, const std::string& url)
    : config_(config),
      url_(split_url(url)),
      sleeper_([](std::chrono::milliseconds delay) { std::this_thread::sleep_for(delay); }),
      rng_(std::random_device{}()) {
    if (config.max_retries < 0) throw Error(ErrorCode::invalid_argument, "max_retries must be non-negative");
}

std::chrono::milliseconds JsonPoster::backoff(int retry) {
    const auto cap = config_.backoff_base.count() << std::min(retry, 20);
    std::lock_guard lock(rng_mutex_);
    std::uniform_int_distribution<std::int64_t> dist(0, cap);
    return std::chrono::milliseconds(dist(rng_));
}

std::string JsonPoster::post(const std::string& body) {
    httplib::Client client(url_.origin);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.credential_source.c_str()); key != nullptr && *key != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    for (int attempt = 0;; ++attempt) {
        const bool last = attempt >= config_.max_retries;
        auto result = client.Post(url_.path, headers, body, "application/json");
        if (!result) {
            if (last) {
                throw ProviderError(ErrorCode::provider_transport,
                                    "provider unreachable after " + std::to_string(attempt + 1) +
                                        " attempts: " + httplib::to_string(result.error()),
                                    true);
            }
        } else if (result->status >= 200 && result->status < 300) {
            return result->body;
        } else if (!retryable_status(result->status)) {
            throw ProviderError(ErrorCode::provider_client,
                                "provider rejected the request with status " + std::to_string(result->status), false,
                                result->status);
        } else if (last) {
            throw ProviderError(ErrorCode::provider_transport,
                                "provider failed after " + std::to_string(attempt + 1) + " attempts with status " +
                                    std::to_string(result->status),
                                true, result->status);
        }
        sleeper_(backoff(attempt));
    }
}

HttpChatProvider::HttpChatProvider(const ProviderConfig& config)
    : model_(config.model_name), poster_(config, config.endpoint) {}

std::string HttpChatProvider::complete(const PromptBundle& bundle, const SamplingParams& sampling) {
    if (bundle.messages.empty()) throw Error(ErrorCode::empty_input, "prompt bundle has no messages");
    json messages = json::array();
    for (const auto& message : bundle.messages) {
        messages.push_back({{"role", to_string(message.role)}, {"content", message.text()}});
    }
    const json request = {{"model", model_},
                          {"messages", std::move(messages)},
                          {"temperature", sampling.temperature},
                          {"max_tokens", sampling.max_tokens}};
    const auto doc = parse_body(poster_.post(request.dump()));
    const auto& choices = doc.value("choices", json::array());
    if (!choices.is_array() || choices.empty()) throw response_error("no choices");
    const auto& first = choices.front();
    if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) {
        throw response_error("choice has no message");
    }
    const auto& content = first["message"].value("content", json());
    if (!content.is_string()) throw response_error("message content is not a string");
    return content.get<std::string>();
}

HttpEmbeddingProvider::HttpEmbeddingProvider(const ProviderConfig& config)
    : model_(config.embedding_model),
      dimension_(config.embedding_dimension),
      poster_(config, config.embedding_endpoint) {
    if (dimension_ == 0) throw Error(ErrorCode::invalid_argument, "embedding dimension must be positive");
}

std::vector<double> HttpEmbeddingProvider::embed_raw(std::string_view text) {
    const json request = {{"model", model_}, {"input", std::string(text)}};
    const auto doc = parse_body(poster_.post(request.dump()));
    const auto& data = doc.value("data", json::array());
    if (!data.is_array() || data.empty() || !data.front().is_object()) throw response_error("no data");
    const auto& embedding = data.front().value("embedding", json());
    if (!embedding.is_array()) throw response_error("embedding is not an array");
    std::vector<double> values;
    values.reserve(embedding.size());
    for (const auto& value : embedding) {
        if (!value.is_number()) throw response_error("embedding holds a non-number");
        values.push_back(value.get<double>());
    }
    return values;
}

}  // namespace scribe
