#include <gtest/gtest.h>

#include <httplib.h>

#include <future>
#include <json.hpp>
#include <thread>

#include "fixtures.hpp"
#include "scribe/errors.hpp"
#include "scribe/persistence.hpp"
#include "scribe/service.hpp"
#include "scribe/text.hpp"

using namespace scribe;
using scribe::testing::TempDir;
using json = nlohmann::json;

namespace {

// Mock providers handed out by the service factory, kept reachable for the test.
struct MockFarm {
    std::mutex mutex;
    std::vector<std::shared_ptr<MockChatProvider>> chats;
    std::function<void(const PromptBundle&, std::size_t)> hook;
    bool provider_down = false;

    ProviderFactory factory() {
        return [this](const ProviderConfig&, std::uint64_t seed) {
            std::lock_guard lock(mutex);
            auto chat = std::make_shared<MockChatProvider>(
                provider_down ? MockScript{} : MockScript{{}, seed});
            chat->set_call_hook([this](const PromptBundle& bundle, std::size_t index) {
                if (hook) hook(bundle, index);
            });
            chats.push_back(chat);
            return Providers{chat, std::make_shared<MockEmbeddingProvider>(64)};
        };
    }
};

struct Harness {
    TempDir dir;
    MockFarm farm;
    std::unique_ptr<Service> service;
    std::unique_ptr<httplib::Client> client;

    explicit Harness(std::chrono::milliseconds timeout = std::chrono::milliseconds(30000)) { boot(timeout); }

    void boot(std::chrono::milliseconds timeout = std::chrono::milliseconds(30000)) {
        ServiceConfig config;
        config.host = "127.0.0.1";
        config.port = 0;
        config.data_dir = dir.path();
        config.step_timeout = timeout;
        service = std::make_unique<Service>(config, farm.factory());
        const int port = service->start();
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
        client->set_read_timeout(std::chrono::seconds(30));
    }

    void shutdown() {
        client.reset();
        service->stop();
        service.reset();
    }
};

struct Response {
    int status = 0;
    json body;
    std::string raw;
};

Response wrap(const httplib::Result& result) {
    Response out;
    if (!result) return out;
    out.status = result->status;
    out.raw = result->body;
    out.body = json::parse(result->body, nullptr, false);
    return out;
}

Response post(httplib::Client& c, const std::string& path, const json& body) {
    return wrap(c.Post(path, body.dump(), "application/json"));
}
Response patch(httplib::Client& c, const std::string& path, const json& body) {
    return wrap(c.Patch(path, body.dump(), "application/json"));
}
Response get(httplib::Client& c, const std::string& path) {
    return wrap(c.Get(path));
}

json writer_body(std::uint64_t seed = 42) {
    return {{"title", "The Lighthouse"},
            {"genre", "mystery"},
            {"background", "A keeper finds a letter washed ashore."},
            {"mode", "writer"},
            {"seed", seed}};
}

std::string create(Harness& h, std::uint64_t seed = 42) {
    auto r = post(*h.client, "/sessions", writer_body(seed));
    EXPECT_EQ(r.status, 201) << r.raw;
    return r.body.value("id", std::string());
}

}  // namespace

TEST(ServiceConfig, CanonicalProviderKeysWinOverAliases) {
    auto config = parse_service_config(R"({"provider": {"model_name": "canon", "model": "alias",
        "credential_source": "CANON_KEY", "credential_env": "ALIAS_KEY"}})");
    EXPECT_EQ(config.provider.model_name, "canon");
    EXPECT_EQ(config.provider.credential_source, "CANON_KEY");
    EXPECT_EQ(parse_service_config("{}").provider.credential_source, "RECURRENT_SCRIBE_API_KEY");
}

TEST(ServiceConfig, ParsesEveryKey) {
    auto config = parse_service_config(R"({
        "bind": "0.0.0.0:9090", "data_dir": "/tmp/x", "context_budget": 4000, "safety_margin": 0.1,
        "plan_count": 4, "retrieval_k": 2, "step_timeout_ms": 5000, "templates_dir": "/tmp/t",
        "limits": {"content_words": [100, 300], "memory_sentences": [5, 9], "plan_sentences": [1, 2]},
        "provider": {"kind": "http-chat", "endpoint": "https://api.example.com/v1/chat/completions",
                     "model": "m", "temperature": 0.7, "selector_temperature": 0.2, "max_response_tokens": 900,
                     "timeout_ms": 1000, "max_retries": 5, "backoff_base_ms": 10, "credential_env": "MY_KEY",
                     "embedding_endpoint": "https://api.example.com/v1/embeddings", "embedding_model": "e",
                     "embedding_dimension": 256}})");
    EXPECT_EQ(config.host, "0.0.0.0");
    EXPECT_EQ(config.port, 9090);
    EXPECT_EQ(config.data_dir, "/tmp/x");
    EXPECT_EQ(config.context_budget, 4000u);
    EXPECT_DOUBLE_EQ(config.safety_margin, 0.1);
    EXPECT_EQ(config.plan_count, 4u);
    EXPECT_EQ(config.retrieval_k, 2u);
    EXPECT_EQ(config.step_timeout.count(), 5000);
    EXPECT_EQ(config.templates_dir, std::filesystem::path("/tmp/t"));
    EXPECT_EQ(config.limits.content_words, (Range{100, 300}));
    EXPECT_EQ(config.limits.plan_sentences, (Range{1, 2}));
    EXPECT_EQ(config.provider.kind, ProviderKind::http_chat);
    EXPECT_EQ(config.provider.model_name, "m");
    EXPECT_EQ(config.provider.max_response_tokens, 900);
    EXPECT_EQ(config.provider.max_retries, 5);
    EXPECT_EQ(config.provider.credential_source, "MY_KEY");
    EXPECT_EQ(config.provider.embedding_dimension, 256u);
}

TEST(ServiceConfig, RejectsBadValues) {
    EXPECT_THROW(parse_service_config("[]"), Error);
    EXPECT_THROW(parse_service_config(R"({"plan_count": 0})"), Error);
    EXPECT_THROW(parse_service_config(R"({"safety_margin": 1.5})"), Error);
    EXPECT_THROW(parse_service_config(R"({"bind": "nocolon"})"), Error);
    EXPECT_THROW(parse_service_config(R"({"limits": {"content_words": [5, 1]}})"), Error);
    EXPECT_THROW(parse_service_config(R"({"provider": {"kind": "telepathy"}})"), Error);
    EXPECT_NO_THROW(parse_service_config("{}"));
}

TEST(Service, CreateReturns201WithThreePlans) {
    Harness h;
    auto r = post(*h.client, "/sessions", writer_body());
    ASSERT_EQ(r.status, 201) << r.raw;
    EXPECT_EQ(r.body["step"], 0);
    EXPECT_EQ(r.body["pending_plans"].size(), 3u);
    EXPECT_EQ(r.body["pending_plans"][0]["index"], 1);
    EXPECT_EQ(r.body["last_content"]["timestep"], 0);
    EXPECT_EQ(r.body["short_term"]["sentence_count"], kMockMemorySentences);
    EXPECT_EQ(r.body["seed"], "42");
    EXPECT_TRUE(std::filesystem::exists(session_paths(h.dir.path(), r.body["id"]).file));
}

TEST(Service, InvalidMetaIs400) {
    Harness h;
    auto body = writer_body();
    body["mode"] = "fiction";
    body["perspective"] = "third-person";
    auto r = post(*h.client, "/sessions", body);
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(r.body["error"], "invalid-meta");

    body = writer_body();
    body["background"] = "   ";
    EXPECT_EQ(post(*h.client, "/sessions", body).status, 400);
    body = writer_body();
    body["mode"] = "opera";
    EXPECT_EQ(post(*h.client, "/sessions", body).status, 400);
}

TEST(Service, MalformedJsonIs400) {
    Harness h;
    auto r = wrap(h.client->Post("/sessions", "{not json", "application/json"));
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(r.body["error"], "malformed-request");
}

TEST(Service, ProviderDownIs502AndNothingOnDisk) {
    Harness h;
    h.farm.provider_down = true;
    auto r = post(*h.client, "/sessions", writer_body());
    EXPECT_EQ(r.status, 502) << r.raw;
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(h.dir / "sessions")) ++files;
    EXPECT_EQ(files, 0u);
}

TEST(Service, FictionDefaultsToFirstPerson) {
    Harness h;
    auto body = writer_body();
    body["mode"] = "fiction";
    auto r = post(*h.client, "/sessions", body);
    ASSERT_EQ(r.status, 201) << r.raw;
    EXPECT_EQ(r.body["perspective"], "first-person");
}

TEST(Service, GetIsIdempotentAndUnknownIs404) {
    Harness h;
    const auto id = create(h);
    auto a = get(*h.client, "/sessions/" + id);
    auto b = get(*h.client, "/sessions/" + id);
    EXPECT_EQ(a.status, 200);
    EXPECT_EQ(a.raw, b.raw);
    EXPECT_EQ(get(*h.client, "/sessions/nope").status, 404);
    EXPECT_EQ(get(*h.client, "/sessions/..%2F..%2Fetc").status, 404);
    EXPECT_EQ(post(*h.client, "/sessions/nope/step", {{"plan_index", 1}}).status, 404);
}

TEST(Service, StepWithPlanIndex) {
    Harness h;
    const auto id = create(h);
    auto r = post(*h.client, "/sessions/" + id + "/step", {{"plan_index", 1}});
    ASSERT_EQ(r.status, 200) << r.raw;
    EXPECT_EQ(r.body["step"], 1);
    EXPECT_EQ(r.body["transcript"].size(), 2u);
    EXPECT_EQ(r.body["memory_size"], 2);
    EXPECT_EQ(r.body["record"]["step"], 1);
    EXPECT_EQ(r.body["current_plan"]["origin"], "model");
}

TEST(Service, StepWithPlanTextIsHuman) {
    Harness h;
    const auto id = create(h);
    auto r = post(*h.client, "/sessions/" + id + "/step", {{"plan_text", "The keeper climbs the tower."}});
    ASSERT_EQ(r.status, 200) << r.raw;
    EXPECT_EQ(r.body["current_plan"]["text"], "The keeper climbs the tower.");
    EXPECT_EQ(r.body["current_plan"]["origin"], "human");
}

TEST(Service, BadStepParametersAre422) {
    Harness h;
    const auto id = create(h);
    const auto path = "/sessions/" + id + "/step";
    EXPECT_EQ(post(*h.client, path, {{"plan_index", 9}}).status, 422);
    EXPECT_EQ(post(*h.client, path, {{"plan_index", 0}}).status, 422);
    EXPECT_EQ(post(*h.client, path, {{"plan_index", -1}}).status, 422);
    EXPECT_EQ(post(*h.client, path, json::object()).status, 422);
    EXPECT_EQ(post(*h.client, path, {{"plan_index", 1}, {"plan_text", "x."}}).status, 422);
    EXPECT_EQ(post(*h.client, path, {{"plan_text", "  "}}).status, 422);
    EXPECT_EQ(get(*h.client, "/sessions/" + id).body["step"], 0);
}

TEST(Service, ProviderFailureMidStepIs502AndStateUnchanged) {
    Harness h;
    const auto id = create(h);
    const auto before = get(*h.client, "/sessions/" + id).raw;
    h.farm.hook = [](const PromptBundle&, std::size_t) {
        throw ProviderError(ErrorCode::provider_transport, "backend unreachable", true);
    };
    auto r = post(*h.client, "/sessions/" + id + "/step", {{"plan_index", 2}});
    EXPECT_EQ(r.status, 502);
    EXPECT_EQ(r.body["error"], "provider-transport");
    EXPECT_EQ(get(*h.client, "/sessions/" + id).raw, before);
    h.farm.hook = nullptr;
    auto loaded = load_session(session_paths(h.dir.path(), id).file);
    EXPECT_EQ(loaded.state.step, 0u);
    EXPECT_EQ(loaded.state.long_term->size(), 1u);
}

TEST(Service, ConcurrentStepIs409WithoutInterleaving) {
    Harness h;
    const auto id = create(h);
    std::promise<void> entered;
    std::promise<void> release;
    auto gate = release.get_future().share();
    std::atomic<bool> first{true};
    h.farm.hook = [&](const PromptBundle&, std::size_t) {
        if (first.exchange(false)) {
            entered.set_value();
            gate.wait();
        }
    };

    auto slow = std::async(std::launch::async, [&] {
        httplib::Client c(h.client->host(), h.client->port());
        c.set_read_timeout(std::chrono::seconds(30));
        return post(c, "/sessions/" + id + "/step", {{"plan_index", 1}});
    });
    entered.get_future().wait();

    auto second = post(*h.client, "/sessions/" + id + "/step", {{"plan_index", 2}});
    EXPECT_EQ(second.status, 409);
    EXPECT_EQ(second.body["error"], "session-busy");
    EXPECT_EQ(patch(*h.client, "/sessions/" + id, {{"op", "replace_short_term"}, {"text", "x. y."}}).status, 409);
    EXPECT_EQ(post(*h.client, "/sessions/" + id + "/autorun", {{"n_steps", 1}}).status, 409);
    EXPECT_EQ(get(*h.client, "/sessions/" + id).body["step"], 0);

    release.set_value();
    auto done = slow.get();
    EXPECT_EQ(done.status, 200) << done.raw;
    EXPECT_EQ(done.body["step"], 1);
    auto loaded = load_session(session_paths(h.dir.path(), id).file);
    EXPECT_EQ(loaded.state.step, 1u);
    EXPECT_EQ(loaded.audit.steps.size(), 1u);
    EXPECT_EQ(loaded.state.long_term->size(), 2u);
}

TEST(Service, DistinctSessionsRunInParallel) {
    Harness h;
    const auto a = create(h, 1);
    const auto b = create(h, 2);
    std::promise<void> entered;
    std::promise<void> release;
    auto gate = release.get_future().share();
    std::atomic<bool> first{true};
    h.farm.hook = [&](const PromptBundle&, std::size_t) {
        if (first.exchange(false)) {
            entered.set_value();
            gate.wait();
        }
    };
    auto slow = std::async(std::launch::async, [&] {
        httplib::Client c(h.client->host(), h.client->port());
        c.set_read_timeout(std::chrono::seconds(30));
        return post(c, "/sessions/" + a + "/step", {{"plan_index", 1}});
    });
    entered.get_future().wait();
    EXPECT_EQ(post(*h.client, "/sessions/" + b + "/step", {{"plan_index", 1}}).status, 200);
    release.set_value();
    EXPECT_EQ(slow.get().status, 200);
}

TEST(Service, EditShortTermAndPlan) {
    Harness h;
    const auto id = create(h);
    auto r = patch(*h.client, "/sessions/" + id, {{"op", "replace_short_term"}, {"text", "The sea is calm. Night."}});
    ASSERT_EQ(r.status, 200) << r.raw;
    EXPECT_EQ(get(*h.client, "/sessions/" + id).body["short_term"]["text"], "The sea is calm. Night.");

    r = patch(*h.client, "/sessions/" + id, {{"op", "replace_plan"}, {"index", 2}, {"text", "Row to the wreck."}});
    ASSERT_EQ(r.status, 200);
    EXPECT_EQ(r.body["pending_plans"][1]["origin"], "human-edited");
    EXPECT_EQ(patch(*h.client, "/sessions/" + id, {{"op", "replace_plan"}, {"index", 7}, {"text", "x."}}).status, 422);
    EXPECT_EQ(patch(*h.client, "/sessions/" + id, {{"op", "replace_plan"}, {"text", "x."}}).status, 422);
    EXPECT_EQ(patch(*h.client, "/sessions/" + id, {{"op", "shred"}, {"text", "x."}}).status, 422);
    EXPECT_EQ(patch(*h.client, "/sessions/" + id, {{"op", "replace_short_term"}}).status, 422);

    auto loaded = load_session(session_paths(h.dir.path(), id).file);
    EXPECT_EQ(loaded.audit.edits.size(), 2u);
}

TEST(Service, EditLastContentChangesRetrieval) {
    Harness h;
    const auto id = create(h);
    ASSERT_EQ(post(*h.client, "/sessions/" + id + "/autorun", {{"n_steps", 3}}).status, 200);
    const std::string text = "Zebras quietly juggle quinces by the vortex.";
    ASSERT_EQ(patch(*h.client, "/sessions/" + id, {{"op", "replace_last_content"}, {"text", text}}).status, 200);
    httplib::Params params{{"query", text}, {"k", "1"}};
    auto r = wrap(h.client->Get("/sessions/" + id + "/memory", params, {}));
    ASSERT_EQ(r.status, 200) << r.raw;
    ASSERT_EQ(r.body["entries"].size(), 1u);
    EXPECT_EQ(r.body["entries"][0]["timestep"], 3);
    EXPECT_EQ(r.body["entries"][0]["text"], text);
}

TEST(Service, MemoryQueryOrdersByOracle) {
    Harness h;
    const auto id = create(h);
    ASSERT_EQ(post(*h.client, "/sessions/" + id + "/autorun", {{"n_steps", 4}}).status, 200);
    const std::string query = "the lamp and the letter";
    httplib::Params params{{"query", query}, {"k", "2"}};
    auto r = wrap(h.client->Get("/sessions/" + id + "/memory", params, {}));
    ASSERT_EQ(r.status, 200) << r.raw;
    ASSERT_EQ(r.body["entries"].size(), 2u);

    auto loaded = load_session(session_paths(h.dir.path(), id).file);
    ASSERT_EQ(loaded.state.long_term->size(), 5u);
    MockEmbeddingProvider embedder(64);
    const auto q = embed_text(embedder, query);
    std::vector<std::pair<double, std::uint64_t>> scored;
    for (const auto& e : loaded.state.long_term->entries()) {
        double dot = 0;
        for (std::size_t i = 0; i < 64; ++i) dot += q.values()[i] * e.embedding.values()[i];
        scored.emplace_back(-dot, e.timestep);
    }
    std::sort(scored.begin(), scored.end());
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(r.body["entries"][i]["timestep"], scored[i].second);
        EXPECT_NEAR(r.body["entries"][i]["similarity"].get<double>(), -scored[i].first, 1e-9);
    }
    EXPECT_GE(r.body["entries"][0]["similarity"].get<double>(), r.body["entries"][1]["similarity"].get<double>());
}

TEST(Service, MemoryQueryValidation) {
    Harness h;
    const auto id = create(h);
    EXPECT_EQ(get(*h.client, "/sessions/" + id + "/memory").status, 422);
    EXPECT_EQ(get(*h.client, "/sessions/" + id + "/memory?query=x&k=0").status, 422);
    EXPECT_EQ(get(*h.client, "/sessions/" + id + "/memory?query=x&k=abc").status, 422);
    EXPECT_EQ(get(*h.client, "/sessions/" + id + "/memory?query=x&k=1001").status, 422);
    EXPECT_EQ(get(*h.client, "/sessions/" + id + "/memory?query=lamp").status, 200);
}

TEST(Service, ExportPlainAndMarkdown) {
    Harness h;
    const auto id = create(h);
    post(*h.client, "/sessions/" + id + "/step", {{"plan_index", 1}});
    post(*h.client, "/sessions/" + id + "/step", {{"plan_index", 1}});
    auto view = get(*h.client, "/sessions/" + id).body;
    std::size_t words = 0;
    for (const auto& c : view["transcript"]) words += c["word_count"].get<std::size_t>();

    auto plain = h.client->Get("/sessions/" + id + "/export?format=plain");
    ASSERT_TRUE(plain);
    EXPECT_EQ(plain->status, 200);
    EXPECT_EQ(count_words(plain->body), words);
    EXPECT_EQ(plain->get_header_value("Content-Type").rfind("text/plain", 0), 0u);

    auto md = h.client->Get("/sessions/" + id + "/export?format=markdown");
    ASSERT_TRUE(md);
    EXPECT_NE(md->body.find("## Step 2"), std::string::npos);
    EXPECT_EQ(get(*h.client, "/sessions/" + id + "/export?format=docx").status, 422);
}

TEST(Service, AutorunZeroAndSome) {
    Harness h;
    const auto id = create(h);
    auto zero = post(*h.client, "/sessions/" + id + "/autorun", {{"n_steps", 0}});
    ASSERT_EQ(zero.status, 200) << zero.raw;
    EXPECT_EQ(zero.body["completed"], 0);
    EXPECT_TRUE(zero.body["first_step"].is_null());
    EXPECT_EQ(zero.body["session"]["step"], 0);

    auto three = post(*h.client, "/sessions/" + id + "/autorun", {{"n_steps", 3}});
    ASSERT_EQ(three.status, 200);
    EXPECT_EQ(three.body["completed"], 3);
    EXPECT_EQ(three.body["first_step"], 1);
    EXPECT_EQ(three.body["last_step"], 3);
    EXPECT_TRUE(three.body["failure"].is_null());
    EXPECT_EQ(load_session(session_paths(h.dir.path(), id).file).state.step, 3u);

    EXPECT_EQ(post(*h.client, "/sessions/" + id + "/autorun", json::object()).status, 422);
    EXPECT_EQ(post(*h.client, "/sessions/" + id + "/autorun", {{"n_steps", -2}}).status, 422);
}

TEST(Service, AutorunReportsPartialFailure) {
    Harness h;
    const auto id = create(h);
    std::atomic<int> generation_calls{0};
    h.farm.hook = [&](const PromptBundle& bundle, std::size_t) {
        if (bundle.kind != TemplateName::select_plan && ++generation_calls == 3) {
            throw ProviderError(ErrorCode::provider_transport, "flaky", true);
        }
    };
    auto r = post(*h.client, "/sessions/" + id + "/autorun", {{"n_steps", 5}});
    ASSERT_EQ(r.status, 200) << r.raw;
    EXPECT_EQ(r.body["completed"], 2);
    EXPECT_EQ(r.body["failure"]["step"], 3);
    EXPECT_EQ(r.body["failure"]["phase"], "complete");
    EXPECT_EQ(r.body["session"]["step"], 2);
}

TEST(Service, StepTimeoutIs504) {
    Harness h(std::chrono::milliseconds(200));
    const auto id = create(h);
    std::promise<void> release;
    auto gate = release.get_future().share();
    h.farm.hook = [&](const PromptBundle&, std::size_t) { gate.wait(); };
    auto r = post(*h.client, "/sessions/" + id + "/step", {{"plan_index", 1}});
    EXPECT_EQ(r.status, 504);
    EXPECT_EQ(post(*h.client, "/sessions/" + id + "/step", {{"plan_index", 1}}).status, 409);
    h.farm.hook = nullptr;
    release.set_value();
    for (int i = 0; i < 200 && get(*h.client, "/sessions/" + id).body["step"] != 1; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    EXPECT_EQ(get(*h.client, "/sessions/" + id).body["step"], 1);
}

TEST(Service, AdvanceIsDurableAcrossRestart) {
    Harness h;
    const auto id = create(h);
    auto r = post(*h.client, "/sessions/" + id + "/step", {{"plan_index", 3}});
    ASSERT_EQ(r.status, 200);
    const auto view = r.body;
    h.shutdown();

    auto loaded = load_session(session_paths(h.dir.path(), id).file);
    EXPECT_EQ(loaded.state.step, 1u);
    EXPECT_EQ(loaded.state.last_content().text(), view["last_content"]["text"]);

    h.boot();
    auto again = get(*h.client, "/sessions/" + id);
    ASSERT_EQ(again.status, 200);
    EXPECT_EQ(again.body["step"], 1);
    EXPECT_EQ(again.body["transcript"], view["transcript"]);
    EXPECT_EQ(post(*h.client, "/sessions/" + id + "/step", {{"plan_index", 1}}).status, 200);
}

TEST(Service, NoCredentialInResponses) {
    const std::string secret = "sk-never-leak-this-0000";
    ::setenv("RECURRENT_SCRIBE_API_KEY", secret.c_str(), 1);
    Harness h;
    const auto id = create(h);
    auto r = get(*h.client, "/sessions/" + id);
    ::unsetenv("RECURRENT_SCRIBE_API_KEY");
    EXPECT_EQ(r.raw.find(secret), std::string::npos);
}

TEST(Service, UnwritableDataDirFailsAtStartup) {
    TempDir dir;
    std::ofstream(dir / "file") << "x";
    ServiceConfig config;
    config.data_dir = dir / "file";
    EXPECT_THROW(Service service(config), Error);
}
