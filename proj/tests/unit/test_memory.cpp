#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <thread>

#include "fixtures.hpp"
#include "scribe/errors.hpp"
#include "scribe/memory.hpp"

using namespace scribe;
using scribe::testing::TempDir;

namespace {

EmbeddingVector vec(std::vector<double> values) {
    return EmbeddingVector::normalized(std::move(values));
}

Content content(std::uint64_t t) {
    return Content("content " + std::to_string(t), t);
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::injected_fault;
}

std::vector<double> random_unit(std::mt19937_64& rng, std::size_t d) {
    std::normal_distribution<double> normal;
    std::vector<double> v(d);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& x : v) {
            x = normal(rng);
            norm += x * x;
        }
    } while (norm == 0.0);
    for (auto& x : v) x /= std::sqrt(norm);
    return v;
}

}  // namespace

TEST(EmbeddingVector, NormalizesToUnitLength) {
    auto v = vec({3.0, 4.0});
    EXPECT_DOUBLE_EQ(v.values()[0], 0.6);
    EXPECT_DOUBLE_EQ(v.values()[1], 0.8);
}

TEST(EmbeddingVector, RejectsZeroEmptyAndNonFinite) {
    EXPECT_EQ(code_of([] { vec({0.0, 0.0}); }), ErrorCode::zero_vector);
    EXPECT_EQ(code_of([] { vec({}); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([] { vec({NAN, 1.0}); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([] { EmbeddingVector::from_unit({0.5, 0.5}); }), ErrorCode::invalid_argument);
}

TEST(Cosine, IdenticalIsOne) {
    EXPECT_DOUBLE_EQ(cosine_similarity(vec({1, 0}), vec({1, 0})), 1.0);
}

TEST(Cosine, OrthogonalIsZero) {
    EXPECT_DOUBLE_EQ(cosine_similarity(vec({1, 0}), vec({0, 1})), 0.0);
}

TEST(Cosine, DiagonalAgainstAxis) {
    // The inputs are already unit length within tolerance and are compared as given.
    auto a = EmbeddingVector::from_unit({0.70710678, 0.70710678});
    EXPECT_NEAR(cosine_similarity(a, EmbeddingVector::from_unit({1, 0})), 0.70710678, 1e-9);
    // Renormalizing first moves the result to 1/sqrt(2).
    EXPECT_NEAR(cosine_similarity(vec({0.70710678, 0.70710678}), vec({1, 0})), 0.7071067811865476, 1e-12);
}

TEST(Cosine, SymmetricAndDimensionChecked) {
    auto a = vec({1, 2, 3});
    auto b = vec({-2, 0.5, 1});
    EXPECT_DOUBLE_EQ(cosine_similarity(a, b), cosine_similarity(b, a));
    EXPECT_EQ(code_of([&] { cosine_similarity(a, vec({1, 0})); }), ErrorCode::dimension_mismatch);
}

TEST(LongTermMemory, AppendToEmpty) {
    LongTermMemory store(2);
    store.append(content(0), vec({1, 0}));
    EXPECT_EQ(store.size(), 1u);
}

TEST(LongTermMemory, AppendFifthTimestep) {
    LongTermMemory store(2);
    for (std::uint64_t t = 0; t < 5; ++t) store.append(content(t), vec({1, double(t)}));
    const auto before = store.entries();
    store.append(content(5), vec({0, 1}));
    const auto after = store.entries();
    ASSERT_EQ(after.size(), 6u);
    for (std::uint64_t t = 0; t < 6; ++t) EXPECT_EQ(after[t].timestep, t);
    EXPECT_TRUE(std::equal(before.begin(), before.end(), after.begin()));
}

TEST(LongTermMemory, AppendRejectsDuplicateGapAndDimension) {
    LongTermMemory store(2);
    for (std::uint64_t t = 0; t < 5; ++t) store.append(content(t), vec({1, 0}));
    EXPECT_EQ(code_of([&] { store.append(content(3), vec({1, 0})); }), ErrorCode::timestep_order);
    EXPECT_EQ(code_of([&] { store.append(content(7), vec({1, 0})); }), ErrorCode::timestep_order);
    EXPECT_EQ(code_of([&] { store.append(content(5), vec({1, 0, 0})); }), ErrorCode::dimension_mismatch);
    EXPECT_EQ(store.size(), 5u);
}

TEST(LongTermMemory, RetrieveExactMatch) {
    LongTermMemory store(2);
    store.append(content(0), vec({1, 0}));
    store.append(content(1), vec({0, 1}));
    auto hits = store.retrieve(vec({1, 0}), 1);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].entry.timestep, 0u);
}

TEST(LongTermMemory, RetrieveTopTwoOfThree) {
    LongTermMemory store(2);
    store.append(content(0), vec({1, 0}));
    store.append(content(1), vec({0.6, 0.8}));
    store.append(content(2), vec({0, 1}));
    auto hits = store.retrieve(vec({0, 1}), 2);
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].entry.timestep, 2u);
    EXPECT_EQ(hits[1].entry.timestep, 1u);
    // Brute force: cos(t0) = 0, cos(t1) = 0.8, cos(t2) = 1.
    EXPECT_NEAR(hits[0].similarity, 1.0, 1e-12);
    EXPECT_NEAR(hits[1].similarity, 0.8, 1e-12);
}

TEST(LongTermMemory, TieGoesToSmallerTimestep) {
    LongTermMemory store(2);
    store.append(content(0), vec({1, 0}));
    store.append(content(1), vec({1, 0}));
    auto hits = store.retrieve(vec({1, 0}), 1);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].entry.timestep, 0u);
}

TEST(LongTermMemory, EmptyStoreAndOversizedK) {
    LongTermMemory store(2);
    EXPECT_TRUE(store.retrieve(vec({1, 0}), 3).empty());
    store.append(content(0), vec({1, 0}));
    EXPECT_EQ(store.retrieve(vec({1, 0}), 10).size(), 1u);
    EXPECT_EQ(code_of([&] { store.retrieve(vec({1, 0, 0}), 1); }), ErrorCode::dimension_mismatch);
}

TEST(LongTermMemory, CandidateLimitExcludesNewest) {
    LongTermMemory store(2);
    store.append(content(0), vec({0, 1}));
    store.append(content(1), vec({1, 0}));
    auto hits = store.retrieve(vec({1, 0}), 3, 1);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].entry.timestep, 0u);
}

TEST(LongTermMemory, MatchesBruteForceOracle) {
    std::mt19937_64 rng(20240601);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 1 + rng() % 12;
        const std::size_t n = rng() % 200;
        LongTermMemory store(d);
        std::vector<std::vector<double>> raw;
        for (std::size_t t = 0; t < n; ++t) {
            // Duplicate an earlier vector now and then to exercise ties.
            raw.push_back(t > 0 && rng() % 5 == 0 ? raw[rng() % t] : random_unit(rng, d));
            store.append(content(t), EmbeddingVector::from_unit(raw.back()));
        }
        const auto query_raw = random_unit(rng, d);
        const auto query = EmbeddingVector::from_unit(query_raw);
        const std::size_t k = 1 + rng() % 10;

        std::vector<std::pair<double, std::uint64_t>> oracle;
        const auto entries = store.entries();
        for (const auto& e : entries) {
            double dot = 0.0;
            for (std::size_t i = 0; i < d; ++i) dot += e.embedding.values()[i] * query_raw[i];
            oracle.emplace_back(dot, e.timestep);
        }
        std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        oracle.resize(std::min(k, oracle.size()));

        const auto hits = store.retrieve(query, k);
        ASSERT_EQ(hits.size(), oracle.size());
        for (std::size_t i = 0; i < hits.size(); ++i) {
            EXPECT_EQ(hits[i].entry.timestep, oracle[i].second) << "trial " << trial << " rank " << i;
            EXPECT_NEAR(hits[i].similarity, oracle[i].first, 1e-9);
        }
    }
}

TEST(LongTermMemory, DiskRoundTripIsBitIdentical) {
    TempDir dir;
    std::mt19937_64 rng(7);
    {
        auto store = LongTermMemory::create(dir / "mem", 5);
        for (std::uint64_t t = 0; t < 30; ++t) {
            store->append(Content("text " + std::to_string(t) + " \xE2\x9C\x93", t),
                          EmbeddingVector::from_unit(random_unit(rng, 5)));
        }
    }
    auto reopened = LongTermMemory::open(dir / "mem");
    std::mt19937_64 replay(7);
    const auto entries = reopened->entries();
    ASSERT_EQ(entries.size(), 30u);
    for (std::uint64_t t = 0; t < 30; ++t) {
        const auto expected = random_unit(replay, 5);
        EXPECT_EQ(entries[t].content_text, "text " + std::to_string(t) + " \xE2\x9C\x93");
        for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(entries[t].embedding.values()[i], expected[i]);
    }
    EXPECT_EQ(reopened->dimension(), 5u);
}

TEST(LongTermMemory, CreateRefusesExistingStore) {
    TempDir dir;
    LongTermMemory::create(dir / "mem", 2);
    EXPECT_EQ(code_of([&] { LongTermMemory::create(dir / "mem", 2); }), ErrorCode::storage_io);
}

TEST(LongTermMemory, FailedCommitRollsBackMemoryAndDisk) {
    TempDir dir;
    auto store = LongTermMemory::create(dir / "mem", 2);
    store->append(content(0), vec({1, 0}));
    EXPECT_THROW(store->append(content(1), vec({0, 1}), [] { throw Error(ErrorCode::injected_fault, "boom"); }),
                 Error);
    EXPECT_EQ(store->size(), 1u);
    auto reopened = LongTermMemory::open(dir / "mem");
    EXPECT_EQ(reopened->size(), 1u);
    store->append(content(1), vec({0, 1}));
    EXPECT_EQ(LongTermMemory::open(dir / "mem")->size(), 2u);
}

TEST(LongTermMemory, UncommittedTailIsDiscardedOnOpen) {
    TempDir dir;
    {
        auto store = LongTermMemory::create(dir / "mem", 2);
        store->append(content(0), vec({1, 0}));
    }
    {
        std::ofstream tail(dir / "mem" / "records.bin", std::ios::binary | std::ios::app);
        tail << "garbage that was never committed";
    }
    auto reopened = LongTermMemory::open(dir / "mem");
    EXPECT_EQ(reopened->size(), 1u);
    reopened->append(content(1), vec({0, 1}));
    EXPECT_EQ(LongTermMemory::open(dir / "mem")->size(), 2u);
}

TEST(LongTermMemory, CorruptManifestIsTyped) {
    TempDir dir;
    LongTermMemory::create(dir / "mem", 2);
    std::ofstream(dir / "mem" / "manifest.json") << "{not json";
    EXPECT_EQ(code_of([&] { LongTermMemory::open(dir / "mem"); }), ErrorCode::storage_corrupt);
}

TEST(LongTermMemory, ReplaceLatestPersists) {
    TempDir dir;
    auto store = LongTermMemory::create(dir / "mem", 2);
    store->append(content(0), vec({1, 0}));
    store->append(content(1), vec({1, 0}));
    store->replace_latest("rewritten", vec({0, 1}));
    auto hits = store->retrieve(vec({0, 1}), 1);
    EXPECT_EQ(hits[0].entry.timestep, 1u);
    EXPECT_EQ(hits[0].entry.content_text, "rewritten");

    auto reopened = LongTermMemory::open(dir / "mem");
    ASSERT_EQ(reopened->size(), 2u);
    EXPECT_EQ(reopened->entries(), store->entries());
    reopened->append(content(2), vec({1, 1}));
    EXPECT_EQ(LongTermMemory::open(dir / "mem")->size(), 3u);
}

TEST(LongTermMemory, TruncateDropsNewestEntries) {
    TempDir dir;
    auto store = LongTermMemory::create(dir / "mem", 2);
    for (std::uint64_t t = 0; t < 4; ++t) store->append(content(t), vec({1, double(t)}));
    store->truncate_to(2);
    EXPECT_EQ(store->size(), 2u);
    EXPECT_EQ(LongTermMemory::open(dir / "mem")->size(), 2u);
    store->append(content(2), vec({0, 1}));
    EXPECT_EQ(LongTermMemory::open(dir / "mem")->entries(), store->entries());
}

TEST(LongTermMemory, ConcurrentReadersDuringAppends) {
    LongTermMemory store(4);
    store.append(content(0), vec({1, 0, 0, 0}));
    std::atomic<bool> done{false};
    std::thread reader([&] {
        while (!done) {
            auto hits = store.retrieve(vec({1, 1, 0, 0}), 3);
            ASSERT_LE(hits.size(), 3u);
            for (std::size_t i = 1; i < hits.size(); ++i) ASSERT_GE(hits[i - 1].similarity, hits[i].similarity);
        }
    });
    for (std::uint64_t t = 1; t < 500; ++t) store.append(content(t), vec({1, double(t % 7), 0.5, 0}));
    done = true;
    reader.join();
    EXPECT_EQ(store.size(), 500u);
}
