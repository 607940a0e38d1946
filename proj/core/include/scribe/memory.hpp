#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "scribe/types.hpp"

namespace scribe {

// Unit-normalized embedding. All vectors in one store share a dimension.
class EmbeddingVector {
public:
    // Normalizes `raw` to unit length. Rejects empty, zero and non-finite input.
    static EmbeddingVector normalized(std::vector<double> raw);

    // Adopts values that are already unit length (|norm - 1| <= 1e-6), e.g. read back from disk.
    static EmbeddingVector from_unit(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t dimension() const noexcept { return values_.size(); }

    bool operator==(const EmbeddingVector&) const = default;

private:
    explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}

    std::vector<double> values_;
};

inline constexpr double kUnitNormTolerance = 1e-6;

// Dot product of two unit vectors. Throws Error(dimension_mismatch).
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

struct MemoryEntry {
    std::uint64_t timestep = 0;
    std::string content_text;
    EmbeddingVector embedding;

    bool operator==(const MemoryEntry&) const = default;
};

struct ScoredEntry {
    MemoryEntry entry;
    double similarity = 0.0;
};

// Called after the record bytes hit disk and before the manifest commit.
// Throwing from it aborts the append and rolls the store back.
using CommitHook = std::function<void()>;

// Append-only store of embedded contents. Optionally write-through to a
// directory:
//
//   <dir>/manifest.json   {"format":"scribe-memory","format_version":1,
//                          "dimension":d,"entry_count":n,"record_count":r,
//                          "byte_length":b}
//   <dir>/records.bin     r records, little-endian:
//                           u64 timestep | u64 text_bytes | text (UTF-8) | d x f64
//
// The manifest is the commit point; bytes beyond byte_length are an
// uncommitted tail and are discarded on open. A record whose timestep equals
// the latest entry's timestep supersedes it (used only by replace_latest).
//
// Concurrent readers are allowed; mutations take an exclusive lock.
class LongTermMemory {
public:
    static constexpr int kFormatVersion = 1;
    static constexpr std::size_t kAll = std::numeric_limits<std::size_t>::max();

    // In-memory store.
    explicit LongTermMemory(std::size_t dimension);

    // Creates a new disk-backed store. The directory must not already hold a store.
    static std::shared_ptr<LongTermMemory> create(const std::filesystem::path& dir, std::size_t dimension);
    static std::shared_ptr<LongTermMemory> open(const std::filesystem::path& dir);

    LongTermMemory(const LongTermMemory&) = delete;
    LongTermMemory& operator=(const LongTermMemory&) = delete;
    ~LongTermMemory();

    // Requires content.timestep() == size() and a matching dimension.
    void append(const Content& content, EmbeddingVector embedding, const CommitHook& before_commit = {});

    // Top-min(k, candidates) by descending similarity, ties by ascending
    // timestep. Only entries with timestep < candidate_limit are considered.
    std::vector<ScoredEntry> retrieve(const EmbeddingVector& query, std::size_t k,
                                      std::size_t candidate_limit = kAll) const;

    // Overwrites the newest entry's text and vector (human edit of the latest content).
    void replace_latest(std::string text, EmbeddingVector embedding);

    // Drops entries with timestep >= count. Only for recovering an
    // uncommitted step after a crash; never part of normal operation.
    void truncate_to(std::size_t count);

    std::size_t size() const;
    std::size_t dimension() const noexcept { return dimension_; }
    std::vector<MemoryEntry> entries() const;
    std::optional<MemoryEntry> latest() const;
    const std::optional<std::filesystem::path>& storage_path() const noexcept { return storage_path_; }

private:
    struct Disk;

    void write_record(const MemoryEntry& entry, const CommitHook& before_commit);

    std::size_t dimension_;
    std::vector<MemoryEntry> entries_;
    std::optional<std::filesystem::path> storage_path_;
    std::unique_ptr<Disk> disk_;
    mutable std::shared_mutex mutex_;
};

}  // namespace scribe
