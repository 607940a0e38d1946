#include "scribe/memory.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "fs_util.hpp"
#include "scribe/errors.hpp"

namespace scribe {
namespace fs = std::filesystem;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kRecordsName = "records.bin";

void put_u64(std::string& out, std::uint64_t value) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(const std::string& in, std::size_t at) {
    std::uint64_t value = 0;
    for (int i = 0; i < 8; ++i) {
        value |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
    }
    return value;
}

std::string encode_record(const MemoryEntry& entry) {
    std::string out;
    out.reserve(16 + entry.content_text.size() + 8 * entry.embedding.dimension());
    put_u64(out, entry.timestep);
    put_u64(out, entry.content_text.size());
    out += entry.content_text;
    for (double v : entry.embedding.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
    return out;
}

Error corrupt(const fs::path& dir, const std::string& what) {
    return Error(ErrorCode::storage_corrupt, "memory store " + dir.string() + ": " + what);
}

}  // namespace

EmbeddingVector EmbeddingVector::normalized(std::vector<double> raw) {
    if (raw.empty()) throw Error(ErrorCode::invalid_argument, "embedding must have positive dimension");
    double sum = 0.0;
    for (double v : raw) {
        if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "embedding has a non-finite component");
        sum += v * v;
    }
    if (sum == 0.0) throw Error(ErrorCode::zero_vector, "cannot normalize a zero embedding");
    const double norm = std::sqrt(sum);
    for (double& v : raw) v /= norm;
    return EmbeddingVector(std::move(raw));
}

EmbeddingVector EmbeddingVector::from_unit(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorCode::invalid_argument, "embedding must have positive dimension");
    double sum = 0.0;
    for (double v : values) sum += v * v;
    if (!std::isfinite(sum) || std::abs(std::sqrt(sum) - 1.0) > kUnitNormTolerance) {
        throw Error(ErrorCode::invalid_argument, "embedding is not unit length");
    }
    return EmbeddingVector(std::move(values));
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "dimension mismatch: " + std::to_string(a.dimension()) + " vs " +
                        std::to_string(b.dimension()));
    }
    double dot = 0.0;
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) dot += av[i] * bv[i];
    return std::clamp(dot, -1.0, 1.0);
}

struct LongTermMemory::Disk {
    fs::path dir;
    detail::FileDescriptor records;
    std::uint64_t byte_length = 0;
    // (offset, timestep) of every record in the log.
    std::vector<std::pair<std::uint64_t, std::uint64_t>> records_index;

    void write_manifest(std::size_t dimension, std::size_t entry_count, std::size_t record_count,
                        std::uint64_t bytes) const {
        nlohmann::json manifest = {
            {"format", "scribe-memory"},
            {"format_version", kFormatVersion},
            {"dimension", dimension},
            {"entry_count", entry_count},
            {"record_count", record_count},
            {"byte_length", bytes},
        };
        detail::write_file_atomic(dir / kManifestName, manifest.dump(2) + "\n", ErrorCode::storage_io);
    }
};

LongTermMemory::LongTermMemory(std::size_t dimension) : dimension_(dimension) {
    if (dimension == 0) throw Error(ErrorCode::invalid_argument, "memory dimension must be positive");
}

LongTermMemory::~LongTermMemory() = default;

std::shared_ptr<LongTermMemory> LongTermMemory::create(const fs::path& dir, std::size_t dimension) {
    auto store = std::make_shared<LongTermMemory>(dimension);
    std::error_code ec;
    if (fs::exists(dir / kManifestName, ec)) {
        throw Error(ErrorCode::storage_io, "memory store already exists at " + dir.string());
    }
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::storage_io, "cannot create " + dir.string() + ": " + ec.message());

    auto disk = std::make_unique<Disk>();
    disk->dir = dir;
    disk->records = detail::FileDescriptor::open(dir / kRecordsName, O_RDWR | O_CREAT | O_TRUNC,
                                                 ErrorCode::storage_io);
    disk->write_manifest(dimension, 0, 0, 0);
    store->storage_path_ = dir;
    store->disk_ = std::move(disk);
    return store;
}

std::shared_ptr<LongTermMemory> LongTermMemory::open(const fs::path& dir) {
    const auto manifest_path = dir / kManifestName;
    std::ifstream manifest_in(manifest_path);
    if (!manifest_in) throw Error(ErrorCode::storage_io, "no memory store at " + dir.string());

    nlohmann::json manifest;
    try {
        manifest_in >> manifest;
    } catch (const nlohmann::json::exception&) {
        throw corrupt(dir, "unreadable manifest");
    }
    std::size_t dimension = 0, entry_count = 0, record_count = 0;
    std::uint64_t byte_length = 0;
    try {
        if (manifest.at("format").get<std::string>() != "scribe-memory") throw corrupt(dir, "not a memory store");
        if (manifest.at("format_version").get<int>() != kFormatVersion) {
            throw corrupt(dir, "unsupported format_version " + manifest.at("format_version").dump());
        }
        dimension = manifest.at("dimension").get<std::size_t>();
        entry_count = manifest.at("entry_count").get<std::size_t>();
        record_count = manifest.at("record_count").get<std::size_t>();
        byte_length = manifest.at("byte_length").get<std::uint64_t>();
    } catch (const nlohmann::json::exception&) {
        throw corrupt(dir, "malformed manifest");
    }

    std::ifstream records_in(dir / kRecordsName, std::ios::binary);
    if (!records_in) throw corrupt(dir, "missing records file");
    std::string bytes((std::istreambuf_iterator<char>(records_in)), std::istreambuf_iterator<char>());
    if (bytes.size() < byte_length) throw corrupt(dir, "records file shorter than manifest");
    bytes.resize(byte_length);

    auto store = std::make_shared<LongTermMemory>(dimension);
    auto disk = std::make_unique<Disk>();
    disk->dir = dir;
    std::size_t at = 0;
    for (std::size_t r = 0; r < record_count; ++r) {
        if (bytes.size() - at < 16) throw corrupt(dir, "truncated record header");
        const std::uint64_t offset = at;
        const std::uint64_t timestep = get_u64(bytes, at);
        const std::uint64_t text_len = get_u64(bytes, at + 8);
        at += 16;
        if (text_len > bytes.size() - at || 8 * dimension > bytes.size() - at - text_len) {
            throw corrupt(dir, "truncated record body");
        }
        std::string text = bytes.substr(at, text_len);
        at += text_len;
        std::vector<double> values(dimension);
        for (std::size_t i = 0; i < dimension; ++i, at += 8) values[i] = std::bit_cast<double>(get_u64(bytes, at));

        std::optional<EmbeddingVector> embedding;
        try {
            embedding = EmbeddingVector::from_unit(std::move(values));
        } catch (const Error&) {
            throw corrupt(dir, "record " + std::to_string(r) + " holds a non-unit vector");
        }
        MemoryEntry entry{timestep, std::move(text), std::move(*embedding)};
        if (timestep == store->entries_.size()) {
            store->entries_.push_back(std::move(entry));
        } else if (!store->entries_.empty() && timestep + 1 == store->entries_.size()) {
            store->entries_.back() = std::move(entry);
        } else {
            throw corrupt(dir, "record " + std::to_string(r) + " breaks timestep order");
        }
        disk->records_index.emplace_back(offset, timestep);
    }
    if (at != byte_length) throw corrupt(dir, "trailing bytes inside committed region");
    if (store->entries_.size() != entry_count) throw corrupt(dir, "entry count does not match manifest");

    disk->records = detail::FileDescriptor::open(dir / kRecordsName, O_RDWR, ErrorCode::storage_io);
    // Drop any uncommitted tail left by an interrupted append.
    disk->records.truncate(byte_length, ErrorCode::storage_io);
    disk->byte_length = byte_length;
    store->storage_path_ = dir;
    store->disk_ = std::move(disk);
    return store;
}

void LongTermMemory::write_record(const MemoryEntry& entry, const CommitHook& before_commit) {
    if (!disk_) {
        if (before_commit) before_commit();
        return;
    }
    const std::string record = encode_record(entry);
    const std::uint64_t old_length = disk_->byte_length;
    const bool supersedes = entry.timestep < entries_.size();
    const std::size_t new_entry_count = supersedes ? entries_.size() : entries_.size() + 1;
    try {
        disk_->records.write_at(record, old_length, ErrorCode::storage_io);
        disk_->records.sync(ErrorCode::storage_io);
        if (before_commit) before_commit();
        disk_->write_manifest(dimension_, new_entry_count, disk_->records_index.size() + 1,
                              old_length + record.size());
    } catch (...) {
        try {
            disk_->records.truncate(old_length, ErrorCode::storage_io);
        } catch (const Error&) {
            // The manifest still marks old_length as committed; open() drops the tail.
        }
        throw;
    }
    disk_->records_index.emplace_back(old_length, entry.timestep);
    disk_->byte_length = old_length + record.size();
}

void LongTermMemory::append(const Content& content, EmbeddingVector embedding, const CommitHook& before_commit) {
    std::unique_lock lock(mutex_);
    if (embedding.dimension() != dimension_) {
        throw Error(ErrorCode::dimension_mismatch, "embedding dimension " + std::to_string(embedding.dimension()) +
                                                       " does not match store dimension " +
                                                       std::to_string(dimension_));
    }
    if (content.timestep() != entries_.size()) {
        throw Error(ErrorCode::timestep_order,
                    (content.timestep() < entries_.size() ? "duplicate timestep " : "timestep gap at ") +
                        std::to_string(content.timestep()) + " (store holds " +
                        std::to_string(entries_.size()) + " entries)");
    }
    MemoryEntry entry{content.timestep(), content.text(), std::move(embedding)};
    entries_.reserve(entries_.size() + 1);
    write_record(entry, before_commit);
    entries_.push_back(std::move(entry));
}

void LongTermMemory::replace_latest(std::string text, EmbeddingVector embedding) {
    std::unique_lock lock(mutex_);
    if (entries_.empty()) throw Error(ErrorCode::invalid_edit, "memory store is empty");
    if (embedding.dimension() != dimension_) {
        throw Error(ErrorCode::dimension_mismatch, "embedding dimension does not match store");
    }
    MemoryEntry entry{entries_.back().timestep, std::move(text), std::move(embedding)};
    write_record(entry, {});
    entries_.back() = std::move(entry);
}

void LongTermMemory::truncate_to(std::size_t count) {
    std::unique_lock lock(mutex_);
    if (count >= entries_.size()) return;
    if (disk_) {
        auto& index = disk_->records_index;
        auto first_dropped = std::find_if(index.begin(), index.end(),
                                          [count](const auto& rec) { return rec.second >= count; });
        const auto keep_records = static_cast<std::size_t>(first_dropped - index.begin());
        const std::uint64_t keep_bytes = first_dropped == index.end() ? disk_->byte_length : first_dropped->first;
        disk_->write_manifest(dimension_, count, keep_records, keep_bytes);
        disk_->records.truncate(keep_bytes, ErrorCode::storage_io);
        index.resize(keep_records);
        disk_->byte_length = keep_bytes;
    }
    entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(count), entries_.end());
}

std::vector<ScoredEntry> LongTermMemory::retrieve(const EmbeddingVector& query, std::size_t k,
                                                  std::size_t candidate_limit) const {
    std::shared_lock lock(mutex_);
    if (query.dimension() != dimension_) {
        throw Error(ErrorCode::dimension_mismatch, "query dimension " + std::to_string(query.dimension()) +
                                                       " does not match store dimension " +
                                                       std::to_string(dimension_));
    }
    const std::size_t candidates = std::min(candidate_limit, entries_.size());
    struct Hit {
        double similarity;
        std::size_t index;
    };
    std::vector<Hit> hits;
    hits.reserve(candidates);
    for (std::size_t i = 0; i < candidates; ++i) hits.push_back({cosine_similarity(query, entries_[i].embedding), i});

    const std::size_t take = std::min(k, hits.size());
    auto better = [](const Hit& a, const Hit& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.index < b.index;
    };
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(take), hits.end(), better);

    std::vector<ScoredEntry> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.push_back({entries_[hits[i].index], hits[i].similarity});
    return out;
}

std::size_t LongTermMemory::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::vector<MemoryEntry> LongTermMemory::entries() const {
    std::shared_lock lock(mutex_);
    return entries_;
}

std::optional<MemoryEntry> LongTermMemory::latest() const {
    std::shared_lock lock(mutex_);
    if (entries_.empty()) return std::nullopt;
    return entries_.back();
}

}  // namespace scribe
