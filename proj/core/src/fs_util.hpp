#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>

#include "scribe/errors.hpp"

namespace scribe::detail {

class FileDescriptor {
public:
    FileDescriptor() = default;
    static FileDescriptor open(const std::filesystem::path& path, int flags, ErrorCode on_error);

    FileDescriptor(FileDescriptor&& other) noexcept;
    FileDescriptor& operator=(FileDescriptor&& other) noexcept;
    FileDescriptor(const FileDescriptor&) = delete;
    FileDescriptor& operator=(const FileDescriptor&) = delete;
    ~FileDescriptor();

    void write_all(std::string_view bytes, ErrorCode on_error) const;
    void write_at(std::string_view bytes, std::uint64_t offset, ErrorCode on_error) const;
    void truncate(std::uint64_t length, ErrorCode on_error) const;
    void sync(ErrorCode on_error) const;
    int get() const noexcept { return fd_; }

private:
    explicit FileDescriptor(int fd, std::filesystem::path path) : fd_(fd), path_(std::move(path)) {}

    int fd_ = -1;
    std::filesystem::path path_;
};

// Invoked with the temp path after its contents are synced and before the rename.
using BeforeRenameHook = std::function<void(const std::filesystem::path&)>;

// Writes `contents` to a sibling temp file, fsyncs it, then renames it over
// `path`. On failure the temp file is removed and `path` is untouched.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents, ErrorCode on_error,
                       const BeforeRenameHook& before_rename = {});

}  // namespace scribe::detail
