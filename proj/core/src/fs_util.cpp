#include "fs_util.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>

namespace scribe::detail {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& what, const fs::path& path) {
    throw Error(code, what + " " + path.string() + ": " + std::strerror(errno));
}

}  // namespace

FileDescriptor FileDescriptor::open(const fs::path& path, int flags, ErrorCode on_error) {
    const int fd = ::open(path.c_str(), flags | O_CLOEXEC, 0644);
    if (fd < 0) fail(on_error, "cannot open", path);
    return FileDescriptor(fd, path);
}

FileDescriptor::FileDescriptor(FileDescriptor&& other) noexcept
    : fd_(other.fd_), path_(std::move(other.path_)) {
    other.fd_ = -1;
}

FileDescriptor& FileDescriptor::operator=(FileDescriptor&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = other.fd_;
        path_ = std::move(other.path_);
        other.fd_ = -1;
    }
    return *this;
}

FileDescriptor::~FileDescriptor() {
    if (fd_ >= 0) ::close(fd_);
}

void FileDescriptor::write_all(std::string_view bytes, ErrorCode on_error) const {
    while (!bytes.empty()) {
        const ssize_t n = ::write(fd_, bytes.data(), bytes.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            fail(on_error, "cannot write", path_);
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

void FileDescriptor::write_at(std::string_view bytes, std::uint64_t offset, ErrorCode on_error) const {
    while (!bytes.empty()) {
        const ssize_t n = ::pwrite(fd_, bytes.data(), bytes.size(), static_cast<off_t>(offset));
        if (n < 0) {
            if (errno == EINTR) continue;
            fail(on_error, "cannot write", path_);
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
        offset += static_cast<std::uint64_t>(n);
    }
}

void FileDescriptor::truncate(std::uint64_t length, ErrorCode on_error) const {
    if (::ftruncate(fd_, static_cast<off_t>(length)) != 0) fail(on_error, "cannot truncate", path_);
}

void FileDescriptor::sync(ErrorCode on_error) const {
    if (::fsync(fd_) != 0) fail(on_error, "cannot sync", path_);
}

void write_file_atomic(const fs::path& path, std::string_view contents, ErrorCode on_error,
                       const BeforeRenameHook& before_rename) {
    fs::path temp = path;
    temp += ".tmp";
    try {
        {
            auto fd = FileDescriptor::open(temp, O_WRONLY | O_CREAT | O_TRUNC, on_error);
            fd.write_all(contents, on_error);
            fd.sync(on_error);
        }
        if (before_rename) before_rename(temp);
        if (std::rename(temp.c_str(), path.c_str()) != 0) fail(on_error, "cannot rename onto", path);
    } catch (...) {
        std::error_code ec;
        fs::remove(temp, ec);
        throw;
    }
    // Make the rename itself durable.
    const auto parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const int dir_fd = ::open(parent.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (dir_fd >= 0) {
        ::fsync(dir_fd);
        ::close(dir_fd);
    }
}

}  // namespace scribe::detail
