#include "ptl/journal.hpp"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <string>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

namespace ptl {

namespace {

std::string errno_text() {
    return std::strerror(errno);
}

}  // namespace

Journal::Journal(std::filesystem::path path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) {
        throw JournalError("cannot open journal " + path_.string() + ": " + errno_text());
    }
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
        const std::string reason = errno == EWOULDBLOCK
                                       ? "another writer holds the lock"
                                       : errno_text();
        ::close(fd_);
        fd_ = -1;
        throw JournalError("cannot lock journal " + path_.string() + ": " + reason);
    }
}

Journal::Journal(Journal&& other) noexcept : path_(std::move(other.path_)), fd_(other.fd_) {
    other.fd_ = -1;
}

Journal::~Journal() {
    if (fd_ >= 0) {
        ::close(fd_);  // releases the flock
    }
}

void Journal::append(const EvaluationRecord& record) {
    if (fd_ < 0) {
        throw JournalError("journal is not open");
    }
    std::string line = to_json_line(record);
    line += '\n';
    const char* data = line.data();
    std::size_t remaining = line.size();
    while (remaining > 0) {
        const ssize_t n = ::write(fd_, data, remaining);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            throw JournalError("journal write failed: " + errno_text());
        }
        data += n;
        remaining -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) {
        throw JournalError("journal fsync failed: " + errno_text());
    }
}

std::vector<EvaluationRecord> Journal::read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw JournalError("cannot open journal " + path.string() + " for reading");
    }
    std::vector<EvaluationRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        records.push_back(evaluation_record_from_json_line(line));
    }
    return records;
}

}  // namespace ptl
