#pragma once

#include "ptl/market_data.hpp"

#include <filesystem>
#include <vector>

namespace ptl {

/// Append-only evaluation journal: one JSON object per line. A journal
/// holds an exclusive advisory lock for its lifetime, so exactly one
/// writer exists per file; readers go through read_all without locking.
class Journal {
public:
    /// Opens (creating if needed) for append and takes the writer lock.
    /// Throws JournalError if the file cannot be opened or a writer
    /// already holds the lock.
    explicit Journal(std::filesystem::path path);
    ~Journal();

    Journal(const Journal&) = delete;
    Journal& operator=(const Journal&) = delete;
    Journal(Journal&& other) noexcept;
    Journal& operator=(Journal&&) = delete;

    /// Durably append one record as a single line (write + flush).
    void append(const EvaluationRecord& record);

    const std::filesystem::path& path() const noexcept { return path_; }

    /// Re-read a journal into the record sequence in append order.
    static std::vector<EvaluationRecord> read_all(const std::filesystem::path& path);

private:
    std::filesystem::path path_;
    int fd_ = -1;
};

}  // namespace ptl
