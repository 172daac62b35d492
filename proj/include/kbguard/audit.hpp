#pragma once

#include "kbguard/term.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kbguard {

enum class EventKind { Violation, Denial, Revocation, Registration, Allowed };

/// One logged decision or violation event. Records are append-only: they are
/// never mutated or deleted, and sequence numbers strictly increase from 1.
struct AuditRecord {
    std::uint64_t sequence = 0;
    std::chrono::system_clock::time_point timestamp;
    std::string agent_id;
    EventKind event = EventKind::Denial;
    std::optional<Term> predicate;
    std::string detail;
};

struct AuditFilter {
    std::optional<std::string> agent_id;
    std::optional<EventKind> event;
};

/// In-memory append-only log. Appends serialize on the sequence counter;
/// readers see a prefix-consistent snapshot.
class AuditLog {
public:
    AuditRecord log(std::string agent_id, EventKind event,
                    std::optional<Term> predicate = std::nullopt,
                    std::string detail = {});

    /// Matching records in sequence order.
    std::vector<AuditRecord> query_log(const AuditFilter& filter = {}) const;

    std::size_t size() const;

    /// Mirrors every subsequent append to `path` (append mode), one record
    /// per line in the export format. Throws ConfigError when the file
    /// cannot be opened.
    void enable_export(const std::filesystem::path& path);

private:
    mutable std::mutex mutex_;
    std::vector<AuditRecord> records_;
    std::uint64_t next_sequence_ = 1;
    std::ofstream export_;

    std::chrono::system_clock::time_point now() const;
};

std::string to_string(EventKind e);
std::optional<EventKind> event_kind_from_string(std::string_view s);

/// `<sequence>\t<ISO-8601 UTC>\t<agent_id>\t<event>\t<predicate-or-"-">\t<detail>`
std::string format_record(const AuditRecord& r);

std::string format_timestamp(std::chrono::system_clock::time_point tp);

} // namespace kbguard
