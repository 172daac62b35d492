#include "kbguard/audit.hpp"

#include "kbguard/error.hpp"

#include <cstdio>
#include <ctime>

namespace kbguard {

AuditRecord AuditLog::log(std::string agent_id, EventKind event,
                          std::optional<Term> predicate, std::string detail) {
    std::lock_guard lock(mutex_);
    AuditRecord record{next_sequence_++, now(), std::move(agent_id), event,
                       std::move(predicate), std::move(detail)};
    records_.push_back(record);
    if (export_.is_open()) {
        export_ << format_record(record) << '\n';
        export_.flush();
    }
    return record;
}

std::vector<AuditRecord> AuditLog::query_log(const AuditFilter& filter) const {
    std::lock_guard lock(mutex_);
    std::vector<AuditRecord> out;
    for (const AuditRecord& r : records_) {
        if (filter.agent_id && r.agent_id != *filter.agent_id) continue;
        if (filter.event && r.event != *filter.event) continue;
        out.push_back(r);
    }
    return out;
}

std::size_t AuditLog::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

void AuditLog::enable_export(const std::filesystem::path& path) {
    std::lock_guard lock(mutex_);
    export_.open(path, std::ios::app);
    if (!export_) throw ConfigError("cannot open audit export file: " + path.string());
}

std::chrono::system_clock::time_point AuditLog::now() const {
    return std::chrono::system_clock::now();
}

std::string to_string(EventKind e) {
    switch (e) {
        case EventKind::Violation: return "violation";
        case EventKind::Denial: return "denial";
        case EventKind::Revocation: return "revocation";
        case EventKind::Registration: return "registration";
        case EventKind::Allowed: return "allowed";
    }
    return "?";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
    if (s == "violation") return EventKind::Violation;
    if (s == "denial") return EventKind::Denial;
    if (s == "revocation") return EventKind::Revocation;
    if (s == "registration") return EventKind::Registration;
    if (s == "allowed") return EventKind::Allowed;
    return std::nullopt;
}

std::string format_timestamp(std::chrono::system_clock::time_point tp) {
    std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

std::string format_record(const AuditRecord& r) {
    std::string predicate = r.predicate ? to_string(*r.predicate) : "-";
    return std::to_string(r.sequence) + "\t" + format_timestamp(r.timestamp) + "\t" +
           r.agent_id + "\t" + to_string(r.event) + "\t" + predicate + "\t" + r.detail;
}

} // namespace kbguard
