#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "provmark/device.hpp"
#include "provmark/errors.hpp"

namespace provmark {

enum class FingerprintSource { application, devfing };

inline std::string to_string(FingerprintSource s) {
    return s == FingerprintSource::application ? "application" : "devfing";
}

inline FingerprintSource source_from_string(const std::string& s) {
    if (s == "application") return FingerprintSource::application;
    if (s == "devfing") return FingerprintSource::devfing;
    throw CorruptRecord("unknown fingerprint source: " + s);
}

inline std::string utc_now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RegistryRecord {
    std::string device_id;
    std::string fingerprint; // 128 lowercase hex chars
    std::string enrolled_at; // ISO 8601 UTC
    FingerprintSource source = FingerprintSource::application;
    std::optional<std::string> devfing_key; // bit string, devfing enrollments only

    nlohmann::json to_json() const {
        nlohmann::json j = {{"device_id", device_id},
                            {"fingerprint", fingerprint},
                            {"enrolled_at", enrolled_at},
                            {"source", to_string(source)}};
        if (devfing_key) j["devfing_key"] = *devfing_key;
        return j;
    }

    static RegistryRecord from_json(const nlohmann::json& j) {
        RegistryRecord r;
        r.device_id = j.at("device_id").get<std::string>();
        r.fingerprint = j.at("fingerprint").get<std::string>();
        r.enrolled_at = j.at("enrolled_at").get<std::string>();
        r.source = source_from_string(j.at("source").get<std::string>());
        if (j.contains("devfing_key"))
            r.devfing_key = j.at("devfing_key").get<std::string>();
        if (r.device_id.empty()) throw CorruptRecord("empty device_id");
        if (r.fingerprint.size() != 128 || !hex::is_lower_hex(r.fingerprint))
            throw CorruptRecord("fingerprint must be 128 lowercase hex chars");
        return r;
    }
};

/// Durable device registry over an append-only NDJSON file. Registrations go
/// through a single writer; lookups take a shared lock and never touch the
/// file.
class Registry {
public:
    /// In-memory registry (tests, ad-hoc verification without persistence).
    Registry() = default;

    /// Opens (creating if missing) the NDJSON store at `path` and indexes it.
    /// A trailing line without a newline that fails to parse is treated as a
    /// torn write: skipped with a warning on stderr. A malformed line that
    /// was fully written is a hard error.
    static Registry open(const std::string& path) {
        Registry reg;
        reg.path_ = path;
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            // First run: create the file so later appends cannot fail on a
            // missing parent of read-your-write.
            std::ofstream touch(path, std::ios::binary | std::ios::app);
            if (!touch) throw StorageFailure("cannot create registry file: " + path);
            return reg;
        }
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        std::size_t pos = 0, line_no = 0;
        while (pos < content.size()) {
            std::size_t nl = content.find('\n', pos);
            bool complete = nl != std::string::npos;
            std::string line = content.substr(pos, complete ? nl - pos : std::string::npos);
            pos = complete ? nl + 1 : content.size();
            ++line_no;
            if (line.empty() || line == "\r") continue;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded()) {
                if (!complete) {
                    std::cerr << "warning: ignoring torn trailing record in " << path
                              << " (line " << line_no << ")\n";
                    break;
                }
                throw CorruptRecord(path + ":" + std::to_string(line_no) +
                                    ": malformed registry line");
            }
            try {
                reg.index(RegistryRecord::from_json(j));
            } catch (const Error& e) {
                throw CorruptRecord(path + ":" + std::to_string(line_no) + ": " + e.what());
            }
        }
        return reg;
    }

    RegistryRecord register_device(const std::string& device_id,
                                   const DeviceFingerprint& fingerprint,
                                   FingerprintSource source = FingerprintSource::application,
                                   std::optional<std::string> devfing_key = std::nullopt) {
        if (device_id.empty()) throw DuplicateDevice("device_id must be non-empty");
        RegistryRecord record;
        record.device_id = device_id;
        record.fingerprint = fingerprint.hex;
        record.enrolled_at = utc_now_iso8601();
        record.source = source;
        record.devfing_key = std::move(devfing_key);

        std::unique_lock lock(*mutex_);
        if (by_id_.count(device_id))
            throw DuplicateDevice("device already registered: " + device_id);
        if (!path_.empty()) append_line(record);
        index_unlocked(record);
        return record;
    }

    std::optional<RegistryRecord> find_by_fingerprint(const std::string& fingerprint_hex) const {
        std::shared_lock lock(*mutex_);
        auto it = by_fingerprint_.find(fingerprint_hex);
        if (it == by_fingerprint_.end()) return std::nullopt;
        return records_[it->second];
    }

    std::optional<RegistryRecord> find_by_id(const std::string& device_id) const {
        std::shared_lock lock(*mutex_);
        auto it = by_id_.find(device_id);
        if (it == by_id_.end()) return std::nullopt;
        return records_[it->second];
    }

    std::vector<RegistryRecord> records() const {
        std::shared_lock lock(*mutex_);
        return records_;
    }

    std::size_t size() const {
        std::shared_lock lock(*mutex_);
        return records_.size();
    }

private:
    void index(const RegistryRecord& record) {
        std::unique_lock lock(*mutex_);
        index_unlocked(record);
    }

    void index_unlocked(const RegistryRecord& record) {
        if (by_id_.count(record.device_id))
            throw DuplicateDevice("device already registered: " + record.device_id);
        records_.push_back(record);
        by_id_[record.device_id] = records_.size() - 1;
        // First fingerprint wins on (unexpected) duplicates.
        by_fingerprint_.emplace(record.fingerprint, records_.size() - 1);
    }

    void append_line(const RegistryRecord& record) {
        std::ofstream out(path_, std::ios::binary | std::ios::app);
        if (!out) throw StorageFailure("cannot open registry for append: " + path_);
        out << record.to_json().dump() << '\n';
        out.flush();
        if (!out) throw StorageFailure("append to registry failed: " + path_);
    }

    std::string path_;
    // unique_ptr keeps Registry movable (open() returns by value)
    mutable std::unique_ptr<std::shared_mutex> mutex_ = std::make_unique<std::shared_mutex>();
    std::vector<RegistryRecord> records_;
    std::map<std::string, std::size_t> by_id_;
    std::map<std::string, std::size_t> by_fingerprint_;
};

} // namespace provmark
