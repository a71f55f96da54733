#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "provmark/digest.hpp"
#include "provmark/errors.hpp"
#include "provmark/hex.hpp"

namespace provmark {

/// One device attribute: ("hardware", "ram", "8 GB").
struct FeatureEntry {
    std::string category;
    std::string name;
    std::string value;
};

/// Ordered list of device attributes. Construction enforces the invariants:
/// non-empty, and no two entries share the same (category, name) pair.
class DeviceFeatureSet {
public:
    explicit DeviceFeatureSet(std::vector<FeatureEntry> entries)
        : entries_(std::move(entries)) {
        if (entries_.empty())
            throw EmptyFeatureSet("a device feature set needs at least one entry");
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& e : entries_) {
            if (!seen.emplace(e.category, e.name).second)
                throw DuplicateFeatureName(e.category + "." + e.name +
                                           " appears more than once");
        }
    }

    const std::vector<FeatureEntry>& entries() const { return entries_; }

private:
    std::vector<FeatureEntry> entries_;
};

/// 128 lowercase hex chars identifying a device.
struct DeviceFingerprint {
    std::string hex;
};

/// Deployment secret used to mask payloads. Never serialized.
class PreSharedKey {
public:
    static constexpr std::size_t kMinBytes = 16;

    explicit PreSharedKey(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {
        if (bytes_.size() < kMinBytes)
            throw KeyTooShort("pre-shared key must be at least " +
                              std::to_string(kMinBytes) + " bytes, got " +
                              std::to_string(bytes_.size()));
    }

    static PreSharedKey from_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoFailure("cannot open key file: " + path);
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
        return PreSharedKey(std::move(bytes));
    }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

/// 256 lowercase hex chars derived from the pre-shared key.
struct KeyMask {
    std::string hex;
};

namespace detail {

inline std::string sanitize_token(std::string_view raw) {
    // Structural characters ('.', '=', '|') are stripped from category and
    // name tokens so the canonical text parses unambiguously.
    std::string out;
    for (char c : raw) {
        char l = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
        if ((l >= 'a' && l <= 'z') || (l >= '0' && l <= '9')) out.push_back(l);
    }
    return out;
}

inline std::string sanitize_value(std::string_view raw) {
    std::string out;
    for (char c : raw) {
        char l = (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
        if ((l >= 'a' && l <= 'z') || (l >= '0' && l <= '9') || l == '=' ||
            l == '|' || l == '.')
            out.push_back(l);
    }
    return out;
}

} // namespace detail

/// Normalizes a feature set into the canonical text that gets hashed:
/// lowercase, junk characters stripped, entries sorted by (category, name),
/// rendered as "category.name=value" joined with "|".
inline std::string canonicalize_features(const DeviceFeatureSet& features) {
    struct Canon {
        std::string category, name, value;
    };
    std::vector<Canon> canon;
    canon.reserve(features.entries().size());
    for (const auto& e : features.entries()) {
        canon.push_back({detail::sanitize_token(e.category),
                         detail::sanitize_token(e.name),
                         detail::sanitize_value(e.value)});
    }
    std::sort(canon.begin(), canon.end(), [](const Canon& a, const Canon& b) {
        return std::tie(a.category, a.name) < std::tie(b.category, b.name);
    });
    std::string out;
    for (std::size_t i = 0; i < canon.size(); ++i) {
        if (i) out.push_back('|');
        out += canon[i].category;
        out.push_back('.');
        out += canon[i].name;
        out.push_back('=');
        out += canon[i].value;
    }
    return out;
}

/// Splits a canonical text back into entries. Only used to check the
/// idempotence property; values containing structural characters parse as
/// whatever entries they spell.
inline DeviceFeatureSet parse_canonical(std::string_view canonical) {
    std::vector<FeatureEntry> entries;
    std::size_t pos = 0;
    while (pos <= canonical.size()) {
        std::size_t end = canonical.find('|', pos);
        if (end == std::string_view::npos) end = canonical.size();
        std::string_view item = canonical.substr(pos, end - pos);
        std::size_t dot = item.find('.');
        std::size_t eq = item.find('=', dot == std::string_view::npos ? 0 : dot);
        if (dot != std::string_view::npos && eq != std::string_view::npos && dot < eq) {
            entries.push_back({std::string(item.substr(0, dot)),
                               std::string(item.substr(dot + 1, eq - dot - 1)),
                               std::string(item.substr(eq + 1))});
        }
        if (end == canonical.size()) break;
        pos = end + 1;
    }
    return DeviceFeatureSet(std::move(entries));
}

/// SHA-512 of the canonical feature text, as 128 lowercase hex chars.
inline DeviceFingerprint device_fingerprint(std::string_view canonical) {
    return DeviceFingerprint{sha512_hex(canonical)};
}

/// Mask = sha512(key || 0x00) || sha512(key || 0x01), hex-encoded: 256 chars.
inline KeyMask derive_mask(const PreSharedKey& key) {
    std::vector<std::uint8_t> buf = key.bytes();
    buf.push_back(0x00);
    std::string mask = sha512_hex(buf);
    buf.back() = 0x01;
    mask += sha512_hex(buf);
    return KeyMask{mask};
}

/// Nibble-wise XOR of a 256-hex-char payload with the key mask. Applying the
/// same mask twice restores the payload.
inline std::string apply_mask(std::string_view payload_hex, const KeyMask& mask) {
    if (payload_hex.size() != 256)
        throw LengthMismatch("payload must be 256 hex chars, got " +
                             std::to_string(payload_hex.size()));
    return hex::xor_nibbles(payload_hex, mask.hex);
}

/// Loads a feature set from the on-disk JSON layout:
///   {"category": {"name": "value", ...}, ...}
/// Non-string leaf values are rendered with their JSON spelling.
inline DeviceFeatureSet features_from_json(const nlohmann::json& doc) {
    if (!doc.is_object())
        throw BadFeatureDocument("feature document root must be a JSON object");
    std::vector<FeatureEntry> entries;
    for (const auto& [category, group] : doc.items()) {
        if (!group.is_object())
            throw BadFeatureDocument("category '" + category +
                                     "' must map to an object of name/value pairs");
        for (const auto& [name, value] : group.items()) {
            std::string text = value.is_string() ? value.get<std::string>() : value.dump();
            entries.push_back({category, name, std::move(text)});
        }
    }
    return DeviceFeatureSet(std::move(entries));
}

inline DeviceFeatureSet features_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open features file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw BadFeatureDocument(path + ": " + e.what());
    }
    return features_from_json(doc);
}

} // namespace provmark
