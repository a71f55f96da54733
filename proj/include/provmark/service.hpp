#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "provmark/device.hpp"
#include "provmark/errors.hpp"
#include "provmark/pipeline.hpp"
#include "provmark/png_io.hpp"
#include "provmark/registry.hpp"

namespace provmark {

namespace detail {

inline std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view s) {
    auto value_of = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<std::uint8_t> out;
    out.reserve(s.size() / 4 * 3);
    int acc = 0, bits = 0;
    for (char c : s) {
        if (c == '\n' || c == '\r' || c == ' ') continue;
        if (c == '=') break;
        int v = value_of(c);
        if (v < 0) return std::nullopt;
        acc = acc << 6 | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>(acc >> bits & 0xff));
        }
    }
    return out;
}

} // namespace detail

struct ServiceConfig {
    std::string host = "0.0.0.0";
    int port = 8787;
    double delta = 8.0;
    std::optional<int> redundancy;            // default: derived per image
    std::size_t max_image_bytes = 32u << 20;  // 32 MiB
    int tol_bytes = 3;
    double tol_corr = 0.98;
};

/// Wires the verification endpoints onto an httplib server. The registry
/// outlives the server; verifications only read it.
class ProvenanceService {
public:
    ProvenanceService(Registry& registry, PreSharedKey key, ServiceConfig config)
        : registry_(registry), key_(std::move(key)), config_(config) {
        server_.set_payload_max_length(config_.max_image_bytes);
        wire_routes();
    }

    httplib::Server& server() { return server_; }
    const ServiceConfig& config() const { return config_; }

    /// Blocks serving requests until stop() is called.
    bool listen() { return server_.listen(config_.host, config_.port); }
    void stop() { server_.stop(); }

private:
    static void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    SubbandPlan plan_for(const RasterImage& img) const {
        if (config_.redundancy) {
            SubbandPlan plan;
            plan.delta = config_.delta;
            plan.redundancy = *config_.redundancy;
            plan.validate_against(img.width, img.height);
            return plan;
        }
        return SubbandPlan::for_image(img.width, img.height, config_.delta);
    }

    void wire_routes() {
        server_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("ok", "text/plain");
        });

        server_.Post("/devices", [this](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.contains("device_id") ||
                !body.contains("features")) {
                reply_json(res, 400,
                           {{"error", "expected JSON body {device_id, features}"}});
                return;
            }
            try {
                auto features = features_from_json(body["features"]);
                auto dfp = device_fingerprint(canonicalize_features(features));
                auto record = registry_.register_device(
                    body["device_id"].get<std::string>(), dfp);
                reply_json(res, 201,
                           {{"device_id", record.device_id},
                            {"fingerprint", record.fingerprint}});
            } catch (const DuplicateDevice& e) {
                reply_json(res, 409, {{"error", e.what()}});
            } catch (const StorageFailure& e) {
                reply_json(res, 500, {{"error", e.what()}});
            } catch (const Error& e) {
                reply_json(res, 400, {{"error", e.what()}});
            }
        });

        server_.Get("/devices", [this](const httplib::Request&, httplib::Response& res) {
            nlohmann::json out = nlohmann::json::array();
            for (const auto& r : registry_.records())
                out.push_back({{"device_id", r.device_id},
                               {"fingerprint", r.fingerprint},
                               {"enrolled_at", r.enrolled_at}});
            reply_json(res, 200, out);
        });

        server_.Post("/verify", [this](const httplib::Request& req, httplib::Response& res) {
            std::vector<std::uint8_t> png_bytes;
            if (req.is_multipart_form_data()) {
                if (!req.has_file("image")) {
                    reply_json(res, 400, {{"error", "multipart body needs an \"image\" part"}});
                    return;
                }
                const auto& part = req.get_file_value("image");
                png_bytes.assign(part.content.begin(), part.content.end());
            } else {
                nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
                if (body.is_discarded() || !body.contains("image_base64") ||
                    !body["image_base64"].is_string()) {
                    reply_json(res, 400,
                               {{"error", "expected multipart PNG or {image_base64}"}});
                    return;
                }
                auto decoded = detail::base64_decode(body["image_base64"].get<std::string>());
                if (!decoded) {
                    reply_json(res, 400, {{"error", "image_base64 is not valid base64"}});
                    return;
                }
                png_bytes = std::move(*decoded);
            }
            if (png_bytes.size() > config_.max_image_bytes) {
                reply_json(res, 413, {{"error", "image exceeds configured size cap"}});
                return;
            }
            try {
                RasterImage img = decode_png(png_bytes);
                auto report = verify_image(img, key_, plan_for(img), registry_,
                                           config_.tol_bytes, config_.tol_corr);
                // NoWatermark/Tampered are verdicts, not transport errors.
                reply_json(res, 200, report.to_json());
            } catch (const StorageFailure& e) {
                reply_json(res, 500, {{"error", e.what()}});
            } catch (const Error& e) {
                reply_json(res, 400, {{"error", e.what()}});
            }
        });
    }

    Registry& registry_;
    PreSharedKey key_;
    ServiceConfig config_;
    httplib::Server server_;
};

} // namespace provmark
