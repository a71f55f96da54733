#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "provmark/device.hpp"
#include "provmark/errors.hpp"
#include "provmark/frame.hpp"
#include "provmark/image.hpp"
#include "provmark/png_io.hpp"
#include "provmark/registry.hpp"
#include "provmark/signature.hpp"
#include "provmark/watermark.hpp"

namespace provmark {

enum class Verdict { Authentic, UnknownDevice, Tampered, NoWatermark };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Authentic: return "Authentic";
        case Verdict::UnknownDevice: return "UnknownDevice";
        case Verdict::Tampered: return "Tampered";
        case Verdict::NoWatermark: return "NoWatermark";
    }
    return "NoWatermark";
}

struct VerificationReport {
    Verdict verdict = Verdict::NoWatermark;
    std::optional<std::string> device_id;
    std::optional<std::string> extracted_dfp;
    // Similarity numbers are present whenever a frame was decoded.
    std::optional<double> signature_similarity;
    std::optional<int> max_byte_delta;
    std::string details;

    nlohmann::json to_json() const {
        nlohmann::json j = {{"verdict", to_string(verdict)}, {"details", details}};
        if (device_id) j["device_id"] = *device_id;
        if (extracted_dfp) j["extracted_dfp"] = *extracted_dfp;
        if (signature_similarity) j["signature_similarity"] = *signature_similarity;
        if (max_byte_delta) j["max_byte_delta"] = *max_byte_delta;
        return j;
    }
};

/// Full acquisition-time pipeline: signature -> fingerprint fusion -> key
/// masking -> framing -> wavelet embedding. Pure; file placement is handled
/// by StampPolicy.
inline RasterImage acquire_and_stamp(const RasterImage& img, const DeviceFeatureSet& features,
                                     const PreSharedKey& key, const SubbandPlan& plan) {
    DeviceFingerprint dfp = device_fingerprint(canonicalize_features(features));
    ImageSignature sig = image_signature(img);
    FusedPayload fused = fuse_payload(dfp, sig);
    std::string masked = apply_mask(fused.hex, derive_mask(key));
    return embed_frame(img, WatermarkFrame::for_body(masked), plan);
}

/// Watermarked images may only be written to (and shared from) one designated
/// directory.
class StampPolicy {
public:
    explicit StampPolicy(std::filesystem::path designated_dir)
        : dir_(std::filesystem::weakly_canonical(designated_dir)) {}

    const std::filesystem::path& designated_dir() const { return dir_; }

    /// Stamp and store under the designated directory; returns the written path.
    std::filesystem::path stamp_into(const RasterImage& img, const DeviceFeatureSet& features,
                                     const PreSharedKey& key, const SubbandPlan& plan,
                                     const std::string& filename) const {
        std::filesystem::create_directories(dir_);
        std::filesystem::path target = dir_ / filename;
        assert_shareable(target);
        write_png(target.string(), acquire_and_stamp(img, features, key, plan));
        return target;
    }

    /// The share step refuses any file that does not live inside the
    /// designated directory.
    void assert_shareable(const std::filesystem::path& p) const {
        std::filesystem::path canon = std::filesystem::weakly_canonical(p);
        auto it = std::mismatch(dir_.begin(), dir_.end(), canon.begin(), canon.end());
        if (it.first != dir_.end())
            throw PolicyViolation(canon.string() + " is outside the designated directory " +
                                  dir_.string());
    }

private:
    std::filesystem::path dir_;
};

/// Cloud-side verification (read-only with respect to the registry):
/// extract -> unmask -> split -> device lookup -> signature comparison.
inline VerificationReport verify_image(const RasterImage& img, const PreSharedKey& key,
                                       const SubbandPlan& plan, const Registry& registry,
                                       int tol_bytes = 3, double tol_corr = 0.98) {
    VerificationReport report;
    std::optional<WatermarkFrame> frame = extract_frame(img, plan);
    if (!frame) {
        report.verdict = Verdict::NoWatermark;
        report.details = "no valid watermark frame (magic/CRC check failed)";
        return report;
    }

    FusedPayload fused{apply_mask(frame->body, derive_mask(key))};
    auto [dfp_hex, sig_hex] = split_payload(fused);
    report.extracted_dfp = dfp_hex;

    ImageSignature embedded = ImageSignature::from_hex(sig_hex);
    ImageSignature recomputed = image_signature(img);
    double corr = signature_correlation(embedded, recomputed);
    int delta = signature_max_byte_delta(embedded, recomputed);
    report.signature_similarity = corr;
    report.max_byte_delta = delta;

    auto record = registry.find_by_fingerprint(dfp_hex);
    if (!record) {
        report.verdict = Verdict::UnknownDevice;
        report.details = "decoded device fingerprint is not registered";
        return report;
    }
    report.device_id = record->device_id;

    if (delta <= tol_bytes && corr >= tol_corr) {
        report.verdict = Verdict::Authentic;
        report.details = "device matched and image signature within tolerance";
    } else {
        report.verdict = Verdict::Tampered;
        report.details = "embedded signature disagrees with the received image "
                         "(max byte delta " +
                         std::to_string(delta) + ", correlation " + std::to_string(corr) +
                         ")";
    }
    return report;
}

} // namespace provmark
