// provmark: device-fingerprint watermarking and provenance verification CLI.
//
// stdout carries machine-parseable output only (JSON or CSV); diagnostics go
// to stderr. Exit codes: 0 success (and verdict Authentic for `verify`),
// 2 usage error, 3 NoWatermark, 4 UnknownDevice, 5 Tampered, 1 runtime error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "provmark/provmark.hpp"

namespace {

provmark::PreSharedKey load_key(const std::string& key_path) {
    std::string path = key_path;
    if (path.empty()) {
        const char* env = std::getenv("PROVMARK_KEY");
        if (env) path = env;
    }
    if (path.empty())
        throw provmark::IoFailure(
            "no key given: pass --key or set PROVMARK_KEY to a key file path");
    return provmark::PreSharedKey::from_file(path);
}

provmark::SubbandPlan plan_for_image(const provmark::RasterImage& img, double delta,
                                     int redundancy) {
    if (redundancy > 0) {
        provmark::SubbandPlan plan;
        plan.delta = delta;
        plan.redundancy = redundancy;
        plan.validate_against(img.width, img.height);
        return plan;
    }
    return provmark::SubbandPlan::for_image(img.width, img.height, delta);
}

std::vector<double> parse_k_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        out.push_back(std::stod(cell));
    }
    if (out.empty()) throw provmark::BadMatrixFile("--k list is empty");
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Image provenance toolkit: device-fingerprint watermarking, "
                 "verification, quality metrics and the DevFing simulator"};
    app.require_subcommand(1);

    // device-fp
    std::string fp_features;
    auto* fp_cmd = app.add_subcommand("device-fp", "Print the 128-hex device fingerprint");
    fp_cmd->add_option("--features", fp_features, "Device features JSON file")->required();

    // stamp
    std::string st_image, st_features, st_key, st_out, st_dir;
    double st_delta = 8.0;
    int st_redundancy = 0;
    auto* st_cmd = app.add_subcommand("stamp", "Embed the provenance watermark into an image");
    st_cmd->add_option("--image", st_image, "Input PNG")->required();
    st_cmd->add_option("--features", st_features, "Device features JSON file")->required();
    st_cmd->add_option("--key", st_key, "Pre-shared key file (or PROVMARK_KEY)");
    st_cmd->add_option("--out", st_out, "Output PNG path")->required();
    st_cmd->add_option("--delta", st_delta, "Quantization step (watermark strength)")
        ->default_val(8.0);
    st_cmd->add_option("--redundancy", st_redundancy,
                       "Odd per-bit repetition count (default: derived from capacity)");
    st_cmd->add_option("--stamped-dir", st_dir,
                       "Designated watermarked-image directory; --out must lie inside it");

    // verify
    std::string vf_image, vf_key, vf_registry;
    int vf_tol_bytes = 3, vf_redundancy = 0;
    double vf_tol_corr = 0.98, vf_delta = 8.0;
    auto* vf_cmd = app.add_subcommand("verify", "Verify provenance of an image");
    vf_cmd->add_option("--image", vf_image, "PNG to verify")->required();
    vf_cmd->add_option("--key", vf_key, "Pre-shared key file (or PROVMARK_KEY)");
    vf_cmd->add_option("--registry", vf_registry, "NDJSON device registry")->required();
    vf_cmd->add_option("--tol-bytes", vf_tol_bytes, "Max per-byte signature delta")
        ->default_val(3);
    vf_cmd->add_option("--tol-corr", vf_tol_corr, "Min signature correlation")
        ->default_val(0.98);
    vf_cmd->add_option("--delta", vf_delta, "Quantization step used at stamping")
        ->default_val(8.0);
    vf_cmd->add_option("--redundancy", vf_redundancy,
                       "Repetition count used at stamping (default: derived)");

    // metrics
    std::string mt_ref, mt_test;
    bool mt_csv = false, mt_csv_header = false;
    auto* mt_cmd = app.add_subcommand("metrics", "Full-reference quality report");
    mt_cmd->add_option("--ref", mt_ref, "Reference PNG")->required();
    mt_cmd->add_option("--test", mt_test, "Test PNG")->required();
    mt_cmd->add_flag("--csv", mt_csv, "Emit a CSV row instead of JSON");
    mt_cmd->add_flag("--csv-header", mt_csv_header, "Print the CSV header row first");

    // devfing
    auto* df_cmd = app.add_subcommand("devfing", "Hardware fingerprint simulator");
    df_cmd->require_subcommand(1);
    std::string bz_matrix;
    auto* bz_cmd = df_cmd->add_subcommand("binarize", "Binarize an LCR matrix");
    bz_cmd->add_option("--matrix", bz_matrix, "CSV matrix (header L,C,R,Z)")->required();

    std::string sw_matrix, sw_k = "0,1,2,4,8";
    int sw_t = 3, sw_trials = 1000;
    std::uint64_t sw_seed = 7;
    auto* sw_cmd = df_cmd->add_subcommand("sweep", "Noise-vs-accuracy sweep (CSV)");
    sw_cmd->add_option("--matrix", sw_matrix, "CSV matrix (header L,C,R,Z)")->required();
    sw_cmd->add_option("--t", sw_t, "Correctable Hamming distance")->default_val(3);
    sw_cmd->add_option("--k", sw_k, "Comma-separated noise scale factors")
        ->default_val("0,1,2,4,8");
    sw_cmd->add_option("--trials", sw_trials, "Trials per noise scale")->default_val(1000);
    sw_cmd->add_option("--seed", sw_seed, "Base RNG seed")->default_val(7);

    // serve
    std::string sv_registry, sv_key;
    int sv_port = 8787, sv_redundancy = 0;
    double sv_delta = 8.0;
    std::size_t sv_max_bytes = 32u << 20;
    auto* sv_cmd = app.add_subcommand("serve", "Run the remote-validation HTTP service");
    sv_cmd->add_option("--port", sv_port, "Listen port")->default_val(8787);
    sv_cmd->add_option("--registry", sv_registry, "NDJSON device registry")->required();
    sv_cmd->add_option("--key", sv_key, "Pre-shared key file (or PROVMARK_KEY)");
    sv_cmd->add_option("--max-image-bytes", sv_max_bytes, "Image size cap")
        ->default_val(32u << 20);
    sv_cmd->add_option("--delta", sv_delta, "Quantization step used at stamping")
        ->default_val(8.0);
    sv_cmd->add_option("--redundancy", sv_redundancy,
                       "Repetition count used at stamping (default: derived)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (fp_cmd->parsed()) {
            auto features = provmark::features_from_json_file(fp_features);
            auto dfp = provmark::device_fingerprint(provmark::canonicalize_features(features));
            std::cout << dfp.hex << "\n";
            return 0;
        }

        if (st_cmd->parsed()) {
            auto img = provmark::read_png(st_image);
            auto features = provmark::features_from_json_file(st_features);
            auto key = load_key(st_key);
            auto plan = plan_for_image(img, st_delta, st_redundancy);
            if (!st_dir.empty())
                provmark::StampPolicy(st_dir).assert_shareable(st_out);
            auto stamped = provmark::acquire_and_stamp(img, features, key, plan);
            provmark::write_png(st_out, stamped);
            nlohmann::json out = {{"out", st_out},
                                  {"delta", plan.delta},
                                  {"redundancy", plan.redundancy}};
            std::cout << out.dump() << "\n";
            return 0;
        }

        if (vf_cmd->parsed()) {
            auto img = provmark::read_png(vf_image);
            auto key = load_key(vf_key);
            auto registry = provmark::Registry::open(vf_registry);
            auto plan = plan_for_image(img, vf_delta, vf_redundancy);
            auto report = provmark::verify_image(img, key, plan, registry, vf_tol_bytes,
                                                 vf_tol_corr);
            std::cout << report.to_json().dump() << "\n";
            switch (report.verdict) {
                case provmark::Verdict::Authentic: return 0;
                case provmark::Verdict::NoWatermark: return 3;
                case provmark::Verdict::UnknownDevice: return 4;
                case provmark::Verdict::Tampered: return 5;
            }
            return 1;
        }

        if (mt_cmd->parsed()) {
            auto ref = provmark::read_png(mt_ref);
            auto test = provmark::read_png(mt_test);
            auto report = provmark::quality_report(ref, test);
            if (mt_csv) {
                if (mt_csv_header) std::cout << report.csv_header() << "\n";
                std::cout << report.csv_row() << "\n";
            } else {
                std::cout << report.to_json().dump() << "\n";
            }
            return 0;
        }

        if (bz_cmd->parsed()) {
            auto matrix = provmark::LcrFeatureMatrix::from_csv_file(bz_matrix);
            auto sig = provmark::binarize(matrix);
            nlohmann::json out = {{"nibbles", sig.nibbles},
                                  {"n_testpoints", sig.n_testpoints}};
            std::cout << out.dump() << "\n";
            return 0;
        }

        if (sw_cmd->parsed()) {
            auto matrix = provmark::LcrFeatureMatrix::from_csv_file(sw_matrix);
            auto table = provmark::accuracy_sweep(matrix, sw_t, parse_k_list(sw_k),
                                                  sw_trials, sw_seed);
            std::cout << provmark::sweep_csv(table);
            return 0;
        }

        if (sv_cmd->parsed()) {
            auto key = load_key(sv_key);
            auto registry = provmark::Registry::open(sv_registry);
            provmark::ServiceConfig config;
            config.port = sv_port;
            config.delta = sv_delta;
            if (sv_redundancy > 0) config.redundancy = sv_redundancy;
            config.max_image_bytes = sv_max_bytes;
            provmark::ProvenanceService service(registry, key, config);
            std::cerr << "serving on port " << sv_port << " (registry " << sv_registry
                      << ", " << registry.size() << " devices)\n";
            if (!service.listen()) {
                std::cerr << "failed to bind port " << sv_port << "\n";
                return 1;
            }
            return 0;
        }
    } catch (const provmark::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
