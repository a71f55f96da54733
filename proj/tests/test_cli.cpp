#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdio>
#include <csignal>
#include <fcntl.h>
#include <thread>
#include <sys/wait.h>
#include <unistd.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "provmark/pipeline.hpp"
#include "provmark/png_io.hpp"
#include "support.hpp"

#ifndef PROVMARK_CLI_PATH
#error "PROVMARK_CLI_PATH must point at the built CLI binary"
#endif

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(PROVMARK_CLI_PATH) + " " + args + " 2>/dev/null";
    std::FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult result;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

const char* kFeaturesJson = R"({
    "basic": {"model": "Pixel 4", "os": "Android 12"},
    "hardware": {"ram": "8 GB", "cores": "8"}
})";

} // namespace

TEST_CASE("cli: device-fp is byte-stable") {
    testsupport::TempDir tmp("cli_fp");
    testsupport::write_text(tmp.file("f.json"), kFeaturesJson);
    auto r1 = run_cli("device-fp --features " + tmp.file("f.json"));
    auto r2 = run_cli("device-fp --features " + tmp.file("f.json"));
    CHECK(r1.exit_code == 0);
    CHECK(r1.out == r2.out);
    CHECK(r1.out.size() == 129); // 128 hex + newline
}

TEST_CASE("cli: usage errors exit 2, runtime errors exit 1") {
    CHECK(run_cli("no-such-command").exit_code == 2);
    CHECK(run_cli("device-fp").exit_code == 2); // missing required flag
    CHECK(run_cli("device-fp --features /nonexistent.json").exit_code == 1);
}

TEST_CASE("cli: stamp -> verify pipeline with exit-code contract") {
    testsupport::TempDir tmp("cli_pipe");
    testsupport::write_text(tmp.file("f.json"), kFeaturesJson);
    std::string keyfile = tmp.file("key.bin");
    testsupport::write_text(keyfile, std::string(32, '\x42'));

    auto img = testsupport::structured_rgb(640, 480, 515);
    provmark::write_png(tmp.file("in.png"), img);

    // Register the device through the library against the same registry file.
    std::string regfile = tmp.file("reg.ndjson");
    {
        auto reg = provmark::Registry::open(regfile);
        auto features = provmark::features_from_json(nlohmann::json::parse(kFeaturesJson));
        reg.register_device("cam-cli",
                            provmark::device_fingerprint(
                                provmark::canonicalize_features(features)));
    }

    auto stamp = run_cli("stamp --image " + tmp.file("in.png") + " --features " +
                         tmp.file("f.json") + " --key " + keyfile + " --out " +
                         tmp.file("out.png"));
    REQUIRE(stamp.exit_code == 0);
    auto stamp_json = nlohmann::json::parse(stamp.out);
    CHECK(stamp_json["redundancy"] == 31);

    auto verify = run_cli("verify --image " + tmp.file("out.png") + " --key " + keyfile +
                          " --registry " + regfile);
    CHECK(verify.exit_code == 0);
    CHECK(nlohmann::json::parse(verify.out)["verdict"] == "Authentic");

    auto clean = run_cli("verify --image " + tmp.file("in.png") + " --key " + keyfile +
                         " --registry " + regfile);
    CHECK(clean.exit_code == 3);
    CHECK(nlohmann::json::parse(clean.out)["verdict"] == "NoWatermark");
}

TEST_CASE("cli: PROVMARK_KEY env fallback") {
    testsupport::TempDir tmp("cli_env");
    testsupport::write_text(tmp.file("f.json"), kFeaturesJson);
    std::string keyfile = tmp.file("key.bin");
    testsupport::write_text(keyfile, std::string(24, '\x37'));
    provmark::write_png(tmp.file("in.png"), testsupport::structured_rgb(320, 240, 1));

    std::string cmd = "PROVMARK_KEY=" + keyfile + " " + PROVMARK_CLI_PATH +
                      " stamp --image " + tmp.file("in.png") + " --features " +
                      tmp.file("f.json") + " --out " + tmp.file("out.png") +
                      " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(std::filesystem::exists(tmp.file("out.png")));
}

TEST_CASE("cli: stamped-dir policy refuses outside writes") {
    testsupport::TempDir tmp("cli_dir");
    testsupport::write_text(tmp.file("f.json"), kFeaturesJson);
    std::string keyfile = tmp.file("key.bin");
    testsupport::write_text(keyfile, std::string(16, '\x10'));
    provmark::write_png(tmp.file("in.png"), testsupport::structured_rgb(320, 240, 2));
    std::filesystem::create_directories(tmp.file("vault"));

    auto inside = run_cli("stamp --image " + tmp.file("in.png") + " --features " +
                          tmp.file("f.json") + " --key " + keyfile + " --stamped-dir " +
                          tmp.file("vault") + " --out " + tmp.file("vault/a.png"));
    CHECK(inside.exit_code == 0);
    CHECK(std::filesystem::exists(tmp.file("vault/a.png")));

    auto outside = run_cli("stamp --image " + tmp.file("in.png") + " --features " +
                           tmp.file("f.json") + " --key " + keyfile + " --stamped-dir " +
                           tmp.file("vault") + " --out " + tmp.file("escape.png"));
    CHECK(outside.exit_code == 1);
    CHECK_FALSE(std::filesystem::exists(tmp.file("escape.png")));
}

TEST_CASE("cli: metrics emits JSON and CSV") {
    testsupport::TempDir tmp("cli_metrics");
    auto ref = testsupport::structured_rgb(200, 200, 3);
    auto test = ref;
    for (auto& s : test.samples) s = static_cast<std::uint8_t>(std::min(255, s + 3));
    provmark::write_png(tmp.file("ref.png"), ref);
    provmark::write_png(tmp.file("test.png"), test);

    auto j = run_cli("metrics --ref " + tmp.file("ref.png") + " --test " + tmp.file("test.png"));
    REQUIRE(j.exit_code == 0);
    auto report = nlohmann::json::parse(j.out);
    CHECK(report["mse"] == Catch::Approx(9.0));
    CHECK(report.contains("msssim"));

    auto c = run_cli("metrics --csv --csv-header --ref " + tmp.file("ref.png") +
                     " --test " + tmp.file("test.png"));
    REQUIRE(c.exit_code == 0);
    CHECK(c.out.rfind("mse,", 0) == 0);
    CHECK(std::count(c.out.begin(), c.out.end(), '\n') == 2);
}

TEST_CASE("cli: serve answers health checks and verification") {
    testsupport::TempDir tmp("cli_serve");
    std::string keyfile = tmp.file("key.bin");
    testsupport::write_text(keyfile, std::string(32, '\x5a'));
    std::string regfile = tmp.file("reg.ndjson");
    int port = 18000 + getpid() % 2000;

    pid_t child = fork();
    REQUIRE(child >= 0);
    if (child == 0) {
        int devnull = open("/dev/null", O_WRONLY);
        dup2(devnull, 1);
        dup2(devnull, 2);
        execl(PROVMARK_CLI_PATH, "provmark", "serve", "--port",
              std::to_string(port).c_str(), "--registry", regfile.c_str(), "--key",
              keyfile.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    httplib::Client cli("127.0.0.1", port);
    cli.set_connection_timeout(1);
    bool up = false;
    for (int i = 0; i < 50 && !up; ++i) {
        auto res = cli.Get("/healthz");
        if (res && res->status == 200) up = true;
        else std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    REQUIRE(up);

    nlohmann::json body = {{"device_id", "cam-serve"},
                           {"features", nlohmann::json::parse(kFeaturesJson)}};
    auto res = cli.Post("/devices", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 201);

    kill(child, SIGTERM);
    int status = 0;
    waitpid(child, &status, 0);

    // The registration made it into the durable store.
    auto reg = provmark::Registry::open(regfile);
    CHECK(reg.size() == 1);
}

TEST_CASE("cli: devfing binarize and sweep") {
    testsupport::TempDir tmp("cli_devfing");
    testsupport::write_text(tmp.file("m.csv"), testsupport::reference_board_csv());

    auto b = run_cli("devfing binarize --matrix " + tmp.file("m.csv"));
    REQUIRE(b.exit_code == 0);
    auto parsed = nlohmann::json::parse(b.out);
    CHECK(parsed["nibbles"] == "a57755");
    CHECK(parsed["n_testpoints"] == 6);

    auto s = run_cli("devfing sweep --matrix " + tmp.file("m.csv") +
                     " --t 3 --k 0,1,2 --trials 50 --seed 7");
    REQUIRE(s.exit_code == 0);
    CHECK(s.out.rfind("k,trials,accepts,accuracy\n", 0) == 0);
    CHECK(std::count(s.out.begin(), s.out.end(), '\n') == 4);
    auto s2 = run_cli("devfing sweep --matrix " + tmp.file("m.csv") +
                      " --t 3 --k 0,1,2 --trials 50 --seed 7");
    CHECK(s.out == s2.out); // seed-stable
}
