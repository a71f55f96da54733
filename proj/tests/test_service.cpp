#include <catch2/catch_amalgamated.hpp>

#include <thread>

#include <httplib.h>

#include "provmark/png_io.hpp"
#include "provmark/service.hpp"
#include "support.hpp"

using namespace provmark;

namespace {

struct RunningService {
    Registry registry;
    std::unique_ptr<ProvenanceService> service;
    std::thread thread;
    int port = 0;

    explicit RunningService(ServiceConfig config = {}) {
        std::vector<std::uint8_t> raw(32, 0x5a);
        config.host = "127.0.0.1";
        config.port = 0; // pick below
        service = std::make_unique<ProvenanceService>(registry, PreSharedKey(raw), config);
        port = service->server().bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { service->server().listen_after_bind(); });
        service->server().wait_until_ready();
    }

    ~RunningService() {
        service->stop();
        thread.join();
    }

    httplib::Client client() { return httplib::Client("127.0.0.1", port); }
};

nlohmann::json features_doc() {
    return nlohmann::json::parse(R"({
        "basic": {"model": "Pixel 4", "os": "Android 12"},
        "hardware": {"ram": "8 GB"}
    })");
}

std::string png_body(const RasterImage& img) {
    auto bytes = encode_png(img);
    return std::string(bytes.begin(), bytes.end());
}

} // namespace

TEST_CASE("healthz responds ok") {
    RunningService rs;
    auto res = rs.client().Get("/healthz");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == "ok");
}

TEST_CASE("device registration endpoint") {
    RunningService rs;
    auto cli = rs.client();

    nlohmann::json body = {{"device_id", "cam-01"}, {"features", features_doc()}};
    auto res = cli.Post("/devices", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 201);
    auto parsed = nlohmann::json::parse(res->body);
    CHECK(parsed["device_id"] == "cam-01");
    CHECK(parsed["fingerprint"].get<std::string>().size() == 128);

    // Duplicate -> 409.
    res = cli.Post("/devices", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 409);

    // Malformed -> 400.
    res = cli.Post("/devices", "{\"nope\":1}", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    res = cli.Post("/devices", "not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);

    // Listing.
    res = cli.Get("/devices");
    REQUIRE(res);
    CHECK(res->status == 200);
    auto list = nlohmann::json::parse(res->body);
    REQUIRE(list.is_array());
    REQUIRE(list.size() == 1);
    CHECK(list[0]["device_id"] == "cam-01");
    CHECK(list[0].contains("enrolled_at"));
}

TEST_CASE("verify endpoint end to end") {
    RunningService rs;
    auto cli = rs.client();

    nlohmann::json reg_body = {{"device_id", "cam-01"}, {"features", features_doc()}};
    auto res = cli.Post("/devices", reg_body.dump(), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 201);

    auto features = features_from_json(features_doc());
    std::vector<std::uint8_t> raw(32, 0x5a);
    PreSharedKey key(raw);
    auto img = testsupport::structured_rgb(640, 480, 2026);
    auto plan = SubbandPlan::for_image(img.width, img.height);
    auto stamped = acquire_and_stamp(img, features, key, plan);

    SECTION("multipart upload of a stamped image verifies Authentic") {
        httplib::MultipartFormDataItems items = {
            {"image", png_body(stamped), "stamped.png", "image/png"}};
        auto vres = cli.Post("/verify", items);
        REQUIRE(vres);
        CHECK(vres->status == 200);
        auto report = nlohmann::json::parse(vres->body);
        CHECK(report["verdict"] == "Authentic");
        CHECK(report["device_id"] == "cam-01");
    }

    SECTION("clean image is NoWatermark with status 200") {
        httplib::MultipartFormDataItems items = {
            {"image", png_body(img), "plain.png", "image/png"}};
        auto vres = cli.Post("/verify", items);
        REQUIRE(vres);
        CHECK(vres->status == 200);
        CHECK(nlohmann::json::parse(vres->body)["verdict"] == "NoWatermark");
    }

    SECTION("base64 JSON body works too") {
        auto png = encode_png(stamped);
        static const char* tbl =
            "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
        std::string b64;
        for (std::size_t i = 0; i < png.size(); i += 3) {
            int n = png[i] << 16;
            int have = 1;
            if (i + 1 < png.size()) { n |= png[i + 1] << 8; ++have; }
            if (i + 2 < png.size()) { n |= png[i + 2]; ++have; }
            b64.push_back(tbl[(n >> 18) & 63]);
            b64.push_back(tbl[(n >> 12) & 63]);
            b64.push_back(have > 1 ? tbl[(n >> 6) & 63] : '=');
            b64.push_back(have > 2 ? tbl[n & 63] : '=');
        }
        nlohmann::json body = {{"image_base64", b64}};
        auto vres = cli.Post("/verify", body.dump(), "application/json");
        REQUIRE(vres);
        CHECK(vres->status == 200);
        CHECK(nlohmann::json::parse(vres->body)["verdict"] == "Authentic");
    }

    SECTION("malformed verify bodies are 400") {
        auto vres = cli.Post("/verify", "{}", "application/json");
        REQUIRE(vres);
        CHECK(vres->status == 400);
        vres = cli.Post("/verify", "{\"image_base64\": \"@@@@\"}", "application/json");
        REQUIRE(vres);
        CHECK(vres->status == 400);
        nlohmann::json body = {{"image_base64", "aGVsbG8="}}; // not a PNG
        vres = cli.Post("/verify", body.dump(), "application/json");
        REQUIRE(vres);
        CHECK(vres->status == 400);
    }
}

TEST_CASE("oversized uploads are rejected with 413") {
    ServiceConfig config;
    config.max_image_bytes = 10'000;
    RunningService rs(config);
    auto cli = rs.client();
    auto img = testsupport::random_rgb(640, 480, 5); // PNG » 10 kB
    httplib::MultipartFormDataItems items = {
        {"image", png_body(img), "big.png", "image/png"}};
    auto res = cli.Post("/verify", items);
    REQUIRE(res);
    CHECK(res->status == 413);
}

TEST_CASE("base64 decoder handles padding and rejects junk") {
    using provmark::detail::base64_decode;
    auto d = base64_decode("aGVsbG8=");
    REQUIRE(d);
    CHECK(std::string(d->begin(), d->end()) == "hello");
    d = base64_decode("aGVsbG8h");
    REQUIRE(d);
    CHECK(std::string(d->begin(), d->end()) == "hello!");
    CHECK_FALSE(base64_decode("@@!!").has_value());
}
