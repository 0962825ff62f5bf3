#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_helpers.hpp"

using namespace pdpt;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const char* kMinimalInstance = R"({
  "meta": {"name": "minimal", "metric": "euclidean", "speed_kmh": 20.0, "horizon": 480.0, "seed": 0},
  "locations": [
    {"id": 0, "kind": "depot-origin", "x": 0.0, "y": 0.0, "tw": [0, 480], "service": 0.0},
    {"id": 1, "kind": "pickup", "x": 10.0, "y": 0.0, "tw": [0, 480], "service": 0.0},
    {"id": 2, "kind": "delivery", "x": 20.0, "y": 0.0, "tw": [0, 480], "service": 0.0},
    {"id": 3, "kind": "depot-destination", "x": 30.0, "y": 0.0, "tw": [0, 480], "service": 0.0}
  ],
  "requests": [{"id": 0, "pickup": 1, "delivery": 2, "qty": 10.0}],
  "vehicles": [{"id": 0, "origin": 0, "destination": 3, "capacity": 75.0}],
  "transfers": []
})";

}  // namespace

TEST_SUITE("instance") {
    TEST_CASE("smallest legal instance parses") {
        const Instance inst = instance_from_json_string(kMinimalInstance);
        CHECK(inst.num_locations() == 4);
        CHECK(inst.num_requests() == 1);
        CHECK(inst.num_vehicles() == 1);
        CHECK(inst.transfer_ids.empty());
        CHECK(validate_instance(inst).empty());
        CHECK(inst.time(1, 2) == doctest::Approx(3.0));
    }

    TEST_CASE("demand above capacity is rejected with a named breach") {
        std::string text = kMinimalInstance;
        const auto pos = text.find("\"qty\": 10.0");
        text.replace(pos, std::string("\"qty\": 10.0").size(), "\"qty\": 100.0");
        CHECK_THROWS_WITH_AS(instance_from_json_string(text),
                             doctest::Contains("demand exceeds capacity"), std::runtime_error);
    }

    TEST_CASE("schema violations name the missing field") {
        CHECK_THROWS_WITH_AS(instance_from_json_string("{}"), doctest::Contains("meta"), std::runtime_error);
        std::string text = kMinimalInstance;
        const auto pos = text.find("\"speed_kmh\": 20.0,");
        text.erase(pos, std::string("\"speed_kmh\": 20.0,").size());
        CHECK_THROWS_WITH_AS(instance_from_json_string(text), doctest::Contains("speed_kmh"), std::runtime_error);
    }

    TEST_CASE("validate flags inverted windows and matrix mismatches") {
        Instance inst = instance_from_json_string(kMinimalInstance);
        inst.locations[1].tw_open = 100.0;
        inst.locations[1].tw_close = 50.0;
        auto report = validate_instance(inst);
        REQUIRE(report.size() == 1);
        CHECK(report[0].code == "time-window");
        CHECK(report[0].message.find("location 1") != std::string::npos);

        Instance bad = instance_from_json_string(kMinimalInstance);
        bad.travel = DenseMatrix(3);
        report = validate_instance(bad);
        REQUIRE(report.size() == 1);
        CHECK(report[0].message == "matrix dimension mismatch");
    }

    TEST_CASE("a demand location cannot serve two requests") {
        Instance inst = instance_from_json_string(kMinimalInstance);
        inst.requests.push_back({1, 1, 2, 5.0});  // reuses request 0's endpoints
        const auto report = validate_instance(inst);
        REQUIRE(!report.empty());
        CHECK(report.front().message.find("more than one request endpoint") != std::string::npos);
    }

    TEST_CASE("round trip through save and load, byte-stable") {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "pdpt_instance_test";
        fs::create_directories(dir);
        for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            const Instance inst = testing::tiny_instance(3, TwClass::M, seed);
            const std::string p1 = (dir / ("a" + std::to_string(seed) + ".json")).string();
            const std::string p2 = (dir / ("b" + std::to_string(seed) + ".json")).string();
            save_instance(inst, p1);
            save_instance(inst, p2);
            CHECK(read_file(p1) == read_file(p2));
            const Instance back = load_instance(p1);
            CHECK(back == inst);
        }
    }

    TEST_CASE("larger generated instances round trip") {
        const Instance inst = generate_instance(GeneratorParams{}, 42);  // 25 requests
        REQUIRE(inst.num_requests() == 25);
        const Instance back = instance_from_json_string(instance_to_json_string(inst));
        CHECK(back == inst);
    }

    TEST_CASE("duplicate transfer copies survive the round trip in order") {
        Instance inst = testing::build_instance(
            {
                {LocationKind::depot_origin, 0.0, 0.0},
                {LocationKind::depot_destination, 10.0, 0.0},
                {LocationKind::pickup, 2.0, 0.0},
                {LocationKind::delivery, 8.0, 0.0},
                {LocationKind::transfer, 5.0, 0.0},
                {LocationKind::transfer, 5.0, 0.0},  // duplicate copy, same coordinates
            },
            {{0, 2, 3, 5.0}}, {{0, 0, 1, 75.0}}, {4, 5});
        CHECK(validate_instance(inst).empty());
        const Instance back = instance_from_json_string(instance_to_json_string(inst));
        CHECK(back.transfer_ids == std::vector<int>{4, 5});
        CHECK(back == inst);
    }

    TEST_CASE("explicit matrices are preserved and checked") {
        Instance inst = instance_from_json_string(kMinimalInstance);
        inst.matrices_explicit = true;
        const Instance back = instance_from_json_string(instance_to_json_string(inst));
        CHECK(back.matrices_explicit);
        CHECK(back.travel == inst.travel);

        // Unit-inconsistent explicit matrices must fail validation.
        Instance bad = inst;
        bad.travel(0, 1) += 1.0;
        const auto report = validate_instance(bad);
        REQUIRE(!report.empty());
        CHECK(report[0].message.find("t*speed != c") != std::string::npos);
    }
}
