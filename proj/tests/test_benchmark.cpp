#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdpt/benchmark.hpp"
#include "pdpt/oracle.hpp"
#include "test_helpers.hpp"

using namespace pdpt;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

BenchmarkConfig tiny_suite(const std::filesystem::path& dir) {
    BenchmarkConfig config;
    int variant = 0;
    for (std::uint64_t seed : {201ULL, 202ULL}) {
        const Instance inst = testing::tiny_instance(3, TwClass::M, seed);
        const std::string path = (dir / (std::to_string(seed) + ".json")).string();
        save_instance(inst, path);
        config.instances.push_back({path, "M", std::to_string(++variant)});
    }
    config.base.restarts = 3;
    config.base.patience = 15;
    config.master_seed = 9;
    return config;
}

}  // namespace

TEST_SUITE("benchmark") {
    TEST_CASE("three methods emit one row each with best <= avg") {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "pdpt_bench_test";
        fs::create_directories(dir);
        const BenchmarkConfig config = tiny_suite(dir);
        const BenchmarkReport report = run_benchmark(config);
        REQUIRE(report.rows.size() == config.instances.size() * 3);
        for (const auto& row : report.rows) {
            CHECK(row.best_ub <= row.avg_ub + 1e-9);
            CHECK(row.failed_restarts == 0);
        }
        const auto cells = parse_csv(benchmark_report_to_csv(report));
        REQUIRE(!cells.empty());
        CHECK(cells[0] == std::vector<std::string>{"instance", "tw", "variant", "method", "best_ub", "avg_ub",
                                                   "avg_time_s"});
        CHECK(cells.size() == report.rows.size() + 1);
    }

    TEST_CASE("cost columns are deterministic under a fixed master seed") {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "pdpt_bench_det";
        fs::create_directories(dir);
        const BenchmarkConfig config = tiny_suite(dir);
        const BenchmarkReport a = run_benchmark(config);
        const BenchmarkReport b = run_benchmark(config);
        REQUIRE(a.rows.size() == b.rows.size());
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            CHECK(a.rows[i].best_ub == b.rows[i].best_ub);
            CHECK(a.rows[i].avg_ub == b.rows[i].avg_ub);
            CHECK(a.rows[i].method == b.rows[i].method);
        }
    }

    TEST_CASE("per-instance gap against the oracle is computable from the report") {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "pdpt_bench_gap";
        fs::create_directories(dir);
        BenchmarkConfig config = tiny_suite(dir);
        config.methods = {SearchMethod::rlns};
        const BenchmarkReport report = run_benchmark(config);
        for (std::size_t i = 0; i < config.instances.size(); ++i) {
            const Instance inst = load_instance(config.instances[i].path);
            const auto best = exact_oracle_solve(inst);
            REQUIRE(best);
            const double gap = (report.rows[i].best_ub - best->objective) / report.rows[i].best_ub * 100.0;
            CHECK(gap >= -1e-6);
            CHECK(gap <= 2.0);
        }
    }

    TEST_CASE("suite configs load from json") {
        const std::string text = R"({
          "instances": [{"path": "a.json", "tw": "L", "variant": "1"}],
          "methods": ["rlns", "ls"],
          "restarts": 4,
          "patience": 25,
          "seed": 11
        })";
        const BenchmarkConfig config = benchmark_config_from_json_string(text);
        CHECK(config.instances.size() == 1);
        CHECK(config.instances[0].tw == "L");
        CHECK(config.methods.size() == 2);
        CHECK(config.base.restarts == 4);
        CHECK(config.base.patience == 25);
        CHECK(config.master_seed == 11);
    }

    TEST_CASE("a failing instance is reported, not fatal") {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "pdpt_bench_fail";
        fs::create_directories(dir);
        Instance inst = testing::line_instance();
        inst.locations[1].tw_close = 1.0;  // pickup unreachable: construction fails
        inst.rebuild_matrices();
        const std::string path = (dir / "broken.json").string();
        save_instance(inst, path);
        BenchmarkConfig config;
        config.instances.push_back({path, "L", "1"});
        config.methods = {SearchMethod::rlns};
        config.base.restarts = 2;
        const BenchmarkReport report = run_benchmark(config);
        REQUIRE(report.rows.size() == 1);
        CHECK(report.rows[0].failed_restarts == 2);
    }
}
