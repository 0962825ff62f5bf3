#pragma once

#include <string>
#include <vector>

#include "pdpt/search.hpp"

namespace pdpt {

struct BenchmarkInstanceRef {
    std::string path;
    std::string tw;       // S/M/L label for the report
    std::string variant;  // free-form variant tag
};

struct BenchmarkConfig {
    std::vector<BenchmarkInstanceRef> instances;
    std::vector<SearchMethod> methods{SearchMethod::rlns, SearchMethod::ls, SearchMethod::multiop};
    SearchConfig base;             // restarts, patience, method-shared knobs
    std::uint64_t master_seed = 0;
};

BenchmarkConfig benchmark_config_from_json_string(const std::string& text);
BenchmarkConfig load_benchmark_config(const std::string& path);

struct BenchmarkRow {
    std::string instance;
    std::string tw;
    std::string variant;
    std::string method;
    double best_ub = 0.0;
    double avg_ub = 0.0;
    double avg_time_s = 0.0;
    int failed_restarts = 0;
};

struct BenchmarkReport {
    std::vector<BenchmarkRow> rows;
};

// One multi-restart run per (instance, method); per-pair seeds derive from
// the master seed, so cost columns reproduce exactly on re-runs.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

// CSV: instance,tw,variant,method,best_ub,avg_ub,avg_time_s
std::string benchmark_report_to_csv(const BenchmarkReport& report);
void write_benchmark_csv(const BenchmarkReport& report, const std::string& path);

}  // namespace pdpt
