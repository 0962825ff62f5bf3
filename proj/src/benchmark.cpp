#include "pdpt/benchmark.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pdpt {

BenchmarkConfig benchmark_config_from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    BenchmarkConfig cfg;
    for (const auto& ij : j.at("instances")) {
        BenchmarkInstanceRef ref;
        ref.path = ij.at("path").get<std::string>();
        ref.tw = ij.value("tw", "");
        ref.variant = ij.value("variant", "");
        cfg.instances.push_back(ref);
    }
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& mj : j["methods"]) cfg.methods.push_back(search_method_from_string(mj.get<std::string>()));
    }
    cfg.base.restarts = j.value("restarts", cfg.base.restarts);
    cfg.base.patience = j.value("patience", cfg.base.patience);
    cfg.base.threads = j.value("threads", cfg.base.threads);
    cfg.master_seed = j.value("seed", 0ULL);
    return cfg;
}

BenchmarkConfig load_benchmark_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("benchmark: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return benchmark_config_from_json_string(buf.str());
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
    BenchmarkReport report;
    for (std::size_t i = 0; i < config.instances.size(); ++i) {
        const auto& ref = config.instances[i];
        const Instance inst = load_instance(ref.path);
        for (std::size_t m = 0; m < config.methods.size(); ++m) {
            SearchConfig cfg = config.base;
            cfg.method = config.methods[m];
            cfg.seed = config.master_seed * 0x100000ULL + i * 0x100ULL + m;
            BenchmarkRow row;
            row.instance = inst.meta.name.empty() ? ref.path : inst.meta.name;
            row.tw = ref.tw;
            row.variant = ref.variant;
            row.method = to_string(cfg.method);
            try {
                const SearchResult result = run_search(inst, cfg);
                row.failed_restarts = result.failed_restarts;
                row.best_ub = result.best_cost;
                double sum = 0.0, time_sum = 0.0;
                int ok = 0;
                for (std::size_t r = 0; r < result.restart_best_costs.size(); ++r) {
                    if (!std::isfinite(result.restart_best_costs[r])) continue;
                    sum += result.restart_best_costs[r];
                    time_sum += result.restart_times_s[r];
                    ++ok;
                }
                row.avg_ub = ok ? sum / ok : std::numeric_limits<double>::quiet_NaN();
                row.avg_time_s = ok ? time_sum / ok : 0.0;
            } catch (const std::runtime_error&) {
                // Construction failed on every restart: reported, not fatal.
                row.failed_restarts = cfg.restarts;
                row.best_ub = std::numeric_limits<double>::quiet_NaN();
                row.avg_ub = std::numeric_limits<double>::quiet_NaN();
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

std::string benchmark_report_to_csv(const BenchmarkReport& report) {
    std::ostringstream out;
    out.precision(10);
    out << "instance,tw,variant,method,best_ub,avg_ub,avg_time_s\n";
    for (const auto& row : report.rows)
        out << row.instance << ',' << row.tw << ',' << row.variant << ',' << row.method << ',' << row.best_ub << ','
            << row.avg_ub << ',' << row.avg_time_s << '\n';
    return out.str();
}

void write_benchmark_csv(const BenchmarkReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("benchmark: cannot write '" + path + "'");
    out << benchmark_report_to_csv(report);
}

}  // namespace pdpt
