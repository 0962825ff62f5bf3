#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pdpt/benchmark.hpp"
#include "pdpt/generator.hpp"
#include "pdpt/lbbd.hpp"
#include "pdpt/oracle.hpp"
#include "pdpt/search.hpp"

namespace {

using namespace pdpt;

int cmd_gen(const std::string& out_path, int requests, const std::string& tw, std::uint64_t seed, int transfers,
            int fleet, const std::string& node_file, double radius_km) {
    GeneratorParams params;
    params.num_requests = requests;
    params.tw = tw_class_from_string(tw);
    params.transfers = transfers;
    params.fleet_override = fleet;
    params.node_file = node_file;
    params.radius_km = radius_km;
    const Instance inst = generate_instance(params, seed);
    save_instance(inst, out_path);
    std::cout << "wrote " << out_path << " (|R|=" << inst.num_requests() << ", |K|=" << inst.num_vehicles()
              << ", |T|=" << inst.transfer_ids.size() << ")\n";
    return 0;
}

int cmd_validate(const std::string& instance_path, const std::string& solution_path) {
    const Instance inst = load_instance(instance_path);
    if (solution_path.empty()) {
        std::cout << "instance ok: " << instance_path << "\n";
        return 0;
    }
    const Solution sol = load_solution(solution_path, inst);
    const auto report = validate_solution(inst, sol);
    if (report.empty()) {
        std::cout << "solution ok: objective " << evaluate(inst, sol) << "\n";
        return 0;
    }
    for (const auto& v : report) std::cerr << "[" << v.property << "] " << v.message << "\n";
    return 1;
}

int cmd_solve(const std::string& instance_path, const std::string& method, const std::string& out_path,
              const std::string& trace_path, const std::string& result_path, const std::string& config_path,
              std::uint64_t seed, int restarts, int patience, double time_limit, const std::string& warm_path,
              const std::string& backend_spec, bool iterative) {
    const Instance inst = load_instance(instance_path);

    if (method == "oracle") {
        const auto best = exact_oracle_solve(inst);
        if (!best) {
            std::cerr << "oracle: no feasible solution\n";
            return 1;
        }
        if (!out_path.empty()) save_solution(*best, out_path);
        std::cout << "oracle optimum " << best->objective << "\n";
        return 0;
    }

    if (method == "lbbd") {
        auto backend = make_backend(backend_spec);
        BnCLimits limits;
        if (time_limit > 0.0) limits.time_limit_s = time_limit;
        std::optional<Solution> warm;
        if (!warm_path.empty()) warm = load_solution(warm_path, inst);
        const BnCResult result = branch_and_check(inst, *backend, warm ? &*warm : nullptr, limits, iterative);
        if (!result_path.empty()) {
            std::ofstream out(result_path, std::ios::trunc);
            out << bnc_result_to_json_string(result);
        }
        std::cout << bnc_result_to_json_string(result);
        if (result.status == SolveStatus::infeasible) {
            std::cerr << "no feasible PDPT solution\n";
            return 1;
        }
        if (!result.best) return 1;
        if (!out_path.empty()) save_solution(*result.best, out_path);
        return 0;
    }

    SearchConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot open config '" + config_path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        cfg = search_config_from_json_string(buf.str());
    }
    cfg.method = search_method_from_string(method);
    if (seed) cfg.seed = seed;
    if (restarts > 0) cfg.restarts = restarts;
    if (patience > 0) cfg.patience = patience;
    const SearchResult result = run_search(inst, cfg);
    if (!out_path.empty()) save_solution(result.best, out_path);
    if (!trace_path.empty()) write_trace_csv(result.trace, trace_path);
    std::cout << "best " << result.best_cost << " (restart " << result.best_restart << ", "
              << result.failed_restarts << " failed restarts, " << result.wall_time_s << " s)\n";
    return 0;
}

int cmd_bench(const std::string& suite_path, const std::string& out_path) {
    const BenchmarkConfig config = load_benchmark_config(suite_path);
    const BenchmarkReport report = run_benchmark(config);
    if (!out_path.empty()) write_benchmark_csv(report, out_path);
    std::cout << benchmark_report_to_csv(report);
    return 0;
}

int cmd_export(const std::string& instance_path, const std::string& format, const std::string& out_path) {
    const Instance inst = load_instance(instance_path);
    const MasterModel master = build_master(inst);
    export_model(master.model(), format == "mps" ? ModelFormat::mps : ModelFormat::lp, out_path);
    std::cout << "wrote " << out_path << " (" << master.model().vars().size() << " vars, "
              << master.model().rows().size() << " rows)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::cout.precision(10);
    CLI::App app{"PDPT solver toolbox: generator, metaheuristics, branch-and-check"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a benchmark instance");
    int requests = 25, transfers = -1, fleet = 0;
    std::string tw = "L", gen_out = "instance.json", node_file;
    std::uint64_t gen_seed = 0;
    double radius_km = 5.0;
    gen->add_option("--requests", requests, "Number of requests");
    gen->add_option("--tw", tw, "Time-window class: S, M or L");
    gen->add_option("--seed", gen_seed, "Random seed");
    gen->add_option("--transfers", transfers, "Transfer points (-1: by scale)");
    gen->add_option("--fleet", fleet, "Fixed fleet size (0: binary search)");
    gen->add_option("--node-file", node_file, "CSV id,lat,lon coordinate pool");
    gen->add_option("--radius", radius_km, "Synthetic disc radius in km");
    gen->add_option("-o,--output", gen_out, "Output instance file");

    // solve
    auto* solve = app.add_subcommand("solve", "Solve an instance");
    std::string solve_instance, method = "rlns", solve_out, trace_path, result_path, config_path, warm_path;
    std::string backend_spec = "builtin";
    std::uint64_t solve_seed = 0;
    int restarts = 0, patience = 0;
    double time_limit = 0.0;
    bool iterative = false;
    solve->add_option("instance", solve_instance, "Instance file")->required();
    solve->add_option("--method", method, "rlns | ls | multiop | lbbd | oracle");
    solve->add_option("--seed", solve_seed, "Random seed");
    solve->add_option("--restarts", restarts, "Restart count (K)");
    solve->add_option("--patience", patience, "Non-improving iterations before stop (p)");
    solve->add_option("--time-limit", time_limit, "Time limit in seconds (lbbd)");
    solve->add_option("--warm-start", warm_path, "Warm-start solution file (lbbd)");
    solve->add_option("--backend", backend_spec, "builtin | external-file:<dir>");
    solve->add_flag("--iterative", iterative, "Force the iterative Benders loop");
    solve->add_option("--config", config_path, "Search config JSON");
    solve->add_option("-o,--output", solve_out, "Solution output file");
    solve->add_option("--trace", trace_path, "Iteration trace CSV");
    solve->add_option("--result", result_path, "Run summary JSON (lbbd)");

    // validate
    auto* validate = app.add_subcommand("validate", "Validate an instance (and optionally a solution)");
    std::string val_instance, val_solution;
    validate->add_option("instance", val_instance, "Instance file")->required();
    validate->add_option("solution", val_solution, "Solution file");

    // bench
    auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
    std::string suite_path, bench_out;
    bench->add_option("suite", suite_path, "Suite config JSON")->required();
    bench->add_option("-o,--output", bench_out, "Report CSV");

    // export-model
    auto* exp = app.add_subcommand("export-model", "Export the master model");
    std::string exp_instance, exp_format = "lp", exp_out = "master.lp";
    exp->add_option("instance", exp_instance, "Instance file")->required();
    exp->add_option("--format", exp_format, "lp | mps");
    exp->add_option("-o,--output", exp_out, "Output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2, --help exits 0
    }

    try {
        if (gen->parsed()) return cmd_gen(gen_out, requests, tw, gen_seed, transfers, fleet, node_file, radius_km);
        if (solve->parsed())
            return cmd_solve(solve_instance, method, solve_out, trace_path, result_path, config_path, solve_seed,
                             restarts, patience, time_limit, warm_path, backend_spec, iterative);
        if (validate->parsed()) return cmd_validate(val_instance, val_solution);
        if (bench->parsed()) return cmd_bench(suite_path, bench_out);
        if (exp->parsed()) return cmd_export(exp_instance, exp_format, exp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
