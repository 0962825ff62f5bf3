#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pdpt/benchmark.hpp"
#include "pdpt/generator.hpp"
#include "pdpt/lbbd.hpp"
#include "pdpt/oracle.hpp"
#include "pdpt/search.hpp"

namespace py = pybind11;
using namespace pdpt;

namespace {

SearchConfig config_from_kwargs(const std::string& method, std::uint64_t seed, int restarts, int patience,
                                int threads) {
    SearchConfig cfg;
    cfg.method = search_method_from_string(method);
    cfg.seed = seed;
    if (restarts > 0) cfg.restarts = restarts;
    if (patience > 0) cfg.patience = patience;
    cfg.threads = threads;
    return cfg;
}

py::dict bnc_to_dict(const BnCResult& result) {
    py::dict d;
    d["status"] = to_string(result.status);
    d["lb"] = result.lower_bound;
    d["ub"] = result.upper_bound;
    d["gap"] = result.gap_percent;
    d["time_s"] = result.time_s;
    d["iters"] = result.iterations;
    d["cuts_opt"] = result.optimality_cuts;
    d["cuts_feas"] = result.feasibility_cuts;
    return d;
}

}  // namespace

PYBIND11_MODULE(_pdpt, m) {
    m.doc() = "Pickup-and-delivery with transfers: generator, LNS metaheuristics and branch-and-check";

    py::class_<Instance>(m, "Instance")
        .def_property_readonly("name", [](const Instance& inst) { return inst.meta.name; })
        .def_property_readonly("num_requests", [](const Instance& inst) { return inst.num_requests(); })
        .def_property_readonly("num_vehicles", [](const Instance& inst) { return inst.num_vehicles(); })
        .def_property_readonly("num_transfers", [](const Instance& inst) { return inst.transfer_ids.size(); })
        .def("to_json", [](const Instance& inst) { return instance_to_json_string(inst); })
        .def_static("from_json", &instance_from_json_string, py::arg("text"))
        .def("save", &save_instance, py::arg("path"))
        .def_static("load", &load_instance, py::arg("path"))
        .def("validate", [](const Instance& inst) {
            std::vector<std::string> out;
            for (const auto& v : validate_instance(inst)) out.push_back("[" + v.code + "] " + v.message);
            return out;
        });

    py::class_<Solution>(m, "Solution")
        .def_property_readonly("objective", [](const Solution& sol) { return sol.objective; })
        .def("to_json", [](const Solution& sol) { return solution_to_json_string(sol); })
        .def_static("from_json", &solution_from_json_string, py::arg("text"), py::arg("instance"))
        .def("save", &save_solution, py::arg("path"))
        .def_static("load", &load_solution, py::arg("path"), py::arg("instance"))
        .def("validate", [](const Solution& sol, const Instance& inst) {
            std::vector<std::string> out;
            for (const auto& v : validate_solution(inst, sol)) out.push_back("[" + v.property + "] " + v.message);
            return out;
        }, py::arg("instance"));

    m.def(
        "generate",
        [](int requests, const std::string& tw, std::uint64_t seed, int transfers, int fleet,
           const std::string& node_file, double radius_km) {
            GeneratorParams params;
            params.num_requests = requests;
            params.tw = tw_class_from_string(tw);
            params.transfers = transfers;
            params.fleet_override = fleet;
            params.node_file = node_file;
            params.radius_km = radius_km;
            return generate_instance(params, seed);
        },
        py::arg("requests"), py::arg("tw") = "L", py::arg("seed") = 0, py::arg("transfers") = -1,
        py::arg("fleet") = 0, py::arg("node_file") = "", py::arg("radius_km") = 5.0);

    m.def("evaluate", &evaluate, py::arg("instance"), py::arg("solution"));

    m.def(
        "search",
        [](const Instance& inst, const std::string& method, std::uint64_t seed, int restarts, int patience,
           int threads) {
            const SearchResult result = run_search(inst, config_from_kwargs(method, seed, restarts, patience, threads));
            py::dict stats;
            stats["best_cost"] = result.best_cost;
            stats["best_restart"] = result.best_restart;
            stats["failed_restarts"] = result.failed_restarts;
            stats["wall_time_s"] = result.wall_time_s;
            stats["restart_best_costs"] = result.restart_best_costs;
            return py::make_tuple(result.best, stats);
        },
        py::arg("instance"), py::arg("method") = "rlns", py::arg("seed") = 0, py::arg("restarts") = 0,
        py::arg("patience") = 0, py::arg("threads") = 0);

    m.def("oracle", [](const Instance& inst) -> py::object {
        const auto best = exact_oracle_solve(inst);
        if (!best) return py::none();
        return py::cast(*best);
    }, py::arg("instance"));

    m.def(
        "branch_and_check",
        [](const Instance& inst, const Solution* warm, double time_limit_s, bool iterative) {
            BuiltinBackend backend;
            BnCLimits limits;
            if (time_limit_s > 0.0) limits.time_limit_s = time_limit_s;
            const BnCResult result = branch_and_check(inst, backend, warm, limits, iterative);
            py::dict d = bnc_to_dict(result);
            d["solution"] = result.best ? py::cast(*result.best) : py::object(py::none());
            return d;
        },
        py::arg("instance"), py::arg("warm_start") = nullptr, py::arg("time_limit_s") = 0.0,
        py::arg("iterative") = false);

    m.def(
        "export_master",
        [](const Instance& inst, const std::string& format, const std::string& path) {
            const MasterModel master = build_master(inst);
            export_model(master.model(), format == "mps" ? ModelFormat::mps : ModelFormat::lp, path);
        },
        py::arg("instance"), py::arg("format"), py::arg("path"));

    m.def(
        "gap_metrics",
        [](double lb, double ub_lns, double ub_lbbd) {
            const GapMetrics g = gap_metrics(lb, ub_lns, ub_lbbd);
            py::dict d;
            d["gap"] = g.gap;
            d["err"] = g.err;
            d["gap_lns"] = g.gap_lns;
            d["imp"] = g.imp;
            return d;
        },
        py::arg("lb"), py::arg("ub_lns"), py::arg("ub_lbbd"));
}
