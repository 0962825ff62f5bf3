#include "pdpt/lbbd.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pdpt {

BendersCut make_optimality_cut(const std::vector<std::pair<int, int>>& edges, double zeta) {
    if (edges.empty()) throw std::invalid_argument("optimality cut over an empty edge set");
    return {BendersCut::Kind::optimality, edges, zeta};
}

BendersCut make_feasibility_cut(const std::vector<std::pair<int, int>>& edges) {
    if (edges.empty()) throw std::invalid_argument("feasibility cut over an empty edge set");
    return {BendersCut::Kind::feasibility, edges, 0.0};
}

MilpRow cut_row(const MasterModel& master, const BendersCut& cut, int serial) {
    MilpRow row;
    const double m = static_cast<double>(cut.edges.size());
    if (cut.kind == BendersCut::Kind::optimality) {
        // z - zeta * sum x >= zeta (1 - |E|)
        row.name = "opt_cut_" + std::to_string(serial);
        row.sense = RowSense::ge;
        row.rhs = cut.bound * (1.0 - m);
        row.terms.push_back({master.z(), 1.0});
        for (const auto& [i, j] : cut.edges) row.terms.push_back({master.x(i, j), -cut.bound});
    } else {
        row.name = "feas_cut_" + std::to_string(serial);
        row.sense = RowSense::le;
        row.rhs = m - 1.0;
        for (const auto& [i, j] : cut.edges) row.terms.push_back({master.x(i, j), 1.0});
    }
    return row;
}

namespace {

std::string paths_key(const MasterPaths& paths) {
    std::ostringstream oss;
    for (const auto& [i, j] : paths.edges) oss << i << ',' << j << ';';
    oss << '|';
    for (const auto& tau : paths.tau) {
        for (const auto& t : tau) oss << t.before << ',' << t.transfer << ',' << t.after << ';';
        oss << '/';
    }
    return oss.str();
}

}  // namespace

BnCResult branch_and_check(const Instance& inst, MilpBackend& backend, const Solution* warm_start,
                           const BnCLimits& limits, bool force_iterative) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&]() { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    auto remaining = [&]() { return limits.time_limit_s - elapsed(); };

    MasterModel master = build_master(inst);
    BnCResult result;

    std::vector<double> warm_assignment;
    if (warm_start) {
        warm_assignment = warm_start_from(inst, master, *warm_start);
        result.best = *warm_start;
        compute_schedule(inst, *result.best);
        result.upper_bound = evaluate(inst, *warm_start);
    }

    std::map<std::string, char> seen;
    int cut_serial = 0;

    // Shared by both modes: evaluate one integer master point, update the
    // incumbent, and produce the cut (nullopt when the subproblem timed out
    // without a usable bound).
    auto check_point = [&](const std::vector<double>& assignment) -> std::optional<BendersCut> {
        const MasterPaths paths = extract_paths(inst, master, assignment);
        const std::string key = paths_key(paths);
        if (seen.count(key)) return std::nullopt;
        ++result.iterations;
        SubproblemModel sub = build_subproblem(inst, paths);
        BuiltinBackend sub_backend;
        SolveLimits sub_limits;
        sub_limits.time_limit_s = std::max(1e-3, remaining());
        const SolveResult sub_result = sub_backend.solve(sub.model(), sub_limits, {}, nullptr);
        if (sub_result.status == SolveStatus::optimal) {
            Solution sol = subproblem_solution(inst, paths, sub, sub_result.assignment);
            if (!validate_solution(inst, sol).empty())
                throw std::logic_error("branch and check: subproblem solution failed validation");
            if (sol.objective < result.upper_bound - 1e-9) {
                result.upper_bound = sol.objective;
                result.best = sol;
            }
            seen.emplace(key, 1);
            BendersCut cut = make_optimality_cut(paths.edges, sub_result.objective);
            ++result.optimality_cuts;
            result.cut_log.push_back({result.iterations, cut, key});
            return cut;
        }
        if (sub_result.status == SolveStatus::infeasible) {
            seen.emplace(key, 1);
            BendersCut cut = make_feasibility_cut(paths.edges);
            ++result.feasibility_cuts;
            result.cut_log.push_back({result.iterations, cut, key});
            return cut;
        }
        return std::nullopt;  // ran out of budget mid-subproblem
    };

    const bool callbacks = backend.capability().supports_callbacks && !force_iterative;
    if (callbacks) {
        IntegerHook hook = [&](const std::vector<double>& assignment, double) -> std::vector<MilpRow> {
            auto cut = check_point(assignment);
            if (!cut) return {};
            return {cut_row(master, *cut, cut_serial++)};
        };
        SolveLimits master_limits;
        master_limits.time_limit_s = limits.time_limit_s;
        const SolveResult master_result =
            backend.solve(master.model(), master_limits, hook, warm_assignment.empty() ? nullptr : &warm_assignment);
        result.lower_bound = master_result.status == SolveStatus::optimal ? master_result.objective
                                                                          : master_result.lower_bound;
        if (master_result.status == SolveStatus::infeasible && !result.best) {
            result.status = SolveStatus::infeasible;
            result.time_s = elapsed();
            return result;
        }
        result.status = master_result.status == SolveStatus::optimal || master_result.status == SolveStatus::infeasible
                            ? SolveStatus::optimal
                            : (result.best ? SolveStatus::feasible : SolveStatus::limit);
    } else {
        result.lower_bound = 0.0;
        for (;;) {
            if (remaining() <= 0.0) {
                result.status = result.best ? SolveStatus::feasible : SolveStatus::limit;
                break;
            }
            SolveLimits master_limits;
            master_limits.time_limit_s = std::max(1e-3, remaining());
            SolveResult master_result = backend.solve(master.model(), master_limits, {}, nullptr);
            if (master_result.status == SolveStatus::infeasible) {
                // All edge sets are cut off; the best incumbent (if any) is optimal.
                result.status = result.best ? SolveStatus::optimal : SolveStatus::infeasible;
                if (result.best) result.lower_bound = result.upper_bound;
                break;
            }
            if (master_result.assignment.empty()) {  // out of budget without a point
                result.lower_bound = std::max(result.lower_bound, master_result.lower_bound);
                result.status = result.best ? SolveStatus::feasible : SolveStatus::limit;
                break;
            }
            if (master_result.status == SolveStatus::optimal) {
                result.lower_bound = master_result.objective;
                if (result.lower_bound >= result.upper_bound - 1e-6) {
                    result.status = SolveStatus::optimal;
                    break;
                }
            }
            // A merely feasible point (an imported external solution) is still
            // checked and cut; it just proves no bound.
            auto cut = check_point(master_result.assignment);
            if (!cut) {
                result.status = result.best ? SolveStatus::feasible : SolveStatus::limit;
                break;
            }
            const MilpRow row = cut_row(master, *cut, cut_serial++);
            master.model().add_row(row.name, row.terms, row.sense, row.rhs, true);
        }
    }

    if (result.best) {
        result.lower_bound = std::min(result.lower_bound, result.upper_bound);
        result.gap_percent = (result.upper_bound - result.lower_bound) / result.upper_bound * 100.0;
        if (result.status == SolveStatus::optimal) {
            result.lower_bound = result.upper_bound;
            result.gap_percent = 0.0;
        }
    }
    result.time_s = elapsed();
    return result;
}

std::string bnc_result_to_json_string(const BnCResult& result) {
    std::ostringstream oss;
    oss.precision(12);
    oss << "{\n  \"status\": \"" << to_string(result.status) << "\",\n";
    oss << "  \"lb\": " << result.lower_bound << ",\n";
    if (std::isfinite(result.upper_bound)) {
        oss << "  \"ub\": " << result.upper_bound << ",\n  \"gap\": " << result.gap_percent << ",\n";
    } else {
        oss << "  \"ub\": null,\n  \"gap\": null,\n";
    }
    oss << "  \"time_s\": " << result.time_s << ",\n  \"iters\": " << result.iterations << ",\n";
    oss << "  \"cuts\": {\"opt\": " << result.optimality_cuts << ", \"feas\": " << result.feasibility_cuts << "}\n}\n";
    return oss.str();
}

void write_cut_log_csv(const BnCResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cut log: cannot write '" + path + "'");
    out << "iteration,kind,zeta,edges\n";
    for (const auto& entry : result.cut_log) {
        out << entry.iteration << ',' << (entry.cut.kind == BendersCut::Kind::optimality ? "opt" : "feas") << ','
            << entry.cut.bound << ',';
        for (std::size_t e = 0; e < entry.cut.edges.size(); ++e) {
            if (e) out << ';';
            out << entry.cut.edges[e].first << '-' << entry.cut.edges[e].second;
        }
        out << '\n';
    }
}

GapMetrics gap_metrics(double lb, double ub_lns, double ub_lbbd, double time_lbbd, double time_lbbd_plus) {
    if (ub_lns <= 0.0 || ub_lbbd <= 0.0) throw std::invalid_argument("gap metrics: bounds must be positive");
    GapMetrics m;
    m.gap = (ub_lbbd - lb) / ub_lbbd * 100.0;
    m.err = (ub_lns - ub_lbbd) / ub_lns * 100.0;
    m.gap_lns = (ub_lns - lb) / ub_lns * 100.0;
    m.imp = m.gap_lns - m.gap;
    m.acc = time_lbbd - time_lbbd_plus;
    return m;
}

}  // namespace pdpt
