#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdpt/solve.hpp"
#include "pdpt/subproblem.hpp"

namespace pdpt {

struct BendersCut {
    enum class Kind { optimality, feasibility };
    Kind kind = Kind::feasibility;
    std::vector<std::pair<int, int>> edges;  // E^n
    double bound = 0.0;                      // zeta for optimality cuts
};

BendersCut make_optimality_cut(const std::vector<std::pair<int, int>>& edges, double zeta);
BendersCut make_feasibility_cut(const std::vector<std::pair<int, int>>& edges);

// z >= zeta - zeta (|E| - sum x) respectively sum_E x <= |E| - 1.
MilpRow cut_row(const MasterModel& master, const BendersCut& cut, int serial);

struct CutLogEntry {
    int iteration = 0;
    BendersCut cut;
    std::string key;  // hash of (E, tau), detects repeats
};

struct BnCLimits {
    double time_limit_s = std::numeric_limits<double>::infinity();
};

struct BnCResult {
    SolveStatus status = SolveStatus::limit;
    double lower_bound = 0.0;
    double upper_bound = std::numeric_limits<double>::infinity();
    double gap_percent = std::numeric_limits<double>::infinity();
    double time_s = 0.0;
    int iterations = 0;  // subproblem evaluations
    int optimality_cuts = 0;
    int feasibility_cuts = 0;
    std::optional<Solution> best;
    std::vector<CutLogEntry> cut_log;
};

// Branch-and-Check: the master runs once under a callback-capable backend and
// every integer point is checked by the vehicle-assignment subproblem, whose
// value (or infeasibility) turns into a lazy cut. With a callback-less
// backend, or when force_iterative is set, the classic iterative exchange is
// run instead: solve the master to optimality, cut, repeat.
BnCResult branch_and_check(const Instance& inst, MilpBackend& backend, const Solution* warm_start,
                           const BnCLimits& limits = {}, bool force_iterative = false);

std::string bnc_result_to_json_string(const BnCResult& result);
void write_cut_log_csv(const BnCResult& result, const std::string& path);

struct GapMetrics {
    double gap = 0.0;      // (ub_lbbd - lb) / ub_lbbd * 100
    double err = 0.0;      // (ub_lns - ub_lbbd) / ub_lns * 100
    double gap_lns = 0.0;  // (ub_lns - lb) / ub_lns * 100
    double imp = 0.0;      // gap_lns - gap
    double acc = 0.0;      // time_lbbd - time_lbbd_plus, when times given
};

GapMetrics gap_metrics(double lb, double ub_lns, double ub_lbbd, double time_lbbd = 0.0, double time_lbbd_plus = 0.0);

}  // namespace pdpt
