#pragma once

#include <array>
#include <vector>

#include "pdpt/master.hpp"
#include "pdpt/milp.hpp"
#include "pdpt/solution.hpp"

namespace pdpt {

struct TransferTriple {
    int before, transfer, after;
    bool operator==(const TransferTriple&) const = default;
};

struct MasterPaths {
    std::vector<std::vector<int>> path;           // per request, p_r .. d_r
    std::vector<std::vector<TransferTriple>> tau; // per request
    std::vector<std::pair<int, int>> edges;       // E, sorted
};

// Walks y_r from the pickup to the delivery (integrality tolerance 1e-6).
// Throws std::runtime_error on a broken chain or a non-terminating walk.
MasterPaths extract_paths(const Instance& inst, const MasterModel& master, const std::vector<double>& assignment);

// Vehicle assignment subproblem over the fixed master edges: per-vehicle trip
// variables and service starts, depot rows, visit/flow rows, fleet-level
// pickup/delivery coverage, forced master edges, big-M time propagation,
// pickup-before-delivery, and transfer synchronization for every triple.
class SubproblemModel {
  public:
    SubproblemModel(const Instance& inst, const MasterPaths& paths);

    MilpModel& model() { return model_; }
    const MilpModel& model() const { return model_; }
    int x(int i, int j, int k) const { return x_[static_cast<std::size_t>((i * n_ + j) * nk_ + k)]; }
    int arrival(int j, int k) const { return a_[static_cast<std::size_t>(j * nk_ + k)]; }

  private:
    MilpModel model_;
    int n_ = 0, nk_ = 0;
    std::vector<int> x_;
    std::vector<int> a_;
};

SubproblemModel build_subproblem(const Instance& inst, const MasterPaths& paths);

// Routes and journeys from a feasible subproblem assignment. Visits with no
// request action become `via` stops; within one visit the drops precede the
// picks. Throws std::runtime_error when the assignment does not decompose
// into clean o_k -> e_k walks covering all used edges.
Solution subproblem_solution(const Instance& inst, const MasterPaths& paths, const SubproblemModel& sub,
                             const std::vector<double>& assignment);

}  // namespace pdpt
