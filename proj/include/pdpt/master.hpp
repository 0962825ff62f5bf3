#pragma once

#include <vector>

#include "pdpt/milp.hpp"
#include "pdpt/solution.hpp"

namespace pdpt {

// Vehicle-free relaxation: per-request path variables y_rij and trip
// variables x_ij with coverage, flow, capacity-link, variable-fixing and
// big-M time-window rows. Travel times carry the origin's service time, so
// the arrival variables are service starts.
class MasterModel {
  public:
    explicit MasterModel(const Instance& inst);

    MilpModel& model() { return model_; }
    const MilpModel& model() const { return model_; }

    int x(int i, int j) const { return x_[static_cast<std::size_t>(i * n_ + j)]; }
    int y(int r, int i, int j) const;  // -1 for i == j
    int z() const { return z_; }
    int arrival(int j) const { return a_[static_cast<std::size_t>(j)]; }          // -1 for transfers
    int transfer_arrival(int r, int j) const;                                     // -1 for non-transfers

    bool x_fixed_zero(int i, int j) const;
    int num_locations() const { return n_; }

  private:
    const Instance* inst_;
    MilpModel model_;
    int n_ = 0;
    int z_ = -1;
    std::vector<int> x_;
    std::vector<int> y_;  // r * n * n + i * n + j
    std::vector<int> a_;
    std::vector<int> b_;  // r * n + j, only transfer columns are declared
};

MasterModel build_master(const Instance& inst);

// Maps a feasible solution onto the master's variables (x along consecutive
// stops, y along journey legs, arrivals from the schedule). The assignment is
// checked against every master row; an infeasible or unschedulable input is
// rejected with std::runtime_error.
std::vector<double> warm_start_from(const Instance& inst, const MasterModel& master, const Solution& sol);

}  // namespace pdpt
