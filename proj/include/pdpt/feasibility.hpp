#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pdpt/solution.hpp"

namespace pdpt {

// Static range-max / range-min over a fixed array, O(1) query after an
// O(n log n) build. Rebuilt on every cache refresh; routes are short.
class RangeTable {
  public:
    void build(const std::vector<double>& values, bool maximum);
    // query over the closed index range [lo, hi]; lo > hi yields +/-inf identity
    double query(int lo, int hi) const;

  private:
    std::vector<std::vector<double>> levels_;
    bool maximum_ = true;
};

// A candidate placement of one request. Gap g means "insert before the stop
// currently at index g"; valid gaps run from 1 to stops.size() - 1.
struct InsertionCandidate {
    int request = -1;
    bool transferred = false;
    int k1 = -1;           // serving vehicle (direct) or first vehicle
    int k2 = -1;           // second vehicle (transferred only)
    int pickup_gap = -1;   // gap of the pickup stop in route k1
    int drop_gap = -1;     // transferred: gap of transfer_drop in k1 (>= pickup_gap)
    int pick_gap = -1;     // transferred: gap of transfer_pick in k2
    int delivery_gap = -1; // gap of the delivery stop (route k1 direct, k2 transferred)
    int transfer_loc = -1;
    double delta = 0.0;    // exact objective increase
};

// Per-stop earliest/latest service starts with transfer couplings imported
// from partner routes, plus prefix loads and range tables. Kept at a global
// fixpoint so insertion checks are pure arithmetic.
class FeasibilityCache {
  public:
    FeasibilityCache() = default;
    FeasibilityCache(const Instance& inst, const Solution& sol);

    void rebuild(const Instance& inst, const Solution& sol);
    // Refresh after the listed routes changed; propagates along couplings
    // until every imported bound is consistent again.
    void refresh(const Instance& inst, const Solution& sol, const std::vector<int>& changed_routes);

    struct RouteData {
        std::vector<double> forward;     // earliest service start
        std::vector<double> backward;    // latest service start
        std::vector<double> lb_in;       // max(tw_open, imported partner forward)
        std::vector<double> cap;         // min(tw_close, imported partner backward)
        std::vector<double> prefix_leg;  // prefix sums of leg times
        std::vector<double> load_after;
        int coupling_stops = 0;
        RangeTable cap_minus_leg_min;    // min over cap[m] - prefix_leg[m]
        RangeTable lb_minus_leg_max;     // max over lb_in[m] - prefix_leg[m]
        RangeTable load_max;
    };

    const RouteData& route(int k) const { return routes_[static_cast<std::size_t>(k)]; }
    bool consistent_with(const Instance& inst, const Solution& sol, double tol = 1e-7) const;
    std::vector<int> coupling_component(int k1, int k2) const;

  private:
    struct Coupling {
        int drop_vehicle, drop_index, pick_vehicle, pick_index;
    };
    void collect_couplings(const Solution& sol);
    bool forward_pass(const Instance& inst, const Solution& sol, int k);
    bool backward_pass(const Instance& inst, const Solution& sol, int k);

    std::vector<RouteData> routes_;
    std::vector<Coupling> couplings_;
    std::vector<std::vector<int>> partners_;  // route -> coupled routes
};

// True iff applying the candidate keeps the solution schedule- and
// capacity-feasible. Direct candidates and transfers between coupling-free
// routes are decided in O(1); otherwise the affected coupling component is
// re-simulated exactly.
bool check_insertion_feasible(const Instance& inst, const Solution& sol, const FeasibilityCache& cache,
                              const InsertionCandidate& cand);

// All structural placements of request r with exact cost deltas: every direct
// (vehicle, pickup gap, delivery gap) and every transferred
// (transfer, k1, k2 != k1, four gaps) respecting one visit per
// (vehicle, transfer) pair. Feasibility is not filtered here.
std::vector<InsertionCandidate> enumerate_insertions(const Instance& inst, const Solution& sol,
                                                     const FeasibilityCache& cache, int request);

void for_each_insertion(const Instance& inst, const Solution& sol, int request,
                        const std::function<void(const InsertionCandidate&)>& fn);

// Applies a feasible candidate; throws std::logic_error when the candidate
// fails the feasibility check. Objective and cache are updated incrementally.
void apply_insertion(const Instance& inst, Solution& sol, FeasibilityCache& cache, const InsertionCandidate& cand);

// Excises the given requests (both transfer stops for transferred journeys).
// Removal of a feasible solution stays feasible; this is asserted.
void remove_requests(const Instance& inst, Solution& sol, FeasibilityCache& cache, const std::vector<int>& requests);

// Objective change of removing request r from the current solution (>= 0 gain
// means the solution gets cheaper by that amount).
double removal_gain(const Instance& inst, const Solution& sol, int request);

std::vector<int> served_requests(const Solution& sol);

}  // namespace pdpt
