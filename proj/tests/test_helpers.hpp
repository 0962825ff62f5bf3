#pragma once

#include <cmath>
#include <vector>

#include "pdpt/feasibility.hpp"
#include "pdpt/generator.hpp"
#include "pdpt/instance.hpp"
#include "pdpt/solution.hpp"

namespace pdpt::testing {

// Euclidean instance on a line: o=0, p=1, d=2, e=3 (hm units apart as given),
// one request, wide windows, zero service. A second vehicle can be appended.
inline Instance line_instance(double spacing_hm = 10.0, double horizon = 480.0) {
    Instance inst;
    inst.meta = {"line", Metric::euclidean, 20.0, horizon, 0};
    auto loc = [&](int id, LocationKind kind, double x) {
        return Location{id, kind, x, 0.0, 0.0, horizon, 0.0};
    };
    inst.locations = {loc(0, LocationKind::depot_origin, 0.0), loc(1, LocationKind::pickup, spacing_hm),
                      loc(2, LocationKind::delivery, 2 * spacing_hm),
                      loc(3, LocationKind::depot_destination, 3 * spacing_hm)};
    inst.requests = {{0, 1, 2, 10.0}};
    inst.vehicles = {{0, 0, 3, 75.0}};
    inst.rebuild_matrices();
    return inst;
}

struct GridSpec {
    LocationKind kind;
    double x, y;
    double l = 0.0, u = 480.0;
    double service = 0.0;
};

inline Instance build_instance(const std::vector<GridSpec>& locs, const std::vector<Request>& requests,
                               const std::vector<Vehicle>& vehicles, const std::vector<int>& transfers,
                               double speed = 20.0) {
    Instance inst;
    inst.meta = {"fixture", Metric::euclidean, speed, 480.0, 0};
    for (std::size_t i = 0; i < locs.size(); ++i)
        inst.locations.push_back(
            {static_cast<int>(i), locs[i].kind, locs[i].x, locs[i].y, locs[i].l, locs[i].u, locs[i].service});
    inst.requests = requests;
    inst.vehicles = vehicles;
    inst.transfer_ids = transfers;
    inst.rebuild_matrices();
    return inst;
}

// Two vehicles on parallel tracks with one transfer point between them.
inline Instance two_vehicle_transfer_instance() {
    return build_instance(
        {
            {LocationKind::depot_origin, 0.0, 0.0},        // 0: o1
            {LocationKind::depot_destination, 40.0, 0.0},  // 1: e1
            {LocationKind::depot_origin, 0.0, 20.0},       // 2: o2
            {LocationKind::depot_destination, 40.0, 20.0}, // 3: e2
            {LocationKind::pickup, 10.0, 0.0},             // 4: p0
            {LocationKind::delivery, 30.0, 20.0},          // 5: d0
            {LocationKind::pickup, 10.0, 20.0},            // 6: p1
            {LocationKind::delivery, 30.0, 0.0},           // 7: d1
            {LocationKind::transfer, 20.0, 10.0},          // 8: t
        },
        {{0, 4, 5, 10.0}, {1, 6, 7, 10.0}}, {{0, 0, 1, 75.0}, {1, 2, 3, 75.0}}, {8});
}

inline GeneratorParams tiny_params(int requests, TwClass tw) {
    GeneratorParams params;
    params.num_requests = requests;
    params.tw = tw;
    params.transfers = 1;
    params.fleet_override = 2;
    return params;
}

inline Instance tiny_instance(int requests, TwClass tw, std::uint64_t seed) {
    return generate_instance(tiny_params(requests, tw), seed);
}

// Independent feasibility oracle: applies a candidate to a copy by plain stop
// surgery and re-runs the full schedule and load computation.
inline Solution apply_candidate_by_hand(const Instance& inst, const Solution& sol, const InsertionCandidate& cand) {
    Solution copy = sol;
    const auto& req = inst.requests[static_cast<std::size_t>(cand.request)];
    auto ins = [](Route& route, int gap, Stop stop) { route.stops.insert(route.stops.begin() + gap, stop); };
    if (!cand.transferred) {
        auto& route = copy.routes[static_cast<std::size_t>(cand.k1)];
        ins(route, cand.pickup_gap, {req.pickup, StopAction::pickup, cand.request, 0.0, 0.0});
        ins(route, cand.delivery_gap + 1, {req.delivery, StopAction::deliver, cand.request, 0.0, 0.0});
        copy.journeys[static_cast<std::size_t>(cand.request)].legs = {{cand.k1, req.pickup, req.delivery}};
    } else {
        auto& r1 = copy.routes[static_cast<std::size_t>(cand.k1)];
        ins(r1, cand.pickup_gap, {req.pickup, StopAction::pickup, cand.request, 0.0, 0.0});
        ins(r1, cand.drop_gap + 1, {cand.transfer_loc, StopAction::transfer_drop, cand.request, 0.0, 0.0});
        auto& r2 = copy.routes[static_cast<std::size_t>(cand.k2)];
        ins(r2, cand.pick_gap, {cand.transfer_loc, StopAction::transfer_pick, cand.request, 0.0, 0.0});
        ins(r2, cand.delivery_gap + 1, {req.delivery, StopAction::deliver, cand.request, 0.0, 0.0});
        copy.journeys[static_cast<std::size_t>(cand.request)].legs = {{cand.k1, req.pickup, cand.transfer_loc},
                                                                      {cand.k2, cand.transfer_loc, req.delivery}};
        copy.journeys[static_cast<std::size_t>(cand.request)].transfer_locs = {cand.transfer_loc};
    }
    copy.objective = evaluate(inst, copy);
    return copy;
}

inline bool feasible_by_full_recompute(const Instance& inst, const Solution& sol, const InsertionCandidate& cand) {
    Solution copy = apply_candidate_by_hand(inst, sol, cand);
    if (!recompute_loads(inst, copy)) return false;
    return !compute_schedule(inst, copy).has_value();
}

}  // namespace pdpt::testing
