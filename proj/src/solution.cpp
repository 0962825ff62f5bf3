#include "pdpt/solution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace pdpt {

using ordered_json = nlohmann::ordered_json;

std::string to_string(StopAction a) {
    switch (a) {
        case StopAction::start: return "start";
        case StopAction::end: return "end";
        case StopAction::pickup: return "pickup";
        case StopAction::deliver: return "deliver";
        case StopAction::transfer_drop: return "transfer_drop";
        case StopAction::transfer_pick: return "transfer_pick";
        case StopAction::via: return "via";
    }
    return "?";
}

StopAction stop_action_from_string(const std::string& s) {
    if (s == "start") return StopAction::start;
    if (s == "end") return StopAction::end;
    if (s == "pickup") return StopAction::pickup;
    if (s == "deliver") return StopAction::deliver;
    if (s == "transfer_drop") return StopAction::transfer_drop;
    if (s == "transfer_pick") return StopAction::transfer_pick;
    if (s == "via") return StopAction::via;
    throw std::runtime_error("solution: unknown stop action '" + s + "'");
}

Solution empty_solution(const Instance& inst) {
    Solution sol;
    sol.routes.resize(inst.num_vehicles());
    for (std::size_t k = 0; k < inst.num_vehicles(); ++k) {
        auto& route = sol.routes[k];
        route.vehicle = static_cast<int>(k);
        route.stops = {{inst.vehicles[k].origin, StopAction::start, -1, 0.0, 0.0},
                       {inst.vehicles[k].destination, StopAction::end, -1, 0.0, 0.0}};
    }
    sol.journeys.resize(inst.num_requests());
    for (std::size_t r = 0; r < inst.num_requests(); ++r) sol.journeys[r].request = static_cast<int>(r);
    sol.objective = evaluate(inst, sol);
    compute_schedule(inst, sol);
    return sol;
}

double evaluate(const Instance& inst, const Solution& sol) {
    double total = 0.0;
    for (const auto& route : sol.routes)
        for (std::size_t i = 0; i + 1 < route.stops.size(); ++i)
            total += inst.dist(route.stops[i].loc, route.stops[i + 1].loc);
    return total;
}

std::string ScheduleFailure::describe() const {
    std::ostringstream oss;
    if (kind == Kind::window) {
        oss << "window violation at route " << vehicle << " stop " << stop_index << ": earliest start " << required
            << " > latest " << latest;
    } else {
        oss << "transfer dependency cycle:";
        for (const auto& [k, i] : cycle) oss << " (" << k << "," << i << ")";
    }
    return oss.str();
}

namespace {

// Blocks are maximal runs of stops at the same location within one route; all
// stops of a block share one service start.
struct BlockGraph {
    std::vector<std::vector<int>> block_of;  // [vehicle][stop index] -> block id
    std::vector<int> block_vehicle;
    std::vector<int> block_first_stop;
    std::vector<int> block_loc;
    std::vector<std::pair<int, int>> couplings;  // (drop block, pick block)
    bool coupling_error = false;
    std::string coupling_message;
};

BlockGraph build_blocks(const Solution& sol) {
    BlockGraph g;
    g.block_of.resize(sol.routes.size());
    for (std::size_t k = 0; k < sol.routes.size(); ++k) {
        const auto& stops = sol.routes[k].stops;
        g.block_of[k].resize(stops.size());
        for (std::size_t i = 0; i < stops.size(); ++i) {
            if (i > 0 && stops[i].loc == stops[i - 1].loc) {
                g.block_of[k][i] = g.block_of[k][i - 1];
            } else {
                g.block_of[k][i] = static_cast<int>(g.block_vehicle.size());
                g.block_vehicle.push_back(static_cast<int>(k));
                g.block_first_stop.push_back(static_cast<int>(i));
                g.block_loc.push_back(stops[i].loc);
            }
        }
    }
    // One coupling per consecutive journey leg pair: the dropping block must
    // start no later than the picking block.
    for (const auto& journey : sol.journeys) {
        for (std::size_t leg = 0; leg + 1 < journey.legs.size(); ++leg) {
            const int t = journey.transfer_locs[leg];
            const int k_drop = journey.legs[leg].vehicle;
            const int k_pick = journey.legs[leg + 1].vehicle;
            int b_drop = -1;
            int b_pick = -1;
            const auto& drop_stops = sol.routes[static_cast<std::size_t>(k_drop)].stops;
            for (std::size_t i = 0; i < drop_stops.size(); ++i)
                if (drop_stops[i].loc == t && drop_stops[i].request == journey.request &&
                    drop_stops[i].action == StopAction::transfer_drop)
                    b_drop = g.block_of[static_cast<std::size_t>(k_drop)][i];
            const auto& pick_stops = sol.routes[static_cast<std::size_t>(k_pick)].stops;
            for (std::size_t i = 0; i < pick_stops.size(); ++i)
                if (pick_stops[i].loc == t && pick_stops[i].request == journey.request &&
                    pick_stops[i].action == StopAction::transfer_pick)
                    b_pick = g.block_of[static_cast<std::size_t>(k_pick)][i];
            if (b_drop < 0 || b_pick < 0) {
                g.coupling_error = true;
                g.coupling_message = "request " + std::to_string(journey.request) +
                                     ": transfer stops missing for leg " + std::to_string(leg);
                return g;
            }
            if (b_drop != b_pick) g.couplings.emplace_back(b_drop, b_pick);
        }
    }
    return g;
}

}  // namespace

std::optional<ScheduleFailure> compute_schedule(const Instance& inst, Solution& sol) {
    sol.schedule_valid = false;
    BlockGraph g = build_blocks(sol);
    if (g.coupling_error) {
        ScheduleFailure f;
        f.kind = ScheduleFailure::Kind::cycle;  // structural failure reported as evidence
        return f;
    }
    const std::size_t nb = g.block_vehicle.size();
    std::vector<double> a(nb);
    std::vector<int> pred(nb, -1);
    for (std::size_t b = 0; b < nb; ++b) a[b] = inst.loc(g.block_loc[b]).tw_open;

    // Label-correcting fixpoint; converges within nb sweeps unless the
    // coupling graph has a positive cycle.
    bool changed = true;
    std::size_t sweeps = 0;
    const std::size_t max_sweeps = nb + 2;
    while (changed && sweeps < max_sweeps) {
        changed = false;
        ++sweeps;
        for (std::size_t k = 0; k < sol.routes.size(); ++k) {
            const auto& stops = sol.routes[k].stops;
            for (std::size_t i = 1; i < stops.size(); ++i) {
                const int b_prev = g.block_of[k][i - 1];
                const int b_cur = g.block_of[k][i];
                if (b_prev == b_cur) continue;
                const double reach = a[static_cast<std::size_t>(b_prev)] + inst.leg_time(stops[i - 1].loc, stops[i].loc);
                if (reach > a[static_cast<std::size_t>(b_cur)] + 1e-12) {
                    a[static_cast<std::size_t>(b_cur)] = reach;
                    pred[static_cast<std::size_t>(b_cur)] = b_prev;
                    changed = true;
                }
            }
        }
        for (const auto& [b_drop, b_pick] : g.couplings) {
            if (a[static_cast<std::size_t>(b_drop)] > a[static_cast<std::size_t>(b_pick)] + 1e-12) {
                a[static_cast<std::size_t>(b_pick)] = a[static_cast<std::size_t>(b_drop)];
                pred[static_cast<std::size_t>(b_pick)] = b_drop;
                changed = true;
            }
        }
    }
    if (changed) {
        // Positive cycle: walk predecessors until a block repeats.
        ScheduleFailure f;
        f.kind = ScheduleFailure::Kind::cycle;
        std::vector<int> seen(nb, 0);
        int cur = 0;
        for (std::size_t b = 0; b < nb; ++b)
            if (pred[b] >= 0) cur = static_cast<int>(b);
        while (cur >= 0 && !seen[static_cast<std::size_t>(cur)]) {
            seen[static_cast<std::size_t>(cur)] = 1;
            cur = pred[static_cast<std::size_t>(cur)];
        }
        if (cur >= 0) {
            int walk = cur;
            do {
                f.cycle.emplace_back(g.block_vehicle[static_cast<std::size_t>(walk)],
                                     g.block_first_stop[static_cast<std::size_t>(walk)]);
                walk = pred[static_cast<std::size_t>(walk)];
            } while (walk != cur && walk >= 0);
        }
        return f;
    }
    for (std::size_t b = 0; b < nb; ++b) {
        const double latest = inst.loc(g.block_loc[b]).tw_close;
        if (a[b] > latest + 1e-9) {
            ScheduleFailure f;
            f.kind = ScheduleFailure::Kind::window;
            f.vehicle = g.block_vehicle[b];
            f.stop_index = g.block_first_stop[b];
            f.required = a[b];
            f.latest = latest;
            return f;
        }
    }
    for (std::size_t k = 0; k < sol.routes.size(); ++k)
        for (std::size_t i = 0; i < sol.routes[k].stops.size(); ++i)
            sol.routes[k].stops[i].start_time = a[static_cast<std::size_t>(g.block_of[k][i])];
    recompute_loads(inst, sol);
    sol.schedule_valid = true;
    return std::nullopt;
}

bool recompute_loads(const Instance& inst, Solution& sol) {
    const double capacity = inst.fleet_capacity();
    bool ok = true;
    for (auto& route : sol.routes) {
        double load = 0.0;
        for (auto& stop : route.stops) {
            switch (stop.action) {
                case StopAction::pickup:
                case StopAction::transfer_pick: load += inst.requests[static_cast<std::size_t>(stop.request)].demand; break;
                case StopAction::deliver:
                case StopAction::transfer_drop: load -= inst.requests[static_cast<std::size_t>(stop.request)].demand; break;
                default: break;
            }
            stop.load_after = load;
            if (load < -1e-9 || load > capacity + 1e-9) ok = false;
        }
        if (std::abs(load) > 1e-9) ok = false;
    }
    return ok;
}

RequestStops find_request_stops(const Solution& sol, int request) {
    RequestStops out;
    const Journey& j = sol.journeys[static_cast<std::size_t>(request)];
    auto locate = [&](int vehicle, StopAction action, int loc) -> RequestStops::Ref {
        const auto& stops = sol.routes[static_cast<std::size_t>(vehicle)].stops;
        for (std::size_t i = 0; i < stops.size(); ++i)
            if (stops[i].request == request && stops[i].action == action && stops[i].loc == loc)
                return {vehicle, static_cast<int>(i)};
        return {vehicle, -1};
    };
    if (!j.served()) return out;
    out.refs.push_back(locate(j.legs.front().vehicle, StopAction::pickup, j.legs.front().from_loc));
    for (std::size_t leg = 0; leg + 1 < j.legs.size(); ++leg) {
        const int t = j.transfer_locs[leg];
        out.refs.push_back(locate(j.legs[leg].vehicle, StopAction::transfer_drop, t));
        out.refs.push_back(locate(j.legs[leg + 1].vehicle, StopAction::transfer_pick, t));
    }
    out.refs.push_back(locate(j.legs.back().vehicle, StopAction::deliver, j.legs.back().to_loc));
    return out;
}

std::vector<SolutionViolation> validate_solution(const Instance& inst, const Solution& sol, bool require_all_served) {
    std::vector<SolutionViolation> out;
    auto add = [&](const char* prop, const std::string& msg) { out.push_back({prop, msg}); };

    if (sol.routes.size() != inst.num_vehicles()) {
        add("structural", "route count differs from fleet size");
        return out;
    }
    if (sol.journeys.size() != inst.num_requests()) {
        add("structural", "journey count differs from request count");
        return out;
    }

    for (std::size_t k = 0; k < sol.routes.size(); ++k) {
        const auto& route = sol.routes[k];
        const auto& veh = inst.vehicles[k];
        if (route.vehicle != static_cast<int>(k)) add("structural", "route " + std::to_string(k) + " has wrong vehicle id");
        if (route.stops.size() < 2 || route.stops.front().action != StopAction::start ||
            route.stops.back().action != StopAction::end || route.stops.front().loc != veh.origin ||
            route.stops.back().loc != veh.destination) {
            add("pdpt1", "route " + std::to_string(k) + " does not run from its origin depot to its destination depot");
            continue;
        }
        std::map<int, int> block_count;
        for (std::size_t i = 0; i < route.stops.size(); ++i) {
            const auto& stop = route.stops[i];
            if (i > 0 && i + 1 < route.stops.size() &&
                (stop.action == StopAction::start || stop.action == StopAction::end))
                add("structural", "route " + std::to_string(k) + " has an interior start/end stop");
            if (stop.loc < 0 || stop.loc >= static_cast<int>(inst.num_locations())) {
                add("structural", "route " + std::to_string(k) + " references unknown location");
                continue;
            }
            if (i == 0 || route.stops[i - 1].loc != stop.loc) ++block_count[stop.loc];
        }
        for (const auto& [loc, cnt] : block_count)
            if (cnt > 1)
                add("pdpt1", "route " + std::to_string(k) + " visits location " + std::to_string(loc) + " " +
                                 std::to_string(cnt) + " times");
    }
    if (!out.empty()) return out;

    // Journey structure and the journey <-> stop correspondence.
    std::vector<int> pickup_seen(inst.num_requests(), 0), deliver_seen(inst.num_requests(), 0);
    for (const auto& route : sol.routes)
        for (const auto& stop : route.stops) {
            if (stop.action == StopAction::pickup) ++pickup_seen[static_cast<std::size_t>(stop.request)];
            if (stop.action == StopAction::deliver) ++deliver_seen[static_cast<std::size_t>(stop.request)];
        }
    for (std::size_t r = 0; r < inst.num_requests(); ++r) {
        const Journey& j = sol.journeys[r];
        if (!j.served()) {
            if (require_all_served) add("pdpt2", "request " + std::to_string(r) + " is not served");
            if (pickup_seen[r] || deliver_seen[r])
                add("structural", "request " + std::to_string(r) + " has stops but no journey");
            continue;
        }
        if (j.request != static_cast<int>(r)) add("structural", "journey " + std::to_string(r) + " has wrong request id");
        const auto& req = inst.requests[r];
        if (j.legs.front().from_loc != req.pickup || j.legs.back().to_loc != req.delivery)
            add("structural", "journey " + std::to_string(r) + " does not run from pickup to delivery");
        if (j.transfer_locs.size() + 1 != j.legs.size())
            add("structural", "journey " + std::to_string(r) + " has inconsistent transfer list");
        for (std::size_t leg = 0; leg + 1 < j.legs.size(); ++leg) {
            const int t = j.transfer_locs[leg];
            if (j.legs[leg].to_loc != t || j.legs[leg + 1].from_loc != t)
                add("structural", "journey " + std::to_string(r) + " legs do not meet at their transfer point");
            if (inst.loc(t).kind != LocationKind::transfer)
                add("structural", "journey " + std::to_string(r) + " transfers at a non-transfer location");
        }
        if (pickup_seen[r] != 1 || deliver_seen[r] != 1) {
            add("pdpt2", "request " + std::to_string(r) + " must have exactly one pickup and one delivery stop");
            continue;
        }
        const RequestStops refs = find_request_stops(sol, static_cast<int>(r));
        bool missing = false;
        for (const auto& ref : refs.refs)
            if (ref.index < 0) missing = true;
        if (missing) {
            add("structural", "request " + std::to_string(r) + " journey stops are missing on the routes");
            continue;
        }
        // In-route precedence: pickup before drop on the first leg's route,
        // pick before delivery on the last, and pick after drop handled by the
        // schedule. Same-route refs must be strictly ordered.
        for (std::size_t i = 0; i + 1 < refs.refs.size(); ++i) {
            const auto& a = refs.refs[i];
            const auto& b = refs.refs[i + 1];
            if (a.vehicle == b.vehicle && a.index >= b.index)
                add("pdpt3", "request " + std::to_string(r) + " visits its stops out of order on route " +
                                 std::to_string(a.vehicle));
        }
    }
    if (!out.empty()) return out;

    Solution copy = sol;
    if (!recompute_loads(inst, copy)) add("pdpt5", "a route exceeds capacity or ends loaded");

    auto failure = compute_schedule(inst, copy);
    if (failure) {
        if (failure->kind == ScheduleFailure::Kind::window)
            add("pdpt6", failure->describe());
        else
            add("pdpt4", failure->describe());
        return out;
    }
    // The earliest schedule satisfies windows and couplings by construction;
    // re-assert the synchronization property explicitly.
    for (std::size_t r = 0; r < inst.num_requests(); ++r) {
        const Journey& j = sol.journeys[r];
        if (j.legs.size() < 2) continue;
        const RequestStops refs = find_request_stops(copy, static_cast<int>(r));
        for (std::size_t leg = 0; leg + 1 < j.legs.size(); ++leg) {
            const auto& drop = refs.refs[1 + 2 * leg];
            const auto& pick = refs.refs[2 + 2 * leg];
            const double a_drop = copy.routes[static_cast<std::size_t>(drop.vehicle)].stops[static_cast<std::size_t>(drop.index)].start_time;
            const double a_pick = copy.routes[static_cast<std::size_t>(pick.vehicle)].stops[static_cast<std::size_t>(pick.index)].start_time;
            if (a_pick + 1e-9 < a_drop)
                add("pdpt4", "request " + std::to_string(r) + " is picked up before it is dropped at its transfer");
        }
    }
    return out;
}

std::string solution_to_json_string(const Solution& sol) {
    ordered_json j;
    j["objective"] = sol.objective;
    j["routes"] = ordered_json::array();
    for (const auto& route : sol.routes) {
        ordered_json stops = ordered_json::array();
        for (const auto& stop : route.stops) {
            ordered_json s = {{"loc", stop.loc}, {"action", to_string(stop.action)}, {"time", stop.start_time}};
            if (stop.request >= 0) s["request"] = stop.request;
            stops.push_back(s);
        }
        j["routes"].push_back({{"vehicle", route.vehicle}, {"stops", stops}});
    }
    j["journeys"] = ordered_json::array();
    for (const auto& journey : sol.journeys) {
        if (!journey.served()) {
            j["journeys"].push_back({{"request", journey.request}, {"mode", "unserved"}, {"legs", ordered_json::array()}});
            continue;
        }
        ordered_json legs = ordered_json::array();
        for (const auto& leg : journey.legs)
            legs.push_back({{"vehicle", leg.vehicle}, {"from", leg.from_loc}, {"to", leg.to_loc}});
        j["journeys"].push_back(
            {{"request", journey.request}, {"mode", journey.direct() ? "direct" : "transferred"}, {"legs", legs}});
    }
    return j.dump(2) + "\n";
}

Solution solution_from_json_string(const std::string& text, const Instance& inst) {
    ordered_json j = ordered_json::parse(text);
    Solution sol;
    sol.objective = j.at("objective").get<double>();
    for (const auto& rj : j.at("routes")) {
        Route route;
        route.vehicle = rj.at("vehicle").get<int>();
        for (const auto& sj : rj.at("stops")) {
            Stop stop;
            stop.loc = sj.at("loc").get<int>();
            stop.action = stop_action_from_string(sj.at("action").get<std::string>());
            stop.request = sj.value("request", -1);
            stop.start_time = sj.value("time", 0.0);
            route.stops.push_back(stop);
        }
        sol.routes.push_back(route);
    }
    for (const auto& jj : j.at("journeys")) {
        Journey journey;
        journey.request = jj.at("request").get<int>();
        for (const auto& lj : jj.at("legs"))
            journey.legs.push_back({lj.at("vehicle").get<int>(), lj.at("from").get<int>(), lj.at("to").get<int>()});
        for (std::size_t leg = 0; leg + 1 < journey.legs.size(); ++leg)
            journey.transfer_locs.push_back(journey.legs[leg].to_loc);
        sol.journeys.push_back(journey);
    }
    recompute_loads(inst, sol);
    return sol;
}

void save_solution(const Solution& sol, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("solution: cannot write '" + path + "'");
    out << solution_to_json_string(sol);
}

Solution load_solution(const std::string& path, const Instance& inst) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("solution: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return solution_from_json_string(buf.str(), inst);
}

}  // namespace pdpt
