#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdpt/instance.hpp"

namespace pdpt {

enum class StopAction { start, end, pickup, deliver, transfer_drop, transfer_pick, via };

std::string to_string(StopAction a);
StopAction stop_action_from_string(const std::string& s);

struct Stop {
    int loc = 0;
    StopAction action = StopAction::via;
    int request = -1;          // -1 for start/end
    double start_time = 0.0;   // service start, filled by compute_schedule
    double load_after = 0.0;

    bool operator==(const Stop&) const = default;
};

struct Route {
    int vehicle = 0;
    std::vector<Stop> stops;  // begins with start at o_k, ends with end at e_k

    bool operator==(const Route&) const = default;
};

struct JourneyLeg {
    int vehicle = 0;
    int from_loc = 0;
    int to_loc = 0;

    bool operator==(const JourneyLeg&) const = default;
};

// How one request travels. One leg means a direct journey; additional legs
// chain through transfer points. Search only produces one or two legs, but the
// decomposition side may emit longer chains.
struct Journey {
    int request = -1;
    std::vector<JourneyLeg> legs;
    std::vector<int> transfer_locs;  // size legs.size() - 1

    bool served() const { return !legs.empty(); }
    bool direct() const { return legs.size() == 1; }

    bool operator==(const Journey&) const = default;
};

struct Solution {
    std::vector<Route> routes;      // index == vehicle index
    std::vector<Journey> journeys;  // index == request index
    double objective = 0.0;
    bool schedule_valid = false;

    bool operator==(const Solution&) const = default;
};

// Empty solution: every vehicle drives o_k -> e_k, no request served.
Solution empty_solution(const Instance& inst);

// Total distance over consecutive stop pairs of all routes, including the
// o_k -> e_k leg of unused vehicles.
double evaluate(const Instance& inst, const Solution& sol);

struct ScheduleFailure {
    enum class Kind { window, cycle };
    Kind kind = Kind::window;
    int vehicle = -1;       // window: route of the violating stop
    int stop_index = -1;    // window: stop index within that route
    double required = 0.0;  // window: earliest reachable service start
    double latest = 0.0;    // window: u_j at that stop
    std::vector<std::pair<int, int>> cycle;  // cycle: (vehicle, stop index) ring

    std::string describe() const;
};

// Earliest-start schedule with cross-route transfer synchronization.
// On success fills Stop::start_time and Stop::load_after and sets
// schedule_valid; on failure returns evidence and leaves the solution's flag
// false. Consecutive stops at the same location form one visit: they share the
// service start and the service duration is paid once, on departure.
std::optional<ScheduleFailure> compute_schedule(const Instance& inst, Solution& sol);

struct SolutionViolation {
    std::string property;  // pdpt1..pdpt6 or "structural"
    std::string message;
};

// Empty report iff the solution is feasible. With require_all_served=false,
// unserved requests are not reported, which is the notion of feasibility used
// for partial solutions during search.
std::vector<SolutionViolation> validate_solution(const Instance& inst, const Solution& sol,
                                                 bool require_all_served = true);

// Recomputes Stop::load_after from the actions. Returns false when a load
// falls outside [0, Q] or a route ends loaded.
bool recompute_loads(const Instance& inst, Solution& sol);

// Positions of the stops serving request r, ordered along its journey:
// pickup, then per transfer (drop, pick), then delivery.
struct RequestStops {
    struct Ref {
        int vehicle;
        int index;
    };
    std::vector<Ref> refs;
};
RequestStops find_request_stops(const Solution& sol, int request);

// Solution JSON I/O (schema: objective, routes[{vehicle, stops[...]}],
// journeys[{request, mode, legs[...]}]).
std::string solution_to_json_string(const Solution& sol);
Solution solution_from_json_string(const std::string& text, const Instance& inst);
void save_solution(const Solution& sol, const std::string& path);
Solution load_solution(const std::string& path, const Instance& inst);

}  // namespace pdpt
