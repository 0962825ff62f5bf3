#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdpt/instance.hpp"
#include "pdpt/rng.hpp"

namespace pdpt {

// Time-window width classes: S (60 or 90), M (90 or 120), L (120 or 150
// minutes). One width is drawn per instance.
enum class TwClass { S, M, L };
TwClass tw_class_from_string(const std::string& s);
std::string to_string(TwClass c);

struct GeneratorParams {
    int num_requests = 25;
    TwClass tw = TwClass::L;
    double demand_min = 5.0;
    double demand_max = 25.0;
    double capacity = 75.0;
    double horizon = 480.0;
    double speed_kmh = 20.0;
    double service_min = 3.0;
    double service_max = 10.0;
    double tw_start_step = 30.0;   // start grid {0, 30, ..., horizon - step}
    int transfers = -1;            // -1: 3/4/5/6 by request-count scale
    int fleet_override = 0;        // 0: size the fleet by binary search
    std::string node_file;         // CSV "id,lat,lon"; empty: synthetic disc
    double radius_km = 5.0;
    double center_lat = 37.9838;   // synthetic disc center
    double center_lon = 23.7275;
};

int default_transfer_count(int num_requests);

// Feasibility-first generation: every request is accepted only when a direct
// o -> p -> d -> e route fits all windows for one of the drafted vehicles,
// the fleet is the smallest cheapest-insertion-feasible prefix of the drafted
// depot pairs, and transfer points are k-means centroids of the request
// coordinates. Deterministic per (params, seed).
Instance generate_instance(const GeneratorParams& params, std::uint64_t seed);

// Smallest k in [1, |drafted|] for which plain cheapest insertion (no
// transfers, difficulty order) serves all requests; assumes monotonicity and
// falls back to a linear scan when the boundary assertion fails.
// Returns 0 when even the full draft is infeasible.
int fleet_size_binary_search(const Instance& trial_instance_all_vehicles);

std::vector<Point> kmeans_transfers(const std::vector<Point>& coords, int k, Metric metric, Rng& rng);

// Loads "id,lat,lon" rows.
std::vector<Point> load_node_file(const std::string& path);

// The request-acceptance check: some vehicle can run o -> p -> d -> e within
// all four windows. Also used to re-assert emitted instances.
bool direct_route_feasible(const Instance& inst, const Request& req);

}  // namespace pdpt
