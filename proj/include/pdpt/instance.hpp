#pragma once

#include <string>
#include <vector>

#include "pdpt/geo.hpp"

namespace pdpt {

enum class LocationKind { depot_origin, depot_destination, pickup, delivery, transfer };

std::string to_string(LocationKind kind);
LocationKind location_kind_from_string(const std::string& s);

// A node of the instance. For haversine instances x is the longitude and y the
// latitude (degrees); for euclidean instances both are planar hectometers.
struct Location {
    int id = 0;
    LocationKind kind = LocationKind::pickup;
    double x = 0.0;
    double y = 0.0;
    double tw_open = 0.0;    // l_j, minutes
    double tw_close = 0.0;   // u_j, minutes
    double service = 0.0;    // st(j), minutes

    bool operator==(const Location&) const = default;
};

struct Request {
    int id = 0;
    int pickup = 0;
    int delivery = 0;
    double demand = 0.0;

    bool operator==(const Request&) const = default;
};

struct Vehicle {
    int id = 0;
    int origin = 0;
    int destination = 0;
    double capacity = 0.0;

    bool operator==(const Vehicle&) const = default;
};

struct InstanceMeta {
    std::string name;
    Metric metric = Metric::euclidean;
    double speed_kmh = 20.0;
    double horizon = 480.0;
    std::uint64_t seed = 0;

    bool operator==(const InstanceMeta&) const = default;
};

class Instance {
  public:
    InstanceMeta meta;
    std::vector<Location> locations;
    std::vector<Request> requests;
    std::vector<Vehicle> vehicles;
    std::vector<int> transfer_ids;  // one entry per transfer copy, in order
    DenseMatrix travel;             // t_ij, minutes
    DenseMatrix distance;           // c_ij, hectometers
    bool matrices_explicit = false; // true when matrices came from the file

    std::size_t num_locations() const { return locations.size(); }
    std::size_t num_requests() const { return requests.size(); }
    std::size_t num_vehicles() const { return vehicles.size(); }

    const Location& loc(int id) const { return locations[static_cast<std::size_t>(id)]; }
    double fleet_capacity() const { return vehicles.empty() ? 0.0 : vehicles.front().capacity; }

    double dist(int i, int j) const { return distance(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); }
    double time(int i, int j) const { return travel(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); }

    // Travel time plus the service duration spent at the origin before leaving.
    // Time-window feasibility everywhere in the toolbox is expressed through
    // this quantity, so service times fold into the arc lengths.
    double leg_time(int i, int j) const { return time(i, j) + loc(i).service; }

    void rebuild_matrices();

    bool operator==(const Instance&) const = default;
};

struct Violation {
    std::string code;     // short machine-readable tag
    std::string message;  // human-readable, names the offending ids
};

// Empty report iff all Instance invariants hold.
std::vector<Violation> validate_instance(const Instance& inst);

// JSON file I/O per the published schema. load_instance throws
// std::runtime_error naming the offending field on schema errors and a
// validation error listing all breaches when invariants fail.
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

Instance instance_from_json_string(const std::string& text);
std::string instance_to_json_string(const Instance& inst);

}  // namespace pdpt
