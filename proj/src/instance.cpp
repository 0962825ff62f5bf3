#include "pdpt/instance.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pdpt {

using ordered_json = nlohmann::ordered_json;

std::string to_string(LocationKind kind) {
    switch (kind) {
        case LocationKind::depot_origin: return "depot-origin";
        case LocationKind::depot_destination: return "depot-destination";
        case LocationKind::pickup: return "pickup";
        case LocationKind::delivery: return "delivery";
        case LocationKind::transfer: return "transfer";
    }
    return "?";
}

LocationKind location_kind_from_string(const std::string& s) {
    if (s == "depot-origin") return LocationKind::depot_origin;
    if (s == "depot-destination") return LocationKind::depot_destination;
    if (s == "pickup") return LocationKind::pickup;
    if (s == "delivery") return LocationKind::delivery;
    if (s == "transfer") return LocationKind::transfer;
    throw std::runtime_error("instance: unknown location kind '" + s + "'");
}

void Instance::rebuild_matrices() {
    std::vector<Point> pts;
    pts.reserve(locations.size());
    for (const auto& l : locations) pts.push_back({l.x, l.y});
    auto m = build_travel_matrix(pts, meta.metric, meta.speed_kmh);
    travel = std::move(m.travel);
    distance = std::move(m.distance);
    matrices_explicit = false;
}

std::vector<Violation> validate_instance(const Instance& inst) {
    std::vector<Violation> out;
    auto add = [&](const std::string& code, const std::string& msg) { out.push_back({code, msg}); };

    const std::size_t n = inst.locations.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& l = inst.locations[i];
        if (l.id != static_cast<int>(i)) add("location-id", "location at index " + std::to_string(i) + " has id " + std::to_string(l.id));
        if (l.tw_open < 0.0 || l.tw_open > l.tw_close)
            add("time-window", "location " + std::to_string(l.id) + " violates 0 <= l <= u");
        if (l.service < 0.0) add("service", "location " + std::to_string(l.id) + " has negative service time");
    }

    const double capacity = inst.fleet_capacity();
    for (const auto& v : inst.vehicles) {
        if (v.origin < 0 || v.origin >= static_cast<int>(n) || v.destination < 0 || v.destination >= static_cast<int>(n)) {
            add("vehicle-ref", "vehicle " + std::to_string(v.id) + " references unknown location");
            continue;
        }
        if (inst.loc(v.origin).kind != LocationKind::depot_origin)
            add("vehicle-kind", "vehicle " + std::to_string(v.id) + " origin is not a depot-origin");
        if (inst.loc(v.destination).kind != LocationKind::depot_destination)
            add("vehicle-kind", "vehicle " + std::to_string(v.id) + " destination is not a depot-destination");
        if (v.capacity != capacity)
            add("fleet", "vehicle " + std::to_string(v.id) + " breaks the homogeneous capacity assumption");
        if (v.capacity <= 0.0) add("fleet", "vehicle " + std::to_string(v.id) + " has non-positive capacity");
    }

    for (const auto& r : inst.requests) {
        if (r.pickup < 0 || r.pickup >= static_cast<int>(n) || r.delivery < 0 || r.delivery >= static_cast<int>(n)) {
            add("request-ref", "request " + std::to_string(r.id) + " references unknown location");
            continue;
        }
        if (r.pickup == r.delivery) add("request", "request " + std::to_string(r.id) + " has pickup == delivery");
        if (inst.loc(r.pickup).kind != LocationKind::pickup)
            add("request-kind", "request " + std::to_string(r.id) + " pickup location has wrong kind");
        if (inst.loc(r.delivery).kind != LocationKind::delivery)
            add("request-kind", "request " + std::to_string(r.id) + " delivery location has wrong kind");
        if (r.demand <= 0.0) add("demand", "request " + std::to_string(r.id) + " has non-positive demand");
        else if (!inst.vehicles.empty() && r.demand > capacity)
            add("demand", "request " + std::to_string(r.id) + ": demand exceeds capacity");
    }

    std::vector<int> endpoint_uses(n, 0);
    for (const auto& r : inst.requests) {
        if (r.pickup >= 0 && r.pickup < static_cast<int>(n)) ++endpoint_uses[static_cast<std::size_t>(r.pickup)];
        if (r.delivery >= 0 && r.delivery < static_cast<int>(n)) ++endpoint_uses[static_cast<std::size_t>(r.delivery)];
    }
    for (std::size_t i = 0; i < n; ++i)
        if (endpoint_uses[i] > 1)
            add("request", "location " + std::to_string(i) + " serves more than one request endpoint");

    std::vector<bool> listed(n, false);
    for (int t : inst.transfer_ids) {
        if (t < 0 || t >= static_cast<int>(n)) {
            add("transfer-ref", "transfer id " + std::to_string(t) + " references unknown location");
            continue;
        }
        listed[static_cast<std::size_t>(t)] = true;
        if (inst.loc(t).kind != LocationKind::transfer)
            add("transfer-kind", "transfer id " + std::to_string(t) + " has wrong location kind");
    }
    for (std::size_t i = 0; i < n; ++i)
        if (inst.locations[i].kind == LocationKind::transfer && !listed[i])
            add("transfer-list", "location " + std::to_string(i) + " has transfer kind but is not listed in transfers");

    if (inst.travel.size() != n || inst.distance.size() != n) {
        add("matrix", "matrix dimension mismatch");
        return out;
    }
    const double v = speed_hm_per_min(inst.meta.speed_kmh);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double c = inst.distance(i, j);
            const double t = inst.travel(i, j);
            if (c < 0.0 || t < 0.0) {
                add("matrix", "negative entry at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                return out;
            }
            if (i == j && (c != 0.0 || t != 0.0)) {
                add("matrix", "nonzero diagonal at " + std::to_string(i));
                return out;
            }
            const double scale = std::max(1.0, std::abs(c));
            if (std::abs(t * v - c) > 1e-9 * scale) {
                add("matrix", "t*speed != c at (" + std::to_string(i) + "," + std::to_string(j) + ")");
                return out;
            }
        }
    }
    return out;
}

namespace {

const ordered_json& need(const ordered_json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end()) throw std::runtime_error(std::string("instance: missing field '") + key + "' in " + where);
    return *it;
}

DenseMatrix matrix_from_json(const ordered_json& arr, std::size_t n, const char* name) {
    if (!arr.is_array() || arr.size() != n * n)
        throw std::runtime_error(std::string("instance: field 'matrices.") + name + "' must hold " +
                                 std::to_string(n * n) + " values");
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n * n; ++i) m.raw()[i] = arr[i].get<double>();
    return m;
}

}  // namespace

Instance instance_from_json_string(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("instance: not valid JSON: ") + e.what());
    }

    Instance inst;
    const auto& meta = need(j, "meta", "document");
    inst.meta.name = need(meta, "name", "meta").get<std::string>();
    const std::string metric = need(meta, "metric", "meta").get<std::string>();
    if (metric == "haversine") inst.meta.metric = Metric::haversine;
    else if (metric == "euclidean") inst.meta.metric = Metric::euclidean;
    else throw std::runtime_error("instance: field 'meta.metric' must be haversine or euclidean");
    inst.meta.speed_kmh = need(meta, "speed_kmh", "meta").get<double>();
    inst.meta.horizon = need(meta, "horizon", "meta").get<double>();
    inst.meta.seed = meta.value("seed", 0ULL);
    if (inst.meta.speed_kmh <= 0.0) throw std::runtime_error("instance: field 'meta.speed_kmh' must be positive");

    for (const auto& lj : need(j, "locations", "document")) {
        Location l;
        l.id = need(lj, "id", "locations[]").get<int>();
        l.kind = location_kind_from_string(need(lj, "kind", "locations[]").get<std::string>());
        l.x = need(lj, "x", "locations[]").get<double>();
        l.y = need(lj, "y", "locations[]").get<double>();
        const auto& tw = need(lj, "tw", "locations[]");
        if (!tw.is_array() || tw.size() != 2) throw std::runtime_error("instance: field 'tw' must be [l, u]");
        l.tw_open = tw[0].get<double>();
        l.tw_close = tw[1].get<double>();
        l.service = need(lj, "service", "locations[]").get<double>();
        inst.locations.push_back(l);
    }
    for (const auto& rj : need(j, "requests", "document")) {
        Request r;
        r.id = need(rj, "id", "requests[]").get<int>();
        r.pickup = need(rj, "pickup", "requests[]").get<int>();
        r.delivery = need(rj, "delivery", "requests[]").get<int>();
        r.demand = need(rj, "qty", "requests[]").get<double>();
        inst.requests.push_back(r);
    }
    for (const auto& vj : need(j, "vehicles", "document")) {
        Vehicle v;
        v.id = need(vj, "id", "vehicles[]").get<int>();
        v.origin = need(vj, "origin", "vehicles[]").get<int>();
        v.destination = need(vj, "destination", "vehicles[]").get<int>();
        v.capacity = need(vj, "capacity", "vehicles[]").get<double>();
        inst.vehicles.push_back(v);
    }
    for (const auto& tj : need(j, "transfers", "document")) inst.transfer_ids.push_back(tj.get<int>());

    if (j.contains("matrices")) {
        const auto& mj = j["matrices"];
        const std::size_t n = inst.locations.size();
        inst.travel = matrix_from_json(need(mj, "travel", "matrices"), n, "travel");
        inst.distance = matrix_from_json(need(mj, "distance", "matrices"), n, "distance");
        inst.matrices_explicit = true;
    } else {
        inst.rebuild_matrices();
    }

    auto report = validate_instance(inst);
    if (!report.empty()) {
        std::ostringstream oss;
        oss << "instance: validation failed with " << report.size() << " breach(es):";
        for (const auto& v : report) oss << "\n  [" << v.code << "] " << v.message;
        throw std::runtime_error(oss.str());
    }
    return inst;
}

std::string instance_to_json_string(const Instance& inst) {
    ordered_json j;
    j["meta"] = {{"name", inst.meta.name},
                 {"metric", inst.meta.metric == Metric::haversine ? "haversine" : "euclidean"},
                 {"speed_kmh", inst.meta.speed_kmh},
                 {"horizon", inst.meta.horizon},
                 {"seed", inst.meta.seed}};
    j["locations"] = ordered_json::array();
    for (const auto& l : inst.locations)
        j["locations"].push_back({{"id", l.id},
                                  {"kind", to_string(l.kind)},
                                  {"x", l.x},
                                  {"y", l.y},
                                  {"tw", {l.tw_open, l.tw_close}},
                                  {"service", l.service}});
    j["requests"] = ordered_json::array();
    for (const auto& r : inst.requests)
        j["requests"].push_back({{"id", r.id}, {"pickup", r.pickup}, {"delivery", r.delivery}, {"qty", r.demand}});
    j["vehicles"] = ordered_json::array();
    for (const auto& v : inst.vehicles)
        j["vehicles"].push_back(
            {{"id", v.id}, {"origin", v.origin}, {"destination", v.destination}, {"capacity", v.capacity}});
    j["transfers"] = inst.transfer_ids;
    if (inst.matrices_explicit)
        j["matrices"] = {{"travel", inst.travel.raw()}, {"distance", inst.distance.raw()}};
    return j.dump(2) + "\n";
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("instance: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return instance_from_json_string(buf.str());
}

void save_instance(const Instance& inst, const std::string& path) {
    const std::string text = instance_to_json_string(inst);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("instance: cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("instance: I/O failure writing '" + path + "'");
}

}  // namespace pdpt
