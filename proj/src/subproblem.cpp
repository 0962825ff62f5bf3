#include "pdpt/subproblem.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace pdpt {

MasterPaths extract_paths(const Instance& inst, const MasterModel& master, const std::vector<double>& assignment) {
    MasterPaths out;
    const int n = master.num_locations();
    std::set<std::pair<int, int>> edge_set;
    for (std::size_t r = 0; r < inst.num_requests(); ++r) {
        const auto& req = inst.requests[r];
        std::vector<int> path{req.pickup};
        int last = req.pickup;
        while (last != req.delivery) {
            if (path.size() > static_cast<std::size_t>(n))
                throw std::runtime_error("extract_paths: request " + std::to_string(r) + " walk does not terminate");
            int next = -1;
            for (int j = 0; j < n; ++j) {
                const int var = master.y(static_cast<int>(r), last, j);
                if (var >= 0 && assignment[static_cast<std::size_t>(var)] > 0.5) {
                    next = j;
                    break;
                }
            }
            if (next < 0)
                throw std::runtime_error("extract_paths: request " + std::to_string(r) + " has no outgoing trip from " +
                                         std::to_string(last));
            edge_set.emplace(last, next);
            path.push_back(next);
            last = next;
        }
        out.path.push_back(std::move(path));
    }
    std::vector<char> is_transfer(inst.num_locations(), 0);
    for (int t : inst.transfer_ids) is_transfer[static_cast<std::size_t>(t)] = 1;
    for (const auto& path : out.path) {
        std::vector<TransferTriple> triples;
        for (std::size_t i = 1; i + 1 < path.size(); ++i)
            if (is_transfer[static_cast<std::size_t>(path[i])])
                triples.push_back({path[i - 1], path[i], path[i + 1]});
        out.tau.push_back(std::move(triples));
    }
    out.edges.assign(edge_set.begin(), edge_set.end());
    return out;
}

SubproblemModel::SubproblemModel(const Instance& inst, const MasterPaths& paths) {
    n_ = static_cast<int>(inst.num_locations());
    nk_ = static_cast<int>(inst.num_vehicles());
    const int n = n_;
    const int K = nk_;

    a_.assign(static_cast<std::size_t>(n * K), -1);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < K; ++k)
            a_[static_cast<std::size_t>(j * K + k)] =
                model_.add_var("a_" + std::to_string(j) + "_" + std::to_string(k), inst.loc(j).tw_open,
                               inst.loc(j).tw_close, VarKind::continuous);

    std::set<std::pair<int, int>> forced(paths.edges.begin(), paths.edges.end());

    // Forced edges first (the vehicle assignment of the fixed paths is the
    // actual decision), then free edges expensive-first.
    std::vector<std::pair<int, int>> order(paths.edges.begin(), paths.edges.end());
    std::vector<std::pair<int, int>> free_edges;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && !forced.count({i, j})) free_edges.emplace_back(i, j);
    std::stable_sort(free_edges.begin(), free_edges.end(), [&](const auto& e1, const auto& e2) {
        const double c1 = inst.dist(e1.first, e1.second);
        const double c2 = inst.dist(e2.first, e2.second);
        if (c1 != c2) return c1 > c2;
        return e1 < e2;
    });
    order.insert(order.end(), free_edges.begin(), free_edges.end());

    x_.assign(static_cast<std::size_t>(n * n * K), -1);
    for (const auto& [i, j] : order)
        for (int k = 0; k < K; ++k) {
            const int var = model_.add_binary("x_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(k));
            x_[static_cast<std::size_t>((i * n + j) * K + k)] = var;
            model_.set_objective_term(var, inst.dist(i, j));
        }

    // Depot edge eliminations, mirroring the master's valid inequalities:
    // origins have no incoming trips, destinations no outgoing ones, and a
    // vehicle only touches its own depots. Without the latter a route could
    // dead-end in a foreign depot while a disconnected chain covers (s2).
    for (int k = 0; k < K; ++k) {
        const auto& veh = inst.vehicles[static_cast<std::size_t>(k)];
        for (const auto& other : inst.vehicles) {
            for (int j = 0; j < n; ++j) {
                if (j != other.origin) model_.fix_var(x(j, other.origin, k), 0.0);
                if (j != other.destination) model_.fix_var(x(other.destination, j, k), 0.0);
                if (other.id != veh.id) {
                    if (j != other.destination) model_.fix_var(x(j, other.destination, k), 0.0);
                    if (j != other.origin) model_.fix_var(x(other.origin, j, k), 0.0);
                }
            }
        }
    }

    auto unfixed = [&](int i, int j, int k) {
        if (i == j) return false;
        return model_.vars()[static_cast<std::size_t>(x(i, j, k))].ub > 0.5;
    };

    for (int k = 0; k < K; ++k) {
        const auto& veh = inst.vehicles[static_cast<std::size_t>(k)];
        std::vector<MilpTerm> out, in;
        for (int j = 0; j < n; ++j) {
            if (unfixed(veh.origin, j, k)) out.push_back({x(veh.origin, j, k), 1.0});
            if (unfixed(j, veh.destination, k)) in.push_back({x(j, veh.destination, k), 1.0});
        }
        model_.add_row("depart_" + std::to_string(k), std::move(out), RowSense::eq, 1.0);
        model_.add_row("arrive_" + std::to_string(k), std::move(in), RowSense::eq, 1.0);
    }

    std::vector<char> is_depot(static_cast<std::size_t>(n), 0);
    for (const auto& v : inst.vehicles) {
        is_depot[static_cast<std::size_t>(v.origin)] = 1;
        is_depot[static_cast<std::size_t>(v.destination)] = 1;
    }
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < n; ++j) {
            std::vector<MilpTerm> in;
            for (int i = 0; i < n; ++i)
                if (unfixed(i, j, k)) in.push_back({x(i, j, k), 1.0});
            if (!in.empty())
                model_.add_row("visit_" + std::to_string(j) + "_" + std::to_string(k), std::move(in), RowSense::le, 1.0);
            if (!is_depot[static_cast<std::size_t>(j)]) {
                std::vector<MilpTerm> flow;
                for (int i = 0; i < n; ++i) {
                    if (unfixed(i, j, k)) flow.push_back({x(i, j, k), 1.0});
                    if (unfixed(j, i, k)) flow.push_back({x(j, i, k), -1.0});
                }
                if (!flow.empty())
                    model_.add_row("flow_" + std::to_string(j) + "_" + std::to_string(k), std::move(flow), RowSense::eq,
                                   0.0);
            }
        }

    // Fleet-level coverage of pickups and deliveries.
    for (std::size_t r = 0; r < inst.num_requests(); ++r) {
        const auto& req = inst.requests[r];
        std::vector<MilpTerm> dep, arr;
        for (int k = 0; k < K; ++k)
            for (int j = 0; j < n; ++j) {
                if (unfixed(req.pickup, j, k)) dep.push_back({x(req.pickup, j, k), 1.0});
                if (unfixed(j, req.delivery, k)) arr.push_back({x(j, req.delivery, k), 1.0});
            }
        model_.add_row("cover_pickup_" + std::to_string(r), std::move(dep), RowSense::eq, 1.0);
        model_.add_row("cover_delivery_" + std::to_string(r), std::move(arr), RowSense::eq, 1.0);
    }

    for (std::size_t e = 0; e < paths.edges.size(); ++e) {
        const auto [i, j] = paths.edges[e];
        std::vector<MilpTerm> terms;
        for (int k = 0; k < K; ++k)
            if (unfixed(i, j, k)) terms.push_back({x(i, j, k), 1.0});
        model_.add_row("master_edge_" + std::to_string(i) + "_" + std::to_string(j), std::move(terms), RowSense::eq,
                       1.0);
    }

    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double big = inst.leg_time(i, j) + inst.loc(i).tw_close;
            for (int k = 0; k < K; ++k) {
                if (!unfixed(i, j, k)) continue;
                model_.add_row("tw_" + std::to_string(i) + "_" + std::to_string(j) + "_" + std::to_string(k),
                               {{arrival(i, k), 1.0}, {arrival(j, k), -1.0}, {x(i, j, k), big}}, RowSense::le,
                               inst.loc(i).tw_close);
            }
        }

    for (std::size_t r = 0; r < inst.num_requests(); ++r) {
        const auto& req = inst.requests[r];
        for (int k = 0; k < K; ++k)
            model_.add_row("precede_" + std::to_string(r) + "_" + std::to_string(k),
                           {{arrival(req.pickup, k), 1.0}, {arrival(req.delivery, k), -1.0}}, RowSense::le, 0.0);
    }

    for (std::size_t r = 0; r < paths.tau.size(); ++r)
        for (std::size_t ti = 0; ti < paths.tau[r].size(); ++ti) {
            const auto& triple = paths.tau[r][ti];
            const double u_t = inst.loc(triple.transfer).tw_close;
            for (int k = 0; k < K; ++k)
                for (int l = 0; l < K; ++l) {
                    if (k == l) continue;
                    if (!unfixed(triple.before, triple.transfer, k) || !unfixed(triple.transfer, triple.after, l))
                        continue;
                    model_.add_row("sync_" + std::to_string(r) + "_" + std::to_string(ti) + "_" + std::to_string(k) +
                                       "_" + std::to_string(l),
                                   {{arrival(triple.transfer, k), 1.0},
                                    {arrival(triple.transfer, l), -1.0},
                                    {x(triple.before, triple.transfer, k), u_t},
                                    {x(triple.transfer, triple.after, l), u_t}},
                                   RowSense::le, 2.0 * u_t);
                }
        }
}

SubproblemModel build_subproblem(const Instance& inst, const MasterPaths& paths) {
    return SubproblemModel(inst, paths);
}

Solution subproblem_solution(const Instance& inst, const MasterPaths& paths, const SubproblemModel& sub,
                             const std::vector<double>& assignment) {
    const int n = static_cast<int>(inst.num_locations());
    const int K = static_cast<int>(inst.num_vehicles());
    auto on = [&](int i, int j, int k) {
        const int var = sub.x(i, j, k);
        return var >= 0 && assignment[static_cast<std::size_t>(var)] > 0.5;
    };

    // Vehicle of each used edge (master edges have exactly one).
    std::map<std::pair<int, int>, int> edge_vehicle;
    int used_edges = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < K; ++k)
                if (i != j && on(i, j, k)) {
                    edge_vehicle[{i, j}] = k;
                    ++used_edges;
                }

    // Per-request legs: maximal same-vehicle runs of the path.
    struct LegSpan {
        int vehicle;
        std::vector<int> locs;
    };
    std::vector<std::vector<LegSpan>> legs(inst.num_requests());
    for (std::size_t r = 0; r < inst.num_requests(); ++r) {
        const auto& path = paths.path[r];
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            auto it = edge_vehicle.find({path[i], path[i + 1]});
            if (it == edge_vehicle.end())
                throw std::runtime_error("subproblem solution: master edge not assigned to any vehicle");
            if (legs[r].empty() || legs[r].back().vehicle != it->second)
                legs[r].push_back({it->second, {path[i], path[i + 1]}});
            else
                legs[r].back().locs.push_back(path[i + 1]);
        }
    }

    Solution sol = empty_solution(inst);
    int traversed = 0;
    for (int k = 0; k < K; ++k) {
        const auto& veh = inst.vehicles[static_cast<std::size_t>(k)];
        std::vector<int> walk{veh.origin};
        int cur = veh.origin;
        while (cur != veh.destination) {
            int next = -1;
            for (int j = 0; j < n; ++j)
                if (j != cur && on(cur, j, k)) {
                    next = j;
                    break;
                }
            if (next < 0) throw std::runtime_error("subproblem solution: route of vehicle " + std::to_string(k) + " breaks");
            ++traversed;
            walk.push_back(next);
            cur = next;
            if (walk.size() > static_cast<std::size_t>(n) + 1)
                throw std::runtime_error("subproblem solution: route of vehicle " + std::to_string(k) + " cycles");
        }
        auto& stops = sol.routes[static_cast<std::size_t>(k)].stops;
        stops.clear();
        stops.push_back({veh.origin, StopAction::start, -1, 0.0, 0.0});
        for (std::size_t w = 1; w + 1 < walk.size(); ++w) {
            const int loc = walk[w];
            std::vector<Stop> visit;
            for (std::size_t r = 0; r < inst.num_requests(); ++r) {
                for (std::size_t g = 0; g < legs[r].size(); ++g) {
                    const LegSpan& leg = legs[r][g];
                    if (leg.vehicle != k) continue;
                    if (leg.locs.back() == loc && g + 1 < legs[r].size())
                        visit.push_back({loc, StopAction::transfer_drop, static_cast<int>(r), 0.0, 0.0});
                    if (leg.locs.back() == loc && g + 1 == legs[r].size())
                        visit.push_back({loc, StopAction::deliver, static_cast<int>(r), 0.0, 0.0});
                }
            }
            for (std::size_t r = 0; r < inst.num_requests(); ++r) {
                for (std::size_t g = 0; g < legs[r].size(); ++g) {
                    const LegSpan& leg = legs[r][g];
                    if (leg.vehicle != k) continue;
                    if (leg.locs.front() == loc && g > 0)
                        visit.push_back({loc, StopAction::transfer_pick, static_cast<int>(r), 0.0, 0.0});
                    if (leg.locs.front() == loc && g == 0)
                        visit.push_back({loc, StopAction::pickup, static_cast<int>(r), 0.0, 0.0});
                }
            }
            if (visit.empty()) visit.push_back({loc, StopAction::via, -1, 0.0, 0.0});
            stops.insert(stops.end(), visit.begin(), visit.end());
        }
        stops.push_back({veh.destination, StopAction::end, -1, 0.0, 0.0});
    }
    if (traversed != used_edges)
        throw std::runtime_error("subproblem solution: unused trips remain (disconnected cycle)");

    for (std::size_t r = 0; r < inst.num_requests(); ++r) {
        Journey& j = sol.journeys[r];
        j.legs.clear();
        j.transfer_locs.clear();
        for (std::size_t g = 0; g < legs[r].size(); ++g) {
            j.legs.push_back({legs[r][g].vehicle, legs[r][g].locs.front(), legs[r][g].locs.back()});
            if (g + 1 < legs[r].size()) j.transfer_locs.push_back(legs[r][g].locs.back());
        }
    }
    sol.objective = evaluate(inst, sol);
    if (compute_schedule(inst, sol))
        throw std::runtime_error("subproblem solution: assignment admits no earliest schedule");
    return sol;
}

}  // namespace pdpt
