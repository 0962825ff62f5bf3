#include "pdpt/master.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pdpt {

namespace {

std::string edge_name(const char* stem, int i, int j) {
    return std::string(stem) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

}  // namespace

int MasterModel::y(int r, int i, int j) const {
    if (i == j) return -1;
    return y_[static_cast<std::size_t>((r * n_ + i) * n_ + j)];
}

int MasterModel::transfer_arrival(int r, int j) const { return b_[static_cast<std::size_t>(r * n_ + j)]; }

bool MasterModel::x_fixed_zero(int i, int j) const {
    const auto& v = model_.vars()[static_cast<std::size_t>(x(i, j))];
    return v.ub <= 0.5;
}

MasterModel::MasterModel(const Instance& inst) : inst_(&inst), n_(static_cast<int>(inst.num_locations())) {
    const int n = n_;
    const int R = static_cast<int>(inst.num_requests());
    std::vector<char> is_transfer(static_cast<std::size_t>(n), 0);
    for (int t : inst.transfer_ids) is_transfer[static_cast<std::size_t>(t)] = 1;
    std::vector<char> is_depot(static_cast<std::size_t>(n), 0);
    for (const auto& v : inst.vehicles) {
        is_depot[static_cast<std::size_t>(v.origin)] = 1;
        is_depot[static_cast<std::size_t>(v.destination)] = 1;
    }
    std::vector<char> is_demand(static_cast<std::size_t>(n), 0);
    for (const auto& r : inst.requests) {
        is_demand[static_cast<std::size_t>(r.pickup)] = 1;
        is_demand[static_cast<std::size_t>(r.delivery)] = 1;
    }

    double cost_sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cost_sum += inst.dist(i, j);

    z_ = model_.add_var("z", 0.0, cost_sum, VarKind::continuous);
    model_.set_objective_term(z_, 1.0);
    a_.assign(static_cast<std::size_t>(n), -1);
    for (int j = 0; j < n; ++j)
        if (!is_transfer[static_cast<std::size_t>(j)])
            a_[static_cast<std::size_t>(j)] =
                model_.add_var("a_" + std::to_string(j), inst.loc(j).tw_open, inst.loc(j).tw_close, VarKind::continuous);
    b_.assign(static_cast<std::size_t>(R * n), -1);
    for (int r = 0; r < R; ++r)
        for (int j = 0; j < n; ++j)
            if (is_transfer[static_cast<std::size_t>(j)])
                b_[static_cast<std::size_t>(r * n + j)] =
                    model_.add_var("b_" + std::to_string(r) + "_" + std::to_string(j), inst.loc(j).tw_open,
                                   inst.loc(j).tw_close, VarKind::continuous);

    // Trip variables, expensive edges first: the zero-first dive of the
    // builtin backend then eliminates costly trips before cheap ones.
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) edges.emplace_back(i, j);
    std::stable_sort(edges.begin(), edges.end(), [&](const auto& e1, const auto& e2) {
        const double c1 = inst.dist(e1.first, e1.second);
        const double c2 = inst.dist(e2.first, e2.second);
        if (c1 != c2) return c1 > c2;
        return e1 < e2;
    });
    x_.assign(static_cast<std::size_t>(n * n), -1);
    for (const auto& [i, j] : edges) x_[static_cast<std::size_t>(i * n + j)] = model_.add_binary(edge_name("x", i, j));
    y_.assign(static_cast<std::size_t>(R * n * n), -1);
    for (int r = 0; r < R; ++r)
        for (const auto& [i, j] : edges)
            if (i != j)
                y_[static_cast<std::size_t>((r * n + i) * n + j)] =
                    model_.add_binary("y_" + std::to_string(r) + "_" + std::to_string(i) + "_" + std::to_string(j));

    // Variable fixings: loops, delivery->own pickup, origin->delivery,
    // pickup->destination, origin->foreign destination, into origins, out of
    // destinations; requests never touch depots, never leave their delivery,
    // never re-enter their pickup.
    for (int j = 0; j < n; ++j) model_.fix_var(x(j, j), 0.0);
    for (const auto& req : inst.requests) model_.fix_var(x(req.delivery, req.pickup), 0.0);
    for (const auto& veh : inst.vehicles) {
        for (const auto& req : inst.requests) {
            model_.fix_var(x(veh.origin, req.delivery), 0.0);
            model_.fix_var(x(req.pickup, veh.destination), 0.0);
        }
        for (const auto& other : inst.vehicles)
            if (other.id != veh.id) model_.fix_var(x(veh.origin, other.destination), 0.0);
        for (int j = 0; j < n; ++j) {
            model_.fix_var(x(j, veh.origin), 0.0);
            model_.fix_var(x(veh.destination, j), 0.0);
        }
    }
    for (int r = 0; r < R; ++r) {
        const auto& req = inst.requests[static_cast<std::size_t>(r)];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                if (is_depot[static_cast<std::size_t>(j)] || is_depot[static_cast<std::size_t>(i)])
                    model_.fix_var(y(r, i, j), 0.0);  // (v8) plus flow symmetry
                else if (i == req.delivery || j == req.pickup)
                    model_.fix_var(y(r, i, j), 0.0);  // (v9), (v10)
            }
        }
    }

    // z bounds the travelled distance.
    {
        std::vector<MilpTerm> terms{{z_, 1.0}};
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && !x_fixed_zero(i, j)) terms.push_back({x(i, j), -inst.dist(i, j)});
        model_.add_row("obj_link", std::move(terms), RowSense::ge, 0.0);
    }

    auto y_unfixed = [&](int r, int i, int j) {
        const int v = y(r, i, j);
        return v >= 0 && model_.vars()[static_cast<std::size_t>(v)].ub > 0.5;
    };

    for (int r = 0; r < R; ++r) {
        const auto& req = inst.requests[static_cast<std::size_t>(r)];
        {
            std::vector<MilpTerm> dep, arr;
            for (int j = 0; j < n; ++j) {
                if (y_unfixed(r, req.pickup, j)) dep.push_back({y(r, req.pickup, j), 1.0});
                if (y_unfixed(r, j, req.delivery)) arr.push_back({y(r, j, req.delivery), 1.0});
            }
            model_.add_row("leave_pickup_" + std::to_string(r), std::move(dep), RowSense::eq, 1.0);
            model_.add_row("reach_delivery_" + std::to_string(r), std::move(arr), RowSense::eq, 1.0);
        }
        for (int j = 0; j < n; ++j) {
            if (j == req.pickup || j == req.delivery) continue;
            std::vector<MilpTerm> in, flow;
            for (int i = 0; i < n; ++i) {
                if (y_unfixed(r, i, j)) {
                    in.push_back({y(r, i, j), 1.0});
                    flow.push_back({y(r, i, j), 1.0});
                }
                if (y_unfixed(r, j, i)) flow.push_back({y(r, j, i), -1.0});
            }
            if (!in.empty())
                model_.add_row("visit_once_" + std::to_string(r) + "_" + std::to_string(j), std::move(in), RowSense::le,
                               1.0);
            if (!flow.empty())
                model_.add_row("flow_" + std::to_string(r) + "_" + std::to_string(j), std::move(flow), RowSense::eq,
                               0.0);
        }
    }

    for (int j = 0; j < n; ++j) {
        if (is_demand[static_cast<std::size_t>(j)]) {
            std::vector<MilpTerm> in;
            for (int i = 0; i < n; ++i)
                if (!x_fixed_zero(i, j)) in.push_back({x(i, j), 1.0});
            model_.add_row("visit_" + std::to_string(j), std::move(in), RowSense::eq, 1.0);
        }
        if (!is_depot[static_cast<std::size_t>(j)]) {
            std::vector<MilpTerm> flow;
            for (int i = 0; i < n; ++i) {
                if (!x_fixed_zero(i, j)) flow.push_back({x(i, j), 1.0});
                if (!x_fixed_zero(j, i)) flow.push_back({x(j, i), -1.0});
            }
            model_.add_row("xflow_" + std::to_string(j), std::move(flow), RowSense::eq, 0.0);
        }
        if (is_transfer[static_cast<std::size_t>(j)]) {
            std::vector<MilpTerm> in;
            for (int i = 0; i < n; ++i)
                if (!x_fixed_zero(i, j)) in.push_back({x(i, j), 1.0});
            model_.add_row("transfer_cap_" + std::to_string(j), std::move(in), RowSense::le,
                           static_cast<double>(inst.num_vehicles()));
        }
    }
    for (const auto& veh : inst.vehicles) {
        std::vector<MilpTerm> out, in;
        for (int j = 0; j < n; ++j) {
            if (!x_fixed_zero(veh.origin, j)) out.push_back({x(veh.origin, j), 1.0});
            if (!x_fixed_zero(j, veh.destination)) in.push_back({x(j, veh.destination), 1.0});
        }
        model_.add_row("depart_" + std::to_string(veh.id), std::move(out), RowSense::eq, 1.0);
        model_.add_row("arrive_" + std::to_string(veh.id), std::move(in), RowSense::eq, 1.0);
    }

    // Capacity link: sum_r q_r y_rij <= Q x_ij.
    const double Q = inst.fleet_capacity();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            std::vector<MilpTerm> terms;
            for (int r = 0; r < R; ++r)
                if (y_unfixed(r, i, j)) terms.push_back({y(r, i, j), inst.requests[static_cast<std::size_t>(r)].demand});
            if (terms.empty()) continue;
            if (!x_fixed_zero(i, j)) terms.push_back({x(i, j), -Q});
            model_.add_row("cap_" + edge_name("", i, j), std::move(terms), RowSense::le, 0.0);
        }
    }

    // Big-M service-start propagation along selected trips.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double big = inst.leg_time(i, j) + inst.loc(i).tw_close;
            const bool ti = is_transfer[static_cast<std::size_t>(i)];
            const bool tj = is_transfer[static_cast<std::size_t>(j)];
            if (!ti && !tj) {
                if (x_fixed_zero(i, j)) continue;
                model_.add_row("tw_" + edge_name("", i, j),
                               {{arrival(i), 1.0}, {arrival(j), -1.0}, {x(i, j), big}}, RowSense::le,
                               inst.loc(i).tw_close);
                continue;
            }
            for (int r = 0; r < R; ++r) {
                if (!y_unfixed(r, i, j)) continue;
                const int from = ti ? transfer_arrival(r, i) : arrival(i);
                const int to = tj ? transfer_arrival(r, j) : arrival(j);
                model_.add_row("tw_" + std::to_string(r) + "_" + edge_name("", i, j),
                               {{from, 1.0}, {to, -1.0}, {y(r, i, j), big}}, RowSense::le, inst.loc(i).tw_close);
            }
        }
    }
}

MasterModel build_master(const Instance& inst) { return MasterModel(inst); }

std::vector<double> warm_start_from(const Instance& inst, const MasterModel& master, const Solution& input) {
    Solution sol = input;
    if (!validate_solution(inst, sol).empty())
        throw std::runtime_error("warm start: input solution is infeasible");
    if (compute_schedule(inst, sol)) throw std::runtime_error("warm start: input solution has no schedule");
    for (const auto& route : sol.routes)
        for (std::size_t i = 1; i < route.stops.size(); ++i)
            if (route.stops[i].loc == route.stops[i - 1].loc)
                throw std::runtime_error("warm start: block visits cannot be mapped onto trip variables");

    const auto& model = master.model();
    std::vector<double> xval(model.vars().size(), 0.0);
    for (std::size_t i = 0; i < model.vars().size(); ++i) xval[i] = model.vars()[i].lb;

    for (const auto& route : sol.routes)
        for (std::size_t i = 0; i + 1 < route.stops.size(); ++i)
            xval[static_cast<std::size_t>(master.x(route.stops[i].loc, route.stops[i + 1].loc))] = 1.0;

    std::vector<char> is_transfer(inst.num_locations(), 0);
    for (int t : inst.transfer_ids) is_transfer[static_cast<std::size_t>(t)] = 1;

    for (std::size_t j = 0; j < inst.num_locations(); ++j)
        if (!is_transfer[j]) {
            const int var = master.arrival(static_cast<int>(j));
            xval[static_cast<std::size_t>(var)] = inst.loc(static_cast<int>(j)).tw_open;
        }
    for (const auto& route : sol.routes)
        for (const auto& stop : route.stops)
            if (!is_transfer[static_cast<std::size_t>(stop.loc)])
                xval[static_cast<std::size_t>(master.arrival(stop.loc))] = stop.start_time;

    for (std::size_t r = 0; r < inst.num_requests(); ++r) {
        const Journey& j = sol.journeys[r];
        const RequestStops refs = find_request_stops(sol, static_cast<int>(r));
        std::size_t ref_pos = 0;
        for (std::size_t leg = 0; leg < j.legs.size(); ++leg) {
            const auto from_ref = refs.refs[ref_pos];
            const auto to_ref = refs.refs[ref_pos + 1];
            ref_pos += 2;
            const auto& stops = sol.routes[static_cast<std::size_t>(j.legs[leg].vehicle)].stops;
            for (int i = from_ref.index; i < to_ref.index; ++i)
                xval[static_cast<std::size_t>(
                    master.y(static_cast<int>(r), stops[static_cast<std::size_t>(i)].loc,
                             stops[static_cast<std::size_t>(i + 1)].loc))] = 1.0;
            // A request riding through someone else's transfer stop still
            // needs its per-request arrival there.
            for (int i = from_ref.index + 1; i < to_ref.index; ++i) {
                const auto& stop = stops[static_cast<std::size_t>(i)];
                if (is_transfer[static_cast<std::size_t>(stop.loc)])
                    xval[static_cast<std::size_t>(master.transfer_arrival(static_cast<int>(r), stop.loc))] =
                        stop.start_time;
            }
        }
        for (std::size_t leg = 0; leg + 1 < j.legs.size(); ++leg) {
            const int t = j.transfer_locs[leg];
            const auto pick_ref = refs.refs[2 + 2 * leg];
            const double pick_time =
                sol.routes[static_cast<std::size_t>(pick_ref.vehicle)].stops[static_cast<std::size_t>(pick_ref.index)].start_time;
            xval[static_cast<std::size_t>(master.transfer_arrival(static_cast<int>(r), t))] = pick_time;
        }
    }
    xval[static_cast<std::size_t>(master.z())] = sol.objective;

    const auto bad = model.check_assignment(xval, 1e-6);
    if (!bad.empty())
        throw std::runtime_error("warm start: assignment violates the master model: " + bad.front());
    return xval;
}

}  // namespace pdpt
