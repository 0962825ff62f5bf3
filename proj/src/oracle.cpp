#include "pdpt/oracle.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>

namespace pdpt {

namespace {

struct Mode {
    bool transferred = false;
    int k1 = -1;
    int k2 = -1;
    int transfer = -1;
};

struct Task {
    int loc;
    StopAction action;
    int request;
    int precedes = -1;  // index of the task that must come later on this route
};

// All orderings of the route's tasks that respect precedences, keep loads
// within capacity, visit each location in one consecutive run, and pass a
// coupling-free earliest-start window check (a relaxation of the joint one).
std::vector<std::vector<int>> feasible_orders(const Instance& inst, const Vehicle& veh,
                                              const std::vector<Task>& tasks) {
    std::vector<std::vector<int>> result;
    const std::size_t n = tasks.size();
    std::vector<int> order;
    std::vector<char> used(n, 0);

    struct Frame {
        double load;
        double time;   // earliest service start of the last placed stop
        int last_loc;
    };
    std::vector<Frame> frames;
    const Location& origin = inst.loc(veh.origin);
    frames.push_back({0.0, origin.tw_open, veh.origin});

    auto rec = [&](auto&& self) -> void {
        if (order.size() == n) {
            const Frame& f = frames.back();
            const Location& dest = inst.loc(veh.destination);
            const double same = f.last_loc == veh.destination ? 0.0 : 1.0;
            const double arrive =
                same == 0.0 ? f.time : std::max(dest.tw_open, f.time + inst.leg_time(f.last_loc, veh.destination));
            if (arrive <= dest.tw_close + 1e-9) result.push_back(order);
            return;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            bool blocked = false;
            for (std::size_t j = 0; j < n; ++j)
                if (!used[j] && tasks[j].precedes == static_cast<int>(i)) blocked = true;
            if (blocked) continue;
            const Frame& f = frames.back();
            // One consecutive run per location: a revisit is only legal right
            // after a stop at the same place.
            if (tasks[i].loc != f.last_loc) {
                bool closed = false;
                for (int placed : order)
                    if (tasks[static_cast<std::size_t>(placed)].loc == tasks[i].loc) closed = true;
                if (closed) continue;
            }
            double load = f.load;
            switch (tasks[i].action) {
                case StopAction::pickup:
                case StopAction::transfer_pick: load += inst.requests[static_cast<std::size_t>(tasks[i].request)].demand; break;
                default: load -= inst.requests[static_cast<std::size_t>(tasks[i].request)].demand; break;
            }
            if (load < -1e-9 || load > veh.capacity + 1e-9) continue;
            const Location& loc = inst.loc(tasks[i].loc);
            double time;
            if (tasks[i].loc == f.last_loc)
                time = std::max(f.time, loc.tw_open);  // same visit, shared start
            else
                time = std::max(loc.tw_open, f.time + inst.leg_time(f.last_loc, tasks[i].loc));
            if (time > loc.tw_close + 1e-9) continue;
            used[i] = 1;
            order.push_back(static_cast<int>(i));
            frames.push_back({load, time, tasks[i].loc});
            self(self);
            frames.pop_back();
            order.pop_back();
            used[i] = 0;
        }
    };
    rec(rec);
    return result;
}

Solution assemble(const Instance& inst, const std::vector<Mode>& modes,
                  const std::vector<std::vector<Task>>& tasks,
                  const std::vector<const std::vector<int>*>& orders) {
    Solution sol = empty_solution(inst);
    for (std::size_t k = 0; k < inst.num_vehicles(); ++k) {
        auto& stops = sol.routes[k].stops;
        for (int idx : *orders[k]) {
            const Task& t = tasks[k][static_cast<std::size_t>(idx)];
            stops.insert(stops.end() - 1, {t.loc, t.action, t.request, 0.0, 0.0});
        }
    }
    for (std::size_t r = 0; r < inst.num_requests(); ++r) {
        const auto& req = inst.requests[r];
        Journey& j = sol.journeys[r];
        if (!modes[r].transferred) {
            j.legs = {{modes[r].k1, req.pickup, req.delivery}};
        } else {
            j.legs = {{modes[r].k1, req.pickup, modes[r].transfer},
                      {modes[r].k2, modes[r].transfer, req.delivery}};
            j.transfer_locs = {modes[r].transfer};
        }
    }
    sol.objective = evaluate(inst, sol);
    return sol;
}

}  // namespace

std::optional<Solution> exact_oracle_solve(const Instance& inst) {
    if (inst.num_requests() > OracleGuard::max_requests || inst.num_vehicles() > OracleGuard::max_vehicles ||
        inst.transfer_ids.size() > OracleGuard::max_transfers)
        throw std::invalid_argument("oracle: size guard exceeded (|R|<=5, |K|<=3, |T|<=2)");

    const std::size_t R = inst.num_requests();
    const std::size_t K = inst.num_vehicles();

    std::vector<Mode> mode_options;
    for (std::size_t k = 0; k < K; ++k) mode_options.push_back({false, static_cast<int>(k), -1, -1});
    for (int t : inst.transfer_ids)
        for (std::size_t k1 = 0; k1 < K; ++k1)
            for (std::size_t k2 = 0; k2 < K; ++k2)
                if (k1 != k2) mode_options.push_back({true, static_cast<int>(k1), static_cast<int>(k2), t});

    std::optional<Solution> best;
    double best_cost = std::numeric_limits<double>::infinity();

    // Orders are enumerated once per (vehicle, task multiset).
    std::map<std::pair<int, std::vector<std::tuple<int, int, int>>>, std::vector<std::vector<int>>> order_memo;

    std::vector<Mode> modes(R);
    auto eval_combo = [&]() {
        std::vector<std::vector<Task>> tasks(K);
        for (std::size_t r = 0; r < R; ++r) {
            const auto& req = inst.requests[r];
            const Mode& m = modes[r];
            auto& t1 = tasks[static_cast<std::size_t>(m.k1)];
            if (!m.transferred) {
                t1.push_back({req.pickup, StopAction::pickup, static_cast<int>(r), -1});
                t1.push_back({req.delivery, StopAction::deliver, static_cast<int>(r), -1});
                t1[t1.size() - 2].precedes = static_cast<int>(t1.size()) - 1;
            } else {
                t1.push_back({req.pickup, StopAction::pickup, static_cast<int>(r), -1});
                t1.push_back({m.transfer, StopAction::transfer_drop, static_cast<int>(r), -1});
                t1[t1.size() - 2].precedes = static_cast<int>(t1.size()) - 1;
                auto& t2 = tasks[static_cast<std::size_t>(m.k2)];
                t2.push_back({m.transfer, StopAction::transfer_pick, static_cast<int>(r), -1});
                t2.push_back({req.delivery, StopAction::deliver, static_cast<int>(r), -1});
                t2[t2.size() - 2].precedes = static_cast<int>(t2.size()) - 1;
            }
        }
        std::vector<const std::vector<std::vector<int>>*> order_sets(K);
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<std::tuple<int, int, int>> key;
            for (const auto& t : tasks[k]) key.emplace_back(t.loc, static_cast<int>(t.action), t.request);
            auto memo_key = std::make_pair(static_cast<int>(k), key);
            auto it = order_memo.find(memo_key);
            if (it == order_memo.end())
                it = order_memo.emplace(memo_key, feasible_orders(inst, inst.vehicles[k], tasks[k])).first;
            if (it->second.empty()) return;
            order_sets[k] = &it->second;
        }
        // Cross product with cost pruning; the joint schedule is the final say.
        std::vector<const std::vector<int>*> chosen(K);
        auto route_cost = [&](std::size_t k, const std::vector<int>& order) {
            double cost = 0.0;
            int last = inst.vehicles[k].origin;
            for (int idx : order) {
                cost += inst.dist(last, tasks[k][static_cast<std::size_t>(idx)].loc);
                last = tasks[k][static_cast<std::size_t>(idx)].loc;
            }
            return cost + inst.dist(last, inst.vehicles[k].destination);
        };
        auto rec = [&](auto&& self, std::size_t k, double cost_so_far) -> void {
            if (cost_so_far >= best_cost - 1e-12) return;
            if (k == K) {
                Solution sol = assemble(inst, modes, tasks, chosen);
                if (sol.objective >= best_cost - 1e-12) return;
                if (compute_schedule(inst, sol)) return;  // infeasible
                best_cost = sol.objective;
                best = std::move(sol);
                return;
            }
            for (const auto& order : *order_sets[k]) {
                chosen[k] = &order;
                self(self, k + 1, cost_so_far + route_cost(k, order));
            }
        };
        rec(rec, 0, 0.0);
    };

    auto sweep = [&](auto&& self, std::size_t r) -> void {
        if (r == R) {
            eval_combo();
            return;
        }
        for (const Mode& m : mode_options) {
            modes[r] = m;
            self(self, r + 1);
        }
    };
    sweep(sweep, 0);
    return best;
}

}  // namespace pdpt
