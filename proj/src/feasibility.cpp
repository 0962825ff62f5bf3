#include "pdpt/feasibility.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pdpt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = 1e-9;    // feasibility slack, shared with compute_schedule
constexpr double kTiny = 1e-12;  // propagation threshold
}  // namespace

void RangeTable::build(const std::vector<double>& values, bool maximum) {
    maximum_ = maximum;
    levels_.clear();
    levels_.push_back(values);
    std::size_t span = 1;
    while (span * 2 <= values.size()) {
        const auto& prev = levels_.back();
        std::vector<double> next(values.size() - span * 2 + 1);
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = maximum_ ? std::max(prev[i], prev[i + span]) : std::min(prev[i], prev[i + span]);
        levels_.push_back(std::move(next));
        span *= 2;
    }
}

double RangeTable::query(int lo, int hi) const {
    if (lo > hi) return maximum_ ? -kInf : kInf;
    const unsigned len = static_cast<unsigned>(hi - lo + 1);
    unsigned level = 0;
    while ((2u << level) <= len) ++level;
    const std::size_t span = 1u << level;
    const double a = levels_[level][static_cast<std::size_t>(lo)];
    const double b = levels_[level][static_cast<std::size_t>(hi) - span + 1];
    return maximum_ ? std::max(a, b) : std::min(a, b);
}

FeasibilityCache::FeasibilityCache(const Instance& inst, const Solution& sol) { rebuild(inst, sol); }

void FeasibilityCache::collect_couplings(const Solution& sol) {
    couplings_.clear();
    partners_.assign(sol.routes.size(), {});
    for (auto& rd : routes_) rd.coupling_stops = 0;
    for (const auto& journey : sol.journeys) {
        if (journey.legs.size() < 2) continue;
        const RequestStops refs = find_request_stops(sol, journey.request);
        for (std::size_t leg = 0; leg + 1 < journey.legs.size(); ++leg) {
            const auto& drop = refs.refs[1 + 2 * leg];
            const auto& pick = refs.refs[2 + 2 * leg];
            if (drop.index < 0 || pick.index < 0)
                throw std::logic_error("feasibility cache: journey stops missing for request " +
                                       std::to_string(journey.request));
            couplings_.push_back({drop.vehicle, drop.index, pick.vehicle, pick.index});
            partners_[static_cast<std::size_t>(drop.vehicle)].push_back(pick.vehicle);
            partners_[static_cast<std::size_t>(pick.vehicle)].push_back(drop.vehicle);
            ++routes_[static_cast<std::size_t>(drop.vehicle)].coupling_stops;
            ++routes_[static_cast<std::size_t>(pick.vehicle)].coupling_stops;
        }
    }
}

bool FeasibilityCache::forward_pass(const Instance& inst, const Solution& sol, int k) {
    auto& rd = routes_[static_cast<std::size_t>(k)];
    const auto& stops = sol.routes[static_cast<std::size_t>(k)].stops;
    for (std::size_t i = 0; i < stops.size(); ++i) rd.lb_in[i] = inst.loc(stops[i].loc).tw_open;
    for (const auto& c : couplings_) {
        if (c.pick_vehicle != k) continue;
        const double partner = routes_[static_cast<std::size_t>(c.drop_vehicle)].forward[static_cast<std::size_t>(c.drop_index)];
        auto& lb = rd.lb_in[static_cast<std::size_t>(c.pick_index)];
        lb = std::max(lb, partner);
    }
    bool changed = false;
    double prev = -kInf;
    for (std::size_t i = 0; i < stops.size(); ++i) {
        double f = rd.lb_in[i];
        if (i > 0) f = std::max(f, prev + inst.leg_time(stops[i - 1].loc, stops[i].loc));
        if (std::abs(f - rd.forward[i]) > kTiny) changed = true;
        rd.forward[i] = f;
        prev = f;
    }
    return changed;
}

bool FeasibilityCache::backward_pass(const Instance& inst, const Solution& sol, int k) {
    auto& rd = routes_[static_cast<std::size_t>(k)];
    const auto& stops = sol.routes[static_cast<std::size_t>(k)].stops;
    for (std::size_t i = 0; i < stops.size(); ++i) rd.cap[i] = inst.loc(stops[i].loc).tw_close;
    for (const auto& c : couplings_) {
        if (c.drop_vehicle != k) continue;
        const double partner = routes_[static_cast<std::size_t>(c.pick_vehicle)].backward[static_cast<std::size_t>(c.pick_index)];
        auto& cap = rd.cap[static_cast<std::size_t>(c.drop_index)];
        cap = std::min(cap, partner);
    }
    bool changed = false;
    double next = kInf;
    for (std::size_t i = stops.size(); i-- > 0;) {
        double b = rd.cap[i];
        if (i + 1 < stops.size()) b = std::min(b, next - inst.leg_time(stops[i].loc, stops[i + 1].loc));
        if (std::abs(b - rd.backward[i]) > kTiny) changed = true;
        rd.backward[i] = b;
        next = b;
    }
    return changed;
}

void FeasibilityCache::rebuild(const Instance& inst, const Solution& sol) {
    routes_.assign(sol.routes.size(), {});
    std::vector<int> all(sol.routes.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
    refresh(inst, sol, all);
}

void FeasibilityCache::refresh(const Instance& inst, const Solution& sol, const std::vector<int>& changed_routes) {
    collect_couplings(sol);

    // Closure over the coupling graph: nothing outside the component of a
    // changed route can move.
    std::vector<char> in_comp(sol.routes.size(), 0);
    std::vector<int> comp;
    auto push = [&](int k) {
        if (!in_comp[static_cast<std::size_t>(k)]) {
            in_comp[static_cast<std::size_t>(k)] = 1;
            comp.push_back(k);
        }
    };
    for (int k : changed_routes) push(k);
    for (std::size_t head = 0; head < comp.size(); ++head)
        for (int p : partners_[static_cast<std::size_t>(comp[head])]) push(p);

    for (int k : comp) {
        auto& rd = routes_[static_cast<std::size_t>(k)];
        const auto& stops = sol.routes[static_cast<std::size_t>(k)].stops;
        const std::size_t n = stops.size();
        for (std::size_t i = 1; i < n; ++i)
            if (stops[i].loc == stops[i - 1].loc)
                throw std::logic_error("feasibility cache: block visits are not supported in search solutions");
        rd.forward.assign(n, -kInf);
        rd.backward.assign(n, kInf);
        rd.lb_in.assign(n, 0.0);
        rd.cap.assign(n, 0.0);
        rd.prefix_leg.assign(n, 0.0);
        for (std::size_t i = 1; i < n; ++i)
            rd.prefix_leg[i] = rd.prefix_leg[i - 1] + inst.leg_time(stops[i - 1].loc, stops[i].loc);
        rd.load_after.assign(n, 0.0);
        double load = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            switch (stops[i].action) {
                case StopAction::pickup:
                case StopAction::transfer_pick: load += inst.requests[static_cast<std::size_t>(stops[i].request)].demand; break;
                case StopAction::deliver:
                case StopAction::transfer_drop: load -= inst.requests[static_cast<std::size_t>(stops[i].request)].demand; break;
                default: break;
            }
            rd.load_after[i] = load;
        }
    }

    // Least fixpoint of the earliest starts, then greatest fixpoint of the
    // latest starts, both restricted to the component.
    std::vector<int> worklist = comp;
    std::size_t guard = (comp.size() + 2) * (couplings_.size() + 2) * 4 + 16;
    while (!worklist.empty()) {
        if (guard-- == 0) throw std::logic_error("feasibility cache: forward fixpoint did not converge");
        const int k = worklist.back();
        worklist.pop_back();
        if (forward_pass(inst, sol, k))
            for (const auto& c : couplings_)
                if (c.drop_vehicle == k && c.pick_vehicle != k) worklist.push_back(c.pick_vehicle);
    }
    worklist = comp;
    guard = (comp.size() + 2) * (couplings_.size() + 2) * 4 + 16;
    while (!worklist.empty()) {
        if (guard-- == 0) throw std::logic_error("feasibility cache: backward fixpoint did not converge");
        const int k = worklist.back();
        worklist.pop_back();
        if (backward_pass(inst, sol, k))
            for (const auto& c : couplings_)
                if (c.pick_vehicle == k && c.drop_vehicle != k) worklist.push_back(c.drop_vehicle);
    }

    for (int k : comp) {
        auto& rd = routes_[static_cast<std::size_t>(k)];
        const std::size_t n = rd.forward.size();
        std::vector<double> cap_minus(n), lb_minus(n);
        for (std::size_t i = 0; i < n; ++i) {
            cap_minus[i] = rd.cap[i] - rd.prefix_leg[i];
            lb_minus[i] = rd.lb_in[i] - rd.prefix_leg[i];
        }
        rd.cap_minus_leg_min.build(cap_minus, false);
        rd.lb_minus_leg_max.build(lb_minus, true);
        rd.load_max.build(rd.load_after, true);
    }
}

bool FeasibilityCache::consistent_with(const Instance& inst, const Solution& sol, double tol) const {
    FeasibilityCache fresh(inst, sol);
    for (std::size_t k = 0; k < routes_.size(); ++k) {
        const auto& a = routes_[k];
        const auto& b = fresh.routes_[k];
        if (a.forward.size() != b.forward.size()) return false;
        for (std::size_t i = 0; i < a.forward.size(); ++i) {
            if (std::abs(a.forward[i] - b.forward[i]) > tol) return false;
            if (std::abs(a.backward[i] - b.backward[i]) > tol) return false;
            if (std::abs(a.load_after[i] - b.load_after[i]) > tol) return false;
        }
    }
    return true;
}

std::vector<int> FeasibilityCache::coupling_component(int k1, int k2) const {
    std::vector<char> seen(routes_.size(), 0);
    std::vector<int> comp;
    auto push = [&](int k) {
        if (!seen[static_cast<std::size_t>(k)]) {
            seen[static_cast<std::size_t>(k)] = 1;
            comp.push_back(k);
        }
    };
    push(k1);
    push(k2);
    for (std::size_t head = 0; head < comp.size(); ++head)
        for (int p : partners_[static_cast<std::size_t>(comp[head])]) push(p);
    return comp;
}

namespace {

struct PairProbe {
    bool feasible = false;
    double second_start = 0.0;  // earliest service start of the second new stop
};

// Exact earliest-propagation check for inserting loc1 at gap gi and loc2 at
// gap gj (gi <= gj) into one route, using the cached fixpoint bounds.
PairProbe probe_pair(const Instance& inst, const FeasibilityCache::RouteData& rd, const Route& route, int loc1,
                     double extra_lb1, int gi, int loc2, int gj) {
    PairProbe out;
    const auto& stops = route.stops;
    const Location& L1 = inst.loc(loc1);
    const Location& L2 = inst.loc(loc2);
    const int prev = stops[static_cast<std::size_t>(gi - 1)].loc;

    double e1 = std::max({L1.tw_open, extra_lb1,
                          rd.forward[static_cast<std::size_t>(gi - 1)] + inst.leg_time(prev, loc1)});
    if (e1 > L1.tw_close + kEps) return out;

    double e2;
    if (gi == gj) {
        e2 = std::max(L2.tw_open, e1 + inst.leg_time(loc1, loc2));
    } else {
        const int at_i = stops[static_cast<std::size_t>(gi)].loc;
        const double tau_i = std::max(rd.lb_in[static_cast<std::size_t>(gi)], e1 + inst.leg_time(loc1, at_i));
        if (tau_i > rd.cap[static_cast<std::size_t>(gi)] + kEps) return out;
        // Shifted starts at stops (gi..gj-1] stay under their caps iff tau_i
        // clears the range minimum; window-driven components sit below the
        // cached forward values, which are below the caps already.
        if (gi + 1 <= gj - 1) {
            const double cap_room =
                rd.cap_minus_leg_min.query(gi + 1, gj - 1) + rd.prefix_leg[static_cast<std::size_t>(gi)];
            if (tau_i > cap_room + kEps) return out;
        }
        // Earliest start at stop gj-1: shifted chain vs. window resets after gi.
        double tau = tau_i + rd.prefix_leg[static_cast<std::size_t>(gj - 1)] - rd.prefix_leg[static_cast<std::size_t>(gi)];
        if (gi + 1 <= gj - 1)
            tau = std::max(tau, rd.lb_minus_leg_max.query(gi + 1, gj - 1) + rd.prefix_leg[static_cast<std::size_t>(gj - 1)]);
        e2 = std::max(L2.tw_open, tau + inst.leg_time(stops[static_cast<std::size_t>(gj - 1)].loc, loc2));
    }
    if (e2 > L2.tw_close + kEps) return out;

    const int resume = stops[static_cast<std::size_t>(gj)].loc;
    const double tau_j = std::max(rd.lb_in[static_cast<std::size_t>(gj)], e2 + inst.leg_time(loc2, resume));
    if (tau_j > rd.backward[static_cast<std::size_t>(gj)] + kEps) return out;

    out.feasible = true;
    out.second_start = e2;
    return out;
}

bool capacity_ok(const FeasibilityCache::RouteData& rd, double capacity, double q, int gi, int gj) {
    if (q > capacity + kEps) return false;
    if (rd.load_after[static_cast<std::size_t>(gi - 1)] + q > capacity + kEps) return false;
    if (gj > gi && rd.load_max.query(gi, gj - 1) + q > capacity + kEps) return false;
    return true;
}

int route_visits(const Route& route, int loc) {
    for (const auto& stop : route.stops)
        if (stop.loc == loc) return 1;
    return 0;
}

// Exact simulation of a transferred insertion over the coupling component of
// the two routes; used when cached bounds cannot treat the partner as fixed.
bool simulate_transfer(const Instance& inst, const Solution& sol, const FeasibilityCache& cache,
                       const InsertionCandidate& cand) {
    const std::vector<int> comp = cache.coupling_component(cand.k1, cand.k2);
    const double capacity = inst.fleet_capacity();

    struct VStop {
        int loc;
        double lb, ub;
        double delta_load;
    };
    std::vector<std::vector<VStop>> vroutes(comp.size());
    std::vector<int> comp_pos(sol.routes.size(), -1);
    for (std::size_t c = 0; c < comp.size(); ++c) comp_pos[static_cast<std::size_t>(comp[c])] = static_cast<int>(c);

    auto load_delta = [&](const Stop& s) -> double {
        switch (s.action) {
            case StopAction::pickup:
            case StopAction::transfer_pick: return inst.requests[static_cast<std::size_t>(s.request)].demand;
            case StopAction::deliver:
            case StopAction::transfer_drop: return -inst.requests[static_cast<std::size_t>(s.request)].demand;
            default: return 0.0;
        }
    };

    const double q = inst.requests[static_cast<std::size_t>(cand.request)].demand;
    for (std::size_t c = 0; c < comp.size(); ++c) {
        const int k = comp[c];
        const auto& stops = sol.routes[static_cast<std::size_t>(k)].stops;
        auto& vr = vroutes[c];
        for (std::size_t i = 0; i < stops.size(); ++i) {
            if (k == cand.k1 && static_cast<int>(i) == cand.pickup_gap)
                vr.push_back({inst.requests[static_cast<std::size_t>(cand.request)].pickup,
                              inst.loc(inst.requests[static_cast<std::size_t>(cand.request)].pickup).tw_open,
                              inst.loc(inst.requests[static_cast<std::size_t>(cand.request)].pickup).tw_close, q});
            if (k == cand.k1 && static_cast<int>(i) == cand.drop_gap)
                vr.push_back({cand.transfer_loc, inst.loc(cand.transfer_loc).tw_open, inst.loc(cand.transfer_loc).tw_close, -q});
            if (k == cand.k2 && static_cast<int>(i) == cand.pick_gap)
                vr.push_back({cand.transfer_loc, inst.loc(cand.transfer_loc).tw_open, inst.loc(cand.transfer_loc).tw_close, q});
            if (k == cand.k2 && static_cast<int>(i) == cand.delivery_gap)
                vr.push_back({inst.requests[static_cast<std::size_t>(cand.request)].delivery,
                              inst.loc(inst.requests[static_cast<std::size_t>(cand.request)].delivery).tw_open,
                              inst.loc(inst.requests[static_cast<std::size_t>(cand.request)].delivery).tw_close, -q});
            vr.push_back({stops[i].loc, inst.loc(stops[i].loc).tw_open, inst.loc(stops[i].loc).tw_close, load_delta(stops[i])});
        }
        double load = 0.0;
        for (const auto& vs : vr) {
            load += vs.delta_load;
            if (load < -kEps || load > capacity + kEps) return false;
        }
    }

    // Couplings with both endpoints in the component, with shifted indices,
    // plus the new drop -> pick edge.
    struct Edge {
        int c_from, i_from, c_to, i_to;
    };
    std::vector<Edge> edges;
    auto shifted = [&](int k, int idx) -> int {
        int s = idx;
        if (k == cand.k1) {
            if (idx >= cand.pickup_gap) ++s;
            if (idx >= cand.drop_gap) ++s;
        }
        if (k == cand.k2) {
            if (idx >= cand.pick_gap) ++s;
            if (idx >= cand.delivery_gap) ++s;
        }
        return s;
    };
    for (std::size_t r = 0; r < sol.journeys.size(); ++r) {
        const auto& journey = sol.journeys[r];
        if (journey.legs.size() < 2) continue;
        const RequestStops refs = find_request_stops(sol, static_cast<int>(r));
        for (std::size_t leg = 0; leg + 1 < journey.legs.size(); ++leg) {
            const auto& drop = refs.refs[1 + 2 * leg];
            const auto& pick = refs.refs[2 + 2 * leg];
            if (comp_pos[static_cast<std::size_t>(drop.vehicle)] < 0) continue;
            edges.push_back({comp_pos[static_cast<std::size_t>(drop.vehicle)], shifted(drop.vehicle, drop.index),
                             comp_pos[static_cast<std::size_t>(pick.vehicle)], shifted(pick.vehicle, pick.index)});
        }
    }
    const int drop_new = cand.drop_gap + 1;  // pickup inserted earlier in the same route
    const int pick_new = cand.pick_gap;
    edges.push_back({comp_pos[static_cast<std::size_t>(cand.k1)], drop_new, comp_pos[static_cast<std::size_t>(cand.k2)], pick_new});

    std::vector<std::vector<double>> a(comp.size());
    std::size_t total = 0;
    for (std::size_t c = 0; c < comp.size(); ++c) {
        a[c].resize(vroutes[c].size());
        for (std::size_t i = 0; i < a[c].size(); ++i) a[c][i] = vroutes[c][i].lb;
        total += a[c].size();
    }
    bool changed = true;
    std::size_t sweeps = 0;
    while (changed && sweeps < total + 2) {
        changed = false;
        ++sweeps;
        for (std::size_t c = 0; c < comp.size(); ++c) {
            for (std::size_t i = 1; i < a[c].size(); ++i) {
                const double reach = a[c][i - 1] + inst.leg_time(vroutes[c][i - 1].loc, vroutes[c][i].loc);
                if (reach > a[c][i] + kTiny) {
                    a[c][i] = reach;
                    changed = true;
                }
            }
        }
        for (const auto& e : edges) {
            const double v = a[static_cast<std::size_t>(e.c_from)][static_cast<std::size_t>(e.i_from)];
            auto& tgt = a[static_cast<std::size_t>(e.c_to)][static_cast<std::size_t>(e.i_to)];
            if (v > tgt + kTiny) {
                tgt = v;
                changed = true;
            }
        }
    }
    if (changed) return false;  // positive coupling cycle
    for (std::size_t c = 0; c < comp.size(); ++c)
        for (std::size_t i = 0; i < a[c].size(); ++i)
            if (a[c][i] > vroutes[c][i].ub + kEps) return false;
    return true;
}

}  // namespace

bool check_insertion_feasible(const Instance& inst, const Solution& sol, const FeasibilityCache& cache,
                              const InsertionCandidate& cand) {
    const double capacity = inst.fleet_capacity();
    const auto& req = inst.requests[static_cast<std::size_t>(cand.request)];
    if (!cand.transferred) {
        const auto& rd = cache.route(cand.k1);
        if (!capacity_ok(rd, capacity, req.demand, cand.pickup_gap, cand.delivery_gap)) return false;
        return probe_pair(inst, rd, sol.routes[static_cast<std::size_t>(cand.k1)], req.pickup, -kInf, cand.pickup_gap,
                          req.delivery, cand.delivery_gap)
            .feasible;
    }
    const auto& rd1 = cache.route(cand.k1);
    const auto& rd2 = cache.route(cand.k2);
    if (!capacity_ok(rd1, capacity, req.demand, cand.pickup_gap, cand.drop_gap)) return false;
    if (!capacity_ok(rd2, capacity, req.demand, cand.pick_gap, cand.delivery_gap)) return false;
    if (rd1.coupling_stops == 0 && rd2.coupling_stops == 0) {
        const PairProbe first = probe_pair(inst, rd1, sol.routes[static_cast<std::size_t>(cand.k1)], req.pickup, -kInf,
                                           cand.pickup_gap, cand.transfer_loc, cand.drop_gap);
        if (!first.feasible) return false;
        return probe_pair(inst, rd2, sol.routes[static_cast<std::size_t>(cand.k2)], cand.transfer_loc,
                          first.second_start, cand.pick_gap, req.delivery, cand.delivery_gap)
            .feasible;
    }
    return simulate_transfer(inst, sol, cache, cand);
}

void for_each_insertion(const Instance& inst, const Solution& sol, int request,
                        const std::function<void(const InsertionCandidate&)>& fn) {
    const auto& req = inst.requests[static_cast<std::size_t>(request)];
    auto pair_delta = [&](const Route& route, int loc1, int gi, int loc2, int gj) {
        const auto& stops = route.stops;
        if (gi == gj) {
            const int a = stops[static_cast<std::size_t>(gi - 1)].loc;
            const int b = stops[static_cast<std::size_t>(gi)].loc;
            return inst.dist(a, loc1) + inst.dist(loc1, loc2) + inst.dist(loc2, b) - inst.dist(a, b);
        }
        const int a1 = stops[static_cast<std::size_t>(gi - 1)].loc;
        const int b1 = stops[static_cast<std::size_t>(gi)].loc;
        const int a2 = stops[static_cast<std::size_t>(gj - 1)].loc;
        const int b2 = stops[static_cast<std::size_t>(gj)].loc;
        return inst.dist(a1, loc1) + inst.dist(loc1, b1) - inst.dist(a1, b1) + inst.dist(a2, loc2) +
               inst.dist(loc2, b2) - inst.dist(a2, b2);
    };

    InsertionCandidate cand;
    cand.request = request;
    for (std::size_t k = 0; k < sol.routes.size(); ++k) {
        const auto& route = sol.routes[k];
        const int gaps = static_cast<int>(route.stops.size()) - 1;
        cand.transferred = false;
        cand.k1 = static_cast<int>(k);
        cand.k2 = -1;
        cand.transfer_loc = -1;
        cand.drop_gap = cand.pick_gap = -1;
        for (int gi = 1; gi <= gaps; ++gi)
            for (int gj = gi; gj <= gaps; ++gj) {
                cand.pickup_gap = gi;
                cand.delivery_gap = gj;
                cand.delta = pair_delta(route, req.pickup, gi, req.delivery, gj);
                fn(cand);
            }
    }
    for (int t : inst.transfer_ids) {
        for (std::size_t k1 = 0; k1 < sol.routes.size(); ++k1) {
            if (route_visits(sol.routes[k1], t)) continue;
            const int gaps1 = static_cast<int>(sol.routes[k1].stops.size()) - 1;
            for (std::size_t k2 = 0; k2 < sol.routes.size(); ++k2) {
                if (k1 == k2 || route_visits(sol.routes[k2], t)) continue;
                const int gaps2 = static_cast<int>(sol.routes[k2].stops.size()) - 1;
                cand.transferred = true;
                cand.k1 = static_cast<int>(k1);
                cand.k2 = static_cast<int>(k2);
                cand.transfer_loc = t;
                for (int i1 = 1; i1 <= gaps1; ++i1)
                    for (int j1 = i1; j1 <= gaps1; ++j1) {
                        const double d1 = pair_delta(sol.routes[k1], req.pickup, i1, t, j1);
                        for (int i2 = 1; i2 <= gaps2; ++i2)
                            for (int j2 = i2; j2 <= gaps2; ++j2) {
                                cand.pickup_gap = i1;
                                cand.drop_gap = j1;
                                cand.pick_gap = i2;
                                cand.delivery_gap = j2;
                                cand.delta = d1 + pair_delta(sol.routes[k2], t, i2, req.delivery, j2);
                                fn(cand);
                            }
                    }
            }
        }
    }
}

std::vector<InsertionCandidate> enumerate_insertions(const Instance& inst, const Solution& sol,
                                                     const FeasibilityCache& cache, int request) {
    (void)cache;
    std::vector<InsertionCandidate> out;
    for_each_insertion(inst, sol, request, [&](const InsertionCandidate& c) { out.push_back(c); });
    return out;
}

void apply_insertion(const Instance& inst, Solution& sol, FeasibilityCache& cache, const InsertionCandidate& cand) {
    if (!check_insertion_feasible(inst, sol, cache, cand))
        throw std::logic_error("apply_insertion: candidate is not feasible");
    const auto& req = inst.requests[static_cast<std::size_t>(cand.request)];
    Journey& journey = sol.journeys[static_cast<std::size_t>(cand.request)];
    if (journey.served()) throw std::logic_error("apply_insertion: request already served");

    auto insert_stop = [](Route& route, int gap, Stop stop) {
        route.stops.insert(route.stops.begin() + gap, stop);
    };
    if (!cand.transferred) {
        auto& route = sol.routes[static_cast<std::size_t>(cand.k1)];
        insert_stop(route, cand.pickup_gap, {req.pickup, StopAction::pickup, cand.request, 0.0, 0.0});
        insert_stop(route, cand.delivery_gap + 1, {req.delivery, StopAction::deliver, cand.request, 0.0, 0.0});
        journey.legs = {{cand.k1, req.pickup, req.delivery}};
        journey.transfer_locs.clear();
    } else {
        auto& r1 = sol.routes[static_cast<std::size_t>(cand.k1)];
        insert_stop(r1, cand.pickup_gap, {req.pickup, StopAction::pickup, cand.request, 0.0, 0.0});
        insert_stop(r1, cand.drop_gap + 1, {cand.transfer_loc, StopAction::transfer_drop, cand.request, 0.0, 0.0});
        auto& r2 = sol.routes[static_cast<std::size_t>(cand.k2)];
        insert_stop(r2, cand.pick_gap, {cand.transfer_loc, StopAction::transfer_pick, cand.request, 0.0, 0.0});
        insert_stop(r2, cand.delivery_gap + 1, {req.delivery, StopAction::deliver, cand.request, 0.0, 0.0});
        journey.legs = {{cand.k1, req.pickup, cand.transfer_loc}, {cand.k2, cand.transfer_loc, req.delivery}};
        journey.transfer_locs = {cand.transfer_loc};
    }
    sol.objective += cand.delta;
    sol.schedule_valid = false;
    recompute_loads(inst, sol);
    if (cand.transferred)
        cache.refresh(inst, sol, {cand.k1, cand.k2});
    else
        cache.refresh(inst, sol, {cand.k1});
}

double removal_gain(const Instance& inst, const Solution& sol, int request) {
    const RequestStops refs = find_request_stops(sol, request);
    double gain = 0.0;
    std::vector<int> touched;
    for (const auto& ref : refs.refs)
        if (std::find(touched.begin(), touched.end(), ref.vehicle) == touched.end()) touched.push_back(ref.vehicle);
    for (int k : touched) {
        const auto& stops = sol.routes[static_cast<std::size_t>(k)].stops;
        double before = 0.0, after = 0.0;
        int prev_kept = -1;
        for (std::size_t i = 0; i + 1 < stops.size(); ++i) before += inst.dist(stops[i].loc, stops[i + 1].loc);
        for (std::size_t i = 0; i < stops.size(); ++i) {
            if (stops[i].request == request) continue;
            if (prev_kept >= 0) after += inst.dist(stops[static_cast<std::size_t>(prev_kept)].loc, stops[i].loc);
            prev_kept = static_cast<int>(i);
        }
        gain += before - after;
    }
    return gain;
}

void remove_requests(const Instance& inst, Solution& sol, FeasibilityCache& cache, const std::vector<int>& requests) {
    std::vector<int> touched;
    for (int r : requests) {
        if (r < 0 || r >= static_cast<int>(sol.journeys.size()))
            throw std::runtime_error("remove_requests: unknown request id " + std::to_string(r));
        Journey& journey = sol.journeys[static_cast<std::size_t>(r)];
        if (!journey.served())
            throw std::runtime_error("remove_requests: request " + std::to_string(r) + " is not served");
        sol.objective -= removal_gain(inst, sol, r);
        for (auto& route : sol.routes) {
            bool mine = false;
            for (const auto& stop : route.stops)
                if (stop.request == r) mine = true;
            if (!mine) continue;
            if (std::find(touched.begin(), touched.end(), route.vehicle) == touched.end())
                touched.push_back(route.vehicle);
            route.stops.erase(std::remove_if(route.stops.begin(), route.stops.end(),
                                             [&](const Stop& s) { return s.request == r; }),
                              route.stops.end());
        }
        journey.legs.clear();
        journey.transfer_locs.clear();
    }
    sol.schedule_valid = false;
    recompute_loads(inst, sol);
    cache.refresh(inst, sol, touched);
    for (int k : touched) {
        const auto& rd = cache.route(k);
        for (std::size_t i = 0; i < rd.forward.size(); ++i)
            if (rd.forward[i] > rd.backward[i] + kEps)
                throw std::logic_error("remove_requests: removal broke schedule feasibility");
    }
}

std::vector<int> served_requests(const Solution& sol) {
    std::vector<int> out;
    for (std::size_t r = 0; r < sol.journeys.size(); ++r)
        if (sol.journeys[r].served()) out.push_back(static_cast<int>(r));
    return out;
}

}  // namespace pdpt
