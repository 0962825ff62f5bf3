#include "pdpt/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace pdpt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string to_string(SearchMethod m) {
    switch (m) {
        case SearchMethod::rlns: return "rlns";
        case SearchMethod::ls: return "ls";
        case SearchMethod::multiop: return "multiop";
    }
    return "?";
}

SearchMethod search_method_from_string(const std::string& s) {
    if (s == "rlns") return SearchMethod::rlns;
    if (s == "ls") return SearchMethod::ls;
    if (s == "multiop") return SearchMethod::multiop;
    throw std::runtime_error("search: unknown method '" + s + "'");
}

SearchConfig search_config_from_json_string(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    SearchConfig cfg;
    if (j.contains("method")) cfg.method = search_method_from_string(j["method"].get<std::string>());
    cfg.lahc_list_size = j.value("lahc_list_size", cfg.lahc_list_size);
    if (j.contains("destroy_range")) {
        cfg.destroy_min = j["destroy_range"][0].get<int>();
        cfg.destroy_max = j["destroy_range"][1].get<int>();
    }
    cfg.blink = j.value("blink", cfg.blink);
    if (j.contains("shaw_theta")) {
        cfg.shaw_theta1 = j["shaw_theta"][0].get<double>();
        cfg.shaw_theta2 = j["shaw_theta"][1].get<double>();
        cfg.shaw_theta3 = j["shaw_theta"][2].get<double>();
    }
    cfg.worst_scale = j.value("worst_scale", cfg.worst_scale);
    cfg.alns_alpha = j.value("alns_alpha", cfg.alns_alpha);
    cfg.reward_best = j.value("reward_best", cfg.reward_best);
    cfg.reward_accept = j.value("reward_accept", cfg.reward_accept);
    cfg.patience = j.value("patience", cfg.patience);
    cfg.restarts = j.value("restarts", cfg.restarts);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
    return cfg;
}

std::string search_config_to_json_string(const SearchConfig& cfg) {
    nlohmann::ordered_json j;
    j["method"] = to_string(cfg.method);
    j["lahc_list_size"] = cfg.lahc_list_size;
    j["destroy_range"] = {cfg.destroy_min, cfg.destroy_max};
    j["blink"] = cfg.blink;
    j["shaw_theta"] = {cfg.shaw_theta1, cfg.shaw_theta2, cfg.shaw_theta3};
    j["worst_scale"] = cfg.worst_scale;
    j["alns_alpha"] = cfg.alns_alpha;
    j["reward_best"] = cfg.reward_best;
    j["reward_accept"] = cfg.reward_accept;
    j["patience"] = cfg.patience;
    j["restarts"] = cfg.restarts;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["max_iterations"] = cfg.max_iterations;
    return j.dump(2) + "\n";
}

namespace {

std::vector<int> order_by_scores_desc(const std::vector<int>& ids, const std::vector<double>& score) {
    std::vector<int> out = ids;
    std::stable_sort(out.begin(), out.end(), [&](int a, int b) {
        const double sa = score[static_cast<std::size_t>(a)];
        const double sb = score[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    });
    return out;
}

struct RestartOutcome {
    bool ok = false;
    Solution best;
    double best_cost = kInf;
    std::vector<TraceRow> trace;
    double time_s = 0.0;
};

struct MethodContext {
    const RequestFeatureSpace* features = nullptr;
    std::vector<double> difficulty;
    std::vector<double> ease;
};

RestartOutcome run_restart(const Instance& inst, const SearchConfig& cfg, const MethodContext& ctx, int restart) {
    const auto t0 = std::chrono::steady_clock::now();
    RestartOutcome out;
    Rng rng(cfg.seed, static_cast<std::uint64_t>(restart));

    auto initial = construct_initial(inst, rng, restart == 0);
    if (!initial) return out;
    Solution sol = std::move(*initial);
    FeasibilityCache cache(inst, sol);

    double cost = sol.objective;
    out.best = sol;
    out.best_cost = cost;
    out.ok = true;

    DissimilarityFn mahal = [&](int a, int b) { return ctx.features->mahalanobis(a, b); };
    DissimilarityFn shaw = [&](int a, int b) {
        return shaw_dissimilarity(inst, a, b, cfg.shaw_theta1, cfg.shaw_theta2, cfg.shaw_theta3);
    };

    // MULTI-OP keeps independent destroy and repair banks; the other methods
    // use a single fixed pair.
    std::optional<OperatorBank> destroy_bank;
    std::optional<OperatorBank> repair_bank;
    if (cfg.method == SearchMethod::multiop) {
        destroy_bank.emplace(std::vector<std::string>{"random", "worst", "related"}, cfg.alns_alpha, cfg.reward_best,
                             cfg.reward_accept);
        repair_bank.emplace(std::vector<std::string>{"random-order", "difficulty-order"}, cfg.alns_alpha,
                            cfg.reward_best, cfg.reward_accept);
    }

    LahcRing ring(static_cast<std::size_t>(cfg.lahc_list_size), cost);
    std::uint64_t v = 0;
    int stall = 0;
    while (stall < cfg.patience) {
        if (cfg.max_iterations && v >= cfg.max_iterations) break;
        Solution cand = sol;
        FeasibilityCache cand_cache = cache;
        const int served = static_cast<int>(served_requests(cand).size());
        int n = rng.uniform_int(cfg.destroy_min, cfg.destroy_max);
        n = std::min(n, served);

        int destroy_op = 2;  // related
        int repair_op = 1;   // difficulty order
        if (cfg.method == SearchMethod::multiop) {
            destroy_op = destroy_bank->select(rng);
            repair_op = repair_bank->select(rng);
        }
        std::vector<int> removed;
        switch (destroy_op) {
            case 0: removed = random_removal(inst, cand, cand_cache, n, rng); break;
            case 1: removed = worst_removal(inst, cand, cand_cache, n, cfg.worst_scale, rng); break;
            default:
                removed = related_removal(inst, cand, cand_cache, n,
                                          cfg.method == SearchMethod::ls ? shaw : mahal, rng);
        }

        std::vector<int> order;
        if (cfg.method == SearchMethod::ls) {
            order = order_by_scores_desc(removed, ctx.ease);
        } else if (repair_op == 0) {
            order = removed;
            rng.shuffle(order);
        } else {
            order = order_by_scores_desc(removed, ctx.difficulty);
        }

        const bool repaired = repair(inst, cand, cand_cache, order, cfg.blink, rng);
        if (!repaired) {
            ++stall;
            out.trace.push_back({restart, v, cost, false, out.best_cost});
            ++v;
            if (cfg.method == SearchMethod::multiop) {
                destroy_bank->end_iteration();
                repair_bank->end_iteration();
            }
            continue;
        }
        const double cand_cost = cand.objective;
        const bool accepted = ring.accept(cost, cand_cost, v);
        const bool new_best = cand_cost < out.best_cost - 1e-9;
        if (accepted) {
            sol = std::move(cand);
            cache = std::move(cand_cache);
            cost = cand_cost;
        }
        if (new_best) {
            out.best = sol;  // only reachable when accepted: cand_cost < cost
            out.best_cost = cand_cost;
            stall = 0;
        } else {
            ++stall;
        }
        if (cfg.method == SearchMethod::multiop) {
            destroy_bank->record(destroy_op, accepted, new_best);
            repair_bank->record(repair_op, accepted, new_best);
            destroy_bank->end_iteration();
            repair_bank->end_iteration();
        }
        out.trace.push_back({restart, v, cand_cost, accepted, out.best_cost});
        ++v;
    }
    compute_schedule(inst, out.best);
    out.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace

std::optional<Solution> construct_initial(const Instance& inst, Rng& rng, bool deterministic_first) {
    const std::vector<double> difficulty = insertion_difficulty(inst);
    std::vector<int> all(inst.num_requests());
    for (std::size_t r = 0; r < all.size(); ++r) all[r] = static_cast<int>(r);

    for (int attempt = 0; attempt <= 20; ++attempt) {
        std::vector<int> order;
        if (attempt == (deterministic_first ? 0 : 20)) {
            order = order_by_scores_desc(all, difficulty);
        } else {
            order = all;
            rng.shuffle(order);
        }
        Solution sol = empty_solution(inst);
        FeasibilityCache cache(inst, sol);
        if (repair(inst, sol, cache, order, 0.0, rng)) {
            compute_schedule(inst, sol);
            return sol;
        }
    }
    return std::nullopt;
}

SearchResult run_search(const Instance& inst, const SearchConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.destroy_min < 1 || cfg.destroy_max < cfg.destroy_min || cfg.lahc_list_size < 1 || cfg.blink < 0.0 ||
        cfg.blink >= 1.0 || cfg.restarts < 1)
        throw std::invalid_argument("search: invalid configuration");

    MethodContext ctx;
    RequestFeatureSpace features(inst);
    ctx.features = &features;
    ctx.difficulty = insertion_difficulty(inst);
    ctx.ease.resize(inst.num_requests());
    for (std::size_t r = 0; r < inst.num_requests(); ++r)
        ctx.ease[r] = insertion_ease(inst, static_cast<int>(r), cfg.shaw_theta1, cfg.shaw_theta2, cfg.shaw_theta3);

    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(cfg.restarts));
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, cfg.restarts));
    if (threads == 1) {
        for (int r = 0; r < cfg.restarts; ++r) outcomes[static_cast<std::size_t>(r)] = run_restart(inst, cfg, ctx, r);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&]() {
                for (;;) {
                    const int r = next.fetch_add(1);
                    if (r >= cfg.restarts) return;
                    outcomes[static_cast<std::size_t>(r)] = run_restart(inst, cfg, ctx, r);
                }
            });
        for (auto& th : pool) th.join();
    }

    SearchResult result;
    for (int r = 0; r < cfg.restarts; ++r) {
        const auto& oc = outcomes[static_cast<std::size_t>(r)];
        result.restart_best_costs.push_back(oc.best_cost);
        result.restart_times_s.push_back(oc.time_s);
        if (!oc.ok) {
            ++result.failed_restarts;
            continue;
        }
        if (result.best_restart < 0 || oc.best_cost < result.best_cost - 1e-12) {
            result.best = oc.best;
            result.best_cost = oc.best_cost;
            result.best_restart = r;
        }
        result.trace.insert(result.trace.end(), oc.trace.begin(), oc.trace.end());
    }
    if (result.best_restart < 0) throw std::runtime_error("no feasible initial solution");
    result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("trace: cannot write '" + path + "'");
    out << "restart,iteration,cost,accepted,best\n";
    for (const auto& row : trace)
        out << row.restart << ',' << row.iteration << ',' << row.cost << ',' << (row.accepted ? 1 : 0) << ','
            << row.best << '\n';
}

}  // namespace pdpt
