#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pdpt/operators.hpp"

namespace pdpt {

enum class SearchMethod { rlns, ls, multiop };

std::string to_string(SearchMethod m);
SearchMethod search_method_from_string(const std::string& s);

struct SearchConfig {
    SearchMethod method = SearchMethod::rlns;
    int lahc_list_size = 20;       // L
    int destroy_min = 5;           // DR lower bound
    int destroy_max = 15;          // DR upper bound
    double blink = 0.05;           // beta
    double shaw_theta1 = 0.33;
    double shaw_theta2 = 0.99;
    double shaw_theta3 = 0.66;
    double worst_scale = 0.25;     // w_s
    double alns_alpha = 0.3;
    double reward_best = 3.0;      // s_B
    double reward_accept = 1.0;    // s_A
    int patience = 50;             // p, successive non-improving iterations
    int restarts = 10;             // K
    std::uint64_t seed = 0;
    int threads = 0;               // 0 = hardware concurrency
    std::uint64_t max_iterations = 0;  // 0 = unbounded safety cap off
};

SearchConfig search_config_from_json_string(const std::string& text);
std::string search_config_to_json_string(const SearchConfig& cfg);

struct TraceRow {
    int restart;
    std::uint64_t iteration;
    double cost;      // cost of the repaired candidate (current cost when repair failed)
    bool accepted;
    double best;      // best-so-far cost of this restart
};

struct SearchResult {
    Solution best;
    double best_cost = 0.0;
    int best_restart = -1;
    std::vector<double> restart_best_costs;  // +inf for failed restarts
    std::vector<double> restart_times_s;
    std::vector<TraceRow> trace;
    int failed_restarts = 0;
    double wall_time_s = 0.0;
};

// Multi-restart LNS per the shared destroy/repair/accept loop. Restarts are
// independent (one derived RNG each) and may run in parallel; results and
// traces do not depend on the thread count. Throws std::runtime_error
// ("no feasible initial solution") when every restart fails construction.
SearchResult run_search(const Instance& inst, const SearchConfig& cfg);

// Cheapest insertion (blink 0). The canonical form inserts in decreasing
// Insertion Difficulty order and falls back to up to 20 random orders when a
// request has no feasible slot; with deterministic_first = false the random
// orders come first, which is what restarts beyond the first use to
// diversify their starting points.
std::optional<Solution> construct_initial(const Instance& inst, Rng& rng, bool deterministic_first = true);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

}  // namespace pdpt
