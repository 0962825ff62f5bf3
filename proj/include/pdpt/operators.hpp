#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pdpt/feasibility.hpp"
#include "pdpt/features.hpp"
#include "pdpt/rng.hpp"

namespace pdpt {

using DissimilarityFn = std::function<double(int, int)>;

// Shaw-style related removal: seed a request uniformly, then repeatedly add
// the served request most similar to a uniformly chosen member of the removed
// set. Returns the removed ids; the solution is destroyed via remove_requests.
std::vector<int> related_removal(const Instance& inst, Solution& sol, FeasibilityCache& cache, int n,
                                 const DissimilarityFn& dissim, Rng& rng);

std::vector<int> random_removal(const Instance& inst, Solution& sol, FeasibilityCache& cache, int n, Rng& rng);

// Repeatedly removes the served request maximizing removal gain scaled by a
// uniform noise in [1 - w_s, 1].
std::vector<int> worst_removal(const Instance& inst, Solution& sol, FeasibilityCache& cache, int n, double w_s,
                               Rng& rng);

// Blink-randomized cheapest insertion: requests are processed in the given
// order; each feasible candidate is skipped independently with probability
// beta, and the cheapest surviving one is applied. When every feasible
// candidate is blinked away, the overall cheapest feasible one is used.
// Returns false (leaving the solution partial) when some request has no
// feasible candidate at all.
bool repair(const Instance& inst, Solution& sol, FeasibilityCache& cache, const std::vector<int>& order, double beta,
            Rng& rng);

// Late Acceptance Hill Climbing ring. Accepts a candidate that is no worse
// than the current cost or no worse than the cost recorded L iterations ago,
// then overwrites the slot with the resulting current cost.
class LahcRing {
  public:
    LahcRing(std::size_t size, double initial_cost) : ring_(size, initial_cost) {}

    bool accept(double current_cost, double candidate_cost, std::uint64_t iteration) {
        const std::size_t slot = iteration % ring_.size();
        const bool ok = candidate_cost <= current_cost + 1e-12 || candidate_cost <= ring_[slot] + 1e-12;
        ring_[slot] = ok ? candidate_cost : current_cost;
        return ok;
    }

    const std::vector<double>& ring() const { return ring_; }

  private:
    std::vector<double> ring_;
};

// Roulette-wheel operator selection with segment-based weight updates
// (MULTI-OP only): w <- (1-alpha) w + alpha * score/uses per segment.
class OperatorBank {
  public:
    OperatorBank(std::vector<std::string> names, double alpha, double reward_best, double reward_accept,
                 int segment_length = 50, double weight_floor = 1e-3);

    int select(Rng& rng);
    void record(int op, bool accepted, bool new_best);
    void end_iteration();  // advances the segment clock

    const std::vector<double>& weights() const { return weights_; }
    double selection_probability(int op) const;
    const std::vector<std::string>& names() const { return names_; }

  private:
    void close_segment();

    std::vector<std::string> names_;
    std::vector<double> weights_;
    std::vector<double> scores_;
    std::vector<int> uses_;
    double alpha_;
    double reward_best_;
    double reward_accept_;
    int segment_length_;
    double floor_;
    int ticks_ = 0;
};

}  // namespace pdpt
