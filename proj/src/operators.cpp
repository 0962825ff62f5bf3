#include "pdpt/operators.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace pdpt {

std::vector<int> related_removal(const Instance& inst, Solution& sol, FeasibilityCache& cache, int n,
                                 const DissimilarityFn& dissim, Rng& rng) {
    std::vector<int> served = served_requests(sol);
    if (n > static_cast<int>(served.size())) n = static_cast<int>(served.size());
    std::vector<int> removed;
    if (n == 0) return removed;
    removed.push_back(served[rng.next_below(served.size())]);
    served.erase(std::find(served.begin(), served.end(), removed.front()));
    while (static_cast<int>(removed.size()) < n) {
        const int anchor = removed[rng.next_below(removed.size())];
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int r : served) {
            const double d = dissim(anchor, r);
            if (d < best_d - 1e-15 || (d < best_d + 1e-15 && (best < 0 || r < best))) {
                best_d = d;
                best = r;
            }
        }
        removed.push_back(best);
        served.erase(std::find(served.begin(), served.end(), best));
    }
    remove_requests(inst, sol, cache, removed);
    return removed;
}

std::vector<int> random_removal(const Instance& inst, Solution& sol, FeasibilityCache& cache, int n, Rng& rng) {
    std::vector<int> served = served_requests(sol);
    if (n > static_cast<int>(served.size())) n = static_cast<int>(served.size());
    std::vector<int> removed;
    for (int i = 0; i < n; ++i) {
        const std::size_t pick = rng.next_below(served.size());
        removed.push_back(served[pick]);
        served.erase(served.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    if (!removed.empty()) remove_requests(inst, sol, cache, removed);
    return removed;
}

std::vector<int> worst_removal(const Instance& inst, Solution& sol, FeasibilityCache& cache, int n, double w_s,
                               Rng& rng) {
    std::vector<int> removed;
    for (int i = 0; i < n; ++i) {
        const std::vector<int> served = served_requests(sol);
        if (served.empty()) break;
        int worst = -1;
        double worst_score = -std::numeric_limits<double>::infinity();
        for (int r : served) {
            const double noise = rng.uniform_real(1.0 - w_s, 1.0);
            const double score = removal_gain(inst, sol, r) * noise;
            if (score > worst_score) {
                worst_score = score;
                worst = r;
            }
        }
        remove_requests(inst, sol, cache, {worst});
        removed.push_back(worst);
    }
    return removed;
}

bool repair(const Instance& inst, Solution& sol, FeasibilityCache& cache, const std::vector<int>& order, double beta,
            Rng& rng) {
    for (int r : order) {
        InsertionCandidate best_kept;     // cheapest feasible candidate surviving the blinks
        InsertionCandidate best_overall;  // cheapest feasible candidate regardless
        double kept_cost = std::numeric_limits<double>::infinity();
        double overall_cost = std::numeric_limits<double>::infinity();
        for_each_insertion(inst, sol, r, [&](const InsertionCandidate& cand) {
            if (cand.delta >= overall_cost && cand.delta >= kept_cost) return;  // cannot win either slot
            if (!check_insertion_feasible(inst, sol, cache, cand)) return;
            if (cand.delta < overall_cost) {
                overall_cost = cand.delta;
                best_overall = cand;
            }
            const bool blinked = beta > 0.0 && rng.bernoulli(beta);
            if (!blinked && cand.delta < kept_cost) {
                kept_cost = cand.delta;
                best_kept = cand;
            }
        });
        if (overall_cost == std::numeric_limits<double>::infinity()) return false;
        apply_insertion(inst, sol, cache, kept_cost < std::numeric_limits<double>::infinity() ? best_kept : best_overall);
    }
    return true;
}

OperatorBank::OperatorBank(std::vector<std::string> names, double alpha, double reward_best, double reward_accept,
                           int segment_length, double weight_floor)
    : names_(std::move(names)),
      weights_(names_.size(), 1.0),
      scores_(names_.size(), 0.0),
      uses_(names_.size(), 0),
      alpha_(alpha),
      reward_best_(reward_best),
      reward_accept_(reward_accept),
      segment_length_(segment_length),
      floor_(weight_floor) {
    if (names_.empty()) throw std::invalid_argument("operator bank: no operators");
}

int OperatorBank::select(Rng& rng) {
    double total = 0.0;
    for (double w : weights_) total += w;
    const double roll = rng.uniform_real() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        acc += weights_[i];
        if (roll < acc) {
            ++uses_[i];
            return static_cast<int>(i);
        }
    }
    ++uses_.back();
    return static_cast<int>(weights_.size()) - 1;
}

void OperatorBank::record(int op, bool accepted, bool new_best) {
    if (new_best) scores_[static_cast<std::size_t>(op)] += reward_best_;
    if (accepted) scores_[static_cast<std::size_t>(op)] += reward_accept_;
}

void OperatorBank::end_iteration() {
    if (++ticks_ >= segment_length_) close_segment();
}

void OperatorBank::close_segment() {
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (uses_[i] > 0)
            weights_[i] = (1.0 - alpha_) * weights_[i] + alpha_ * scores_[i] / static_cast<double>(uses_[i]);
        else
            weights_[i] = (1.0 - alpha_) * weights_[i];
        weights_[i] = std::max(weights_[i], floor_);
        scores_[i] = 0.0;
        uses_[i] = 0;
    }
    ticks_ = 0;
}

double OperatorBank::selection_probability(int op) const {
    double total = 0.0;
    for (double w : weights_) total += w;
    return weights_[static_cast<std::size_t>(op)] / total;
}

}  // namespace pdpt
