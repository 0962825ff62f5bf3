#pragma once

#include <optional>

#include "pdpt/solution.hpp"

namespace pdpt {

// Exhaustive optimum for desk-scale instances: every journey-mode combination
// (direct per vehicle, single transfer per (t, k1 != k2)) crossed with every
// precedence-respecting interleaving of stops per vehicle, schedule-checked
// with cross-route synchronization. Guarded to |R| <= 5, |K| <= 3, |T| <= 2;
// throws std::invalid_argument beyond that. Returns nullopt when no feasible
// solution exists in that space.
std::optional<Solution> exact_oracle_solve(const Instance& inst);

struct OracleGuard {
    static constexpr std::size_t max_requests = 5;
    static constexpr std::size_t max_vehicles = 3;
    static constexpr std::size_t max_transfers = 2;
};

}  // namespace pdpt
