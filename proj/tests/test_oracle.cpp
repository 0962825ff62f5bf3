#include <doctest.h>

#include <algorithm>

#include "pdpt/oracle.hpp"
#include "test_helpers.hpp"

using namespace pdpt;

namespace {

// The western vehicle is the only one that can reach the pickup in time, but
// hauling the load east itself would make it miss its own destination window;
// the eastern vehicle cannot reach the pickup at all. Handing over at the
// halfway transfer is the only feasible plan.
Instance transfer_forced_instance() {
    // Speed 20 km/h: 0.3 minutes per hm. Distances below are in hm.
    return testing::build_instance(
        {
            {LocationKind::depot_origin, 0.0, 0.0, 0.0, 480.0},         // 0: o1, west
            {LocationKind::depot_destination, 0.0, 5.0, 0.0, 80.0},     // 1: e1, west, closes early
            {LocationKind::depot_origin, 200.0, 5.0, 0.0, 480.0},       // 2: o2, east
            {LocationKind::depot_destination, 200.0, 0.0, 0.0, 480.0},  // 3: e2, east
            {LocationKind::pickup, 10.0, 0.0, 0.0, 20.0},               // 4: p, west, closes at 20
            {LocationKind::delivery, 190.0, 0.0, 40.0, 60.0},           // 5: d, east
            {LocationKind::transfer, 100.0, 0.0, 0.0, 480.0},           // 6: t, halfway
        },
        {{0, 4, 5, 10.0}}, {{0, 0, 1, 75.0}, {1, 2, 3, 75.0}}, {6});
}

}  // namespace

TEST_SUITE("oracle") {
    TEST_CASE("single request with wide windows routes directly at geometric cost") {
        const Instance inst = testing::line_instance(10.0);
        const auto best = exact_oracle_solve(inst);
        REQUIRE(best);
        CHECK(best->objective == doctest::Approx(30.0));
        CHECK(best->journeys[0].direct());
        CHECK(validate_solution(inst, *best).empty());
    }

    TEST_CASE("tight windows force the transfer") {
        const Instance inst = transfer_forced_instance();
        // Direct by vehicle 0: deliver at 57, but e1 closes at 80 and lies 57
        // minutes away. Direct by vehicle 1: the pickup closes at 20, 57
        // minutes out. Transfer at t: drop 30, pick ~30, deliver ~57 <= 60.
        const auto best = exact_oracle_solve(inst);
        REQUIRE(best);
        CHECK(validate_solution(inst, *best).empty());
        CHECK(best->journeys[0].legs.size() == 2);
        CHECK(best->journeys[0].transfer_locs == std::vector<int>{6});
    }

    TEST_CASE("oracle cost is invariant under request relabeling") {
        const Instance inst = testing::tiny_instance(3, TwClass::M, 131);
        const auto base = exact_oracle_solve(inst);
        REQUIRE(base);
        Instance permuted = inst;
        std::swap(permuted.requests[0], permuted.requests[2]);
        permuted.requests[0].id = 0;
        permuted.requests[2].id = 2;
        const auto swapped = exact_oracle_solve(permuted);
        REQUIRE(swapped);
        CHECK(swapped->objective == doctest::Approx(base->objective).epsilon(1e-12));
    }

    TEST_CASE("size guard rejects larger instances") {
        GeneratorParams params = testing::tiny_params(6, TwClass::L);
        const Instance inst = generate_instance(params, 3);
        CHECK_THROWS_AS(exact_oracle_solve(inst), std::invalid_argument);
    }

    TEST_CASE("infeasible instances report no solution") {
        Instance inst = testing::line_instance();
        inst.locations[1].tw_close = 1.0;  // pickup unreachable
        inst.rebuild_matrices();
        CHECK(!exact_oracle_solve(inst));
    }
}
