#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "pdpt/lbbd.hpp"
#include "pdpt/oracle.hpp"
#include "pdpt/search.hpp"
#include "test_helpers.hpp"

using namespace pdpt;

namespace {

double eval_row(const MilpRow& row, const std::vector<double>& x) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coeff * x[static_cast<std::size_t>(t.var)];
    return lhs;
}

std::set<std::pair<int, int>> solution_edges(const Solution& sol) {
    std::set<std::pair<int, int>> edges;
    for (const auto& route : sol.routes)
        for (std::size_t i = 1; i < route.stops.size(); ++i)
            edges.insert({route.stops[i - 1].loc, route.stops[i].loc});
    return edges;
}

}  // namespace

TEST_SUITE("lbbd") {
    TEST_CASE("one request, one vehicle, no transfers closes at the direct cost") {
        const Instance inst = testing::line_instance();
        BuiltinBackend backend;
        const BnCResult result = branch_and_check(inst, backend, nullptr);
        CHECK(result.status == SolveStatus::optimal);
        CHECK(result.gap_percent == doctest::Approx(0.0));
        CHECK(result.lower_bound == doctest::Approx(30.0));
        CHECK(result.upper_bound == doctest::Approx(30.0));
        REQUIRE(result.best);
        CHECK(validate_solution(inst, *result.best).empty());
    }

    TEST_CASE("branch and check reproduces the oracle optimum on tiny instances") {
        for (std::uint64_t seed : {161ULL, 162ULL, 163ULL, 164ULL}) {
            const Instance inst = testing::tiny_instance(3, static_cast<TwClass>(seed % 3), seed);
            const auto best = exact_oracle_solve(inst);
            REQUIRE(best);
            BuiltinBackend backend;
            const BnCResult result = branch_and_check(inst, backend, nullptr);
            REQUIRE(result.status == SolveStatus::optimal);
            CHECK(result.upper_bound == doctest::Approx(best->objective).epsilon(1e-9));
            CHECK(result.gap_percent == doctest::Approx(0.0));
            REQUIRE(result.best);
            CHECK(validate_solution(inst, *result.best).empty());

            // Bounds sandwich the oracle, and no cut crosses it: a feasibility
            // cut never fits inside the optimal edge set, an optimality cut
            // over a subset of it carries a bound at most the optimum.
            CHECK(result.lower_bound <= best->objective + 1e-6);
            Solution oracle_sol = *best;
            const auto edges = solution_edges(oracle_sol);
            for (const auto& entry : result.cut_log) {
                bool subset = true;
                for (const auto& e : entry.cut.edges) subset = subset && edges.count(e) > 0;
                if (entry.cut.kind == BendersCut::Kind::feasibility) CHECK(!subset);
                if (entry.cut.kind == BendersCut::Kind::optimality) {
                    CHECK(entry.cut.bound >= best->objective - 1e-6);  // any subproblem value bounds the optimum
                    if (subset) CHECK(entry.cut.bound <= best->objective + 1e-6);
                }
            }
        }
    }

    TEST_CASE("iterative and callback modes agree") {
        for (std::uint64_t seed : {171ULL, 172ULL, 173ULL, 174ULL}) {
            const Instance inst = testing::tiny_instance(2 + static_cast<int>(seed % 3),
                                                         static_cast<TwClass>(seed % 3), seed);
            BuiltinBackend backend;
            const BnCResult callbacks = branch_and_check(inst, backend, nullptr, {}, false);
            const BnCResult iterative = branch_and_check(inst, backend, nullptr, {}, true);
            REQUIRE(callbacks.status == SolveStatus::optimal);
            REQUIRE(iterative.status == SolveStatus::optimal);
            CHECK(callbacks.upper_bound == doctest::Approx(iterative.upper_bound).epsilon(1e-9));
            CHECK(iterative.lower_bound == doctest::Approx(iterative.upper_bound).epsilon(1e-9));
        }
    }

    TEST_CASE("the external-file bridge drives one decomposition round trip") {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / "pdpt_external_lbbd";
        fs::remove_all(dir);
        const Instance inst = testing::tiny_instance(2, TwClass::L, 175);

        // First run: the master is exported and the run stops for lack of a
        // solution file.
        {
            ExternalFileBackend external(dir.string());
            const BnCResult stalled = branch_and_check(inst, external, nullptr);
            CHECK(stalled.status == SolveStatus::limit);
            CHECK(fs::exists(dir / "model_0.lp"));
        }

        // Play the external solver: answer model_0 with the builtin optimum.
        {
            MasterModel master = build_master(inst);
            BuiltinBackend builtin;
            const SolveResult solved = builtin.solve(master.model(), {}, {}, nullptr);
            REQUIRE(solved.status == SolveStatus::optimal);
            write_assignment_file(master.model(), solved.assignment, (dir / "model_0.sol").string());
        }

        // Second run imports the answer, checks the point, cuts, and then
        // stalls on the next export -- with a recorded upper bound.
        ExternalFileBackend external(dir.string());
        const BnCResult result = branch_and_check(inst, external, nullptr);
        CHECK(result.iterations == 1);
        CHECK(result.best);
        CHECK(std::isfinite(result.upper_bound));
        CHECK(fs::exists(dir / "model_1.lp"));
        const auto best = exact_oracle_solve(inst);
        REQUIRE(best);
        CHECK(result.upper_bound >= best->objective - 1e-9);
    }

    TEST_CASE("warm starting never reports a worse bound than the heuristic") {
        for (std::uint64_t seed : {181ULL, 182ULL}) {
            const Instance inst = testing::tiny_instance(3, TwClass::S, seed);
            SearchConfig cfg;
            cfg.seed = seed;
            cfg.restarts = 3;
            const SearchResult lns = run_search(inst, cfg);
            BuiltinBackend backend;
            const BnCResult result = branch_and_check(inst, backend, &lns.best);
            CHECK(result.upper_bound <= lns.best_cost + 1e-9);
            CHECK(result.lower_bound <= result.upper_bound + 1e-9);
        }
    }

    TEST_CASE("optimality cuts bind exactly on their edge set") {
        const Instance inst = testing::two_vehicle_transfer_instance();
        MasterModel master = build_master(inst);
        const std::vector<std::pair<int, int>> edges{{4, 5}, {6, 7}};
        const double zeta = 123.0;
        const MilpRow row = cut_row(master, make_optimality_cut(edges, zeta), 0);

        std::vector<double> x(master.model().vars().size(), 0.0);
        // All edges of E selected: the cut forces z >= zeta.
        x[static_cast<std::size_t>(master.x(4, 5))] = 1.0;
        x[static_cast<std::size_t>(master.x(6, 7))] = 1.0;
        x[static_cast<std::size_t>(master.z())] = zeta;
        CHECK(eval_row(row, x) >= row.rhs - 1e-9);
        x[static_cast<std::size_t>(master.z())] = zeta - 1.0;
        CHECK(eval_row(row, x) < row.rhs);  // violated below zeta

        // One edge missing: the cut is inactive even at z = 0.
        x[static_cast<std::size_t>(master.x(6, 7))] = 0.0;
        x[static_cast<std::size_t>(master.z())] = 0.0;
        CHECK(eval_row(row, x) >= row.rhs - 1e-9);

        const MilpRow feas = cut_row(master, make_feasibility_cut(edges), 1);
        x[static_cast<std::size_t>(master.x(6, 7))] = 1.0;
        x[static_cast<std::size_t>(master.x(4, 5))] = 1.0;
        CHECK(eval_row(feas, x) > feas.rhs);  // both edges: excluded
        x[static_cast<std::size_t>(master.x(4, 5))] = 0.0;
        CHECK(eval_row(feas, x) <= feas.rhs);

        CHECK_THROWS_AS(make_optimality_cut({}, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(make_feasibility_cut({}), std::invalid_argument);
    }

    TEST_CASE("an edge set never reappears after its cut") {
        int observed = 0;
        for (std::uint64_t seed : {191ULL, 192ULL, 193ULL}) {
            const Instance inst = testing::tiny_instance(3, TwClass::M, seed);
            BuiltinBackend backend;
            const BnCResult result = branch_and_check(inst, backend, nullptr);
            std::set<std::string> keys;
            for (const auto& entry : result.cut_log) {
                CHECK(!keys.count(entry.key));
                keys.insert(entry.key);
                ++observed;
            }
        }
        CHECK(observed >= 3);
    }

    TEST_CASE("gap metrics reproduce the published formulas") {
        CHECK(gap_metrics(100.0, 120.0, 100.0).gap == doctest::Approx(0.0));
        CHECK(gap_metrics(90.0, 110.0, 110.0).err == doctest::Approx(0.0));

        const GapMetrics published = gap_metrics(889.32, 1590.0, 1423.0);
        CHECK(published.gap == doctest::Approx(37.50).epsilon(0.0003));  // within +-0.01
        CHECK(published.err == doctest::Approx((1590.0 - 1423.0) / 1590.0 * 100.0));
        CHECK(published.gap_lns == doctest::Approx((1590.0 - 889.32) / 1590.0 * 100.0));
        CHECK(published.imp == doctest::Approx(published.gap_lns - published.gap));

        const GapMetrics timed = gap_metrics(100.0, 120.0, 110.0, 30.0, 12.0);
        CHECK(timed.acc == doctest::Approx(18.0));
        CHECK_THROWS_AS(gap_metrics(1.0, 0.0, 1.0), std::invalid_argument);
    }

    TEST_CASE("a tight time limit yields a bounded result, not a crash") {
        const Instance inst = testing::tiny_instance(4, TwClass::M, 177);
        BuiltinBackend backend;
        BnCLimits limits;
        limits.time_limit_s = 0.01;
        const BnCResult result = branch_and_check(inst, backend, nullptr, limits);
        CHECK((result.status == SolveStatus::limit || result.status == SolveStatus::feasible ||
               result.status == SolveStatus::optimal));
        if (result.best) {
            CHECK(result.lower_bound <= result.upper_bound + 1e-9);
            CHECK(validate_solution(inst, *result.best).empty());
        }
    }

    TEST_CASE("results serialize with the documented keys") {
        const Instance inst = testing::line_instance();
        BuiltinBackend backend;
        const BnCResult result = branch_and_check(inst, backend, nullptr);
        const std::string json = bnc_result_to_json_string(result);
        for (const char* key : {"\"lb\"", "\"ub\"", "\"gap\"", "\"time_s\"", "\"iters\"", "\"opt\"", "\"feas\""})
            CHECK(json.find(key) != std::string::npos);
        write_cut_log_csv(result, "/tmp/pdpt_cutlog_test.csv");
    }

    TEST_CASE("two transfer points: decomposition still meets the oracle") {
        for (std::uint64_t seed : {506ULL, 509ULL}) {
            GeneratorParams params = testing::tiny_params(seed % 2 ? 3 : 2, TwClass::M);
            params.transfers = 2;
            const Instance inst = generate_instance(params, seed);
            const auto best = exact_oracle_solve(inst);
            REQUIRE(best);
            BuiltinBackend backend;
            const BnCResult result = branch_and_check(inst, backend, nullptr);
            REQUIRE(result.status == SolveStatus::optimal);
            CHECK(result.upper_bound == doctest::Approx(best->objective).epsilon(1e-9));
        }
    }

    TEST_CASE("duplicate transfer copies flow through search, oracle and decomposition") {
        Instance inst = testing::build_instance(
            {
                {LocationKind::depot_origin, 0.0, 0.0, 0.0, 480.0},
                {LocationKind::depot_destination, 0.0, 5.0, 0.0, 80.0},
                {LocationKind::depot_origin, 200.0, 5.0, 0.0, 480.0},
                {LocationKind::depot_destination, 200.0, 0.0, 0.0, 480.0},
                {LocationKind::pickup, 10.0, 0.0, 0.0, 20.0},
                {LocationKind::delivery, 190.0, 0.0, 40.0, 60.0},
                {LocationKind::transfer, 100.0, 0.0, 0.0, 480.0},
                {LocationKind::transfer, 100.0, 0.0, 0.0, 480.0},  // co-located copy
            },
            {{0, 4, 5, 10.0}}, {{0, 0, 1, 75.0}, {1, 2, 3, 75.0}}, {6, 7});
        REQUIRE(validate_instance(inst).empty());
        const auto best = exact_oracle_solve(inst);
        REQUIRE(best);
        BuiltinBackend backend;
        const BnCResult result = branch_and_check(inst, backend, nullptr);
        REQUIRE(result.status == SolveStatus::optimal);
        CHECK(result.upper_bound == doctest::Approx(best->objective).epsilon(1e-9));
        SearchConfig cfg;
        cfg.seed = 4;
        const SearchResult lns = run_search(inst, cfg);
        CHECK(validate_solution(inst, lns.best).empty());
        CHECK(lns.best_cost >= best->objective - 1e-9);
    }

    TEST_CASE("infeasible instances report no feasible solution") {
        Instance inst = testing::line_instance();
        inst.locations[1].tw_close = 1.0;
        inst.rebuild_matrices();
        BuiltinBackend backend;
        const BnCResult result = branch_and_check(inst, backend, nullptr);
        CHECK(result.status == SolveStatus::infeasible);
        CHECK(!result.best);
    }
}
