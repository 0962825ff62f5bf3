#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pdpt/master.hpp"
#include "pdpt/solve.hpp"
#include "test_helpers.hpp"

using namespace pdpt;

namespace {

// Independent LP reader for the re-parse oracle: counts rows, columns and
// binaries from the textual sections.
struct LpCounts {
    int rows = 0;
    int cols = 0;
    int binaries = 0;
};

LpCounts parse_lp(const std::string& text) {
    LpCounts counts;
    std::istringstream in(text);
    std::string line;
    enum { none, subject, bounds, binaries } section = none;
    while (std::getline(in, line)) {
        if (line.rfind("Subject To", 0) == 0) {
            section = subject;
            continue;
        }
        if (line.rfind("Bounds", 0) == 0) {
            section = bounds;
            continue;
        }
        if (line.rfind("Binaries", 0) == 0) {
            section = binaries;
            continue;
        }
        if (line.rfind("End", 0) == 0) break;
        if (line.empty()) continue;
        if (section == subject && line.find(':') != std::string::npos) ++counts.rows;
        if (section == bounds) ++counts.cols;
        if (section == binaries) ++counts.binaries;
    }
    return counts;
}

MilpModel knapsack_model() {
    // max 8a + 11b + 6c s.t. 5a + 7b + 4c <= 10; optimum picks a and c.
    MilpModel model;
    const int a = model.add_binary("a");
    const int b = model.add_binary("b");
    const int c = model.add_binary("c");
    model.set_objective_term(a, -8.0);
    model.set_objective_term(b, -11.0);
    model.set_objective_term(c, -6.0);
    model.add_row("cap", {{a, 5.0}, {b, 7.0}, {c, 4.0}}, RowSense::le, 10.0);
    return model;
}

}  // namespace

TEST_SUITE("milp") {
    TEST_CASE("bound logic: x >= 3 with binary x is infeasible, x >= 0 solves to zero") {
        BuiltinBackend backend;
        {
            MilpModel model;
            const int x = model.add_binary("x");
            model.set_objective_term(x, 1.0);
            model.add_row("force", {{x, 1.0}}, RowSense::ge, 3.0);
            const SolveResult result = backend.solve(model, {}, {}, nullptr);
            CHECK(result.status == SolveStatus::infeasible);
        }
        {
            MilpModel model;
            const int x = model.add_var("x", 0.0, 10.0, VarKind::continuous);
            model.set_objective_term(x, 1.0);
            model.add_row("nonneg", {{x, 1.0}}, RowSense::ge, 0.0);
            const SolveResult result = backend.solve(model, {}, {}, nullptr);
            REQUIRE(result.status == SolveStatus::optimal);
            CHECK(result.objective == doctest::Approx(0.0));
        }
    }

    TEST_CASE("builtin solves a knapsack to its known optimum") {
        MilpModel model = knapsack_model();
        BuiltinBackend backend;
        const SolveResult result = backend.solve(model, {}, {}, nullptr);
        REQUIRE(result.status == SolveStatus::optimal);
        CHECK(result.objective == doctest::Approx(-14.0));  // a + c
        CHECK(result.assignment[0] == doctest::Approx(1.0));
        CHECK(result.assignment[1] == doctest::Approx(0.0));
        CHECK(result.assignment[2] == doctest::Approx(1.0));
        CHECK(model.check_assignment(result.assignment, 1e-6).empty());
    }

    TEST_CASE("builtin settles difference systems over continuous variables") {
        // a1 >= 5, a2 >= a1 + 3, a3 >= a2 + 4, minimize a3 within windows.
        MilpModel model;
        const int a1 = model.add_var("a1", 5.0, 100.0, VarKind::continuous);
        const int a2 = model.add_var("a2", 0.0, 100.0, VarKind::continuous);
        const int a3 = model.add_var("a3", 0.0, 100.0, VarKind::continuous);
        model.set_objective_term(a3, 1.0);
        model.add_row("c1", {{a1, 1.0}, {a2, -1.0}}, RowSense::le, -3.0);
        model.add_row("c2", {{a2, 1.0}, {a3, -1.0}}, RowSense::le, -4.0);
        BuiltinBackend backend;
        const SolveResult result = backend.solve(model, {}, {}, nullptr);
        REQUIRE(result.status == SolveStatus::optimal);
        CHECK(result.objective == doctest::Approx(12.0));

        model.add_row("cycle", {{a3, 1.0}, {a1, -1.0}}, RowSense::le, -1.0);  // positive cycle
        const SolveResult infeasible = backend.solve(model, {}, {}, nullptr);
        CHECK(infeasible.status == SolveStatus::infeasible);
    }

    TEST_CASE("warm starts bound the search and bad ones are rejected") {
        MilpModel model = knapsack_model();
        BuiltinBackend backend;
        const std::vector<double> warm{0.0, 1.0, 0.0};  // value -11, not yet optimal
        const SolveResult result = backend.solve(model, {}, {}, &warm);
        REQUIRE(result.status == SolveStatus::optimal);
        CHECK(result.objective == doctest::Approx(-14.0));

        const std::vector<double> bad{1.0, 1.0, 1.0};  // violates the capacity row
        MilpModel fresh = knapsack_model();
        CHECK_THROWS_AS(backend.solve(fresh, {}, {}, &bad), std::runtime_error);
    }

    TEST_CASE("a hook row is enforced after it is returned") {
        MilpModel model = knapsack_model();
        BuiltinBackend backend;
        int calls = 0;
        IntegerHook hook = [&](const std::vector<double>& x, double) -> std::vector<MilpRow> {
            ++calls;
            if (x[0] > 0.5 && x[2] > 0.5) {  // forbid a and c together
                MilpRow row;
                row.name = "lazy_ac";
                row.terms = {{0, 1.0}, {2, 1.0}};
                row.sense = RowSense::le;
                row.rhs = 1.0;
                return {row};
            }
            return {};
        };
        const SolveResult result = backend.solve(model, {}, hook, nullptr);
        REQUIRE(result.status == SolveStatus::optimal);
        CHECK(calls >= 2);
        CHECK(result.objective == doctest::Approx(-11.0));  // b once {a, c} is banned
        CHECK(result.assignment[0] + result.assignment[2] <= 1.0 + 1e-9);
    }

    TEST_CASE("node and time limits end the search with an honest status") {
        MilpModel model;
        std::vector<int> vars;
        for (int i = 0; i < 18; ++i) vars.push_back(model.add_binary("v" + std::to_string(i)));
        for (int i = 0; i < 18; ++i) model.set_objective_term(vars[static_cast<std::size_t>(i)], 1.0 + i % 3);
        std::vector<MilpTerm> terms;
        for (int v : vars) terms.push_back({v, 1.0});
        model.add_row("pick9", terms, RowSense::ge, 9.0);
        BuiltinBackend backend;
        SolveLimits limits;
        limits.node_limit = 3;
        const SolveResult capped = backend.solve(model, limits, {}, nullptr);
        CHECK((capped.status == SolveStatus::limit || capped.status == SolveStatus::feasible));
        CHECK(capped.lower_bound <= 9.0 + 1e-9);  // open-node bound stays valid
        const SolveResult full = backend.solve(model, {}, {}, nullptr);
        REQUIRE(full.status == SolveStatus::optimal);
        CHECK(full.objective == doctest::Approx(12.0));  // six at cost 1, three at cost 2
    }

    TEST_CASE("empty model exports a valid file, twice identically") {
        MilpModel model;
        const std::string lp1 = export_model_string(model, ModelFormat::lp);
        const std::string lp2 = export_model_string(model, ModelFormat::lp);
        CHECK(lp1 == lp2);
        CHECK(lp1.find("Minimize") != std::string::npos);
        CHECK(export_model_string(model, ModelFormat::mps).find("ENDATA") != std::string::npos);
    }

    TEST_CASE("name collisions abort the export") {
        MilpModel model;
        model.add_var("x", 0.0, 1.0, VarKind::binary);
        model.add_var("x", 0.0, 1.0, VarKind::binary);
        CHECK_THROWS_AS(export_model_string(model, ModelFormat::lp), std::runtime_error);
    }

    TEST_CASE("exported master re-parses to the same row and column counts") {
        const Instance inst = testing::tiny_instance(2, TwClass::L, 121);
        const MasterModel master = build_master(inst);
        const std::string text = export_model_string(master.model(), ModelFormat::lp);
        const LpCounts counts = parse_lp(text);
        CHECK(counts.rows == static_cast<int>(master.model().rows().size()));
        CHECK(counts.cols == static_cast<int>(master.model().vars().size()));
        int binaries = 0;
        for (const auto& v : master.model().vars())
            if (v.kind == VarKind::binary) ++binaries;
        CHECK(counts.binaries == binaries);
    }

    TEST_CASE("assignment files round trip and external backend imports them") {
        namespace fs = std::filesystem;
        MilpModel model = knapsack_model();
        BuiltinBackend builtin;
        const SolveResult solved = builtin.solve(model, {}, {}, nullptr);
        const fs::path dir = fs::temp_directory_path() / "pdpt_external_test";
        fs::remove_all(dir);
        fs::create_directories(dir);
        write_assignment_file(model, solved.assignment, (dir / "model_0.sol").string());

        MilpModel fresh = knapsack_model();
        const std::vector<double> back = read_assignment_file(fresh, (dir / "model_0.sol").string());
        CHECK(back == solved.assignment);

        ExternalFileBackend external(dir.string());
        const SolveResult imported = external.solve(fresh, {}, {}, nullptr);
        CHECK(imported.status == SolveStatus::feasible);
        CHECK(imported.objective == doctest::Approx(-14.0));
        CHECK(fs::exists(dir / "model_0.lp"));

        IntegerHook hook = [](const std::vector<double>&, double) { return std::vector<MilpRow>{}; };
        CHECK_THROWS_AS(external.solve(fresh, {}, hook, nullptr), CapabilityError);
    }
}
