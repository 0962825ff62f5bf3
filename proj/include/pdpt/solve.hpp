#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "pdpt/milp.hpp"

namespace pdpt {

struct SolveLimits {
    double time_limit_s = std::numeric_limits<double>::infinity();
    std::uint64_t node_limit = 0;  // 0 = unlimited
};

enum class SolveStatus { optimal, feasible, infeasible, limit };

std::string to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::limit;
    double objective = std::numeric_limits<double>::quiet_NaN();
    double lower_bound = -std::numeric_limits<double>::infinity();
    std::vector<double> assignment;  // empty unless a feasible point was found
    std::uint64_t nodes = 0;
};

struct BackendCapability {
    bool supports_callbacks = false;
    bool supports_warm_start = false;
};

// Called at every integer-feasible point; returned rows are added as lazy
// rows, enforced from then on. An empty return accepts the point.
using IntegerHook = std::function<std::vector<MilpRow>(const std::vector<double>& assignment, double objective)>;

struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class MilpBackend {
  public:
    virtual ~MilpBackend() = default;
    virtual BackendCapability capability() const = 0;
    virtual std::string name() const = 0;
    // Lazy rows returned by the hook are appended to the model.
    virtual SolveResult solve(MilpModel& model, const SolveLimits& limits, const IntegerHook& hook = {},
                              const std::vector<double>* warm_start = nullptr) = 0;
};

// Exact depth-first branch-and-bound on binary variables with bound
// propagation. Branches in declaration order, 0 before 1; the node bound is
// the propagated minimum activity of the objective. Continuous variables are
// settled by the same propagation; after all binaries are fixed this decides
// feasibility exactly for models whose continuous rows pairwise-difference
// (which is the shape every model in this toolbox has).
class BuiltinBackend : public MilpBackend {
  public:
    BackendCapability capability() const override { return {true, true}; }
    std::string name() const override { return "builtin"; }
    SolveResult solve(MilpModel& model, const SolveLimits& limits, const IntegerHook& hook,
                      const std::vector<double>* warm_start) override;
};

// Exports the model to <workdir>/<stem>.lp and expects <workdir>/<stem>.sol
// ("varname value" lines) produced by an external solver. No callbacks.
class ExternalFileBackend : public MilpBackend {
  public:
    explicit ExternalFileBackend(std::string workdir, std::string stem = "model")
        : workdir_(std::move(workdir)), stem_(std::move(stem)) {}
    BackendCapability capability() const override { return {false, false}; }
    std::string name() const override { return "external-file"; }
    SolveResult solve(MilpModel& model, const SolveLimits& limits, const IntegerHook& hook,
                      const std::vector<double>* warm_start) override;

  private:
    std::string workdir_;
    std::string stem_;
    int round_ = 0;
};

// "builtin" or "external-file:<workdir>".
std::unique_ptr<MilpBackend> make_backend(const std::string& spec);

}  // namespace pdpt
