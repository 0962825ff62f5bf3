#include "pdpt/solve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <stdexcept>

namespace pdpt {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::feasible: return "feasible";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::limit: return "limit";
    }
    return "?";
}

namespace {

constexpr double kEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Working state of the DFS: current bounds, a trail for undo, and row
// activity propagation with a dirty queue.
class Search {
  public:
    Search(MilpModel& model, const SolveLimits& limits, const IntegerHook& hook) : model_(model), limits_(limits), hook_(hook) {
        const auto& vars = model.vars();
        nvars_ = vars.size();
        lb_.resize(nvars_);
        ub_.resize(nvars_);
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (!std::isfinite(vars[i].lb) || !std::isfinite(vars[i].ub))
                throw std::invalid_argument("builtin backend: variable '" + vars[i].name + "' needs finite bounds");
            lb_[i] = vars[i].lb;
            ub_[i] = vars[i].ub;
        }
        rows_of_var_.resize(nvars_);
        for (std::size_t r = 0; r < model.rows().size(); ++r) register_row(r);
        ncont_ = 0;
        for (const auto& v : vars)
            if (v.kind == VarKind::continuous) ++ncont_;
    }

    SolveResult run(const std::vector<double>* warm_start) {
        SolveResult result;
        const auto t_start = std::chrono::steady_clock::now();
        auto out_of_budget = [&]() {
            if (limits_.node_limit && result.nodes >= limits_.node_limit) return true;
            if (!std::isfinite(limits_.time_limit_s)) return false;
            return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count() >
                   limits_.time_limit_s;
        };

        if (warm_start) {
            const auto bad = model_.check_assignment(*warm_start, 1e-6);
            if (!bad.empty())
                throw std::runtime_error("builtin backend: warm start rejected: " + bad.front());
            incumbent_ = *warm_start;
            incumbent_obj_ = model_.objective_value(*warm_start);
            has_incumbent_ = true;
        }

        struct Frame {
            std::size_t var;
            int next_value;  // value to try on backtrack; 2 when both children are done
            std::size_t trail_mark;
            std::size_t scan_from;
            double bound;
        };
        std::vector<Frame> stack;

        // Root propagation.
        for (std::size_t r = 0; r < model_.rows().size(); ++r) queue_row(r);
        bool feasible_here = propagate();
        std::size_t scan_from = 0;
        bool exhausted = false;

        for (;;) {
            ++result.nodes;
            if ((result.nodes & 0xff) == 0 && out_of_budget()) break;
            bool descend = false;
            if (feasible_here && node_bound() < incumbent_obj_ - kEps) {
                std::size_t branch_var = nvars_;
                for (std::size_t i = scan_from; i < nvars_; ++i) {
                    if (model_.vars()[i].kind == VarKind::binary && ub_[i] - lb_[i] > 0.5) {
                        branch_var = i;
                        break;
                    }
                }
                if (branch_var == nvars_) {
                    handle_leaf();
                } else {
                    stack.push_back({branch_var, 1, trail_.size(), branch_var, node_bound()});
                    set_bound(branch_var, 0.0, 0.0);
                    queue_var_rows(branch_var);
                    feasible_here = propagate();
                    scan_from = branch_var;
                    descend = true;
                }
            }
            if (descend) continue;
            // Backtrack to the deepest frame with an untried value.
            for (;;) {
                if (stack.empty()) {
                    exhausted = true;
                    break;
                }
                Frame& f = stack.back();
                undo_to(f.trail_mark);
                if (f.next_value <= 1 && f.bound < incumbent_obj_ - kEps) {
                    const double v = static_cast<double>(f.next_value);
                    ++f.next_value;
                    set_bound(f.var, v, v);
                    queue_var_rows(f.var);
                    feasible_here = propagate();
                    scan_from = f.var;
                    f.next_value = 2;  // both children visited after this descent
                    break;
                }
                stack.pop_back();
            }
            if (exhausted) break;
        }

        result.lower_bound = incumbent_obj_;
        if (!exhausted) {
            // Unexplored siblings bound the optimum from below.
            double open = kInf;
            for (const auto& f : stack)
                if (f.next_value <= 1) open = std::min(open, f.bound);
            result.lower_bound = std::min(incumbent_obj_, open);
        }
        if (has_incumbent_) {
            result.objective = incumbent_obj_;
            result.assignment = incumbent_;
            result.status = exhausted ? SolveStatus::optimal : SolveStatus::feasible;
        } else {
            result.status = exhausted ? SolveStatus::infeasible : SolveStatus::limit;
            result.lower_bound = exhausted ? kInf : result.lower_bound;
        }
        return result;
    }

  private:
    void register_row(std::size_t r) {
        for (const auto& t : model_.rows()[r].terms) rows_of_var_[static_cast<std::size_t>(t.var)].push_back(r);
        if (r >= row_queued_.size()) row_queued_.resize(r + 1, 0);
    }

    void queue_row(std::size_t r) {
        if (r >= row_queued_.size()) row_queued_.resize(r + 1, 0);
        if (!row_queued_[r]) {
            row_queued_[r] = 1;
            queue_.push_back(r);
        }
    }

    void queue_var_rows(std::size_t var) {
        for (std::size_t r : rows_of_var_[var]) queue_row(r);
    }

    void set_bound(std::size_t var, double new_lb, double new_ub) {
        trail_.push_back({var, lb_[var], ub_[var]});
        lb_[var] = new_lb;
        ub_[var] = new_ub;
    }

    void undo_to(std::size_t mark) {
        while (trail_.size() > mark) {
            const auto& e = trail_.back();
            lb_[e.var] = e.lb;
            ub_[e.var] = e.ub;
            trail_.pop_back();
        }
    }

    double node_bound() const {
        double b = 0.0;
        for (std::size_t i = 0; i < nvars_; ++i) {
            const double c = model_.objective()[i];
            if (c > 0.0)
                b += c * lb_[i];
            else if (c < 0.0)
                b += c * ub_[i];
        }
        return b;
    }

    bool tighten_ub(std::size_t var, double value) {
        if (model_.vars()[var].kind == VarKind::binary && value < 1.0 - 1e-6) value = std::floor(value + 1e-6);
        if (value >= ub_[var] - 1e-12) return true;
        if (value < lb_[var] - 1e-9) return false;
        trail_.push_back({var, lb_[var], ub_[var]});
        ub_[var] = std::max(value, lb_[var]);
        queue_var_rows(var);
        return true;
    }

    bool tighten_lb(std::size_t var, double value) {
        if (model_.vars()[var].kind == VarKind::binary && value > 1e-6) value = std::ceil(value - 1e-6);
        if (value <= lb_[var] + 1e-12) return true;
        if (value > ub_[var] + 1e-9) return false;
        trail_.push_back({var, lb_[var], ub_[var]});
        lb_[var] = std::min(value, ub_[var]);
        queue_var_rows(var);
        return true;
    }

    // Activity propagation to a fixpoint (budgeted). Returns false on proven
    // infeasibility. The budget covers the Bellman-Ford style convergence of
    // two-variable difference rows; richer continuous structures would stop
    // early, which is sound (weaker bounds only).
    bool propagate() {
        std::size_t budget = (model_.rows().size() + 1) * (2 * ncont_ + 16);
        while (!queue_.empty()) {
            if (budget-- == 0) {
                for (std::size_t r : queue_) row_queued_[r] = 0;
                queue_.clear();
                return !leaf_reached_unconverged();
            }
            const std::size_t r = queue_.back();
            queue_.pop_back();
            row_queued_[r] = 0;
            const auto& row = model_.rows()[r];
            double minact = 0.0, maxact = 0.0;
            for (const auto& t : row.terms) {
                const std::size_t v = static_cast<std::size_t>(t.var);
                if (t.coeff > 0.0) {
                    minact += t.coeff * lb_[v];
                    maxact += t.coeff * ub_[v];
                } else {
                    minact += t.coeff * ub_[v];
                    maxact += t.coeff * lb_[v];
                }
            }
            const bool need_le = row.sense != RowSense::ge;  // lhs <= rhs
            const bool need_ge = row.sense != RowSense::le;  // lhs >= rhs
            if (need_le && minact > row.rhs + kEps) return false;
            if (need_ge && maxact < row.rhs - kEps) return false;
            if (need_le) {
                for (const auto& t : row.terms) {
                    const std::size_t v = static_cast<std::size_t>(t.var);
                    if (t.coeff > 0.0) {
                        const double room = row.rhs - (minact - t.coeff * lb_[v]);
                        if (!tighten_ub(v, room / t.coeff)) return false;
                    } else {
                        const double room = row.rhs - (minact - t.coeff * ub_[v]);
                        if (!tighten_lb(v, room / t.coeff)) return false;
                    }
                }
            }
            if (need_ge) {
                for (const auto& t : row.terms) {
                    const std::size_t v = static_cast<std::size_t>(t.var);
                    if (t.coeff > 0.0) {
                        const double room = row.rhs - (maxact - t.coeff * ub_[v]);
                        if (!tighten_lb(v, room / t.coeff)) return false;
                    } else {
                        const double room = row.rhs - (maxact - t.coeff * lb_[v]);
                        if (!tighten_ub(v, room / t.coeff)) return false;
                    }
                }
            }
        }
        return true;
    }

    bool leaf_reached_unconverged() const {
        for (std::size_t i = 0; i < nvars_; ++i)
            if (model_.vars()[i].kind == VarKind::binary && ub_[i] - lb_[i] > 0.5) return false;
        return true;  // all binaries fixed but continuous part diverged: positive cycle
    }

    // All binaries fixed and propagation converged: extract the assignment,
    // run the hook loop, and update the incumbent.
    void handle_leaf() {
        // Cuts recorded on other branches may never have propagated along
        // this path; bring them in so the continuous part (z in particular)
        // sits at its true lower bounds before the assignment is read.
        for (std::size_t r : lazy_rows_) queue_row(r);
        if (!propagate()) return;
        for (int round = 0; round < 64; ++round) {
            std::vector<double> x(nvars_);
            for (std::size_t i = 0; i < nvars_; ++i) {
                const double c = model_.objective()[i];
                x[i] = c < 0.0 ? ub_[i] : lb_[i];
            }
            // Lazy rows added on other branches may never have propagated
            // here; a full check keeps the leaf honest.
            if (!model_.check_assignment(x, 1e-6).empty()) return;
            const double obj = model_.objective_value(x);
            if (has_incumbent_ && obj >= incumbent_obj_ - kEps) return;
            if (hook_) {
                auto cuts = hook_(x, obj);
                if (!cuts.empty()) {
                    for (auto& row : cuts) {
                        row.lazy = true;
                        const std::size_t idx = static_cast<std::size_t>(
                            model_.add_row(row.name, row.terms, row.sense, row.rhs, true));
                        register_row(idx);
                        lazy_rows_.push_back(idx);
                        queue_row(idx);
                    }
                    if (!propagate()) return;  // leaf cut off
                    continue;                  // re-read the leaf under the new rows
                }
            }
            incumbent_ = std::move(x);
            incumbent_obj_ = obj;
            has_incumbent_ = true;
            return;
        }
    }

    MilpModel& model_;
    const SolveLimits& limits_;
    const IntegerHook& hook_;
    std::size_t nvars_ = 0;
    std::size_t ncont_ = 0;
    std::vector<double> lb_, ub_;
    std::vector<std::vector<std::size_t>> rows_of_var_;
    struct TrailEntry {
        std::size_t var;
        double lb, ub;
    };
    std::vector<TrailEntry> trail_;
    std::vector<std::size_t> queue_;
    std::vector<std::size_t> lazy_rows_;
    std::vector<char> row_queued_;
    std::vector<double> incumbent_;
    double incumbent_obj_ = kInf;
    bool has_incumbent_ = false;
};

}  // namespace

SolveResult BuiltinBackend::solve(MilpModel& model, const SolveLimits& limits, const IntegerHook& hook,
                                  const std::vector<double>* warm_start) {
    Search search(model, limits, hook);
    return search.run(warm_start);
}

SolveResult ExternalFileBackend::solve(MilpModel& model, const SolveLimits& limits, const IntegerHook& hook,
                                       const std::vector<double>* warm_start) {
    (void)limits;
    if (hook) throw CapabilityError("external-file backend does not support integer callbacks");
    if (warm_start) throw CapabilityError("external-file backend does not support warm starts");
    namespace fs = std::filesystem;
    fs::create_directories(workdir_);
    const std::string base = workdir_ + "/" + stem_ + "_" + std::to_string(round_++);
    export_model(model, ModelFormat::lp, base + ".lp");
    const std::string sol_path = base + ".sol";
    SolveResult result;
    if (!fs::exists(sol_path)) {
        result.status = SolveStatus::limit;
        return result;  // model written; the caller reports where the answer must go
    }
    result.assignment = read_assignment_file(model, sol_path);
    const auto bad = model.check_assignment(result.assignment, 1e-6);
    if (!bad.empty()) throw std::runtime_error("external-file backend: imported assignment infeasible: " + bad.front());
    result.objective = model.objective_value(result.assignment);
    result.lower_bound = -kInf;
    result.status = SolveStatus::feasible;
    return result;
}

std::unique_ptr<MilpBackend> make_backend(const std::string& spec) {
    if (spec == "builtin") return std::make_unique<BuiltinBackend>();
    if (spec.rfind("external-file:", 0) == 0)
        return std::make_unique<ExternalFileBackend>(spec.substr(std::string("external-file:").size()));
    throw std::runtime_error("unknown backend '" + spec + "' (use builtin or external-file:<dir>)");
}

}  // namespace pdpt
