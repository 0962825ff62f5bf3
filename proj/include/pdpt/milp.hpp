#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace pdpt {

enum class VarKind { continuous, binary };
enum class RowSense { le, ge, eq };

struct MilpVar {
    std::string name;
    double lb = 0.0;
    double ub = 0.0;
    VarKind kind = VarKind::continuous;
};

struct MilpTerm {
    int var = -1;
    double coeff = 0.0;
};

struct MilpRow {
    std::string name;
    std::vector<MilpTerm> terms;
    RowSense sense = RowSense::le;
    double rhs = 0.0;
    bool lazy = false;  // true for rows added during the solve (cuts)
};

// Solver-agnostic minimization MILP. Variable and row order is the
// declaration order and is what every export and the builtin backend use, so
// models are bit-reproducible.
class MilpModel {
  public:
    int add_var(const std::string& name, double lb, double ub, VarKind kind);
    int add_binary(const std::string& name) { return add_var(name, 0.0, 1.0, VarKind::binary); }
    void fix_var(int var, double value);
    void set_objective_term(int var, double coeff);

    int add_row(const std::string& name, std::vector<MilpTerm> terms, RowSense sense, double rhs, bool lazy = false);

    int var_index(const std::string& name) const;  // -1 when absent
    const std::vector<MilpVar>& vars() const { return vars_; }
    const std::vector<MilpRow>& rows() const { return rows_; }
    const std::vector<double>& objective() const { return objective_; }

    // All rows and bounds satisfied within tol; returns violation messages.
    std::vector<std::string> check_assignment(const std::vector<double>& x, double tol = 1e-6) const;
    double objective_value(const std::vector<double>& x) const;

  private:
    std::vector<MilpVar> vars_;
    std::vector<MilpRow> rows_;
    std::vector<double> objective_;  // dense coefficient per var
    std::unordered_map<std::string, int> index_;
};

enum class ModelFormat { lp, mps };

// Deterministic text export: CPLEX-LP or fixed-form MPS. Throws on duplicate
// names before writing anything.
void export_model(const MilpModel& model, ModelFormat format, const std::string& path);
std::string export_model_string(const MilpModel& model, ModelFormat format);

// Assignment file: one "varname value" pair per line.
std::vector<double> read_assignment_file(const MilpModel& model, const std::string& path);
void write_assignment_file(const MilpModel& model, const std::vector<double>& x, const std::string& path);

}  // namespace pdpt
