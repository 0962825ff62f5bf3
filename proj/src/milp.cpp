#include "pdpt/milp.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pdpt {

int MilpModel::add_var(const std::string& name, double lb, double ub, VarKind kind) {
    if (kind == VarKind::binary && (lb < 0.0 || ub > 1.0))
        throw std::invalid_argument("milp: binary variable '" + name + "' needs bounds within [0,1]");
    const int idx = static_cast<int>(vars_.size());
    vars_.push_back({name, lb, ub, kind});
    objective_.push_back(0.0);
    index_.emplace(name, idx);
    return idx;
}

void MilpModel::fix_var(int var, double value) {
    vars_[static_cast<std::size_t>(var)].lb = value;
    vars_[static_cast<std::size_t>(var)].ub = value;
}

void MilpModel::set_objective_term(int var, double coeff) { objective_[static_cast<std::size_t>(var)] = coeff; }

int MilpModel::add_row(const std::string& name, std::vector<MilpTerm> terms, RowSense sense, double rhs, bool lazy) {
    for (const auto& t : terms)
        if (t.var < 0 || t.var >= static_cast<int>(vars_.size()))
            throw std::invalid_argument("milp: row '" + name + "' references an undeclared variable");
    rows_.push_back({name, std::move(terms), sense, rhs, lazy});
    return static_cast<int>(rows_.size()) - 1;
}

int MilpModel::var_index(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

double MilpModel::objective_value(const std::vector<double>& x) const {
    double v = 0.0;
    for (std::size_t i = 0; i < objective_.size(); ++i) v += objective_[i] * x[i];
    return v;
}

std::vector<std::string> MilpModel::check_assignment(const std::vector<double>& x, double tol) const {
    std::vector<std::string> out;
    if (x.size() != vars_.size()) {
        out.push_back("assignment size mismatch");
        return out;
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        const auto& v = vars_[i];
        if (x[i] < v.lb - tol || x[i] > v.ub + tol) out.push_back("bound violated: " + v.name);
        if (v.kind == VarKind::binary && std::abs(x[i] - std::round(x[i])) > tol)
            out.push_back("integrality violated: " + v.name);
    }
    for (const auto& row : rows_) {
        double lhs = 0.0;
        for (const auto& t : row.terms) lhs += t.coeff * x[static_cast<std::size_t>(t.var)];
        const bool ok = row.sense == RowSense::le   ? lhs <= row.rhs + tol
                        : row.sense == RowSense::ge ? lhs >= row.rhs - tol
                                                    : std::abs(lhs - row.rhs) <= tol;
        if (!ok) out.push_back("row violated: " + row.name);
    }
    return out;
}

namespace {

void check_names(const MilpModel& model) {
    std::set<std::string> seen;
    for (const auto& v : model.vars())
        if (!seen.insert(v.name).second) throw std::runtime_error("export: duplicate variable name '" + v.name + "'");
    seen.clear();
    for (const auto& r : model.rows())
        if (!seen.insert(r.name).second) throw std::runtime_error("export: duplicate row name '" + r.name + "'");
}

std::string num(double v) {
    std::ostringstream oss;
    oss.precision(12);
    oss << v;
    return oss.str();
}

std::string export_lp(const MilpModel& model) {
    std::ostringstream out;
    out << "\\ pdpt model export\nMinimize\n obj:";
    bool any = false;
    for (std::size_t i = 0; i < model.vars().size(); ++i) {
        const double c = model.objective()[i];
        if (c == 0.0) continue;
        out << (c >= 0.0 ? " + " : " - ") << num(std::abs(c)) << ' ' << model.vars()[i].name;
        any = true;
    }
    if (!any) out << " 0 " << (model.vars().empty() ? "" : model.vars().front().name);
    out << "\nSubject To\n";
    for (const auto& row : model.rows()) {
        out << ' ' << row.name << ':';
        if (row.terms.empty()) out << " 0 " << model.vars().front().name;
        for (const auto& t : row.terms)
            out << (t.coeff >= 0.0 ? " + " : " - ") << num(std::abs(t.coeff)) << ' '
                << model.vars()[static_cast<std::size_t>(t.var)].name;
        out << (row.sense == RowSense::le ? " <= " : row.sense == RowSense::ge ? " >= " : " = ") << num(row.rhs)
            << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : model.vars()) {
        if (v.lb == v.ub)
            out << ' ' << v.name << " = " << num(v.lb) << '\n';
        else
            out << ' ' << num(v.lb) << " <= " << v.name << " <= " << num(v.ub) << '\n';
    }
    bool have_bin = false;
    for (const auto& v : model.vars()) have_bin = have_bin || v.kind == VarKind::binary;
    if (have_bin) {
        out << "Binaries\n";
        for (const auto& v : model.vars())
            if (v.kind == VarKind::binary) out << ' ' << v.name << '\n';
    }
    out << "End\n";
    return out.str();
}

std::string export_mps(const MilpModel& model) {
    std::ostringstream out;
    out << "NAME          PDPT\nROWS\n N  obj\n";
    for (const auto& row : model.rows()) {
        const char s = row.sense == RowSense::le ? 'L' : row.sense == RowSense::ge ? 'G' : 'E';
        out << ' ' << s << "  " << row.name << '\n';
    }
    out << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (std::size_t i = 0; i < model.vars().size(); ++i) {
        const auto& v = model.vars()[i];
        const bool want_int = v.kind == VarKind::binary;
        if (want_int != in_int) {
            out << "    MARKER" << marker++ << "  'MARKER'  " << (want_int ? "'INTORG'" : "'INTEND'") << '\n';
            in_int = want_int;
        }
        if (model.objective()[i] != 0.0) out << "    " << v.name << "  obj  " << num(model.objective()[i]) << '\n';
        for (const auto& row : model.rows())
            for (const auto& t : row.terms)
                if (t.var == static_cast<int>(i)) out << "    " << v.name << "  " << row.name << "  " << num(t.coeff) << '\n';
    }
    if (in_int) out << "    MARKER" << marker++ << "  'MARKER'  'INTEND'\n";
    out << "RHS\n";
    for (const auto& row : model.rows())
        if (row.rhs != 0.0) out << "    RHS  " << row.name << "  " << num(row.rhs) << '\n';
    out << "BOUNDS\n";
    for (const auto& v : model.vars()) {
        if (v.lb == v.ub) {
            out << " FX BND  " << v.name << "  " << num(v.lb) << '\n';
        } else {
            out << " LO BND  " << v.name << "  " << num(v.lb) << '\n';
            out << " UP BND  " << v.name << "  " << num(v.ub) << '\n';
        }
    }
    out << "ENDATA\n";
    return out.str();
}

}  // namespace

std::string export_model_string(const MilpModel& model, ModelFormat format) {
    check_names(model);
    return format == ModelFormat::lp ? export_lp(model) : export_mps(model);
}

void export_model(const MilpModel& model, ModelFormat format, const std::string& path) {
    const std::string text = export_model_string(model, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("export: cannot write '" + path + "'");
    out << text;
}

std::vector<double> read_assignment_file(const MilpModel& model, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("assignment: cannot open '" + path + "'");
    std::vector<double> x(model.vars().size(), 0.0);
    std::string name;
    double value;
    while (in >> name >> value) {
        const int idx = model.var_index(name);
        if (idx < 0) throw std::runtime_error("assignment: unknown variable '" + name + "'");
        x[static_cast<std::size_t>(idx)] = value;
    }
    return x;
}

void write_assignment_file(const MilpModel& model, const std::vector<double>& x, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("assignment: cannot write '" + path + "'");
    for (std::size_t i = 0; i < model.vars().size(); ++i) out << model.vars()[i].name << ' ' << num(x[i]) << '\n';
}

}  // namespace pdpt
