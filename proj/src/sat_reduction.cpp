#include "oaru/sat_reduction.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oaru {

namespace {

std::string var_name(int v) { return "x" + std::to_string(v); }

ObjectRef ta_constant(int v, bool value) {
    return ObjectRef::constant((value ? "true-x" : "false-x") + std::to_string(v));
}

std::string clause_symbol(std::size_t index) { return "clause" + std::to_string(index + 1); }

void check(const ThreeSatInstance& inst) {
    if (inst.var_count < 0) throw std::invalid_argument("negative variable count");
    for (const auto& c : inst.clauses)
        for (int l : c) {
            int v = l < 0 ? -l : l;
            if (v < 1 || v > inst.var_count)
                throw std::invalid_argument("literal out of range: " + std::to_string(l));
        }
}

}  // namespace

bool ThreeSatInstance::satisfied_by(const std::vector<bool>& assignment) const {
    for (const auto& c : clauses) {
        bool sat = false;
        for (int l : c) {
            int v = l < 0 ? -l : l;
            bool val = assignment[static_cast<std::size_t>(v - 1)];
            sat = sat || (l > 0 ? val : !val);
        }
        if (!sat) return false;
    }
    return true;
}

std::pair<ActionSchema, ActionSchema> reduce_3sat(const ThreeSatInstance& inst) {
    check(inst);
    ActionSchema left("sat-left");
    ActionSchema right("sat-right");

    for (std::size_t j = 0; j < inst.clauses.size(); ++j) {
        const auto& c = inst.clauses[j];
        Predicate lhs;
        lhs.symbol = clause_symbol(j);
        for (int l : c) lhs.args.push_back(ObjectRef::variable(var_name(l < 0 ? -l : l)));
        left.insert(lhs, Label::Pre, true);

        // distinct variables of the clause, in first-occurrence order
        std::vector<int> vars;
        for (int l : c) {
            int v = l < 0 ? -l : l;
            bool seen = false;
            for (int w : vars) seen = seen || w == v;
            if (!seen) vars.push_back(v);
        }
        // every assignment of the clause's variables that satisfies it
        for (std::size_t bits = 0; bits < (1u << vars.size()); ++bits) {
            bool sat = false;
            for (int l : c) {
                int v = l < 0 ? -l : l;
                std::size_t pos = 0;
                while (vars[pos] != v) ++pos;
                bool val = (bits >> pos) & 1u;
                sat = sat || (l > 0 ? val : !val);
            }
            if (!sat) continue;
            Predicate row;
            row.symbol = clause_symbol(j);
            for (int l : c) {
                int v = l < 0 ? -l : l;
                std::size_t pos = 0;
                while (vars[pos] != v) ++pos;
                row.args.push_back(ta_constant(v, (bits >> pos) & 1u));
            }
            right.insert(row, Label::Pre, true);
        }
    }
    return {std::move(left), std::move(right)};
}

SatDecision decide_sat_via_au(const ThreeSatInstance& inst, const AuOptions& options) {
    auto [left, right] = reduce_3sat(inst);
    AuOutcome outcome = unify(left, right, options);
    if (outcome.status == AuOutcome::Status::Timeout)
        throw std::runtime_error("unification timed out while deciding satisfiability");
    if (outcome.status == AuOutcome::Status::NotUnifiable)
        throw std::logic_error("reduction produced a non-unifiable pair");  // no hard effects exist

    SatDecision decision;
    const UnificationResult& res = *outcome.result;
    // preserved left preconditions = matched pairs = |L(unified)|
    decision.preserved_left = static_cast<std::int64_t>(res.unified.size());
    decision.satisfiable = decision.preserved_left == static_cast<std::int64_t>(left.size());

    decision.assignment.assign(static_cast<std::size_t>(inst.var_count), true);
    for (const auto& pr : res.tau) {
        if (!pr.left.is_variable()) continue;
        const std::string& ln = pr.left.name;
        if (ln.size() < 2 || ln[0] != 'x') continue;
        int v = std::stoi(ln.substr(1));
        if (v < 1 || v > inst.var_count) continue;
        if (pr.right.name.rfind("true-", 0) == 0)
            decision.assignment[static_cast<std::size_t>(v - 1)] = true;
        else if (pr.right.name.rfind("false-", 0) == 0)
            decision.assignment[static_cast<std::size_t>(v - 1)] = false;
    }
    return decision;
}

ThreeSatInstance read_dimacs_cnf(std::istream& in) {
    ThreeSatInstance inst;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("cnf line " + std::to_string(lineno) + ": " + msg);
    };
    std::vector<int> pending;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string p, fmt;
            int v = 0, c = 0;
            if (!(ls >> p >> fmt >> v >> c) || p != "p" || fmt != "cnf" || v < 0)
                fail("expected header 'p cnf V C'");
            have_header = true;
            inst.var_count = v;
            continue;
        }
        int l;
        while (ls >> l) {
            if (l != 0) {
                if (l > inst.var_count || -l > inst.var_count)
                    fail("literal out of range: " + std::to_string(l));
                pending.push_back(l);
                continue;
            }
            if (pending.empty()) fail("empty clause");
            if (pending.size() > 3) fail("clause has more than 3 literals");
            while (pending.size() < 3) pending.push_back(pending.back());
            inst.clauses.push_back({pending[0], pending[1], pending[2]});
            pending.clear();
        }
    }
    if (!have_header) {
        lineno = std::max(lineno, 1);
        fail("missing 'p cnf' header");
    }
    if (!pending.empty()) fail("clause not terminated by 0");
    check(inst);
    return inst;
}

ThreeSatInstance read_dimacs_cnf_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open cnf file: " + path);
    return read_dimacs_cnf(in);
}

}  // namespace oaru
