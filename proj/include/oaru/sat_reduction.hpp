#pragma once

// Polynomial reduction from 3-SAT to Action Unification, used both as a
// hardness demonstration and as an end-to-end correctness oracle for the
// unification pipeline.
//
// For variables x1..xn and clauses C, the left action has one variable
// parameter per xi and, per clause j, a ternary precondition
// clause<j>(var(l1), var(l2), var(l3)) over the clause's variables. The
// right action is parameterless: per clause j it lists, for every truth
// assignment of the clause's variables that satisfies it, a precondition
// clause<j>(ta1, ta2, ta3) over constants true-xi / false-xi. Clause
// predicates carry the clause index in their symbol so that clauses over
// the same variable tuple keep distinct atoms and the counting invariants
// (|pre left| = |C|, |pre right| = 7|C| for three distinct literals) hold
// exactly. Both effect lists are empty.
//
// The formula is satisfiable iff unification preserves all |C| left
// preconditions; the assignment is read off the object mapping, xi to
// true-xi or false-xi.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "oaru/model.hpp"
#include "oaru/unification.hpp"

namespace oaru {

struct ThreeSatInstance {
    int var_count = 0;
    // signed 1-based variable indices; exactly 3 literals per clause,
    // duplicates allowed (padding shorter clauses)
    std::vector<std::array<int, 3>> clauses;

    bool satisfied_by(const std::vector<bool>& assignment) const;
};

// Builds the action pair (left, right) described above.
std::pair<ActionSchema, ActionSchema> reduce_3sat(const ThreeSatInstance& inst);

struct SatDecision {
    bool satisfiable = false;
    // assignment[i] for variable i+1; only meaningful when satisfiable
    std::vector<bool> assignment;
    std::int64_t preserved_left = 0;  // left preconditions kept by the optimum
};

// Decides satisfiability through unify(); throws on solver timeout.
SatDecision decide_sat_via_au(const ThreeSatInstance& inst, const AuOptions& options = {});

// DIMACS CNF; clauses with 1 or 2 literals are padded by repetition,
// clauses with more than 3 literals are rejected.
ThreeSatInstance read_dimacs_cnf(std::istream& in);
ThreeSatInstance read_dimacs_cnf_file(const std::string& path);

}  // namespace oaru
