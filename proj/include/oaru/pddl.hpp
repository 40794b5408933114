#pragma once

// STRIPS fragment of PDDL: domain/problem parsing, plan grounding and
// simulation, a naive breadth-first planner for desk-scale problems, and
// a domain writer for exporting learned libraries.
//
// :typing is compiled away: each type T becomes a static unary predicate
// T(x) added to initial states and to action preconditions. Negative
// preconditions are accepted (ground-truth models only); they are honored
// by the simulator but excluded from labeled-predicate sets.

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oaru/model.hpp"

namespace oaru::pddl {

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line, int col)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ", column " +
                             std::to_string(col) + ")"),
          line(line),
          col(col) {}
    int line;
    int col;
};

struct ActionDef {
    std::string name;
    std::vector<ObjectRef> params;          // declared order
    ActionSchema schema;                    // positive preconditions + effects
    std::vector<Predicate> negative_pre;    // honored by the simulator only
};

struct DomainModel {
    std::string name;
    std::map<std::string, std::size_t> signatures;  // symbol -> arity
    std::vector<ActionDef> actions;

    const ActionDef* find_action(const std::string& name) const;
    std::size_t max_action_arity() const;
};

struct ProblemModel {
    std::string name;
    std::string domain_name;
    std::vector<ObjectRef> objects;  // constants, sorted unique
    State init;                      // fully observable
    std::set<Predicate> goal;

    bool goal_holds(const State& s) const;
};

DomainModel parse_domain(std::istream& in);
DomainModel parse_domain_text(const std::string& text);
DomainModel parse_domain_file(const std::string& path);

ProblemModel parse_problem(std::istream& in, const DomainModel& domain);
ProblemModel parse_problem_text(const std::string& text, const DomainModel& domain);
ProblemModel parse_problem_file(const std::string& path, const DomainModel& domain);

// Writes the domain in the same subset the parser accepts; constants
// referenced by action bodies go into a (:constants ...) block, and
// uncertain entries of each schema are listed in a comment block.
void write_domain(const DomainModel& domain, std::ostream& out);
std::string domain_to_pddl(const DomainModel& domain);

// Wraps learned schemata as a writable domain ("unknown" signatures are
// inferred from the atoms).
DomainModel library_as_domain(const std::string& name, const std::vector<ActionSchema>& lib);

// Grounds the named schema with constant arguments; arity-checked.
ActionSchema ground_action(const DomainModel& domain, const GroundActionRef& ref);

// Applies one grounded action. Throws std::runtime_error with the first
// failing precondition atom if the action is not applicable; the input
// state is left untouched.
State ground_and_apply(const DomainModel& domain, const State& s, const GroundActionRef& ref);

struct Trace {
    std::vector<Observation> steps;
    std::vector<std::optional<GroundActionRef>> refs;  // parallel to steps

    std::size_t size() const { return steps.size(); }
};

// Simulates a plan from the problem's initial state. A step failure is
// reported with its index. `goal_reached` is false (with a warning on the
// returned struct) when the final state misses the goal.
struct SimulationResult {
    Trace trace;
    State final_state;
    bool goal_reached = true;
};

SimulationResult simulate_plan(const DomainModel& domain, const ProblemModel& problem,
                               const std::vector<GroundActionRef>& plan);

// Breadth-first search for a shortest plan, expanding grounded actions in
// lexicographic name order (deterministic tie-break). Throws
// std::runtime_error when no plan exists within max_depth.
std::vector<GroundActionRef> find_plan(const DomainModel& domain, const ProblemModel& problem,
                                       std::size_t max_depth);

// All ground atoms instantiable from the domain's signatures and the
// problem's objects. Masking uses this as the widened pool.
std::vector<Predicate> instantiable_universe(const DomainModel& domain,
                                             const ProblemModel& problem);

// Plan files: one "(action c1 c2 ...)" per line, ';' comments.
std::vector<GroundActionRef> parse_plan(std::istream& in);
std::vector<GroundActionRef> parse_plan_file(const std::string& path);
void write_plan(const std::vector<GroundActionRef>& plan, std::ostream& out);

}  // namespace oaru::pddl
