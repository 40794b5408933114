#pragma once

// Weighted Partial MaxSAT instances, a small exact branch-and-bound
// solver, Tseitin-style builder helpers and DIMACS WCNF import/export.
//
// The solver is deliberately simple: unit propagation on all clauses,
// deterministic branching (ascending variable index, true branch first)
// and pruning on the accumulated cost of falsified soft clauses. Exact
// optima at desk scale are what the unification layer needs; bigger
// instances can be exported as WCNF and handed to an external solver.

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace oaru::wpms {

// A literal is a signed variable index (DIMACS convention, var >= 1).
using Lit = int;

inline int var_of(Lit l) { return l < 0 ? -l : l; }

struct WeightedClause {
    std::vector<Lit> lits;
    std::int64_t weight;  // kHardWeight marks a hard clause

    bool is_hard() const;
};

inline constexpr std::int64_t kHardWeight = -1;

inline bool WeightedClause::is_hard() const { return weight == kHardWeight; }

class WpmsInstance {
public:
    int new_var() { return ++var_count_; }
    void ensure_vars(int n) { if (n > var_count_) var_count_ = n; }
    int var_count() const { return var_count_; }

    // Clauses are normalized on insertion: duplicate literals collapse
    // and tautologies (complementary pair) are dropped.
    void add_hard(std::vector<Lit> lits);
    void add_soft(std::vector<Lit> lits, std::int64_t weight);

    // At-Most-1 over the given literals, quadratic encoding:
    // one hard binary clause per unordered pair.
    void add_at_most_one(const std::vector<Lit>& lits);

    // y <-> AND(xs): hard clauses {(~y v x) for each x} + (y v ~x1 ... ~xn).
    // Empty conjunction is true, so n = 0 emits the unit (y).
    void add_iff_conjunction(Lit y, const std::vector<Lit>& xs);

    // z <-> OR(ys): hard clauses {(z v ~y) for each y} + (~z v y1 ... yn).
    // Empty disjunction is false, so n = 0 emits the unit (~z).
    void add_iff_disjunction(Lit z, const std::vector<Lit>& ys);

    const std::vector<WeightedClause>& hard() const { return hard_; }
    const std::vector<WeightedClause>& soft() const { return soft_; }
    std::size_t clause_count() const { return hard_.size() + soft_.size(); }
    std::int64_t soft_weight_sum() const;

    // Cost contributed by soft clauses that were empty after normalization
    // (always falsified), plus a flag for an empty hard clause.
    std::int64_t base_cost() const { return base_cost_; }
    bool trivially_unsat() const { return trivially_unsat_; }

private:
    int var_count_ = 0;
    std::vector<WeightedClause> hard_;
    std::vector<WeightedClause> soft_;
    std::int64_t base_cost_ = 0;
    bool trivially_unsat_ = false;
};

struct WpmsSolution {
    enum class Status { Optimal, Unsat, Timeout };

    Status status = Status::Unsat;
    std::vector<std::uint8_t> assignment;  // 1-based; [0] unused
    std::int64_t cost = 0;                 // optimal cost, or best bound on timeout

    bool optimal() const { return status == Status::Optimal; }
    bool value(int var) const { return assignment[static_cast<std::size_t>(var)] != 0; }
};

// Exact solve. The optional budget turns the search into an anytime one:
// on expiry the result carries Status::Timeout and the best known cost.
WpmsSolution solve(const WpmsInstance& instance,
                   std::optional<std::chrono::milliseconds> budget = std::nullopt);

// Evaluates a full assignment: sum of falsified soft weights, or nullopt
// if some hard clause is falsified.
std::optional<std::int64_t> evaluate(const WpmsInstance& instance,
                                     const std::vector<std::uint8_t>& assignment);

// DIMACS WCNF, classic variant: header "p wcnf V C TOP" with
// TOP = 1 + sum of soft weights; hard clauses carry weight TOP.
void write_wcnf(const WpmsInstance& instance, std::ostream& out);
WpmsInstance read_wcnf(std::istream& in);
void write_wcnf_file(const WpmsInstance& instance, const std::string& path);
WpmsInstance read_wcnf_file(const std::string& path);

// Runs an external WPMS solver: the executable gets the WCNF path as its
// first argument and must print "o <cost>" and "v <lit...>" lines.
// The reported assignment is re-evaluated locally; a mismatch between
// the reported and recomputed cost is an error.
WpmsSolution solve_external(const WpmsInstance& instance, const std::string& solver_path);

}  // namespace oaru::wpms
