#pragma once

// Action Unification: generalizing a pair of action schemata into one
// schema that preserves their certain effects, relaxes preconditions and
// lifts matched objects, encoded and solved as Weighted Partial MaxSAT.
//
// Decision variables of the encoding:
//   x[o1,o2]  the object mapping sends o1 (left) to o2 (right),
//   y[c1,c2]  labeled predicates c1 and c2 match,
//   z[i,c]    labeled predicate c of side i is preserved.
// Hard constraints make the mapping an injective partial function (rows
// and columns of x are At-Most-1), tie matches to argument-wise mappings
// (y <-> AND x), tie preservation to having a match (z <-> OR y) and
// force preservation of every certain effect. Soft clauses penalize
// mapping distinct constants (weight 1) and losing preconditions or
// uncertain entries (weight w_big = min object count + 1).
//
// The optimal cost decomposes as w_big * n_np + n_param and scales to a
// distance raw_cost / w_big whose integer part counts dropped predicates.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oaru/model.hpp"
#include "oaru/wpms.hpp"

namespace oaru {

struct ObjectPair {
    ObjectRef left;   // from the first schema's object set
    ObjectRef right;  // from the second schema's object set

    auto operator<=>(const ObjectPair&) const = default;
};

struct UnificationResult {
    ActionSchema unified;
    std::vector<ObjectPair> tau;  // mapped pairs, sorted
    Substitution sigma1;          // fresh parameter -> left object
    Substitution sigma2;          // fresh parameter -> right object
    std::int64_t raw_cost = 0;
    std::int64_t w_big = 1;
    std::int64_t n_np = 0;     // falsified preservation clauses
    std::int64_t n_param = 0;  // falsified lifting-avoidance clauses

    double distance() const { return static_cast<double>(raw_cost) / static_cast<double>(w_big); }
};

// a/w < b/v as exact rationals (w, v > 0).
inline bool distance_less(std::int64_t a, std::int64_t w, std::int64_t b, std::int64_t v) {
    return a * v < b * w;
}

struct AuStats {
    int variables = 0;
    int clauses = 0;
};

struct AuOptions {
    std::optional<std::chrono::milliseconds> budget;
    std::string external_solver;  // path; empty selects the builtin solver
    std::string dump_basename;    // when set, writes <base>.wcnf and <base>.map
};

struct AuOutcome {
    enum class Status { Unified, NotUnifiable, Timeout };

    Status status = Status::NotUnifiable;
    std::optional<UnificationResult> result;  // set iff status == Unified
    AuStats stats;

    bool unified() const { return status == Status::Unified; }
};

// The encoded instance together with its decode tables.
struct AuEncoding {
    wpms::WpmsInstance instance;
    std::vector<LabeledPredicate> left_atoms;   // canonical order
    std::vector<LabeledPredicate> right_atoms;  // canonical order
    std::vector<ObjectPair> x_pairs;            // x var i+1 <-> x_pairs[i]
    std::vector<std::pair<int, int>> candidates;  // y var indices into atoms
    int y_base = 0;   // y var for candidate k is y_base + k + 1 ... see impl
    int z1_base = 0;
    int z2_base = 0;
    std::int64_t w_big = 1;

    int x_var(std::size_t k) const { return static_cast<int>(k) + 1; }
    int y_var(std::size_t k) const { return y_base + static_cast<int>(k) + 1; }
    int z1_var(std::size_t i) const { return z1_base + static_cast<int>(i) + 1; }
    int z2_var(std::size_t j) const { return z2_base + static_cast<int>(j) + 1; }

    void write_var_map(std::ostream& out) const;
};

AuEncoding encode_unification(const ActionSchema& a1, const ActionSchema& a2);

AuOutcome unify(const ActionSchema& a1, const ActionSchema& a2, const AuOptions& options = {});

// Independent oracle: enumerates every injective partial mapping between
// the object sets, scores each under the same objective and returns an
// optimum. Throws when |D1| * |D2| exceeds pair_cap.
AuOutcome brute_force_unify(const ActionSchema& a1, const ActionSchema& a2,
                            std::size_t pair_cap = 16);

// Minimum number of non-preserved predicates over all feasible mappings
// (same enumeration as brute_force_unify); nullopt when none is feasible.
std::optional<std::int64_t> brute_force_min_np(const ActionSchema& a1, const ActionSchema& a2,
                                               std::size_t pair_cap = 16);

}  // namespace oaru
