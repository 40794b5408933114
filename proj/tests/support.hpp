#pragma once

// Shared helpers for the test suites: tiny builders, random generators
// and independent brute-force oracles.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oaru/model.hpp"
#include "oaru/wpms.hpp"

namespace testsup {

using oaru::ActionSchema;
using oaru::Label;
using oaru::ObjectRef;
using oaru::Predicate;

inline Predicate atom(const std::string& symbol, const std::vector<std::string>& args = {}) {
    Predicate p;
    p.symbol = symbol;
    for (const auto& a : args) p.args.push_back(oaru::parse_object(a));
    return p;
}

inline oaru::State state_of(const std::vector<std::string>& trues,
                            const std::vector<std::string>& unknowns = {}) {
    oaru::State s;
    for (const auto& t : trues) s.trues.insert(oaru::parse_predicate(t));
    for (const auto& u : unknowns) s.unknowns.insert(oaru::parse_predicate(u));
    return s;
}

// Builds a schema from canonical labeled lines ("PRE p(a,b)", "ADD q(c)?").
inline ActionSchema schema_of(const std::string& name, const std::vector<std::string>& lines) {
    ActionSchema s(name);
    for (const auto& l : lines) s.insert(oaru::parse_labeled_predicate(l));
    return s;
}

// Exhaustive WPMS oracle: tries all 2^V assignments.
inline std::optional<std::int64_t> enumerate_optimum(const oaru::wpms::WpmsInstance& inst) {
    int v = inst.var_count();
    if (v > 24) throw std::invalid_argument("enumerate_optimum: too many variables");
    std::optional<std::int64_t> best;
    for (std::uint64_t bits = 0; bits < (1ull << v); ++bits) {
        std::vector<std::uint8_t> assignment(static_cast<std::size_t>(v) + 1, 0);
        for (int i = 1; i <= v; ++i)
            assignment[static_cast<std::size_t>(i)] = (bits >> (i - 1)) & 1u;
        auto cost = oaru::wpms::evaluate(inst, assignment);
        if (cost && (!best || *cost < *best)) best = cost;
    }
    return best;
}

struct SchemaGenConfig {
    int n_constants = 2;        // drawn from a..d
    int n_variables = 2;        // drawn from u, v
    int max_atoms = 6;          // labeled predicates per schema
    bool allow_uncertain = true;
};

// Random schema over a small shared vocabulary: p/1, q/2, r/0, s/2, t/1.
// The object pool has n_constants + n_variables entries, so no schema can
// reference more objects than that.
inline ActionSchema random_schema(std::mt19937_64& rng, const std::string& name,
                                  const SchemaGenConfig& cfg = {}) {
    static const std::vector<std::pair<std::string, int>> vocab = {
        {"p", 1}, {"q", 2}, {"r", 0}, {"s", 2}, {"t", 1}};
    std::vector<ObjectRef> pool;
    const char* consts = "abcd";
    const char* vars = "uv";
    for (int i = 0; i < cfg.n_constants && i < 4; ++i)
        pool.push_back(ObjectRef::constant(std::string(1, consts[i])));
    for (int i = 0; i < cfg.n_variables && i < 2; ++i)
        pool.push_back(ObjectRef::variable(std::string(1, vars[i])));

    std::uniform_int_distribution<int> n_atoms(1, cfg.max_atoms);
    std::uniform_int_distribution<std::size_t> pick_sym(0, vocab.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_obj(0, pool.size() - 1);
    std::uniform_int_distribution<int> pick_label(0, 2);
    std::uniform_int_distribution<int> coin(0, 1);

    ActionSchema schema(name);
    int n = n_atoms(rng);
    for (int i = 0; i < n; ++i) {
        const auto& [sym, arity] = vocab[pick_sym(rng)];
        Predicate p;
        p.symbol = sym;
        for (int k = 0; k < arity; ++k) p.args.push_back(pool[pick_obj(rng)]);
        Label label = static_cast<Label>(pick_label(rng));
        bool certain = cfg.allow_uncertain ? coin(rng) == 0 : true;
        schema.insert(p, label, certain);
    }
    return schema;
}

// Random fully observable state over the same vocabulary.
inline oaru::State random_state(std::mt19937_64& rng, int n_objects, int n_atoms) {
    static const std::vector<std::pair<std::string, int>> vocab = {
        {"p", 1}, {"q", 2}, {"r", 0}, {"s", 2}, {"t", 1}};
    std::vector<ObjectRef> pool;
    const char* consts = "abcdef";
    for (int i = 0; i < n_objects && i < 6; ++i)
        pool.push_back(ObjectRef::constant(std::string(1, consts[i])));
    std::uniform_int_distribution<std::size_t> pick_sym(0, vocab.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_obj(0, pool.size() - 1);
    oaru::State s;
    for (int i = 0; i < n_atoms; ++i) {
        const auto& [sym, arity] = vocab[pick_sym(rng)];
        Predicate p;
        p.symbol = sym;
        for (int k = 0; k < arity; ++k) p.args.push_back(pool[pick_obj(rng)]);
        s.trues.insert(p);
    }
    return s;
}

inline std::string fixture(const std::string& rel) { return std::string(OARU_FIXTURE_DIR) + "/" + rel; }

}  // namespace testsup
