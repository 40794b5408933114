#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "oaru/sat_reduction.hpp"
#include "support.hpp"

using namespace oaru;
using testsup::fixture;

namespace {

// truth-table oracle over all 2^V assignments
bool oracle_sat(const ThreeSatInstance& inst) {
    for (std::uint64_t bits = 0; bits < (1ull << inst.var_count); ++bits) {
        std::vector<bool> a(static_cast<std::size_t>(inst.var_count));
        for (int v = 0; v < inst.var_count; ++v) a[static_cast<std::size_t>(v)] = (bits >> v) & 1u;
        if (inst.satisfied_by(a)) return true;
    }
    return inst.clauses.empty();
}

// maximum number of simultaneously satisfiable clauses
std::size_t oracle_max_sat(const ThreeSatInstance& inst) {
    std::size_t best = 0;
    for (std::uint64_t bits = 0; bits < (1ull << inst.var_count); ++bits) {
        std::vector<bool> a(static_cast<std::size_t>(inst.var_count));
        for (int v = 0; v < inst.var_count; ++v) a[static_cast<std::size_t>(v)] = (bits >> v) & 1u;
        std::size_t sat = 0;
        for (const auto& c : inst.clauses) {
            bool ok = false;
            for (int l : c) {
                bool val = a[static_cast<std::size_t>((l < 0 ? -l : l) - 1)];
                ok = ok || (l > 0 ? val : !val);
            }
            if (ok) ++sat;
        }
        best = std::max(best, sat);
    }
    return best;
}

ThreeSatInstance appendix_instance() {
    ThreeSatInstance inst;
    inst.var_count = 4;
    inst.clauses = {{1, -2, -3}, {-2, 3, -4}, {1, -2, 4}};
    return inst;
}

ThreeSatInstance random_instance(std::mt19937_64& rng, int max_vars, int max_clauses) {
    std::uniform_int_distribution<int> nv(1, max_vars);
    ThreeSatInstance inst;
    inst.var_count = nv(rng);
    std::uniform_int_distribution<int> nc(1, max_clauses);
    std::uniform_int_distribution<int> pick(1, inst.var_count);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> width(1, 3);  // padded below
    int n = nc(rng);
    for (int i = 0; i < n; ++i) {
        std::vector<int> lits;
        int w = width(rng);
        for (int k = 0; k < w; ++k) lits.push_back(coin(rng) ? pick(rng) : -pick(rng));
        while (lits.size() < 3) lits.push_back(lits.back());
        inst.clauses.push_back({lits[0], lits[1], lits[2]});
    }
    return inst;
}

}  // namespace

TEST_CASE("reduction sizes for the four-variable three-clause instance") {
    auto inst = appendix_instance();
    auto [left, right] = reduce_3sat(inst);
    CHECK(left.size() == 3);
    CHECK(right.size() == 21);  // 7 per clause
    CHECK(left.param_count() == 4);
    CHECK(right.param_count() == 0);
    CHECK(right.objects().size() == 8);  // true-x / false-x per variable
    for (const auto& lp : left.labeled()) CHECK(lp.label == Label::Pre);
    for (const auto& lp : right.labeled()) CHECK(lp.label == Label::Pre);
}

TEST_CASE("the four-variable instance is satisfiable through unification") {
    auto inst = appendix_instance();
    SatDecision d = decide_sat_via_au(inst);
    CHECK(d.satisfiable);
    CHECK(d.preserved_left == 3);
    CHECK(inst.satisfied_by(d.assignment));
    // one known model, for reference
    CHECK(inst.satisfied_by({true, false, false, true}));
}

TEST_CASE("single clause yields exactly seven right-hand preconditions") {
    ThreeSatInstance inst;
    inst.var_count = 3;
    inst.clauses = {{1, -2, -3}};
    auto [left, right] = reduce_3sat(inst);
    CHECK(left.size() == 1);
    CHECK(right.size() == 7);
    CHECK(decide_sat_via_au(inst).satisfiable);
}

TEST_CASE("empty clause set is trivially satisfiable") {
    ThreeSatInstance inst;
    inst.var_count = 2;
    auto [left, right] = reduce_3sat(inst);
    CHECK(left.size() == 0);
    CHECK(right.size() == 0);
    CHECK(decide_sat_via_au(inst).satisfiable);
}

TEST_CASE("padded contradiction is unsatisfiable") {
    ThreeSatInstance inst;
    inst.var_count = 1;
    inst.clauses = {{1, 1, 1}, {-1, -1, -1}};
    auto [left, right] = reduce_3sat(inst);
    CHECK(left.size() == 2);   // distinct per-clause symbols keep both atoms
    CHECK(right.size() == 2);  // a single satisfying row per padded clause
    SatDecision d = decide_sat_via_au(inst);
    CHECK_FALSE(d.satisfiable);
    CHECK(d.preserved_left == 1);
}

TEST_CASE("agreement with the truth-table oracle on random padded instances") {
    std::mt19937_64 rng(505);
    for (int round = 0; round < 60; ++round) {
        ThreeSatInstance inst = random_instance(rng, 10, 12);
        SatDecision d = decide_sat_via_au(inst);
        CHECK(d.satisfiable == oracle_sat(inst));
        if (d.satisfiable) CHECK(inst.satisfied_by(d.assignment));
    }
}

TEST_CASE("preserved preconditions count the 3-MaxSAT optimum") {
    std::mt19937_64 rng(7007);
    for (int round = 0; round < 25; ++round) {
        ThreeSatInstance inst = random_instance(rng, 6, 6);
        // the counting invariant is stated over distinct clause atoms; with
        // per-clause symbols every clause keeps its own atom
        SatDecision d = decide_sat_via_au(inst);
        CHECK(static_cast<std::size_t>(d.preserved_left) == oracle_max_sat(inst));
    }
}

TEST_CASE("reduction size is linear in the clause count") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 20; ++round) {
        ThreeSatInstance inst;
        inst.var_count = 6;
        std::uniform_int_distribution<int> pick(1, 6);
        std::uniform_int_distribution<int> coin(0, 1);
        std::uniform_int_distribution<int> nc(1, 8);
        int n = nc(rng);
        for (int i = 0; i < n; ++i) {
            // three distinct variables per clause
            std::set<int> vars;
            while (vars.size() < 3) vars.insert(pick(rng));
            std::array<int, 3> c{};
            int k = 0;
            for (int v : vars) c[static_cast<std::size_t>(k++)] = coin(rng) ? v : -v;
            inst.clauses.push_back(c);
        }
        auto [left, right] = reduce_3sat(inst);
        CHECK(left.size() == inst.clauses.size());
        CHECK(right.size() == 7 * inst.clauses.size());
    }
}

TEST_CASE("dimacs cnf reading and padding") {
    SUBCASE("appendix fixture") {
        ThreeSatInstance inst = read_dimacs_cnf_file(fixture("cnf/appendix.cnf"));
        CHECK(inst.var_count == 4);
        REQUIRE(inst.clauses.size() == 3);
        CHECK(inst.clauses[0] == std::array<int, 3>{1, -2, -3});
    }
    SUBCASE("short clauses are padded by repetition") {
        ThreeSatInstance inst = read_dimacs_cnf_file(fixture("cnf/contradiction.cnf"));
        REQUIRE(inst.clauses.size() == 2);
        CHECK(inst.clauses[0] == std::array<int, 3>{1, 1, 1});
        CHECK(inst.clauses[1] == std::array<int, 3>{-1, -1, -1});
        CHECK_FALSE(decide_sat_via_au(inst).satisfiable);
    }
    SUBCASE("malformed inputs") {
        std::istringstream no_header("1 2 3 0\n");
        CHECK_THROWS_AS(read_dimacs_cnf(no_header), std::runtime_error);
        std::istringstream wide("p cnf 4 1\n1 2 3 4 0\n");
        CHECK_THROWS_WITH_AS(read_dimacs_cnf(wide), doctest::Contains("more than 3"),
                             std::runtime_error);
        std::istringstream unterminated("p cnf 2 1\n1 2\n");
        CHECK_THROWS_AS(read_dimacs_cnf(unterminated), std::runtime_error);
        std::istringstream out_of_range("p cnf 2 1\n1 3 0\n");
        CHECK_THROWS_AS(read_dimacs_cnf(out_of_range), std::runtime_error);
    }
}
