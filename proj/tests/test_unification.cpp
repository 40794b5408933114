#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "oaru/unification.hpp"
#include "support.hpp"

using namespace oaru;
using testsup::atom;
using testsup::schema_of;

namespace {

// every certain effect of the original must survive as a certain effect
// of the instantiated unified schema (H4); the reverse need not hold,
// since matching an uncertain entry with a certain one dispels its
// uncertainty. Every instantiated entry must occur in the original.
void check_generalization_contract(const ActionSchema& original, const UnificationResult& res,
                                   const Substitution& sigma) {
    ActionSchema instantiated = apply_substitution(res.unified, sigma);
    for (Label l : {Label::Add, Label::Del}) {
        std::set<Predicate> orig_certain, inst_certain;
        for (const auto& lp : original.with_label(l))
            if (lp.certain) orig_certain.insert(lp.atom);
        for (const auto& lp : instantiated.with_label(l))
            if (lp.certain) inst_certain.insert(lp.atom);
        for (const auto& atom : orig_certain) CHECK(inst_certain.count(atom) == 1);
    }
    // relaxation direction: every instantiated entry occurs in the original
    for (const auto& lp : instantiated.labeled()) CHECK(original.contains(lp.atom, lp.label));
}

}  // namespace

TEST_CASE("identical grounded singleton actions unify at cost 0") {
    ActionSchema a = schema_of("a", {"PRE p(a)", "ADD t(a)"});
    AuOutcome res = unify(a, a);
    REQUIRE(res.unified());
    CHECK(res.result->raw_cost == 0);
    CHECK(res.result->n_np == 0);
    CHECK(res.result->n_param == 0);
    CHECK(res.result->unified.size() == 2);
}

TEST_CASE("unmatchable certain effect makes the pair non-unifiable") {
    ActionSchema a1 = schema_of("a1", {"PRE p(a)", "ADD t(a)"});
    ActionSchema a2 = schema_of("a2", {"PRE p(a)"});
    CHECK(unify(a1, a2).status == AuOutcome::Status::NotUnifiable);
    CHECK(unify(a2, a1).status == AuOutcome::Status::NotUnifiable);
    CHECK(brute_force_unify(a1, a2).status == AuOutcome::Status::NotUnifiable);
}

TEST_CASE("w_big is min object count plus one") {
    ActionSchema a1 = schema_of("a1", {"PRE q(a,b)"});
    ActionSchema a2 = schema_of("a2", {"PRE q(c,d)"});
    AuEncoding enc = encode_unification(a1, a2);
    CHECK(enc.w_big == 3);  // min(2,2) + 1
}

TEST_CASE("two shifted move-style actions lift both objects") {
    // oracle first: brute force over all injective partial mappings
    // between {a,b} and {b,c} yields cost 2 = two lifted constant pairs
    ActionSchema a1 = schema_of("a1", {"PRE at(a)", "ADD at(b)", "DEL at(a)"});
    ActionSchema a2 = schema_of("a2", {"PRE at(b)", "ADD at(c)", "DEL at(b)"});

    AuOutcome oracle = brute_force_unify(a1, a2);
    REQUIRE(oracle.unified());
    CHECK(oracle.result->raw_cost == 2);

    AuOutcome res = unify(a1, a2);
    REQUIRE(res.unified());
    CHECK(res.result->raw_cost == oracle.result->raw_cost);
    CHECK(res.result->w_big == 3);
    CHECK(res.result->n_np == 0);
    CHECK(res.result->n_param == 2);
    CHECK(res.result->distance() == doctest::Approx(2.0 / 3.0));

    ActionSchema expected = schema_of("u", {"PRE at(?x0)", "ADD at(?x1)", "DEL at(?x0)"});
    CHECK(canonical_renaming(res.result->unified).same_labeled(canonical_renaming(expected)));

    check_generalization_contract(a1, *res.result, res.result->sigma1);
    check_generalization_contract(a2, *res.result, res.result->sigma2);
}

TEST_CASE("integer part of the distance counts dropped predicates") {
    // three left preconditions have no counterpart; the effect pins a->b
    ActionSchema a1 =
        schema_of("a1", {"PRE q1(a)", "PRE q2(a)", "PRE q3(a)", "PRE p(a)", "ADD e(a)"});
    ActionSchema a2 = schema_of("a2", {"PRE p(b)", "ADD e(b)"});
    AuOutcome oracle = brute_force_unify(a1, a2);
    AuOutcome res = unify(a1, a2);
    REQUIRE(res.unified());
    REQUIRE(oracle.unified());
    CHECK(res.result->raw_cost == oracle.result->raw_cost);
    CHECK(res.result->n_np == 3);
    CHECK(static_cast<std::int64_t>(res.result->distance()) == 3);
    CHECK(res.result->n_param < res.result->w_big);
}

TEST_CASE("self-unification is a renaming") {
    std::mt19937_64 rng(17);
    for (int round = 0; round < 25; ++round) {
        testsup::SchemaGenConfig cfg;
        cfg.allow_uncertain = false;  // fully certain schema
        ActionSchema a = testsup::random_schema(rng, "a", cfg);
        AuOutcome res = unify(a, a);
        REQUIRE(res.unified());
        CHECK(res.result->raw_cost == 0);
        CHECK(res.result->unified.size() == a.size());
        CHECK(canonical_renaming(res.result->unified).same_labeled(canonical_renaming(a)));
    }
}

TEST_CASE("oracle equivalence on random pairs") {
    std::mt19937_64 rng(2024);
    int unified_count = 0, rejected_count = 0;
    for (int round = 0; round < 120; ++round) {
        ActionSchema a1 = testsup::random_schema(rng, "a1");
        ActionSchema a2 = testsup::random_schema(rng, "a2");
        AuOutcome fast = unify(a1, a2);
        AuOutcome slow = brute_force_unify(a1, a2, 64);
        REQUIRE(fast.status == slow.status);
        if (fast.unified()) {
            ++unified_count;
            CHECK(fast.result->raw_cost == slow.result->raw_cost);
            CHECK(fast.result->w_big == slow.result->w_big);
            // decomposition invariant
            CHECK(fast.result->raw_cost ==
                  fast.result->w_big * fast.result->n_np + fast.result->n_param);
            CHECK(fast.result->n_param >= 0);
            CHECK(fast.result->n_param < fast.result->w_big);
            // priority: no mapping preserves more predicates
            auto min_np = brute_force_min_np(a1, a2, 64);
            REQUIRE(min_np.has_value());
            CHECK(fast.result->n_np == *min_np);
        } else {
            ++rejected_count;
        }
    }
    CHECK(unified_count > 5);
    CHECK(rejected_count > 5);
}

TEST_CASE("generalization contract on random unifiable pairs") {
    std::mt19937_64 rng(555);
    int checked = 0;
    for (int round = 0; round < 200 && checked < 25; ++round) {
        ActionSchema a1 = testsup::random_schema(rng, "a1");
        ActionSchema a2 = testsup::random_schema(rng, "a2");
        AuOutcome res = unify(a1, a2);
        if (!res.unified()) continue;
        ++checked;
        check_generalization_contract(a1, *res.result, res.result->sigma1);
        check_generalization_contract(a2, *res.result, res.result->sigma2);
    }
    CHECK(checked >= 10);
}

TEST_CASE("raw cost is symmetric on certain-only actions") {
    std::mt19937_64 rng(808);
    for (int round = 0; round < 25; ++round) {
        testsup::SchemaGenConfig cfg;
        cfg.allow_uncertain = false;
        ActionSchema a1 = testsup::random_schema(rng, "a1", cfg);
        ActionSchema a2 = testsup::random_schema(rng, "a2", cfg);
        AuOutcome fwd = brute_force_unify(a1, a2, 64);
        AuOutcome bwd = brute_force_unify(a2, a1, 64);
        REQUIRE(fwd.status == bwd.status);
        if (fwd.unified()) CHECK(fwd.result->raw_cost == bwd.result->raw_cost);
    }
}

TEST_CASE("subsumed TGA keeps every schema predicate") {
    // grounded instance of the schema extended with extra state atoms
    ActionSchema schema =
        schema_of("move", {"PRE at(?u)", "PRE t(?u)", "ADD at(?v)", "DEL at(?u)", "PRE t(?v)"});
    ActionSchema tga = schema_of(
        "tga", {"PRE at(a)", "PRE t(a)", "PRE t(b)", "PRE t(c)", "PRE p(c)", "ADD at(b)",
                "DEL at(a)"});
    AuOutcome res = unify(schema, tga);
    REQUIRE(res.unified());
    CHECK(res.result->n_np == 2);  // only the TGA extras t(c), p(c) drop
    ActionSchema merged = res.result->unified;
    CHECK(merged.size() == schema.size());
}

TEST_CASE("empty actions unify trivially") {
    ActionSchema empty1("e1"), empty2("e2");
    AuOutcome res = unify(empty1, empty2);
    REQUIRE(res.unified());
    CHECK(res.result->raw_cost == 0);
    CHECK(res.result->unified.empty());
}

TEST_CASE("uncertain effects may be dropped but certain ones may not") {
    ActionSchema a1 = schema_of("a1", {"PRE p(a)", "ADD t(a)?"});
    ActionSchema a2 = schema_of("a2", {"PRE p(b)"});
    AuOutcome res = unify(a1, a2);
    REQUIRE(res.unified());  // the uncertain add is S2, not H4
    CHECK(res.result->n_np == 1);
}

TEST_CASE("matched uncertain and certain entries merge to certain") {
    ActionSchema a1 = schema_of("a1", {"PRE p(a)", "ADD t(a)?"});
    ActionSchema a2 = schema_of("a2", {"PRE p(b)", "ADD t(b)"});
    AuOutcome res = unify(a1, a2);
    REQUIRE(res.unified());
    bool found = false;
    for (const auto& lp : res.result->unified.with_label(Label::Add)) {
        found = true;
        CHECK(lp.certain);
    }
    CHECK(found);

    // two uncertain entries stay uncertain
    ActionSchema b1 = schema_of("b1", {"PRE p(a)", "ADD t(a)?"});
    ActionSchema b2 = schema_of("b2", {"PRE p(b)", "ADD t(b)?"});
    AuOutcome res2 = unify(b1, b2);
    REQUIRE(res2.unified());
    for (const auto& lp : res2.result->unified.with_label(Label::Add)) CHECK_FALSE(lp.certain);
}

TEST_CASE("shared constants are maintained, distinct objects are lifted") {
    ActionSchema a1 = schema_of("a1", {"PRE q(a,b)", "ADD t(b)"});
    ActionSchema a2 = schema_of("a2", {"PRE q(a,c)", "ADD t(c)"});
    AuOutcome res = unify(a1, a2);
    REQUIRE(res.unified());
    CHECK(res.result->n_param == 1);  // only b->c costs; a->a is free
    ActionSchema expected = schema_of("u", {"PRE q(a,?x0)", "ADD t(?x0)"});
    CHECK(canonical_renaming(res.result->unified).same_labeled(canonical_renaming(expected)));
    // sigma maps the fresh parameter back to each side
    CHECK(res.result->sigma1.mapping.at(ObjectRef::variable("x0")) == ObjectRef::constant("b"));
    CHECK(res.result->sigma2.mapping.at(ObjectRef::variable("x0")) == ObjectRef::constant("c"));
}

TEST_CASE("encoding dump writes wcnf and var map") {
    ActionSchema a1 = schema_of("a1", {"PRE p(a)", "ADD t(a)"});
    ActionSchema a2 = schema_of("a2", {"PRE p(b)", "ADD t(b)"});
    AuOptions opts;
    opts.dump_basename = "/tmp/oaru-au-dump";
    AuOutcome res = unify(a1, a2, opts);
    REQUIRE(res.unified());
    std::ifstream wcnf("/tmp/oaru-au-dump.wcnf");
    std::ifstream map("/tmp/oaru-au-dump.map");
    REQUIRE(wcnf.good());
    REQUIRE(map.good());
    std::string first;
    std::getline(wcnf, first);
    CHECK(first.rfind("p wcnf", 0) == 0);
    int x_lines = 0, z_lines = 0;
    std::string line;
    while (std::getline(map, line)) {
        if (line.find(" x ") != std::string::npos) ++x_lines;
        if (line.find(" z1 ") != std::string::npos || line.find(" z2 ") != std::string::npos)
            ++z_lines;
    }
    CHECK(x_lines > 0);
    CHECK(z_lines == 4);
    std::remove("/tmp/oaru-au-dump.wcnf");
    std::remove("/tmp/oaru-au-dump.map");
}

TEST_CASE("brute force rejects pairs over the size cap") {
    ActionSchema big1 = schema_of("b1", {"PRE q(a,b)", "PRE q(c,d)", "ADD p(a)"});
    ActionSchema big2 = schema_of("b2", {"PRE q(a,b)", "PRE q(c,d)", "ADD p(b)"});
    CHECK_THROWS_AS(brute_force_unify(big1, big2, 2), std::invalid_argument);
}
