#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "oaru/engine.hpp"
#include "oaru/evaluation.hpp"
#include "support.hpp"

using namespace oaru;
using testsup::atom;
using testsup::fixture;
using testsup::schema_of;
using testsup::state_of;

namespace {

std::vector<pddl::Trace> suite_traces(const std::string& name, std::size_t n_problems = 8) {
    auto domain = pddl::parse_domain_file(fixture("domains/" + name + ".pddl"));
    std::vector<pddl::Trace> traces;
    for (std::size_t i = 1; i <= n_problems; ++i) {
        auto problem = pddl::parse_problem_file(
            fixture("problems/" + name + "/p" + std::to_string(i) + ".pddl"), domain);
        auto plan = pddl::parse_plan_file(fixture("plans/" + name + "/p" + std::to_string(i) + ".plan"));
        traces.push_back(pddl::simulate_plan(domain, problem, plan).trace);
    }
    return traces;
}

std::string library_text(const Engine& engine) {
    std::string out;
    for (const auto& s : engine.library()) out += to_text(s) + "\n";
    return out;
}

}  // namespace

TEST_CASE("first observation inserts the TGA") {
    Engine engine;
    Observation o{state_of({"p(a)", "q(a,b)"}), state_of({"q(a,b)", "t(a)"})};
    auto out = engine.recognize(o);
    CHECK(engine.library().size() == 1);
    CHECK(out.library_updated);
    CHECK_FALSE(out.replaced.has_value());
    CHECK(out.schema_name == engine.library()[0].name());
    CHECK(check_valid_transition(o.before, out.grounded, o.after));
}

TEST_CASE("identical second observation merges at distance zero") {
    Engine engine;
    Observation o{state_of({"p(a)"}), state_of({"p(a)", "t(a)"})};
    engine.recognize(o);
    auto out = engine.recognize(o);
    CHECK(engine.library().size() == 1);
    REQUIRE(out.raw_cost.has_value());
    CHECK(*out.raw_cost == 0);
    CHECK_FALSE(out.library_updated);  // fully subsumed
    CHECK(engine.update_count() == 1);
}

TEST_CASE("a merge can add parameters while the library size is unchanged") {
    Engine engine;
    // same action applied to different objects: constants must lift
    Observation o1{state_of({"at(a)", "t(a)", "t(b)"}), state_of({"at(b)", "t(a)", "t(b)"})};
    Observation o2{state_of({"at(b)", "t(b)", "t(c)"}), state_of({"at(c)", "t(b)", "t(c)"})};
    engine.recognize(o1);
    ActionSchema before = engine.library()[0];
    auto out = engine.recognize(o2);
    CHECK(engine.library().size() == 1);
    ActionSchema after = engine.library()[0];
    CHECK(before.param_count() == 0);
    CHECK(after.param_count() > 0);
    CHECK(out.library_updated);
    CHECK(out.replaced == before.name());
}

TEST_CASE("a 4-ary move schema generalizes into a 5-ary one") {
    // schema learned from leftward moves only: the reverse direction is
    // still the constant dir-left
    ActionSchema schema = schema_of(
        "action-96",
        {"PRE is-player(?x0)", "PRE at(?x0,?x1)", "PRE clear(?x2)",
         "PRE move-dir(?x1,?x2,?x3)", "PRE move-dir(?x2,?x1,dir-left)",
         "ADD at(?x0,?x2)", "ADD clear(?x1)", "DEL at(?x0,?x1)", "DEL clear(?x2)"});
    REQUIRE(schema.param_count() == 4);

    // an upward move: its reverse direction is dir-down, so the constant
    // has to lift into a fifth parameter
    State before = state_of({"is-player(player-01)", "at(player-01,pos-5-6)",
                             "clear(pos-5-5)", "move-dir(pos-5-6,pos-5-5,dir-up)",
                             "move-dir(pos-5-5,pos-5-6,dir-down)"});
    State after = state_of({"is-player(player-01)", "at(player-01,pos-5-5)",
                            "clear(pos-5-6)", "move-dir(pos-5-6,pos-5-5,dir-up)",
                            "move-dir(pos-5-5,pos-5-6,dir-down)"});

    AuOutcome direct = unify(schema, build_tga({before, after}, "tga"));
    REQUIRE(direct.unified());
    CHECK(direct.result->unified.param_count() == 5);
    CHECK(direct.result->n_np == 0);
    CHECK(direct.result->n_param == 1);  // only dir-left -> dir-down costs
}

TEST_CASE("update detection") {
    ActionSchema a = schema_of("a", {"PRE p(?x)", "PRE q(?x)", "ADD t(?x)"});
    SUBCASE("identical schema is not an update") {
        CHECK_FALSE(is_update(a, a));
    }
    SUBCASE("dropping a predicate is an update") {
        ActionSchema b = schema_of("b", {"PRE p(?x)", "ADD t(?x)"});
        CHECK(is_update(a, b));
    }
    SUBCASE("adding a parameter is an update") {
        ActionSchema b = schema_of("b", {"PRE p(?x)", "PRE q(?y)", "ADD t(?x)"});
        CHECK(is_update(a, b));
    }
}

TEST_CASE("broad phase rejects signature-infeasible pairs only") {
    ActionSchema tga = schema_of("t", {"PRE q(a,b)", "ADD p(a)"});
    SUBCASE("missing add symbol") {
        ActionSchema s = schema_of("s", {"PRE q(?x,?y)", "ADD t(?x)"});
        CHECK_FALSE(broad_phase(s, tga));
        CHECK(unify(s, tga).status == AuOutcome::Status::NotUnifiable);
    }
    SUBCASE("identical actions pass") {
        CHECK(broad_phase(tga, tga));
    }
    SUBCASE("uncertain effects can cover certain ones") {
        ActionSchema s = schema_of("s", {"PRE q(?x,?y)", "ADD p(?x)?"});
        CHECK(broad_phase(s, tga));
    }
    SUBCASE("multiplicity matters") {
        ActionSchema two = schema_of("s", {"ADD p(a)", "ADD p(b)"});
        ActionSchema one = schema_of("s", {"ADD p(c)"});
        CHECK_FALSE(broad_phase(two, one));
    }
}

TEST_CASE("broad phase never rejects a unifiable pair") {
    std::mt19937_64 rng(31);
    for (int round = 0; round < 500; ++round) {
        ActionSchema a = testsup::random_schema(rng, "a");
        ActionSchema b = testsup::random_schema(rng, "b");
        if (!broad_phase(a, b))
            CHECK(unify(a, b).status == AuOutcome::Status::NotUnifiable);
    }
}

TEST_CASE("merge produces a grounded recognized action satisfying the transition") {
    Engine engine;
    std::mt19937_64 rng(5);
    // replay a small gripper prefix and validate every returned action
    auto traces = suite_traces("gripper", 4);
    for (const auto& trace : traces)
        for (const auto& obs : trace.steps) {
            auto out = engine.recognize(obs);
            CHECK(out.grounded.is_grounded());
            CHECK(check_valid_transition(obs.before, out.grounded.certain_part(), obs.after));
        }
    CHECK(engine.library().size() == 3);
}

TEST_CASE("empty trace leaves the engine untouched") {
    Engine engine;
    auto log = run_stream(engine, {pddl::Trace{}}, MaskConfig(0, 0, 0));
    CHECK(log.empty());
    CHECK(engine.library().empty());
}

TEST_CASE("blocks prefix converges to four actions") {
    Engine engine;
    auto traces = suite_traces("blocks", 4);
    auto log = run_stream(engine, traces, MaskConfig(0, 0, 0));
    CHECK(engine.library().size() == 4);
    // updates are monotone along the log
    std::uint64_t prev = 0;
    for (const auto& rec : log) {
        CHECK(rec.updates_so_far >= prev);
        prev = rec.updates_so_far;
    }
}

TEST_CASE("replaying a suite adds no further updates") {
    Engine engine;
    auto traces = suite_traces("blocks", 4);
    run_stream(engine, traces, MaskConfig(0, 0, 0));
    auto before = engine.update_count();
    run_stream(engine, traces, MaskConfig(0, 0, 0));
    CHECK(engine.update_count() == before);
}

TEST_CASE("recognition is deterministic") {
    auto traces = suite_traces("gripper", 5);
    Engine e1, e2;
    run_stream(e1, traces, MaskConfig(0, 0, 0));
    run_stream(e2, traces, MaskConfig(0, 0, 0));
    CHECK(library_text(e1) == library_text(e2));
    std::ostringstream d1, d2;
    e1.export_hierarchy_dot(d1);
    e2.export_hierarchy_dot(d2);
    CHECK(d1.str() == d2.str());
}

TEST_CASE("hierarchy forms a forest with two children per merge node") {
    Engine engine;
    auto traces = suite_traces("blocks", 3);
    run_stream(engine, traces, MaskConfig(0, 0, 0));
    std::size_t leaves = 0, merges = 0;
    std::set<std::string> referenced;
    for (const auto& node : engine.hierarchy()) {
        if (node.children.empty()) {
            ++leaves;
        } else {
            CHECK(node.children.size() == 2);
            ++merges;
            for (const auto& c : node.children) CHECK(referenced.insert(c).second);
        }
    }
    std::size_t steps = 0;
    for (const auto& t : traces) steps += t.size();
    CHECK(leaves == steps);  // one TGA node per observation
    std::ostringstream dot;
    engine.export_hierarchy_dot(dot);
    CHECK(dot.str().find("digraph") == 0);
    CHECK(dot.str().find("->") != std::string::npos);
    (void)merges;
}

TEST_CASE("library export writes pddl and labels sidecar") {
    Engine engine;
    auto traces = suite_traces("gripper", 3);
    run_stream(engine, traces, MaskConfig(0, 0, 0));
    engine.export_library("/tmp/oaru-lib-test", "learned");
    auto dom = pddl::parse_domain_file("/tmp/oaru-lib-test.pddl");
    CHECK(dom.actions.size() == engine.library().size());
    std::ifstream labels("/tmp/oaru-lib-test.labels");
    REQUIRE(labels.good());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(labels, line)) {
        if (line.empty()) continue;
        ++lines;
        auto sp = line.find(' ');
        REQUIRE(sp != std::string::npos);
        CHECK_NOTHROW(parse_labeled_predicate(line.substr(sp + 1)));
    }
    std::size_t expected = 0;
    for (const auto& s : engine.library()) expected += s.size();
    CHECK(lines == expected);
    std::remove("/tmp/oaru-lib-test.pddl");
    std::remove("/tmp/oaru-lib-test.labels");
}

TEST_CASE("masked stream still explains transitions") {
    Engine engine;
    auto traces = suite_traces("gripper", 4);
    auto log = run_stream(engine, traces, MaskConfig(0, 3, 7));
    CHECK(log.size() > 0);
    for (const auto& rec : log) CHECK(rec.outcome.grounded.is_grounded());
    CHECK(engine.total_timeouts() == 0);
}

TEST_CASE("per-call budget of zero times out the unification") {
    EngineOptions opts;
    opts.budget = std::chrono::milliseconds(0);
    Engine engine(opts);
    Observation o{state_of({"p(a)"}), state_of({"t(a)"})};
    engine.recognize(o);  // insertion, no AU call
    auto out = engine.recognize(o);
    CHECK(out.timeouts == 1);
    CHECK(engine.total_timeouts() == 1);
    // the TGA was inserted as a fallback, so the library grew
    CHECK(engine.library().size() == 2);
}
