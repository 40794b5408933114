#pragma once

// Online action recognition: keeps a growing library of action schemata,
// explains each observation with a grounded action and generalizes the
// library through pairwise unification (greedy, one observation at a
// time). The closest library entry by unification distance absorbs the
// observation's trivial grounded action; if nothing unifies, the TGA
// itself joins the library.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oaru/model.hpp"
#include "oaru/pddl.hpp"
#include "oaru/tga.hpp"
#include "oaru/unification.hpp"

namespace oaru {

// True when the pair may still unify; false only when unification is
// provably impossible: some certain effect on one side cannot be covered
// by same-signature (label, symbol, arity) effect atoms on the other,
// counting multiplicities. Never false-negative with respect to unify.
bool broad_phase(const ActionSchema& a, const ActionSchema& b);

struct HierarchyNode {
    std::string name;
    std::size_t arity = 0;                // parameter count at creation
    std::vector<std::string> children;    // empty for TGAs, two for merges
    std::int64_t raw_cost = 0;            // distance at merge
    std::int64_t w_big = 1;
};

struct RecognitionOutcome {
    ActionSchema grounded;                // a', explains the observation
    std::string schema_name;              // library schema it instantiates
    std::string tga_name;
    bool library_updated = false;
    std::optional<std::string> replaced;  // schema absorbed by the merge
    std::optional<std::int64_t> raw_cost; // distance used (merge path only)
    std::int64_t w_big = 1;
    std::int64_t n_np = 0;
    std::int64_t n_param = 0;
    int peak_variables = 0;               // largest encoding this step
    int peak_clauses = 0;
    int timeouts = 0;                     // unifications skipped on budget
};

struct EngineOptions {
    std::optional<std::chrono::milliseconds> budget;  // per unification call
    std::string external_solver;
    std::string dump_dir;  // when set, every encoding is dumped there
};

class Engine {
public:
    Engine() = default;
    explicit Engine(EngineOptions options) : options_(std::move(options)) {}

    RecognitionOutcome recognize(const Observation& o);

    const std::vector<ActionSchema>& library() const { return library_; }
    const std::vector<HierarchyNode>& hierarchy() const { return hierarchy_; }

    std::uint64_t update_count() const { return updates_; }
    std::uint64_t total_timeouts() const { return timeouts_; }
    std::uint64_t au_calls() const { return au_calls_; }
    int peak_variables() const { return peak_variables_; }
    int peak_clauses() const { return peak_clauses_; }

    void export_hierarchy_dot(std::ostream& out) const;
    // Writes <stem>.pddl (learned domain) and <stem>.labels (native
    // triples, one "<schema> <LABEL> <atom>[?]" line per entry).
    void export_library(const std::string& stem, const std::string& domain_name) const;

private:
    EngineOptions options_;
    std::vector<ActionSchema> library_;
    std::vector<HierarchyNode> hierarchy_;
    NameSequence names_;
    std::uint64_t updates_ = 0;
    std::uint64_t timeouts_ = 0;
    std::uint64_t au_calls_ = 0;
    int peak_variables_ = 0;
    int peak_clauses_ = 0;
};

// True when the merge replacing `before` by `after` counts as a library
// update: a parameter was added or a labeled predicate was removed.
// Fresh TGA insertions always count.
bool is_update(const ActionSchema& before, const ActionSchema& after);

struct StepRecord {
    std::size_t step = 0;        // global, 1-based
    std::size_t trace_index = 0;
    std::size_t obs_index = 0;   // within its trace
    RecognitionOutcome outcome;
    double cpu_millis = 0.0;
    std::optional<GroundActionRef> ref;
    std::uint64_t updates_so_far = 0;
    std::size_t library_size = 0;
};

using StepCallback = std::function<void(const StepRecord&)>;

// Feeds every observation of every trace to the engine in order. When the
// mask is enabled, both states of each observation are masked through one
// seeded stream (inputs must then be fully observable).
std::vector<StepRecord> run_stream(Engine& engine, const std::vector<pddl::Trace>& traces,
                                   const MaskConfig& mask, const StepCallback& on_step = {});

}  // namespace oaru
