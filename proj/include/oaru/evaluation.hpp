#pragma once

// Scoring of recognized actions against reference grounded actions,
// suite-level benchmarking and report/CSV emission.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oaru/engine.hpp"
#include "oaru/model.hpp"
#include "oaru/pddl.hpp"
#include "oaru/tga.hpp"

namespace oaru::eval {

// Share of a_g's labeled predicates that are correct: membership is by
// (atom, label), certainty ignored. An empty a_g scores 100 (vacuous).
double precision(const ActionSchema& a_g, const ActionSchema& a_ref);

// Share of a_ref's labeled predicates captured by a_g.
double recall(const ActionSchema& a_g, const ActionSchema& a_ref);

struct SuiteSpec {
    std::string name;
    std::string domain_path;
    struct Episode {
        std::string problem_path;
        std::string plan_path;
    };
    std::vector<Episode> episodes;
    std::size_t repetitions = 1;
    MaskConfig mask;             // seed is the base; repetition r uses seed + r
    bool mask_false_atoms = false;
};

// JSON manifest; relative paths resolve against the manifest's directory.
SuiteSpec load_suite_manifest(const std::string& path);

struct ScoredStep {
    StepRecord rec;
    std::optional<double> precision;  // absent when the trace carries no ref
    std::optional<double> recall;
    std::string problem;
};

struct MeanStd {
    double mean = 0;
    double stddev = 0;
};

struct SuiteReport {
    std::string domain;
    std::vector<std::size_t> final_library_sizes;  // one per repetition
    std::size_t observations = 0;                  // per repetition
    MeanStd time_ms;   // pooled over all steps of all repetitions
    MeanStd prec;
    MeanStd rec;
    int peak_variables = 0;
    int peak_clauses = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t updates_last_rep = 0;

    std::size_t library_size() const;  // requires all repetitions to agree
};

struct BenchResult {
    SuiteReport report;
    std::vector<std::vector<ScoredStep>> per_rep_steps;
    std::vector<pddl::Trace> traces;  // the simulated full-observability traces
};

BenchResult run_benchmark(const SuiteSpec& spec, const EngineOptions& engine_options = {});

// CSV columns: step,domain,problem,cpu_millis,precision,recall,updates,library_size
void write_steps_csv(const std::vector<ScoredStep>& steps, const std::string& domain,
                     std::ostream& out);

// (step, cumulative updates) pairs; `plateau_step` is the last step whose
// recognition updated the library (0 when none did).
struct UpdateCurve {
    std::vector<std::pair<std::size_t, std::uint64_t>> points;
    std::size_t plateau_step = 0;
};

UpdateCurve emit_update_curve(const std::vector<ScoredStep>& steps);
void write_update_curve_csv(const UpdateCurve& curve, std::ostream& out);

// Plain-text summary, one row per suite.
std::string format_report_table(const std::vector<SuiteReport>& reports);

MeanStd mean_std(const std::vector<double>& xs);

}  // namespace oaru::eval
