// Command-line front end: trace simulation, online recognition,
// benchmarking and the 3-SAT oracle.
//
// Exit codes: 0 success, 1 usage error, 2 input error, 3 timeout.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <numeric>

#include "oaru/engine.hpp"
#include "oaru/evaluation.hpp"
#include "oaru/model.hpp"
#include "oaru/pddl.hpp"
#include "oaru/sat_reduction.hpp"
#include "oaru/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitTimeout = 3;

struct MaskSpec {
    std::size_t lo = 0;
    std::size_t hi = 0;
};

MaskSpec parse_mask(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw CLI::ValidationError("--mask", "expected MIN:MAX");
    MaskSpec m;
    m.lo = std::stoul(text.substr(0, colon));
    m.hi = std::stoul(text.substr(colon + 1));
    if (m.lo > m.hi) throw CLI::ValidationError("--mask", "MIN must be <= MAX");
    return m;
}

oaru::EngineOptions make_engine_options(const std::string& solver, long budget_ms,
                                        const std::string& dump_dir) {
    oaru::EngineOptions opts;
    if (budget_ms >= 0) opts.budget = std::chrono::milliseconds(budget_ms);
    if (solver != "builtin") opts.external_solver = solver;
    opts.dump_dir = dump_dir;
    return opts;
}

std::string format_distance(std::int64_t raw, std::int64_t w_big) {
    if (raw % w_big == 0) return std::to_string(raw / w_big);
    std::int64_t g = std::gcd(raw, w_big);
    return std::to_string(raw / g) + "/" + std::to_string(w_big / g);
}

int cmd_simulate(const std::string& domain_path, const std::string& problem_path,
                 const std::string& plan_path, bool use_bfs, std::size_t max_depth,
                 const std::string& out_path) {
    auto domain = oaru::pddl::parse_domain_file(domain_path);
    auto problem = oaru::pddl::parse_problem_file(problem_path, domain);

    std::vector<oaru::GroundActionRef> plan;
    if (use_bfs)
        plan = oaru::pddl::find_plan(domain, problem, max_depth);
    else
        plan = oaru::pddl::parse_plan_file(plan_path);

    auto sim = oaru::pddl::simulate_plan(domain, problem, plan);
    oaru::write_trace_file(sim.trace, out_path);
    std::cout << "simulated " << sim.trace.size() << " step(s) of '" << problem.name << "' into "
              << out_path << "\n";
    if (sim.trace.steps.empty() && use_bfs)
        std::cout << "warning: goal already satisfied by the initial state, empty trace\n";
    if (!sim.goal_reached) std::cout << "warning: goal does not hold in the final state\n";
    return kExitOk;
}

struct RecognizeFlags {
    MaskSpec mask;
    std::uint64_t seed = 0;
    unsigned seeds = 1;
    std::string solver = "builtin";
    long budget_ms = 10000;
    std::string out_dir = "oaru-out";
    std::string dump_dir;
};

int recognize_once(const std::vector<oaru::pddl::Trace>& traces, const RecognizeFlags& flags,
                   std::uint64_t seed, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    oaru::Engine engine(make_engine_options(flags.solver, flags.budget_ms, flags.dump_dir));
    oaru::MaskConfig mask(flags.mask.lo, flags.mask.hi, seed);

    std::ofstream csv(out_dir + "/log.csv");
    csv << "step,trace,obs,schema,tga,distance,n_np,n_param,updated,library_size,"
           "enc_vars,enc_clauses\n";
    auto log = oaru::run_stream(engine, traces, mask, [&](const oaru::StepRecord& rec) {
        const auto& o = rec.outcome;
        std::cout << "step " << rec.step << ": " << o.schema_name
                  << (o.replaced ? " (merged " + *o.replaced + " + " + o.tga_name + ", d=" +
                                       format_distance(*o.raw_cost, o.w_big) + ")"
                                 : " (new)")
                  << " [" << rec.cpu_millis << " ms]\n";
        csv << rec.step << ',' << rec.trace_index << ',' << rec.obs_index << ','
            << o.schema_name << ',' << o.tga_name << ','
            << (o.raw_cost ? format_distance(*o.raw_cost, o.w_big) : "inf") << ',' << o.n_np
            << ',' << o.n_param << ',' << (o.library_updated ? 1 : 0) << ',' << rec.library_size
            << ',' << o.peak_variables << ',' << o.peak_clauses << '\n';
    });

    engine.export_library(out_dir + "/library", "learned");
    std::ofstream dot(out_dir + "/hierarchy.dot");
    engine.export_hierarchy_dot(dot);

    std::cout << "library: " << engine.library().size() << " action(s), "
              << engine.update_count() << " update(s), " << engine.total_timeouts()
              << " timeout(s)\n";
    return engine.total_timeouts() > 0 ? kExitTimeout : kExitOk;
}

int cmd_recognize(const std::vector<std::string>& trace_paths, const RecognizeFlags& flags) {
    std::vector<oaru::pddl::Trace> traces;
    for (const auto& p : trace_paths) traces.push_back(oaru::read_trace_file(p));

    if (flags.seeds <= 1) return recognize_once(traces, flags, flags.seed, flags.out_dir);

    int worst = kExitOk;
    for (unsigned s = 0; s < flags.seeds; ++s) {
        std::string dir = flags.out_dir + "/seed-" + std::to_string(flags.seed + s);
        std::cout << "== seed " << flags.seed + s << " ==\n";
        worst = std::max(worst, recognize_once(traces, flags, flags.seed + s, dir));
    }
    return worst;
}

int cmd_bench(const std::vector<std::string>& manifests, const std::string& out_dir,
              unsigned jobs, long repetitions_override, const std::string& mask_override,
              long seed_override, const std::string& solver, long budget_ms) {
    std::vector<oaru::eval::SuiteSpec> specs;
    for (const auto& m : manifests) {
        auto spec = oaru::eval::load_suite_manifest(m);
        if (repetitions_override > 0) spec.repetitions = static_cast<std::size_t>(repetitions_override);
        if (!mask_override.empty()) {
            MaskSpec ms = parse_mask(mask_override);
            spec.mask.min_removed = ms.lo;
            spec.mask.max_removed = ms.hi;
        }
        if (seed_override >= 0) spec.mask.seed = static_cast<std::uint64_t>(seed_override);
        specs.push_back(std::move(spec));
    }

    auto opts = make_engine_options(solver, budget_ms, "");
    std::vector<std::future<oaru::eval::BenchResult>> futures;
    unsigned in_flight = std::max(1u, jobs);
    std::vector<oaru::eval::BenchResult> results(specs.size());
    for (std::size_t base = 0; base < specs.size(); base += in_flight) {
        std::size_t end = std::min(specs.size(), base + in_flight);
        futures.clear();
        for (std::size_t i = base; i < end; ++i)
            futures.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred,
                                         [&, i] { return oaru::eval::run_benchmark(specs[i], opts); }));
        for (std::size_t i = base; i < end; ++i) results[i] = futures[i - base].get();
    }

    bool timeouts = false;
    std::vector<oaru::eval::SuiteReport> reports;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const auto& result = results[i];
        reports.push_back(result.report);
        timeouts = timeouts || result.report.timeouts > 0;
        if (!out_dir.empty()) {
            std::filesystem::create_directories(out_dir);
            for (std::size_t rep = 0; rep < result.per_rep_steps.size(); ++rep) {
                std::string stem = out_dir + "/" + specs[i].name + "-rep" + std::to_string(rep);
                std::ofstream steps_csv(stem + "-steps.csv");
                oaru::eval::write_steps_csv(result.per_rep_steps[rep], specs[i].name, steps_csv);
                std::ofstream curve_csv(stem + "-updates.csv");
                oaru::eval::write_update_curve_csv(
                    oaru::eval::emit_update_curve(result.per_rep_steps[rep]), curve_csv);
            }
        }
    }
    std::cout << oaru::eval::format_report_table(reports);
    return timeouts ? kExitTimeout : kExitOk;
}

int cmd_sat(const std::string& cnf_path, long budget_ms) {
    auto inst = oaru::read_dimacs_cnf_file(cnf_path);
    oaru::AuOptions opts;
    if (budget_ms >= 0) opts.budget = std::chrono::milliseconds(budget_ms);
    oaru::SatDecision decision;
    try {
        decision = oaru::decide_sat_via_au(inst, opts);
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTimeout;
    }
    if (!decision.satisfiable) {
        std::cout << "UNSAT\n";
        return kExitOk;
    }
    std::cout << "SAT\nv";
    for (int v = 1; v <= inst.var_count; ++v)
        std::cout << ' ' << (decision.assignment[static_cast<std::size_t>(v - 1)] ? v : -v);
    std::cout << " 0\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online STRIPS action-model recognition via action unification"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "apply a plan to a problem and write a trace");
    std::string sim_domain, sim_problem, sim_plan, sim_out = "trace.txt";
    bool sim_bfs = false;
    std::size_t sim_depth = 24;
    sim->add_option("--domain", sim_domain, "domain PDDL file")->required();
    sim->add_option("--problem", sim_problem, "problem PDDL file")->required();
    sim->add_option("--plan", sim_plan, "plan file, one (action args) per line");
    sim->add_flag("--bfs", sim_bfs, "search for a shortest plan instead of reading one");
    sim->add_option("--max-depth", sim_depth, "search depth bound for --bfs");
    sim->add_option("--out", sim_out, "output trace file")->required();

    // recognize
    auto* rec = app.add_subcommand("recognize", "run online recognition over trace files");
    std::vector<std::string> rec_traces;
    RecognizeFlags rf;
    std::string rec_mask = "0:0";
    rec->add_option("traces", rec_traces, "input trace files, processed in order")->required();
    rec->add_option("--mask", rec_mask, "mask MIN:MAX atoms per state (default 0:0)");
    rec->add_option("--seed", rf.seed, "base RNG seed (default 0)");
    rec->add_option("--seeds", rf.seeds, "number of seeds; >1 writes seed-N subdirectories");
    rec->add_option("--solver", rf.solver, "builtin or path to an external WCNF solver");
    rec->add_option("--budget-ms", rf.budget_ms, "per-unification time budget (default 10000)");
    rec->add_option("--out", rf.out_dir, "output directory")->required();
    rec->add_option("--dump-wpms", rf.dump_dir, "dump every encoding as WCNF + var map here");

    // bench
    auto* bench = app.add_subcommand("bench", "run suite manifests and print a summary table");
    std::vector<std::string> bench_manifests;
    std::string bench_out, bench_mask, bench_solver = "builtin";
    unsigned bench_jobs = 1;
    long bench_reps = 0, bench_seed = -1, bench_budget = 10000;
    bench->add_option("--manifest", bench_manifests, "suite manifest JSON file(s)")->required();
    bench->add_option("--out", bench_out, "directory for per-step and update-curve CSVs");
    bench->add_option("--jobs", bench_jobs, "run manifests in parallel");
    bench->add_option("--repetitions", bench_reps, "override manifest repetitions");
    bench->add_option("--mask", bench_mask, "override manifest mask MIN:MAX");
    bench->add_option("--seed", bench_seed, "override manifest base seed");
    bench->add_option("--solver", bench_solver, "builtin or path to an external WCNF solver");
    bench->add_option("--budget-ms", bench_budget, "per-unification time budget");

    // sat
    auto* sat = app.add_subcommand("sat", "decide a DIMACS CNF through the unification oracle");
    std::string sat_cnf;
    long sat_budget = 60000;
    sat->add_option("--cnf", sat_cnf, "DIMACS CNF file (clauses of up to 3 literals)")->required();
    sat->add_option("--budget-ms", sat_budget, "solver budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) {
            if (!sim_bfs && sim_plan.empty()) {
                std::cerr << "error: simulate needs --plan or --bfs\n";
                return kExitUsage;
            }
            return cmd_simulate(sim_domain, sim_problem, sim_plan, sim_bfs, sim_depth, sim_out);
        }
        if (rec->parsed()) {
            rf.mask = parse_mask(rec_mask);
            return cmd_recognize(rec_traces, rf);
        }
        if (bench->parsed())
            return cmd_bench(bench_manifests, bench_out, bench_jobs, bench_reps, bench_mask,
                             bench_seed, bench_solver, bench_budget);
        if (sat->parsed()) return cmd_sat(sat_cnf, sat_budget);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}
