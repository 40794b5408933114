#include "oaru/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace oaru::eval {

namespace {

std::set<std::pair<Label, Predicate>> label_keys(const ActionSchema& a) {
    std::set<std::pair<Label, Predicate>> keys;
    for (const auto& lp : a.labeled()) keys.insert({lp.label, lp.atom});
    return keys;
}

std::size_t intersection_size(const ActionSchema& a, const ActionSchema& b) {
    auto ka = label_keys(a);
    auto kb = label_keys(b);
    std::size_t n = 0;
    for (const auto& k : ka) n += kb.count(k);
    return n;
}

}  // namespace

double precision(const ActionSchema& a_g, const ActionSchema& a_ref) {
    if (a_g.size() == 0) return 100.0;
    return 100.0 * static_cast<double>(intersection_size(a_g, a_ref)) /
           static_cast<double>(a_g.size());
}

double recall(const ActionSchema& a_g, const ActionSchema& a_ref) {
    if (a_ref.size() == 0) return 100.0;
    return 100.0 * static_cast<double>(intersection_size(a_g, a_ref)) /
           static_cast<double>(a_ref.size());
}

SuiteSpec load_suite_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open suite manifest: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest " + path + ": " + e.what());
    }

    auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    SuiteSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.domain_path = resolve(j.at("domain").get<std::string>());
    for (const auto& ep : j.at("episodes")) {
        SuiteSpec::Episode e;
        e.problem_path = resolve(ep.at("problem").get<std::string>());
        e.plan_path = resolve(ep.at("plan").get<std::string>());
        spec.episodes.push_back(std::move(e));
    }
    spec.repetitions = j.value("repetitions", 1u);
    if (j.contains("mask")) {
        const auto& m = j["mask"];
        spec.mask.min_removed = m.value("min", 0u);
        spec.mask.max_removed = m.value("max", 0u);
        spec.mask.seed = m.value("seed", 0u);
        spec.mask_false_atoms = m.value("mask_false", false);
    }
    return spec;
}

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd out;
    if (xs.empty()) return out;
    double sum = 0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs) var += (x - out.mean) * (x - out.mean);
    out.stddev = std::sqrt(var / static_cast<double>(xs.size()));
    return out;
}

std::size_t SuiteReport::library_size() const {
    if (final_library_sizes.empty()) return 0;
    for (std::size_t s : final_library_sizes)
        if (s != final_library_sizes.front())
            throw std::runtime_error("library size differs across repetitions");
    return final_library_sizes.front();
}

BenchResult run_benchmark(const SuiteSpec& spec, const EngineOptions& engine_options) {
    pddl::DomainModel domain = pddl::parse_domain_file(spec.domain_path);

    BenchResult result;
    result.report.domain = spec.name;

    std::vector<std::string> problem_names;
    std::vector<Predicate> universe;
    for (const auto& ep : spec.episodes) {
        pddl::ProblemModel problem = pddl::parse_problem_file(ep.problem_path, domain);
        auto plan = pddl::parse_plan_file(ep.plan_path);
        auto sim = pddl::simulate_plan(domain, problem, plan);
        if (!sim.goal_reached)
            throw std::runtime_error("episode '" + problem.name + "' plan misses its goal");
        result.traces.push_back(std::move(sim.trace));
        problem_names.push_back(problem.name);
        if (spec.mask_false_atoms) {
            auto u = pddl::instantiable_universe(domain, problem);
            universe.insert(universe.end(), u.begin(), u.end());
        }
    }

    std::vector<double> times, precs, recs;
    for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
        MaskConfig mask = spec.mask;
        mask.seed = spec.mask.seed + rep;
        mask.mask_false_atoms = spec.mask_false_atoms;
        mask.universe = universe;

        Engine engine(engine_options);
        std::vector<ScoredStep> steps;
        auto log = run_stream(engine, result.traces, mask);
        for (auto& rec : log) {
            ScoredStep s;
            s.problem = problem_names[rec.trace_index];
            if (rec.ref) {
                ActionSchema ref = pddl::ground_action(domain, *rec.ref);
                s.precision = precision(rec.outcome.grounded, ref);
                s.recall = recall(rec.outcome.grounded, ref);
                precs.push_back(*s.precision);
                recs.push_back(*s.recall);
            }
            times.push_back(rec.cpu_millis);
            s.rec = std::move(rec);
            steps.push_back(std::move(s));
        }
        result.report.final_library_sizes.push_back(engine.library().size());
        result.report.observations = steps.size();
        result.report.peak_variables = std::max(result.report.peak_variables,
                                                engine.peak_variables());
        result.report.peak_clauses = std::max(result.report.peak_clauses, engine.peak_clauses());
        result.report.timeouts += engine.total_timeouts();
        result.report.updates_last_rep = engine.update_count();
        result.per_rep_steps.push_back(std::move(steps));
    }
    result.report.time_ms = mean_std(times);
    result.report.prec = mean_std(precs);
    result.report.rec = mean_std(recs);
    return result;
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

void write_steps_csv(const std::vector<ScoredStep>& steps, const std::string& domain,
                     std::ostream& out) {
    out << "step,domain,problem,cpu_millis,precision,recall,updates,library_size\n";
    for (const auto& s : steps) {
        out << s.rec.step << ',' << domain << ',' << s.problem << ',' << fmt(s.rec.cpu_millis)
            << ',' << (s.precision ? fmt(*s.precision) : "") << ','
            << (s.recall ? fmt(*s.recall) : "") << ',' << s.rec.updates_so_far << ','
            << s.rec.library_size << '\n';
    }
}

UpdateCurve emit_update_curve(const std::vector<ScoredStep>& steps) {
    UpdateCurve curve;
    std::uint64_t prev = 0;
    for (const auto& s : steps) {
        curve.points.emplace_back(s.rec.step, s.rec.updates_so_far);
        if (s.rec.updates_so_far > prev) curve.plateau_step = s.rec.step;
        prev = s.rec.updates_so_far;
    }
    return curve;
}

void write_update_curve_csv(const UpdateCurve& curve, std::ostream& out) {
    out << "step,updates\n";
    for (const auto& [step, updates] : curve.points) out << step << ',' << updates << '\n';
}

std::string format_report_table(const std::vector<SuiteReport>& reports) {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-16s %5s %6s %16s %14s %14s %12s\n", "domain", "|A|",
                  "|O|", "T(ms)", "prec(%)", "rec(%)", "enc(v+c)");
    out << line;
    for (const auto& r : reports) {
        std::string lib;
        std::set<std::size_t> sizes(r.final_library_sizes.begin(), r.final_library_sizes.end());
        for (std::size_t s : sizes) lib += (lib.empty() ? "" : "/") + std::to_string(s);
        char tbuf[48], pbuf[48], rbuf[48];
        std::snprintf(tbuf, sizeof(tbuf), "%.1f±%.1f", r.time_ms.mean, r.time_ms.stddev);
        std::snprintf(pbuf, sizeof(pbuf), "%.1f±%.1f", r.prec.mean, r.prec.stddev);
        std::snprintf(rbuf, sizeof(rbuf), "%.1f±%.1f", r.rec.mean, r.rec.stddev);
        std::snprintf(line, sizeof(line), "%-16s %5s %6zu %16s %14s %14s %12d\n",
                      r.domain.c_str(), lib.c_str(), r.observations, tbuf, pbuf, rbuf,
                      r.peak_variables + r.peak_clauses);
        out << line;
    }
    return out.str();
}

}  // namespace oaru::eval
