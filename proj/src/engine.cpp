#include "oaru/engine.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

namespace oaru {

namespace {

struct Signature {
    Label label;
    std::string symbol;
    std::size_t arity;
    auto operator<=>(const Signature&) const = default;
};

// certain-effect counts vs all-effect counts per (label, symbol, arity)
void effect_counts(const ActionSchema& a, std::map<Signature, int>& certain,
                   std::map<Signature, int>& all) {
    for (const auto& lp : a.labeled()) {
        if (lp.label == Label::Pre) continue;
        Signature sig{lp.label, lp.atom.symbol, lp.atom.arity()};
        ++all[sig];
        if (lp.certain) ++certain[sig];
    }
}

}  // namespace

bool broad_phase(const ActionSchema& a, const ActionSchema& b) {
    std::map<Signature, int> certain_a, all_a, certain_b, all_b;
    effect_counts(a, certain_a, all_a);
    effect_counts(b, certain_b, all_b);
    for (const auto& [sig, n] : certain_a) {
        auto it = all_b.find(sig);
        if (it == all_b.end() || it->second < n) return false;
    }
    for (const auto& [sig, n] : certain_b) {
        auto it = all_a.find(sig);
        if (it == all_a.end() || it->second < n) return false;
    }
    return true;
}

bool is_update(const ActionSchema& before, const ActionSchema& after) {
    return after.param_count() > before.param_count() || after.size() < before.size();
}

RecognitionOutcome Engine::recognize(const Observation& o) {
    ActionSchema tga = build_tga(o, names_);
    hierarchy_.push_back({tga.name(), tga.param_count(), {}, 0, 1});

    RecognitionOutcome out;
    out.tga_name = tga.name();

    std::optional<std::size_t> best_index;
    std::optional<UnificationResult> best;

    for (std::size_t i = 0; i < library_.size(); ++i) {
        if (!broad_phase(library_[i], tga)) continue;
        AuOptions opts;
        opts.budget = options_.budget;
        opts.external_solver = options_.external_solver;
        if (!options_.dump_dir.empty())
            opts.dump_basename = options_.dump_dir + "/au-" + std::to_string(au_calls_);
        ++au_calls_;
        AuOutcome res = unify(library_[i], tga, opts);
        out.peak_variables = std::max(out.peak_variables, res.stats.variables);
        out.peak_clauses = std::max(out.peak_clauses, res.stats.clauses);
        if (res.status == AuOutcome::Status::Timeout) {
            ++out.timeouts;
            ++timeouts_;
            continue;
        }
        if (res.status != AuOutcome::Status::Unified) continue;
        if (!best || distance_less(res.result->raw_cost, res.result->w_big, best->raw_cost,
                                   best->w_big)) {
            best_index = i;
            best = std::move(res.result);
        }
    }
    peak_variables_ = std::max(peak_variables_, out.peak_variables);
    peak_clauses_ = std::max(peak_clauses_, out.peak_clauses);

    if (best) {
        const ActionSchema replaced = library_[*best_index];
        ActionSchema merged = best->unified;
        merged.set_name(names_.fresh());
        out.library_updated = is_update(replaced, merged);
        library_[*best_index] = merged;
        hierarchy_.push_back({merged.name(), merged.param_count(),
                              {replaced.name(), tga.name()}, best->raw_cost, best->w_big});

        ActionSchema grounded = apply_substitution(merged, best->sigma2);
        grounded.set_name(merged.name());
        out.grounded = std::move(grounded);
        out.schema_name = merged.name();
        out.replaced = replaced.name();
        out.raw_cost = best->raw_cost;
        out.w_big = best->w_big;
        out.n_np = best->n_np;
        out.n_param = best->n_param;
    } else {
        library_.push_back(tga);
        out.grounded = tga;
        out.schema_name = tga.name();
        out.library_updated = true;
    }
    if (out.library_updated) ++updates_;
    return out;
}

namespace {

std::string format_distance(std::int64_t raw, std::int64_t w_big) {
    if (raw % w_big == 0) return std::to_string(raw / w_big);
    std::int64_t g = std::gcd(raw, w_big);
    return std::to_string(raw / g) + "/" + std::to_string(w_big / g);
}

}  // namespace

void Engine::export_hierarchy_dot(std::ostream& out) const {
    out << "digraph au_hierarchy {\n";
    out << "  rankdir=BT;\n";
    for (const auto& node : hierarchy_)
        out << "  \"" << node.name << "\" [label=\"" << node.name << "/" << node.arity
            << "\"];\n";
    for (const auto& node : hierarchy_)
        for (const auto& child : node.children)
            out << "  \"" << node.name << "\" -> \"" << child << "\" [label=\""
                << format_distance(node.raw_cost, node.w_big) << "\"];\n";
    out << "}\n";
}

void Engine::export_library(const std::string& stem, const std::string& domain_name) const {
    pddl::DomainModel dom = pddl::library_as_domain(domain_name, library_);
    std::ofstream pddl_out(stem + ".pddl");
    if (!pddl_out) throw std::runtime_error("cannot write " + stem + ".pddl");
    pddl::write_domain(dom, pddl_out);

    std::ofstream labels_out(stem + ".labels");
    if (!labels_out) throw std::runtime_error("cannot write " + stem + ".labels");
    for (const auto& schema : library_)
        for (const auto& lp : schema.labeled())
            labels_out << schema.name() << ' ' << to_string(lp) << '\n';
}

std::vector<StepRecord> run_stream(Engine& engine, const std::vector<pddl::Trace>& traces,
                                   const MaskConfig& mask, const StepCallback& on_step) {
    std::vector<StepRecord> log;
    Rng rng(mask.seed);
    std::size_t global = 0;
    for (std::size_t t = 0; t < traces.size(); ++t) {
        for (std::size_t i = 0; i < traces[t].steps.size(); ++i) {
            Observation obs = traces[t].steps[i];
            if (mask.enabled() || mask.min_removed > 0) {
                obs.before = mask_state(obs.before, mask, rng);
                obs.after = mask_state(obs.after, mask, rng);
            }
            StepRecord rec;
            rec.step = ++global;
            rec.trace_index = t;
            rec.obs_index = i;
            rec.ref = traces[t].refs[i];
            auto begin = std::chrono::steady_clock::now();
            rec.outcome = engine.recognize(obs);
            auto end = std::chrono::steady_clock::now();
            rec.cpu_millis =
                std::chrono::duration<double, std::milli>(end - begin).count();
            rec.updates_so_far = engine.update_count();
            rec.library_size = engine.library().size();
            if (on_step) on_step(rec);
            log.push_back(std::move(rec));
        }
    }
    return log;
}

}  // namespace oaru
