#include "oaru/unification.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace oaru {

namespace {

bool s2_eligible(const LabeledPredicate& lp) {
    return lp.label == Label::Pre || !lp.certain;
}

bool h4_forced(const LabeledPredicate& lp) {
    return lp.label != Label::Pre && lp.certain;
}

std::int64_t compute_w_big(const ActionSchema& a1, const ActionSchema& a2) {
    return static_cast<std::int64_t>(
               std::min(a1.objects().size(), a2.objects().size())) + 1;
}

}  // namespace

AuEncoding encode_unification(const ActionSchema& a1, const ActionSchema& a2) {
    AuEncoding enc;
    enc.left_atoms = a1.labeled();
    enc.right_atoms = a2.labeled();
    enc.w_big = compute_w_big(a1, a2);

    // Match candidates: same label, symbol and arity. Argument-wise
    // consistency is what the x variables decide.
    std::set<ObjectPair> pair_set;
    for (std::size_t i = 0; i < enc.left_atoms.size(); ++i) {
        for (std::size_t j = 0; j < enc.right_atoms.size(); ++j) {
            const auto& l = enc.left_atoms[i];
            const auto& r = enc.right_atoms[j];
            if (l.label != r.label || l.atom.symbol != r.atom.symbol ||
                l.atom.arity() != r.atom.arity())
                continue;
            enc.candidates.emplace_back(static_cast<int>(i), static_cast<int>(j));
            for (std::size_t p = 0; p < l.atom.arity(); ++p)
                pair_set.insert({l.atom.args[p], r.atom.args[p]});
        }
    }
    enc.x_pairs.assign(pair_set.begin(), pair_set.end());

    auto& inst = enc.instance;
    int nx = static_cast<int>(enc.x_pairs.size());
    int ny = static_cast<int>(enc.candidates.size());
    int nz1 = static_cast<int>(enc.left_atoms.size());
    int nz2 = static_cast<int>(enc.right_atoms.size());
    enc.y_base = nx;
    enc.z1_base = nx + ny;
    enc.z2_base = nx + ny + nz1;
    inst.ensure_vars(nx + ny + nz1 + nz2);

    std::map<ObjectPair, int> pair_var;
    for (std::size_t k = 0; k < enc.x_pairs.size(); ++k) pair_var[enc.x_pairs[k]] = enc.x_var(k);

    // H1: injective partial function, At-Most-1 per row and per column.
    {
        std::map<ObjectRef, std::vector<wpms::Lit>> rows, cols;
        for (std::size_t k = 0; k < enc.x_pairs.size(); ++k) {
            rows[enc.x_pairs[k].left].push_back(enc.x_var(k));
            cols[enc.x_pairs[k].right].push_back(enc.x_var(k));
        }
        for (const auto& [obj, lits] : rows) inst.add_at_most_one(lits);
        for (const auto& [obj, lits] : cols) inst.add_at_most_one(lits);
    }

    // H2: a candidate matches iff every argument pair is mapped.
    for (std::size_t k = 0; k < enc.candidates.size(); ++k) {
        const auto& [i, j] = enc.candidates[k];
        const auto& l = enc.left_atoms[static_cast<std::size_t>(i)].atom;
        const auto& r = enc.right_atoms[static_cast<std::size_t>(j)].atom;
        std::set<int> xs;
        for (std::size_t p = 0; p < l.arity(); ++p)
            xs.insert(pair_var.at({l.args[p], r.args[p]}));
        inst.add_iff_conjunction(enc.y_var(k), std::vector<wpms::Lit>(xs.begin(), xs.end()));
    }

    // H3: preserved iff at least one match in the other action.
    {
        std::vector<std::vector<wpms::Lit>> left_matches(enc.left_atoms.size());
        std::vector<std::vector<wpms::Lit>> right_matches(enc.right_atoms.size());
        for (std::size_t k = 0; k < enc.candidates.size(); ++k) {
            left_matches[static_cast<std::size_t>(enc.candidates[k].first)].push_back(enc.y_var(k));
            right_matches[static_cast<std::size_t>(enc.candidates[k].second)].push_back(enc.y_var(k));
        }
        for (std::size_t i = 0; i < enc.left_atoms.size(); ++i)
            inst.add_iff_disjunction(enc.z1_var(i), left_matches[i]);
        for (std::size_t j = 0; j < enc.right_atoms.size(); ++j)
            inst.add_iff_disjunction(enc.z2_var(j), right_matches[j]);
    }

    // H4: certain effects must be preserved.
    for (std::size_t i = 0; i < enc.left_atoms.size(); ++i)
        if (h4_forced(enc.left_atoms[i])) inst.add_hard({enc.z1_var(i)});
    for (std::size_t j = 0; j < enc.right_atoms.size(); ++j)
        if (h4_forced(enc.right_atoms[j])) inst.add_hard({enc.z2_var(j)});

    // S1: avoid lifting; only mapping two distinct constants costs.
    for (std::size_t k = 0; k < enc.x_pairs.size(); ++k) {
        const auto& pr = enc.x_pairs[k];
        if (pr.left.is_constant() && pr.right.is_constant() && pr.left != pr.right)
            inst.add_soft({-enc.x_var(k)}, 1);
    }

    // S2: preserve preconditions and uncertain effects.
    for (std::size_t i = 0; i < enc.left_atoms.size(); ++i)
        if (s2_eligible(enc.left_atoms[i])) inst.add_soft({enc.z1_var(i)}, enc.w_big);
    for (std::size_t j = 0; j < enc.right_atoms.size(); ++j)
        if (s2_eligible(enc.right_atoms[j])) inst.add_soft({enc.z2_var(j)}, enc.w_big);

    return enc;
}

void AuEncoding::write_var_map(std::ostream& out) const {
    for (std::size_t k = 0; k < x_pairs.size(); ++k) {
        out << x_var(k) << " x ";
        out << (x_pairs[k].left.is_variable() ? "?" : "") << x_pairs[k].left.name << " -> ";
        out << (x_pairs[k].right.is_variable() ? "?" : "") << x_pairs[k].right.name << '\n';
    }
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        out << y_var(k) << " y "
            << to_string(left_atoms[static_cast<std::size_t>(candidates[k].first)]) << " | "
            << to_string(right_atoms[static_cast<std::size_t>(candidates[k].second)]) << '\n';
    }
    for (std::size_t i = 0; i < left_atoms.size(); ++i)
        out << z1_var(i) << " z1 " << to_string(left_atoms[i]) << '\n';
    for (std::size_t j = 0; j < right_atoms.size(); ++j)
        out << z2_var(j) << " z2 " << to_string(right_atoms[j]) << '\n';
}

namespace {

// Shared decoder: builds the unified schema and substitutions from the
// matched candidate pairs and the mapped object pairs.
UnificationResult decode_result(const AuEncoding& enc,
                                const std::vector<std::pair<int, int>>& matched,
                                const std::vector<ObjectPair>& tau,
                                std::int64_t raw_cost) {
    UnificationResult res;
    res.w_big = enc.w_big;
    res.raw_cost = raw_cost;
    res.tau = tau;
    std::sort(res.tau.begin(), res.tau.end());

    // Count objective components.
    std::set<std::pair<int, int>> matched_set(matched.begin(), matched.end());
    std::set<int> left_preserved, right_preserved;
    for (const auto& [i, j] : matched) {
        left_preserved.insert(i);
        right_preserved.insert(j);
    }
    res.n_np = 0;
    for (std::size_t i = 0; i < enc.left_atoms.size(); ++i)
        if (s2_eligible(enc.left_atoms[i]) && !left_preserved.count(static_cast<int>(i)))
            ++res.n_np;
    for (std::size_t j = 0; j < enc.right_atoms.size(); ++j)
        if (s2_eligible(enc.right_atoms[j]) && !right_preserved.count(static_cast<int>(j)))
            ++res.n_np;
    res.n_param = 0;
    for (const auto& pr : res.tau)
        if (pr.left.is_constant() && pr.right.is_constant() && pr.left != pr.right) ++res.n_param;

    // Proto-atoms: argument slots hold either a maintained constant or a
    // mapped pair awaiting a fresh parameter name. Fresh parameters are
    // assigned in first-occurrence order over the canonical ordering
    // (label, symbol, argument keys).
    struct ArgKey {
        bool is_pair;
        ObjectRef constant;
        ObjectPair pair;
        auto operator<=>(const ArgKey&) const = default;
    };
    struct Proto {
        Label label;
        std::string symbol;
        std::vector<ArgKey> args;
        bool certain;
        auto operator<=>(const Proto&) const = default;
    };
    std::vector<Proto> protos;
    for (const auto& [i, j] : matched) {
        const auto& l = enc.left_atoms[static_cast<std::size_t>(i)];
        const auto& r = enc.right_atoms[static_cast<std::size_t>(j)];
        Proto pr;
        pr.label = l.label;
        pr.symbol = l.atom.symbol;
        pr.certain = l.certain || r.certain;
        for (std::size_t p = 0; p < l.atom.arity(); ++p) {
            const ObjectRef& o1 = l.atom.args[p];
            const ObjectRef& o2 = r.atom.args[p];
            if (o1 == o2 && o1.is_constant())
                pr.args.push_back({false, o1, {}});
            else
                pr.args.push_back({true, {}, {o1, o2}});
        }
        protos.push_back(std::move(pr));
    }
    std::sort(protos.begin(), protos.end());

    std::map<ObjectPair, ObjectRef> param_of;
    std::size_t next_param = 0;
    ActionSchema unified("unified");
    for (const auto& pr : protos) {
        Predicate atom;
        atom.symbol = pr.symbol;
        for (const auto& key : pr.args) {
            if (!key.is_pair) {
                atom.args.push_back(key.constant);
                continue;
            }
            auto it = param_of.find(key.pair);
            if (it == param_of.end()) {
                ObjectRef fresh = ObjectRef::variable("x" + std::to_string(next_param++));
                it = param_of.emplace(key.pair, fresh).first;
                res.sigma1.mapping[fresh] = key.pair.left;
                res.sigma2.mapping[fresh] = key.pair.right;
            }
            atom.args.push_back(it->second);
        }
        unified.insert(atom, pr.label, pr.certain);
    }
    res.unified = std::move(unified);
    return res;
}

}  // namespace

AuOutcome unify(const ActionSchema& a1, const ActionSchema& a2, const AuOptions& options) {
    AuEncoding enc = encode_unification(a1, a2);
    AuOutcome out;
    out.stats.variables = enc.instance.var_count();
    out.stats.clauses = static_cast<int>(enc.instance.clause_count());

    if (!options.dump_basename.empty()) {
        wpms::write_wcnf_file(enc.instance, options.dump_basename + ".wcnf");
        std::ofstream map_out(options.dump_basename + ".map");
        enc.write_var_map(map_out);
    }

    wpms::WpmsSolution sol;
    if (!options.external_solver.empty())
        sol = wpms::solve_external(enc.instance, options.external_solver);
    else
        sol = wpms::solve(enc.instance, options.budget);

    switch (sol.status) {
        case wpms::WpmsSolution::Status::Unsat:
            out.status = AuOutcome::Status::NotUnifiable;
            return out;
        case wpms::WpmsSolution::Status::Timeout:
            out.status = AuOutcome::Status::Timeout;
            return out;
        case wpms::WpmsSolution::Status::Optimal:
            break;
    }

    std::vector<std::pair<int, int>> matched;
    for (std::size_t k = 0; k < enc.candidates.size(); ++k)
        if (sol.value(enc.y_var(k))) matched.push_back(enc.candidates[k]);
    std::vector<ObjectPair> tau;
    for (std::size_t k = 0; k < enc.x_pairs.size(); ++k)
        if (sol.value(enc.x_var(k))) tau.push_back(enc.x_pairs[k]);

    out.status = AuOutcome::Status::Unified;
    out.result = decode_result(enc, matched, tau, sol.cost);
    return out;
}

namespace {

// Enumerates injective partial mappings left -> right, invoking fn on each.
template <typename Fn>
void for_each_mapping(const std::vector<ObjectRef>& left, const std::vector<ObjectRef>& right,
                      std::vector<int>& choice, std::size_t at, std::vector<bool>& used, Fn&& fn) {
    if (at == left.size()) {
        fn(choice);
        return;
    }
    choice[at] = -1;  // leave unmapped
    for_each_mapping(left, right, choice, at + 1, used, fn);
    for (std::size_t r = 0; r < right.size(); ++r) {
        if (used[r]) continue;
        used[r] = true;
        choice[at] = static_cast<int>(r);
        for_each_mapping(left, right, choice, at + 1, used, fn);
        choice[at] = -1;
        used[r] = false;
    }
}

struct BruteScore {
    bool feasible = false;
    std::int64_t cost = 0;
    std::int64_t n_np = 0;
    std::vector<std::pair<int, int>> matched;
};

BruteScore score_mapping(const AuEncoding& enc, const std::map<ObjectRef, ObjectRef>& tau) {
    BruteScore s;
    auto mapped_to = [&](const ObjectRef& o) -> const ObjectRef* {
        auto it = tau.find(o);
        return it == tau.end() ? nullptr : &it->second;
    };

    std::set<int> left_preserved, right_preserved;
    for (const auto& [i, j] : enc.candidates) {
        const auto& l = enc.left_atoms[static_cast<std::size_t>(i)].atom;
        const auto& r = enc.right_atoms[static_cast<std::size_t>(j)].atom;
        bool match = true;
        for (std::size_t p = 0; p < l.arity() && match; ++p) {
            const ObjectRef* to = mapped_to(l.args[p]);
            match = to != nullptr && *to == r.args[p];
        }
        if (match) {
            s.matched.emplace_back(i, j);
            left_preserved.insert(i);
            right_preserved.insert(j);
        }
    }

    for (std::size_t i = 0; i < enc.left_atoms.size(); ++i) {
        bool pres = left_preserved.count(static_cast<int>(i)) > 0;
        if (h4_forced(enc.left_atoms[i]) && !pres) return s;  // infeasible
        if (s2_eligible(enc.left_atoms[i]) && !pres) ++s.n_np;
    }
    for (std::size_t j = 0; j < enc.right_atoms.size(); ++j) {
        bool pres = right_preserved.count(static_cast<int>(j)) > 0;
        if (h4_forced(enc.right_atoms[j]) && !pres) return s;
        if (s2_eligible(enc.right_atoms[j]) && !pres) ++s.n_np;
    }

    std::int64_t n_param = 0;
    for (const auto& [from, to] : tau)
        if (from.is_constant() && to.is_constant() && from != to) ++n_param;

    s.feasible = true;
    s.cost = enc.w_big * s.n_np + n_param;
    return s;
}

}  // namespace

AuOutcome brute_force_unify(const ActionSchema& a1, const ActionSchema& a2,
                            std::size_t pair_cap) {
    std::vector<ObjectRef> left = a1.objects();
    std::vector<ObjectRef> right = a2.objects();
    if (left.size() * right.size() > pair_cap)
        throw std::invalid_argument("brute_force_unify: object pairing count " +
                                    std::to_string(left.size() * right.size()) +
                                    " exceeds cap " + std::to_string(pair_cap));

    AuEncoding enc = encode_unification(a1, a2);
    AuOutcome out;
    out.stats.variables = enc.instance.var_count();
    out.stats.clauses = static_cast<int>(enc.instance.clause_count());

    std::optional<BruteScore> best;
    std::map<ObjectRef, ObjectRef> best_tau;

    std::vector<int> choice(left.size(), -1);
    std::vector<bool> used(right.size(), false);
    for_each_mapping(left, right, choice, 0, used, [&](const std::vector<int>& ch) {
        std::map<ObjectRef, ObjectRef> tau;
        for (std::size_t i = 0; i < ch.size(); ++i)
            if (ch[i] >= 0) tau[left[i]] = right[static_cast<std::size_t>(ch[i])];
        BruteScore s = score_mapping(enc, tau);
        if (!s.feasible) return;
        if (!best || s.cost < best->cost) {
            best = s;
            best_tau = tau;
        }
    });

    if (!best) {
        out.status = AuOutcome::Status::NotUnifiable;
        return out;
    }
    std::vector<ObjectPair> tau_pairs;
    for (const auto& [from, to] : best_tau) tau_pairs.push_back({from, to});
    out.status = AuOutcome::Status::Unified;
    out.result = decode_result(enc, best->matched, tau_pairs, best->cost);
    return out;
}

std::optional<std::int64_t> brute_force_min_np(const ActionSchema& a1, const ActionSchema& a2,
                                               std::size_t pair_cap) {
    std::vector<ObjectRef> left = a1.objects();
    std::vector<ObjectRef> right = a2.objects();
    if (left.size() * right.size() > pair_cap)
        throw std::invalid_argument("brute_force_min_np: pairing count exceeds cap");

    AuEncoding enc = encode_unification(a1, a2);
    std::optional<std::int64_t> best;
    std::vector<int> choice(left.size(), -1);
    std::vector<bool> used(right.size(), false);
    for_each_mapping(left, right, choice, 0, used, [&](const std::vector<int>& ch) {
        std::map<ObjectRef, ObjectRef> tau;
        for (std::size_t i = 0; i < ch.size(); ++i)
            if (ch[i] >= 0) tau[left[i]] = right[static_cast<std::size_t>(ch[i])];
        BruteScore s = score_mapping(enc, tau);
        if (!s.feasible) return;
        if (!best || s.n_np < *best) best = s.n_np;
    });
    return best;
}

}  // namespace oaru
