#include "oaru/tga.hpp"

#include <algorithm>
#include <stdexcept>

namespace oaru {

State mask_state(const State& s, const MaskConfig& cfg, Rng& rng) {
    if (!s.fully_observable())
        throw std::invalid_argument("mask_state requires a fully observable state");
    if (cfg.min_removed > cfg.max_removed)
        throw std::invalid_argument("mask_state: min_removed > max_removed");

    std::vector<Predicate> pool(s.trues.begin(), s.trues.end());
    if (cfg.mask_false_atoms) {
        for (const auto& atom : cfg.universe)
            if (!s.is_true(atom)) pool.push_back(atom);
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    }

    std::size_t k = cfg.min_removed;
    if (cfg.max_removed > cfg.min_removed) {
        std::uniform_int_distribution<std::size_t> pick(cfg.min_removed, cfg.max_removed);
        k = pick(rng);
    }
    k = std::min(k, pool.size());

    State out = s;
    // partial Fisher-Yates: the first k entries are a uniform sample
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
        out.trues.erase(pool[i]);
        out.unknowns.insert(pool[i]);
    }
    return out;
}

ActionSchema build_tga(const Observation& o, const std::string& name) {
    const State& s = o.before;
    const State& t = o.after;
    ActionSchema a(name);

    for (const auto& p : s.trues) a.insert(p, Label::Pre, true);
    for (const auto& p : s.unknowns) a.insert(p, Label::Pre, false);

    for (const auto& p : t.trues) {
        if (s.is_true(p)) continue;
        // true after; certain add unless it may have been true before
        a.insert(p, Label::Add, !s.is_unknown(p));
    }
    for (const auto& p : t.unknowns)
        if (!s.is_true(p)) a.insert(p, Label::Add, false);

    for (const auto& p : s.trues) {
        if (t.is_true(p)) continue;
        a.insert(p, Label::Del, !t.is_unknown(p));
    }
    for (const auto& p : s.unknowns)
        if (!t.is_true(p)) a.insert(p, Label::Del, false);

    return a;
}

ActionSchema build_tga(const Observation& o, NameSequence& names) {
    return build_tga(o, names.fresh());
}

}  // namespace oaru
