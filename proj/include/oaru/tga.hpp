#pragma once

// Partial-observability masking and construction of Trivial Grounded
// Actions from state-transition observations.

#include <atomic>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oaru/model.hpp"

namespace oaru {

// Hands out fresh action names: action-0, action-1, ...
class NameSequence {
public:
    std::string fresh() { return "action-" + std::to_string(next_.fetch_add(1)); }
    std::uint64_t issued() const { return next_.load(); }

private:
    std::atomic<std::uint64_t> next_{0};
};

using Rng = std::mt19937_64;

struct MaskConfig {
    std::size_t min_removed = 0;
    std::size_t max_removed = 5;
    std::uint64_t seed = 0;
    // By default only true atoms can lose their interpretation. Supplying
    // a universe widens the pool to known-false ground atoms as well
    // (everything in the universe that is not already true or unknown).
    bool mask_false_atoms = false;
    std::vector<Predicate> universe;

    bool enabled() const { return max_removed > 0; }

    MaskConfig() = default;
    MaskConfig(std::size_t lo, std::size_t hi, std::uint64_t s = 0)
        : min_removed(lo), max_removed(hi), seed(s) {}
};

// Removes the interpretation of k atoms, k ~ Uniform{min..max}, sampled
// without replacement from the masking pool and capped at the pool size.
// Requires a fully observable input state. Deterministic given the rng
// stream state.
State mask_state(const State& s, const MaskConfig& cfg, Rng& rng);

// Builds the grounded action whose labeled set explains exactly the
// transition (before, after):
//   Pre: certain for true atoms of s, uncertain for unknown atoms of s.
//   Add: certain for atoms true in s' but neither true nor unknown in s;
//        uncertain for atoms true in s' and unknown in s, or unknown in
//        s' and not true in s.
//   Del: certain for atoms true in s but neither true nor unknown in s';
//        uncertain for atoms true in s and unknown in s', or unknown in
//        s and not true in s'.
ActionSchema build_tga(const Observation& o, const std::string& name);
ActionSchema build_tga(const Observation& o, NameSequence& names);

}  // namespace oaru
