#pragma once

// First-order vocabulary, three-valued states and STRIPS-style action
// schemata shared by the rest of the library. All types are value types,
// immutable after construction and safe to share across threads.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace oaru {

enum class ObjKind : std::uint8_t { Constant = 0, Variable = 1 };

// A constant or variable symbol. Variable and constant names live in
// disjoint namespaces; equality is (kind, name) equality.
struct ObjectRef {
    ObjKind kind = ObjKind::Constant;
    std::string name;

    bool is_variable() const { return kind == ObjKind::Variable; }
    bool is_constant() const { return kind == ObjKind::Constant; }

    auto operator<=>(const ObjectRef&) const = default;

    static ObjectRef constant(std::string n) { return {ObjKind::Constant, std::move(n)}; }
    static ObjectRef variable(std::string n) { return {ObjKind::Variable, std::move(n)}; }
};

// Lowercases an identifier and checks it against [a-z0-9_-]+.
// Throws std::invalid_argument on anything else.
std::string normalize_name(const std::string& raw);

// Parses an object token: a leading '?' marks a variable.
ObjectRef parse_object(const std::string& token);

// An atom: predicate symbol applied to an ordered argument list.
struct Predicate {
    std::string symbol;
    std::vector<ObjectRef> args;

    std::size_t arity() const { return args.size(); }
    bool is_ground() const;

    auto operator<=>(const Predicate&) const = default;
};

// Textual atom form "symbol(a,?x)"; variables carry a '?' prefix.
std::string to_string(const Predicate& p);
Predicate parse_predicate(const std::string& text);

enum class Label : std::uint8_t { Pre = 0, Add = 1, Del = 2 };

const char* label_name(Label l);  // "PRE" / "ADD" / "DEL"

// One entry of an action definition: an atom, the list it belongs to and
// whether membership is known with certainty.
struct LabeledPredicate {
    Predicate atom;
    Label label = Label::Pre;
    bool certain = true;

    auto operator<=>(const LabeledPredicate&) const = default;
};

// Canonical textual form "PRE at(?x0,rooma)?" ('?' suffix when uncertain).
std::string to_string(const LabeledPredicate& lp);
LabeledPredicate parse_labeled_predicate(const std::string& text);

// Simultaneous object substitution. Unmapped objects are left unchanged.
struct Substitution {
    std::map<ObjectRef, ObjectRef> mapping;

    ObjectRef apply(const ObjectRef& o) const;
    Predicate apply(const Predicate& p) const;
    bool empty() const { return mapping.empty(); }
};

// first `inner`, then `outer` (i.e. the map v -> outer(inner(v))), with
// entries of `outer` on objects outside dom(inner) carried over.
Substitution compose(const Substitution& inner, const Substitution& outer);

// A named action. The labeled set is keyed by (label, atom); inserting a
// duplicate merges certainty with OR. Parameters are derived: the set of
// all objects appearing in the labeled set.
class ActionSchema {
public:
    ActionSchema() = default;
    explicit ActionSchema(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    void insert(const Predicate& atom, Label label, bool certain);
    void insert(const LabeledPredicate& lp) { insert(lp.atom, lp.label, lp.certain); }

    bool contains(const Predicate& atom, Label label) const;
    std::optional<bool> certainty(const Predicate& atom, Label label) const;

    std::size_t size() const { return labeled_.size(); }
    bool empty() const { return labeled_.empty(); }

    // Entries in canonical (label, atom) order.
    std::vector<LabeledPredicate> labeled() const;
    std::vector<LabeledPredicate> with_label(Label l) const;
    std::vector<Predicate> atoms(Label l) const;  // atoms regardless of certainty

    // All objects referenced in the labeled set, sorted.
    std::vector<ObjectRef> objects() const;
    std::size_t param_count() const;  // number of distinct variables
    bool is_grounded() const;

    // Copy with uncertain entries removed.
    ActionSchema certain_part() const;

    bool operator==(const ActionSchema& o) const {
        return name_ == o.name_ && labeled_ == o.labeled_;
    }
    // Compares labeled sets only (names are bookkeeping).
    bool same_labeled(const ActionSchema& o) const { return labeled_ == o.labeled_; }

private:
    std::string name_;
    std::map<std::pair<Label, Predicate>, bool> labeled_;
};

// Multi-line canonical form: first line the name, then one labeled
// predicate per line. parse(serialize(s)) == s.
std::string to_text(const ActionSchema& schema);
ActionSchema schema_from_text(const std::string& text);

// Renames the schema's variables to x0, x1, ... in first-occurrence order
// over the canonical labeled ordering. Used for isomorphism checks.
ActionSchema canonical_renaming(const ActionSchema& schema);

// Rewrites every argument occurrence; duplicates created by the rewrite
// merge with certain = OR. Name is preserved.
ActionSchema apply_substitution(const ActionSchema& schema, const Substitution& sub);

// Three-valued factored state. Atoms absent from both sets are known
// false (closed world over the known region).
struct State {
    std::set<Predicate> trues;
    std::set<Predicate> unknowns;

    bool fully_observable() const { return unknowns.empty(); }
    bool is_true(const Predicate& p) const { return trues.count(p) > 0; }
    bool is_unknown(const Predicate& p) const { return unknowns.count(p) > 0; }

    auto operator<=>(const State&) const = default;
};

struct Observation {
    State before;
    State after;

    auto operator<=>(const Observation&) const = default;
};

// True iff pre_a holds in s and s_next = (s \ del_a) + add_a.
// Requires a grounded action and fully observable states; throws
// std::invalid_argument otherwise. Labels are taken at face value,
// so strip uncertain entries first when that is the intent.
bool check_valid_transition(const State& s, const ActionSchema& a, const State& s_next);

// Name + constant arguments of a reference action, as recorded in traces.
struct GroundActionRef {
    std::string name;
    std::vector<std::string> args;

    auto operator<=>(const GroundActionRef&) const = default;
};

std::string to_string(const GroundActionRef& a);  // "(name c1 c2)"

}  // namespace oaru
