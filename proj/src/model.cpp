#include "oaru/model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace oaru {

std::string normalize_name(const std::string& raw) {
    if (raw.empty()) throw std::invalid_argument("empty identifier");
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        bool ok = (l >= 'a' && l <= 'z') || (l >= '0' && l <= '9') || l == '_' || l == '-';
        if (!ok) throw std::invalid_argument("invalid identifier: '" + raw + "'");
        out.push_back(l);
    }
    return out;
}

ObjectRef parse_object(const std::string& token) {
    if (!token.empty() && token[0] == '?')
        return ObjectRef::variable(normalize_name(token.substr(1)));
    return ObjectRef::constant(normalize_name(token));
}

bool Predicate::is_ground() const {
    for (const auto& a : args)
        if (a.is_variable()) return false;
    return true;
}

std::string to_string(const Predicate& p) {
    std::string out = p.symbol;
    out += '(';
    for (std::size_t i = 0; i < p.args.size(); ++i) {
        if (i > 0) out += ',';
        if (p.args[i].is_variable()) out += '?';
        out += p.args[i].name;
    }
    out += ')';
    return out;
}

Predicate parse_predicate(const std::string& text) {
    auto open = text.find('(');
    auto close = text.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument("malformed atom: '" + text + "'");
    Predicate p;
    p.symbol = normalize_name(text.substr(0, open));
    std::string body = text.substr(open + 1, close - open - 1);
    std::string token;
    std::istringstream in(body);
    while (std::getline(in, token, ',')) {
        // trim blanks around each argument
        auto b = token.find_first_not_of(" \t");
        auto e = token.find_last_not_of(" \t");
        if (b == std::string::npos) throw std::invalid_argument("empty argument in '" + text + "'");
        p.args.push_back(parse_object(token.substr(b, e - b + 1)));
    }
    return p;
}

const char* label_name(Label l) {
    switch (l) {
        case Label::Pre: return "PRE";
        case Label::Add: return "ADD";
        case Label::Del: return "DEL";
    }
    return "?";
}

static Label label_from_name(const std::string& s) {
    if (s == "PRE") return Label::Pre;
    if (s == "ADD") return Label::Add;
    if (s == "DEL") return Label::Del;
    throw std::invalid_argument("unknown label: '" + s + "'");
}

std::string to_string(const LabeledPredicate& lp) {
    std::string out = label_name(lp.label);
    out += ' ';
    out += to_string(lp.atom);
    if (!lp.certain) out += '?';
    return out;
}

LabeledPredicate parse_labeled_predicate(const std::string& text) {
    auto sp = text.find(' ');
    if (sp == std::string::npos) throw std::invalid_argument("malformed labeled atom: '" + text + "'");
    LabeledPredicate lp;
    lp.label = label_from_name(text.substr(0, sp));
    std::string rest = text.substr(sp + 1);
    if (!rest.empty() && rest.back() == '?') {
        lp.certain = false;
        rest.pop_back();
    } else {
        lp.certain = true;
    }
    lp.atom = parse_predicate(rest);
    return lp;
}

ObjectRef Substitution::apply(const ObjectRef& o) const {
    auto it = mapping.find(o);
    return it == mapping.end() ? o : it->second;
}

Predicate Substitution::apply(const Predicate& p) const {
    Predicate out;
    out.symbol = p.symbol;
    out.args.reserve(p.args.size());
    for (const auto& a : p.args) out.args.push_back(apply(a));
    return out;
}

Substitution compose(const Substitution& inner, const Substitution& outer) {
    Substitution out;
    for (const auto& [from, to] : inner.mapping) out.mapping[from] = outer.apply(to);
    for (const auto& [from, to] : outer.mapping)
        if (!inner.mapping.count(from)) out.mapping[from] = to;
    return out;
}

void ActionSchema::insert(const Predicate& atom, Label label, bool certain) {
    auto [it, fresh] = labeled_.try_emplace({label, atom}, certain);
    if (!fresh) it->second = it->second || certain;
}

bool ActionSchema::contains(const Predicate& atom, Label label) const {
    return labeled_.count({label, atom}) > 0;
}

std::optional<bool> ActionSchema::certainty(const Predicate& atom, Label label) const {
    auto it = labeled_.find({label, atom});
    if (it == labeled_.end()) return std::nullopt;
    return it->second;
}

std::vector<LabeledPredicate> ActionSchema::labeled() const {
    std::vector<LabeledPredicate> out;
    out.reserve(labeled_.size());
    for (const auto& [key, certain] : labeled_)
        out.push_back({key.second, key.first, certain});
    return out;
}

std::vector<LabeledPredicate> ActionSchema::with_label(Label l) const {
    std::vector<LabeledPredicate> out;
    for (const auto& [key, certain] : labeled_)
        if (key.first == l) out.push_back({key.second, key.first, certain});
    return out;
}

std::vector<Predicate> ActionSchema::atoms(Label l) const {
    std::vector<Predicate> out;
    for (const auto& [key, certain] : labeled_)
        if (key.first == l) out.push_back(key.second);
    return out;
}

std::vector<ObjectRef> ActionSchema::objects() const {
    std::set<ObjectRef> seen;
    for (const auto& [key, certain] : labeled_)
        for (const auto& a : key.second.args) seen.insert(a);
    return {seen.begin(), seen.end()};
}

std::size_t ActionSchema::param_count() const {
    std::size_t n = 0;
    for (const auto& o : objects())
        if (o.is_variable()) ++n;
    return n;
}

bool ActionSchema::is_grounded() const { return param_count() == 0; }

ActionSchema ActionSchema::certain_part() const {
    ActionSchema out(name_);
    for (const auto& [key, certain] : labeled_)
        if (certain) out.insert(key.second, key.first, true);
    return out;
}

std::string to_text(const ActionSchema& schema) {
    std::ostringstream out;
    out << schema.name() << '\n';
    for (const auto& lp : schema.labeled()) out << to_string(lp) << '\n';
    return out.str();
}

ActionSchema schema_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty schema text");
    ActionSchema out(normalize_name(line));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.insert(parse_labeled_predicate(line));
    }
    return out;
}

ActionSchema canonical_renaming(const ActionSchema& schema) {
    Substitution ren;
    std::size_t next = 0;
    for (const auto& lp : schema.labeled())
        for (const auto& a : lp.atom.args)
            if (a.is_variable() && !ren.mapping.count(a))
                ren.mapping[a] = ObjectRef::variable("x" + std::to_string(next++));
    return apply_substitution(schema, ren);
}

ActionSchema apply_substitution(const ActionSchema& schema, const Substitution& sub) {
    ActionSchema out(schema.name());
    for (const auto& lp : schema.labeled()) out.insert(sub.apply(lp.atom), lp.label, lp.certain);
    return out;
}

bool check_valid_transition(const State& s, const ActionSchema& a, const State& s_next) {
    if (!s.fully_observable() || !s_next.fully_observable())
        throw std::invalid_argument("check_valid_transition requires fully observable states");
    if (!a.is_grounded())
        throw std::invalid_argument("check_valid_transition requires a grounded action");

    for (const auto& pre : a.atoms(Label::Pre))
        if (!s.is_true(pre)) return false;

    std::set<Predicate> expected = s.trues;
    for (const auto& del : a.atoms(Label::Del)) expected.erase(del);
    for (const auto& add : a.atoms(Label::Add)) expected.insert(add);
    return expected == s_next.trues;
}

std::string to_string(const GroundActionRef& a) {
    std::string out = "(" + a.name;
    for (const auto& arg : a.args) out += " " + arg;
    out += ")";
    return out;
}

}  // namespace oaru
