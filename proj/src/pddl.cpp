#include "oaru/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <fstream>
#include <sstream>

namespace oaru::pddl {

namespace {

// ---------------------------------------------------------------------
// S-expression reader with line/column tracking.

struct Node {
    // leaf iff children empty and token non-empty
    std::string token;
    std::vector<Node> children;
    int line = 0;
    int col = 0;

    bool is_leaf() const { return children.empty() && !token.empty(); }
};

class Lexer {
public:
    explicit Lexer(std::istream& in) : in_(in) {}

    Node read_toplevel() {
        skip_ws();
        if (peek() != '(') fail("expected '('");
        return read_node();
    }

    bool at_eof() {
        skip_ws();
        return peek() == EOF;
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

private:
    Node read_node() {
        skip_ws();
        Node n;
        n.line = line_;
        n.col = col_;
        if (peek() == '(') {
            get();
            while (true) {
                skip_ws();
                int c = peek();
                if (c == EOF) fail("unexpected end of input, '(' not closed");
                if (c == ')') {
                    get();
                    return n;
                }
                n.children.push_back(read_node());
            }
        }
        std::string tok;
        while (true) {
            int c = peek();
            if (c == EOF || std::isspace(c) || c == '(' || c == ')') break;
            tok.push_back(static_cast<char>(get()));
        }
        if (tok.empty()) fail("expected token");
        n.token = tok;
        return n;
    }

    void skip_ws() {
        while (true) {
            int c = peek();
            if (c == ';') {
                while (c != EOF && c != '\n') c = get();
                continue;
            }
            if (c == EOF || !std::isspace(c)) return;
            get();
        }
    }

    int peek() { return in_.peek(); }

    int get() {
        int c = in_.get();
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else if (c != EOF) {
            ++col_;
        }
        return c;
    }

    std::istream& in_;
    int line_ = 1;
    int col_ = 1;
};

[[noreturn]] void fail_at(const Node& n, const std::string& msg) {
    throw ParseError(msg, n.line, n.col);
}

std::string lower(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string leaf(const Node& n, const char* what) {
    if (!n.is_leaf()) fail_at(n, std::string("expected ") + what);
    return lower(n.token);
}

std::string norm_leaf(const Node& n, const char* what) {
    std::string t = leaf(n, what);
    try {
        return normalize_name(t[0] == '?' ? t.substr(1) : t);
    } catch (const std::invalid_argument& e) {
        fail_at(n, e.what());
    }
}

bool head_is(const Node& n, const char* kw) {
    return !n.children.empty() && n.children[0].is_leaf() && lower(n.children[0].token) == kw;
}

// Parses "name1 name2 - type name3 ..." lists (objects or parameters).
// Untyped entries get an empty type.
std::vector<std::pair<std::string, std::string>> parse_typed_list(
    const std::vector<Node>& items, std::size_t from, bool variables) {
    std::vector<std::pair<std::string, std::string>> out;
    std::vector<std::size_t> pending;
    for (std::size_t i = from; i < items.size(); ++i) {
        std::string t = leaf(items[i], variables ? "parameter" : "object name");
        if (t == "-") {
            if (i + 1 >= items.size()) fail_at(items[i], "dangling '-' in typed list");
            std::string type = norm_leaf(items[++i], "type name");
            for (std::size_t p : pending) out[p].second = type;
            pending.clear();
            continue;
        }
        if (variables && t[0] != '?') fail_at(items[i], "parameter must start with '?'");
        if (!variables && t[0] == '?') fail_at(items[i], "object name cannot start with '?'");
        out.emplace_back(norm_leaf(items[i], "name"), "");
        pending.push_back(out.size() - 1);
    }
    return out;
}

Predicate parse_atom(const Node& n, const DomainModel& domain, bool ground_only) {
    if (n.children.empty() || !n.children[0].is_leaf()) fail_at(n, "expected atom");
    Predicate p;
    p.symbol = norm_leaf(n.children[0], "predicate symbol");
    auto sig = domain.signatures.find(p.symbol);
    if (sig == domain.signatures.end()) fail_at(n, "unknown predicate '" + p.symbol + "'");
    for (std::size_t i = 1; i < n.children.size(); ++i) {
        std::string t = leaf(n.children[i], "argument");
        if (t[0] == '?') {
            if (ground_only) fail_at(n.children[i], "variable not allowed here");
            p.args.push_back(ObjectRef::variable(norm_leaf(n.children[i], "argument")));
        } else {
            p.args.push_back(ObjectRef::constant(norm_leaf(n.children[i], "argument")));
        }
    }
    if (p.args.size() != sig->second)
        fail_at(n, "arity mismatch for '" + p.symbol + "': declared " +
                       std::to_string(sig->second) + ", used with " + std::to_string(p.args.size()));
    return p;
}

// Flattens (and ...) conjunctions; single atoms and (not atom) also accepted.
void parse_condition(const Node& n, const DomainModel& domain, bool allow_negative,
                     bool ground_only, std::vector<Predicate>& pos, std::vector<Predicate>& neg) {
    if (head_is(n, "and")) {
        for (std::size_t i = 1; i < n.children.size(); ++i)
            parse_condition(n.children[i], domain, allow_negative, ground_only, pos, neg);
        return;
    }
    if (head_is(n, "not")) {
        if (!allow_negative) fail_at(n, "negated atom not allowed here");
        if (n.children.size() != 2) fail_at(n, "(not ...) takes exactly one atom");
        neg.push_back(parse_atom(n.children[1], domain, ground_only));
        return;
    }
    pos.push_back(parse_atom(n, domain, ground_only));
}

const std::set<std::string> kSupportedRequirements = {":strips", ":typing",
                                                      ":negative-preconditions"};

}  // namespace

const ActionDef* DomainModel::find_action(const std::string& name) const {
    for (const auto& a : actions)
        if (a.name == name) return &a;
    return nullptr;
}

std::size_t DomainModel::max_action_arity() const {
    std::size_t m = 0;
    for (const auto& a : actions) m = std::max(m, a.params.size());
    return m;
}

bool ProblemModel::goal_holds(const State& s) const {
    for (const auto& g : goal)
        if (!s.is_true(g)) return false;
    return true;
}

DomainModel parse_domain(std::istream& in) {
    Lexer lex(in);
    Node root = lex.read_toplevel();
    if (root.children.size() < 2 || leaf(root.children[0], "define") != "define")
        fail_at(root, "expected (define (domain ...) ...)");
    const Node& head = root.children[1];
    if (!head_is(head, "domain") || head.children.size() != 2)
        fail_at(head, "expected (domain NAME)");

    DomainModel domain;
    domain.name = norm_leaf(head.children[1], "domain name");

    std::vector<std::string> types;
    std::vector<std::pair<std::string, std::string>> constants;  // name, type
    std::vector<const Node*> action_nodes;

    for (std::size_t i = 2; i < root.children.size(); ++i) {
        const Node& sec = root.children[i];
        if (head_is(sec, ":requirements")) {
            for (std::size_t j = 1; j < sec.children.size(); ++j) {
                std::string req = leaf(sec.children[j], "requirement flag");
                if (!kSupportedRequirements.count(req))
                    fail_at(sec.children[j], "unsupported requirement '" + req + "'");
            }
        } else if (head_is(sec, ":types")) {
            auto listed = parse_typed_list(sec.children, 1, false);
            for (const auto& [name, parent] : listed) {
                if (!parent.empty() && parent != "object")
                    fail_at(sec, "type hierarchies beyond 'object' are not supported");
                types.push_back(name);
            }
        } else if (head_is(sec, ":constants")) {
            constants = parse_typed_list(sec.children, 1, false);
        } else if (head_is(sec, ":predicates")) {
            for (std::size_t j = 1; j < sec.children.size(); ++j) {
                const Node& pn = sec.children[j];
                if (pn.children.empty()) fail_at(pn, "expected predicate declaration");
                std::string sym = norm_leaf(pn.children[0], "predicate symbol");
                auto params = parse_typed_list(pn.children, 1, true);
                if (domain.signatures.count(sym)) fail_at(pn, "duplicate predicate '" + sym + "'");
                domain.signatures[sym] = params.size();
            }
        } else if (head_is(sec, ":action")) {
            action_nodes.push_back(&sec);
        } else {
            fail_at(sec, "unsupported domain section");
        }
    }

    // typing flattened to static unary predicates
    for (const auto& t : types) {
        if (domain.signatures.count(t) && domain.signatures[t] != 1)
            throw std::runtime_error("type '" + t + "' clashes with a non-unary predicate");
        domain.signatures[t] = 1;
    }

    for (const Node* anp : action_nodes) {
        const Node& an = *anp;
        ActionDef def;
        if (an.children.size() < 2) fail_at(an, "expected (:action NAME ...)");
        def.name = norm_leaf(an.children[1], "action name");
        def.schema.set_name(def.name);

        std::map<std::string, const Node*> sections;
        for (std::size_t j = 2; j + 1 < an.children.size(); j += 2) {
            std::string key = leaf(an.children[j], "action section keyword");
            sections[key] = &an.children[j + 1];
        }
        if (!sections.count(":parameters")) fail_at(an, "action missing :parameters");

        auto params = parse_typed_list(sections[":parameters"]->children, 0, true);
        std::set<std::string> param_names;
        for (const auto& [name, type] : params) {
            if (!param_names.insert(name).second)
                fail_at(*sections[":parameters"], "duplicate parameter '?" + name + "'");
            def.params.push_back(ObjectRef::variable(name));
            if (!type.empty()) {
                if (!domain.signatures.count(type) || domain.signatures[type] != 1)
                    fail_at(*sections[":parameters"], "unknown type '" + type + "'");
                def.schema.insert({type, {ObjectRef::variable(name)}}, Label::Pre, true);
            }
        }

        if (sections.count(":precondition")) {
            std::vector<Predicate> pos, neg;
            parse_condition(*sections[":precondition"], domain, true, false, pos, neg);
            for (const auto& p : pos) def.schema.insert(p, Label::Pre, true);
            def.negative_pre = std::move(neg);
        }
        if (sections.count(":effect")) {
            std::vector<Predicate> adds, dels;
            parse_condition(*sections[":effect"], domain, true, false, adds, dels);
            for (const auto& p : adds) def.schema.insert(p, Label::Add, true);
            for (const auto& p : dels) def.schema.insert(p, Label::Del, true);
        }

        for (const auto& o : def.schema.objects())
            if (o.is_variable() && !param_names.count(o.name))
                fail_at(an, "free variable '?" + o.name + "' in action '" + def.name + "'");

        domain.actions.push_back(std::move(def));
    }

    // domain-level constants also get their type atoms, via a pseudo action
    // is unnecessary: record them as signatures for problems to use.
    for (const auto& [name, type] : constants) {
        (void)name;
        if (!type.empty() && (!domain.signatures.count(type) || domain.signatures[type] != 1))
            throw std::runtime_error("unknown type '" + type + "' in :constants");
    }

    return domain;
}

DomainModel parse_domain_text(const std::string& text) {
    std::istringstream in(text);
    return parse_domain(in);
}

DomainModel parse_domain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open domain file: " + path);
    return parse_domain(in);
}

ProblemModel parse_problem(std::istream& in, const DomainModel& domain) {
    Lexer lex(in);
    Node root = lex.read_toplevel();
    if (root.children.size() < 2 || leaf(root.children[0], "define") != "define")
        fail_at(root, "expected (define (problem ...) ...)");
    const Node& head = root.children[1];
    if (!head_is(head, "problem") || head.children.size() != 2)
        fail_at(head, "expected (problem NAME)");

    ProblemModel problem;
    problem.name = norm_leaf(head.children[1], "problem name");
    std::set<ObjectRef> objects;

    for (std::size_t i = 2; i < root.children.size(); ++i) {
        const Node& sec = root.children[i];
        if (head_is(sec, ":domain")) {
            if (sec.children.size() != 2) fail_at(sec, "expected (:domain NAME)");
            problem.domain_name = norm_leaf(sec.children[1], "domain name");
        } else if (head_is(sec, ":objects")) {
            auto listed = parse_typed_list(sec.children, 1, false);
            for (const auto& [name, type] : listed) {
                objects.insert(ObjectRef::constant(name));
                if (!type.empty()) {
                    if (!domain.signatures.count(type))
                        fail_at(sec, "unknown type '" + type + "'");
                    problem.init.trues.insert({type, {ObjectRef::constant(name)}});
                }
            }
        } else if (head_is(sec, ":init")) {
            for (std::size_t j = 1; j < sec.children.size(); ++j) {
                const Node& atom = sec.children[j];
                if (head_is(atom, "not")) continue;  // closed world: drop explicit negatives
                problem.init.trues.insert(parse_atom(atom, domain, true));
            }
        } else if (head_is(sec, ":goal")) {
            if (sec.children.size() != 2) fail_at(sec, "expected (:goal CONDITION)");
            std::vector<Predicate> pos, neg;
            parse_condition(sec.children[1], domain, false, true, pos, neg);
            problem.goal.insert(pos.begin(), pos.end());
        } else {
            fail_at(sec, "unsupported problem section");
        }
    }

    for (const auto& p : problem.init.trues)
        for (const auto& a : p.args)
            if (!objects.count(a)) objects.insert(a);  // tolerate undeclared constants in init

    problem.objects.assign(objects.begin(), objects.end());
    if (!problem.domain_name.empty() && problem.domain_name != domain.name)
        throw std::runtime_error("problem '" + problem.name + "' names domain '" +
                                 problem.domain_name + "', expected '" + domain.name + "'");
    return problem;
}

ProblemModel parse_problem_text(const std::string& text, const DomainModel& domain) {
    std::istringstream in(text);
    return parse_problem(in, domain);
}

ProblemModel parse_problem_file(const std::string& path, const DomainModel& domain) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open problem file: " + path);
    return parse_problem(in, domain);
}

namespace {

std::string atom_to_pddl(const Predicate& p) {
    std::string out = "(" + p.symbol;
    for (const auto& a : p.args) out += a.is_variable() ? " ?" + a.name : " " + a.name;
    out += ")";
    return out;
}

}  // namespace

void write_domain(const DomainModel& domain, std::ostream& out) {
    out << "(define (domain " << domain.name << ")\n";
    out << "  (:requirements :strips)\n";

    std::set<ObjectRef> consts;
    for (const auto& a : domain.actions)
        for (const auto& o : a.schema.objects())
            if (o.is_constant()) consts.insert(o);
    if (!consts.empty()) {
        out << "  (:constants";
        for (const auto& c : consts) out << ' ' << c.name;
        out << ")\n";
    }

    out << "  (:predicates";
    for (const auto& [sym, arity] : domain.signatures) {
        out << "\n    (" << sym;
        for (std::size_t i = 0; i < arity; ++i) out << " ?a" << i;
        out << ")";
    }
    out << ")\n";

    for (const auto& a : domain.actions) {
        out << "  (:action " << a.name << "\n    :parameters (";
        bool first = true;
        for (const auto& p : a.params) {
            if (!first) out << ' ';
            out << '?' << p.name;
            first = false;
        }
        out << ")\n    :precondition (and";
        for (const auto& lp : a.schema.with_label(Label::Pre))
            if (lp.certain) out << ' ' << atom_to_pddl(lp.atom);
        for (const auto& p : a.negative_pre) out << " (not " << atom_to_pddl(p) << ")";
        out << ")\n    :effect (and";
        for (const auto& lp : a.schema.with_label(Label::Add))
            if (lp.certain) out << ' ' << atom_to_pddl(lp.atom);
        for (const auto& lp : a.schema.with_label(Label::Del))
            if (lp.certain) out << " (not " << atom_to_pddl(lp.atom) << ")";
        out << "))\n";

        bool any_uncertain = false;
        for (const auto& lp : a.schema.labeled()) any_uncertain |= !lp.certain;
        if (any_uncertain) {
            out << "  ; uncertain entries of " << a.name << ":\n";
            for (const auto& lp : a.schema.labeled())
                if (!lp.certain) out << "  ;   " << to_string(lp) << "\n";
        }
    }
    out << ")\n";
}

std::string domain_to_pddl(const DomainModel& domain) {
    std::ostringstream out;
    write_domain(domain, out);
    return out.str();
}

DomainModel library_as_domain(const std::string& name, const std::vector<ActionSchema>& lib) {
    DomainModel domain;
    domain.name = name;
    for (const auto& schema : lib) {
        ActionDef def;
        def.name = schema.name();
        def.schema = schema;
        for (const auto& o : schema.objects())
            if (o.is_variable()) def.params.push_back(o);
        for (const auto& lp : schema.labeled()) {
            auto it = domain.signatures.find(lp.atom.symbol);
            if (it == domain.signatures.end())
                domain.signatures[lp.atom.symbol] = lp.atom.arity();
            else if (it->second != lp.atom.arity())
                throw std::runtime_error("inconsistent arity for '" + lp.atom.symbol + "'");
        }
        domain.actions.push_back(std::move(def));
    }
    return domain;
}

ActionSchema ground_action(const DomainModel& domain, const GroundActionRef& ref) {
    const ActionDef* def = domain.find_action(ref.name);
    if (!def) throw std::runtime_error("unknown action '" + ref.name + "'");
    if (def->params.size() != ref.args.size())
        throw std::runtime_error("action '" + ref.name + "' takes " +
                                 std::to_string(def->params.size()) + " arguments, got " +
                                 std::to_string(ref.args.size()));
    Substitution sub;
    for (std::size_t i = 0; i < ref.args.size(); ++i)
        sub.mapping[def->params[i]] = ObjectRef::constant(normalize_name(ref.args[i]));
    ActionSchema grounded = apply_substitution(def->schema, sub);
    grounded.set_name(ref.name);
    return grounded;
}

State ground_and_apply(const DomainModel& domain, const State& s, const GroundActionRef& ref) {
    const ActionDef* def = domain.find_action(ref.name);
    if (!def) throw std::runtime_error("unknown action '" + ref.name + "'");
    ActionSchema grounded = ground_action(domain, ref);

    for (const auto& pre : grounded.atoms(Label::Pre))
        if (!s.is_true(pre))
            throw std::runtime_error("precondition violation in " + to_string(ref) +
                                     ": " + to_string(pre) + " does not hold");
    if (!def->negative_pre.empty()) {
        Substitution sub;
        for (std::size_t i = 0; i < ref.args.size(); ++i)
            sub.mapping[def->params[i]] = ObjectRef::constant(normalize_name(ref.args[i]));
        for (const auto& np : def->negative_pre) {
            Predicate g = sub.apply(np);
            if (s.is_true(g))
                throw std::runtime_error("negative precondition violation in " + to_string(ref) +
                                         ": " + to_string(g) + " holds");
        }
    }

    State out = s;
    for (const auto& del : grounded.atoms(Label::Del)) out.trues.erase(del);
    for (const auto& add : grounded.atoms(Label::Add)) out.trues.insert(add);
    return out;
}

SimulationResult simulate_plan(const DomainModel& domain, const ProblemModel& problem,
                               const std::vector<GroundActionRef>& plan) {
    SimulationResult result;
    State current = problem.init;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        State next;
        try {
            next = ground_and_apply(domain, current, plan[i]);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("plan step " + std::to_string(i + 1) + ": " + e.what());
        }
        result.trace.steps.push_back({current, next});
        result.trace.refs.push_back(plan[i]);
        current = std::move(next);
    }
    result.final_state = current;
    result.goal_reached = problem.goal_holds(current);
    return result;
}

namespace {

void enumerate_groundings(const DomainModel& domain, const std::vector<ObjectRef>& objects,
                          std::vector<GroundActionRef>& out) {
    for (const auto& def : domain.actions) {
        if (!def.params.empty() && objects.empty()) continue;
        std::vector<std::size_t> idx(def.params.size(), 0);
        while (true) {
            GroundActionRef ref;
            ref.name = def.name;
            for (std::size_t i = 0; i < idx.size(); ++i) ref.args.push_back(objects[idx[i]].name);
            out.push_back(std::move(ref));
            std::size_t k = idx.size();
            while (k > 0) {
                if (++idx[k - 1] < objects.size()) break;
                idx[k - 1] = 0;
                --k;
            }
            if (k == 0) break;
        }
    }
    std::sort(out.begin(), out.end());
}

}  // namespace

std::vector<GroundActionRef> find_plan(const DomainModel& domain, const ProblemModel& problem,
                                       std::size_t max_depth) {
    if (problem.goal_holds(problem.init)) return {};

    std::vector<GroundActionRef> groundings;
    enumerate_groundings(domain, problem.objects, groundings);

    struct NodeRec {
        State state;
        std::size_t parent;
        std::size_t action;  // index into groundings
    };
    std::vector<NodeRec> nodes;
    std::set<State> visited;
    std::deque<std::size_t> frontier;

    nodes.push_back({problem.init, 0, 0});
    visited.insert(problem.init);
    frontier.push_back(0);
    std::vector<std::size_t> depth{0};

    while (!frontier.empty()) {
        std::size_t cur = frontier.front();
        frontier.pop_front();
        if (depth[cur] >= max_depth) continue;
        for (std::size_t gi = 0; gi < groundings.size(); ++gi) {
            State next;
            try {
                next = ground_and_apply(domain, nodes[cur].state, groundings[gi]);
            } catch (const std::runtime_error&) {
                continue;
            }
            if (!visited.insert(next).second) continue;
            nodes.push_back({next, cur, gi});
            depth.push_back(depth[cur] + 1);
            std::size_t id = nodes.size() - 1;
            if (problem.goal_holds(next)) {
                std::vector<GroundActionRef> plan;
                for (std::size_t at = id; at != 0; at = nodes[at].parent)
                    plan.push_back(groundings[nodes[at].action]);
                std::reverse(plan.begin(), plan.end());
                return plan;
            }
            frontier.push_back(id);
        }
    }
    throw std::runtime_error("no plan within depth " + std::to_string(max_depth) +
                             " for problem '" + problem.name + "'");
}

std::vector<Predicate> instantiable_universe(const DomainModel& domain,
                                             const ProblemModel& problem) {
    std::vector<Predicate> out;
    for (const auto& [sym, arity] : domain.signatures) {
        if (arity > 0 && problem.objects.empty()) continue;
        std::vector<std::size_t> idx(arity, 0);
        while (true) {
            Predicate p;
            p.symbol = sym;
            for (std::size_t i = 0; i < arity; ++i) p.args.push_back(problem.objects[idx[i]]);
            out.push_back(std::move(p));
            std::size_t k = idx.size();
            while (k > 0) {
                if (++idx[k - 1] < problem.objects.size()) break;
                idx[k - 1] = 0;
                --k;
            }
            if (k == 0) break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<GroundActionRef> parse_plan(std::istream& in) {
    std::vector<GroundActionRef> plan;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto semi = line.find(';');
        if (semi != std::string::npos) line = line.substr(0, semi);
        std::istringstream ls(line);
        std::string tok;
        std::vector<std::string> parts;
        while (ls >> tok) parts.push_back(tok);
        if (parts.empty()) continue;
        if (parts.front().front() != '(' || parts.back().back() != ')')
            throw std::runtime_error("plan line " + std::to_string(lineno) +
                                     ": expected (action arg ...)");
        parts.front().erase(parts.front().begin());
        parts.back().pop_back();
        GroundActionRef ref;
        bool first = true;
        for (auto& p : parts) {
            if (p.empty()) continue;
            if (first) {
                ref.name = normalize_name(p);
                first = false;
            } else {
                ref.args.push_back(normalize_name(p));
            }
        }
        if (ref.name.empty())
            throw std::runtime_error("plan line " + std::to_string(lineno) + ": empty action");
        plan.push_back(std::move(ref));
    }
    return plan;
}

std::vector<GroundActionRef> parse_plan_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open plan file: " + path);
    return parse_plan(in);
}

void write_plan(const std::vector<GroundActionRef>& plan, std::ostream& out) {
    for (const auto& step : plan) out << to_string(step) << '\n';
}

}  // namespace oaru::pddl
