#include "oaru/trace_io.hpp"

#include <fstream>
#include <sstream>

namespace oaru {

namespace {

[[noreturn]] void fail(int lineno, const std::string& msg) {
    throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + msg);
}

GroundActionRef parse_ref(const std::string& payload, int lineno) {
    std::string body = payload;
    auto b = body.find_first_not_of(" \t");
    auto e = body.find_last_not_of(" \t");
    if (b == std::string::npos) fail(lineno, "empty reference action");
    body = body.substr(b, e - b + 1);
    if (body.front() != '(' || body.back() != ')')
        fail(lineno, "reference action must look like (name arg ...)");
    std::istringstream in(body.substr(1, body.size() - 2));
    GroundActionRef ref;
    std::string tok;
    if (!(in >> tok)) fail(lineno, "reference action has no name");
    ref.name = normalize_name(tok);
    while (in >> tok) ref.args.push_back(normalize_name(tok));
    return ref;
}

struct RecordBuilder {
    Observation obs;
    std::optional<GroundActionRef> ref;
    bool any_line = false;
    bool after_seen = false;
    int first_line = 0;

    void flush_into(pddl::Trace& trace, int lineno) const {
        if (!any_line) return;
        if (!after_seen) fail(lineno, "record starting at line " + std::to_string(first_line) +
                                          " has no successor section (S':/U':)");
        trace.steps.push_back(obs);
        trace.refs.push_back(ref);
    }
};

}  // namespace

pddl::Trace read_trace(std::istream& in) {
    pddl::Trace trace;
    RecordBuilder rec;
    std::string line;
    int lineno = 0;

    auto handle_atom = [&](const std::string& payload, std::set<Predicate>& target) {
        auto b = payload.find_first_not_of(" \t");
        if (b == std::string::npos) return;  // bare marker: empty section
        Predicate p;
        try {
            p = parse_predicate(payload.substr(b));
        } catch (const std::invalid_argument& e) {
            fail(lineno, e.what());
        }
        if (!p.is_ground()) fail(lineno, "trace atoms must be ground: " + to_string(p));
        target.insert(p);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty() && line[0] == '#') continue;
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) {
            rec.flush_into(trace, lineno);
            rec = RecordBuilder{};
            continue;
        }
        if (!rec.any_line) {
            rec.any_line = true;
            rec.first_line = lineno;
        }
        std::string body = line.substr(first);
        if (body.rfind("S':", 0) == 0) {
            rec.after_seen = true;
            handle_atom(body.substr(3), rec.obs.after.trues);
        } else if (body.rfind("U':", 0) == 0) {
            rec.after_seen = true;
            handle_atom(body.substr(3), rec.obs.after.unknowns);
        } else if (body.rfind("S:", 0) == 0) {
            if (rec.after_seen) fail(lineno, "before-state line after successor section");
            handle_atom(body.substr(2), rec.obs.before.trues);
        } else if (body.rfind("U:", 0) == 0) {
            if (rec.after_seen) fail(lineno, "before-state line after successor section");
            handle_atom(body.substr(2), rec.obs.before.unknowns);
        } else if (body.rfind("A:", 0) == 0) {
            if (rec.after_seen) fail(lineno, "reference action after successor section");
            if (rec.ref) fail(lineno, "duplicate reference action in record");
            rec.ref = parse_ref(body.substr(2), lineno);
        } else {
            fail(lineno, "unrecognized line: '" + body + "'");
        }
    }
    rec.flush_into(trace, lineno);
    return trace;
}

pddl::Trace read_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    return read_trace(in);
}

void write_trace(const pddl::Trace& trace, std::ostream& out) {
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const Observation& o = trace.steps[i];
        if (i > 0) out << '\n';
        if (o.before.trues.empty()) out << "S:\n";
        for (const auto& p : o.before.trues) out << "S: " << to_string(p) << '\n';
        for (const auto& p : o.before.unknowns) out << "U: " << to_string(p) << '\n';
        if (trace.refs[i]) out << "A: " << to_string(*trace.refs[i]) << '\n';
        if (o.after.trues.empty()) out << "S':\n";
        for (const auto& p : o.after.trues) out << "S': " << to_string(p) << '\n';
        for (const auto& p : o.after.unknowns) out << "U': " << to_string(p) << '\n';
    }
}

void write_trace_file(const pddl::Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);
    write_trace(trace, out);
}

}  // namespace oaru
