#include "oaru/wpms.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace oaru::wpms {

namespace {

// Returns true if the clause survives normalization (not a tautology).
bool normalize(std::vector<Lit>& lits) {
    std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) {
        int va = var_of(a), vb = var_of(b);
        return va != vb ? va < vb : a < b;
    });
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t i = 1; i < lits.size(); ++i)
        if (lits[i] == -lits[i - 1]) return false;
    return true;
}

}  // namespace

void WpmsInstance::add_hard(std::vector<Lit> lits) {
    for (Lit l : lits) ensure_vars(var_of(l));
    if (!normalize(lits)) return;
    if (lits.empty()) {
        trivially_unsat_ = true;
        return;
    }
    hard_.push_back({std::move(lits), kHardWeight});
}

void WpmsInstance::add_soft(std::vector<Lit> lits, std::int64_t weight) {
    if (weight <= 0) throw std::invalid_argument("soft clause weight must be positive");
    for (Lit l : lits) ensure_vars(var_of(l));
    if (!normalize(lits)) return;
    if (lits.empty()) {
        base_cost_ += weight;
        return;
    }
    soft_.push_back({std::move(lits), weight});
}

void WpmsInstance::add_at_most_one(const std::vector<Lit>& lits) {
    for (std::size_t i = 0; i < lits.size(); ++i)
        for (std::size_t j = i + 1; j < lits.size(); ++j)
            add_hard({-lits[i], -lits[j]});
}

void WpmsInstance::add_iff_conjunction(Lit y, const std::vector<Lit>& xs) {
    std::vector<Lit> big{y};
    for (Lit x : xs) {
        add_hard({-y, x});
        big.push_back(-x);
    }
    add_hard(std::move(big));
}

void WpmsInstance::add_iff_disjunction(Lit z, const std::vector<Lit>& ys) {
    std::vector<Lit> big{-z};
    for (Lit y : ys) {
        add_hard({z, -y});
        big.push_back(y);
    }
    add_hard(std::move(big));
}

std::int64_t WpmsInstance::soft_weight_sum() const {
    std::int64_t sum = base_cost_;
    for (const auto& c : soft_) sum += c.weight;
    return sum;
}

namespace {

// Branch-and-bound search state. Clause satisfaction is tracked with
// per-clause counters (true/unassigned literal counts) maintained through
// occurrence lists; the trail allows exact undo.
class Search {
public:
    Search(const WpmsInstance& inst, std::optional<std::chrono::milliseconds> budget)
        : inst_(inst), nvars_(inst.var_count()) {
        if (budget) deadline_ = Clock::now() + *budget;
        clauses_.reserve(inst.hard().size() + inst.soft().size());
        for (const auto& c : inst.hard()) add_clause(c.lits, kHardWeight);
        for (const auto& c : inst.soft()) add_clause(c.lits, c.weight);
        value_.assign(static_cast<std::size_t>(nvars_) + 1, kUndef);
        best_cost_ = inst.soft_weight_sum() + 1;
    }

    WpmsSolution run() {
        WpmsSolution out;
        if (inst_.trivially_unsat()) {
            out.status = WpmsSolution::Status::Unsat;
            return out;
        }
        cost_ = inst_.base_cost();
        bool finished = true;
        try {
            if (propagate_initial()) dfs(1);
        } catch (const TimeoutSignal&) {
            finished = false;
        }
        if (!found_) {
            out.status = finished ? WpmsSolution::Status::Unsat : WpmsSolution::Status::Timeout;
            out.cost = inst_.soft_weight_sum();
            return out;
        }
        out.status = finished ? WpmsSolution::Status::Optimal : WpmsSolution::Status::Timeout;
        out.cost = best_cost_;
        out.assignment = best_assignment_;
        return out;
    }

private:
    using Clock = std::chrono::steady_clock;
    struct TimeoutSignal {};

    struct Clause {
        std::vector<Lit> lits;
        std::int64_t weight;  // kHardWeight for hard
        int n_true = 0;
        int n_undef = 0;
        bool counted = false;  // soft only: weight already charged
    };

    static constexpr std::int8_t kUndef = -1;

    void add_clause(const std::vector<Lit>& lits, std::int64_t weight) {
        int id = static_cast<int>(clauses_.size());
        clauses_.push_back({lits, weight, 0, static_cast<int>(lits.size()), false});
        for (Lit l : lits) {
            occ_.resize(std::max<std::size_t>(occ_.size(), 2 * static_cast<std::size_t>(var_of(l)) + 2));
            occ_[occ_index(l)].push_back(id);
        }
    }

    static std::size_t occ_index(Lit l) {
        return 2 * static_cast<std::size_t>(var_of(l)) + (l > 0 ? 0 : 1);
    }

    // Assigns var = val, updates counters, queues implied units.
    // Returns false on a hard conflict.
    bool assign(int var, bool val) {
        value_[static_cast<std::size_t>(var)] = val ? 1 : 0;
        trail_.push_back(var);
        Lit tl = val ? var : -var;   // literal made true
        Lit fl = val ? -var : var;   // literal made false
        if (occ_index(tl) < occ_.size()) {
            for (int id : occ_[occ_index(tl)]) {
                auto& c = clauses_[static_cast<std::size_t>(id)];
                ++c.n_true;
                --c.n_undef;
            }
        }
        bool ok = true;
        if (occ_index(fl) < occ_.size()) {
            for (int id : occ_[occ_index(fl)]) {
                auto& c = clauses_[static_cast<std::size_t>(id)];
                --c.n_undef;
                if (c.n_true > 0) continue;
                if (c.n_undef == 0) {
                    if (c.weight == kHardWeight) {
                        ok = false;  // keep counters consistent; caller unwinds
                    } else if (!c.counted) {
                        c.counted = true;
                        cost_ += c.weight;
                        charged_.push_back(id);
                    }
                } else if (c.n_undef == 1 && c.weight == kHardWeight) {
                    units_.push_back(id);
                }
            }
        }
        return ok;
    }

    void undo_to(std::size_t trail_mark, std::size_t charged_mark) {
        while (charged_.size() > charged_mark) {
            auto& c = clauses_[static_cast<std::size_t>(charged_.back())];
            c.counted = false;
            cost_ -= c.weight;
            charged_.pop_back();
        }
        while (trail_.size() > trail_mark) {
            int var = trail_.back();
            trail_.pop_back();
            bool val = value_[static_cast<std::size_t>(var)] == 1;
            Lit tl = val ? var : -var;
            Lit fl = val ? -var : var;
            if (occ_index(tl) < occ_.size())
                for (int id : occ_[occ_index(tl)]) {
                    auto& c = clauses_[static_cast<std::size_t>(id)];
                    --c.n_true;
                    ++c.n_undef;
                }
            if (occ_index(fl) < occ_.size())
                for (int id : occ_[occ_index(fl)]) {
                    auto& c = clauses_[static_cast<std::size_t>(id)];
                    ++c.n_undef;
                }
            value_[static_cast<std::size_t>(var)] = kUndef;
        }
        units_.clear();
    }

    // Processes queued hard units until fixpoint. False on conflict.
    bool propagate() {
        while (!units_.empty()) {
            int id = units_.back();
            units_.pop_back();
            auto& c = clauses_[static_cast<std::size_t>(id)];
            if (c.n_true > 0 || c.n_undef != 1) continue;
            Lit unit = 0;
            for (Lit l : c.lits)
                if (value_[static_cast<std::size_t>(var_of(l))] == kUndef) {
                    unit = l;
                    break;
                }
            if (unit == 0) continue;
            if (!assign(var_of(unit), unit > 0)) return false;
        }
        return true;
    }

    bool propagate_initial() {
        for (std::size_t id = 0; id < clauses_.size(); ++id) {
            const auto& c = clauses_[id];
            if (c.weight == kHardWeight && c.n_undef == 1 && c.n_true == 0)
                units_.push_back(static_cast<int>(id));
        }
        return propagate();
    }

    void check_budget() {
        if (!deadline_) return;
        if ((tick_++ & 1023) != 0) return;  // first call checks immediately
        if (Clock::now() >= *deadline_) throw TimeoutSignal{};
    }

    // `from` is a skip hint: every variable below it is either assigned on
    // the current path or occurs in no clause.
    void dfs(int from) {
        check_budget();
        if (cost_ >= best_cost_) return;  // cost only grows along a path
        int var = next_unassigned(from);
        if (var == 0) {
            best_cost_ = cost_;
            record_best();
            return;
        }
        for (bool val : {true, false}) {
            std::size_t tm = trail_.size(), cm = charged_.size();
            if (assign(var, val) && propagate()) dfs(var + 1);
            undo_to(tm, cm);
            if (cost_ >= best_cost_) return;
        }
    }

    bool unconstrained(int var) const {
        std::size_t p = 2 * static_cast<std::size_t>(var), n = p + 1;
        bool pe = p >= occ_.size() || occ_[p].empty();
        bool ne = n >= occ_.size() || occ_[n].empty();
        return pe && ne;
    }

    int next_unassigned(int from) {
        for (int v = from; v <= nvars_; ++v)
            if (value_[static_cast<std::size_t>(v)] == kUndef && !unconstrained(v)) return v;
        return 0;
    }

    void record_best() {
        found_ = true;
        best_assignment_.assign(static_cast<std::size_t>(nvars_) + 1, 0);
        for (int v = 1; v <= nvars_; ++v)
            best_assignment_[static_cast<std::size_t>(v)] = value_[static_cast<std::size_t>(v)] == 1 ? 1 : 0;
    }

    const WpmsInstance& inst_;
    int nvars_;
    std::vector<Clause> clauses_;
    std::vector<std::vector<int>> occ_;
    std::vector<std::int8_t> value_;
    std::vector<int> trail_;
    std::vector<int> charged_;
    std::vector<int> units_;
    std::int64_t cost_ = 0;
    std::int64_t best_cost_ = 0;
    std::vector<std::uint8_t> best_assignment_;
    bool found_ = false;
    std::optional<Clock::time_point> deadline_;
    std::uint64_t tick_ = 0;
};

}  // namespace

WpmsSolution solve(const WpmsInstance& instance, std::optional<std::chrono::milliseconds> budget) {
    Search s(instance, budget);
    return s.run();
}

std::optional<std::int64_t> evaluate(const WpmsInstance& instance,
                                     const std::vector<std::uint8_t>& assignment) {
    auto lit_true = [&](Lit l) {
        bool v = assignment[static_cast<std::size_t>(var_of(l))] != 0;
        return l > 0 ? v : !v;
    };
    for (const auto& c : instance.hard()) {
        bool sat = false;
        for (Lit l : c.lits) sat = sat || lit_true(l);
        if (!sat) return std::nullopt;
    }
    std::int64_t cost = instance.base_cost();
    for (const auto& c : instance.soft()) {
        bool sat = false;
        for (Lit l : c.lits) sat = sat || lit_true(l);
        if (!sat) cost += c.weight;
    }
    return cost;
}

void write_wcnf(const WpmsInstance& instance, std::ostream& out) {
    std::int64_t top = instance.soft_weight_sum() + 1;
    out << "p wcnf " << instance.var_count() << ' ' << instance.clause_count() << ' ' << top << '\n';
    for (const auto& c : instance.soft()) {
        out << c.weight;
        for (Lit l : c.lits) out << ' ' << l;
        out << " 0\n";
    }
    for (const auto& c : instance.hard()) {
        out << top;
        for (Lit l : c.lits) out << ' ' << l;
        out << " 0\n";
    }
}

WpmsInstance read_wcnf(std::istream& in) {
    WpmsInstance inst;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    std::int64_t top = 0;
    int declared_vars = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error("wcnf line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string p, fmt;
            long long v = 0, c = 0, t = 0;
            if (!(ls >> p >> fmt >> v >> c >> t) || p != "p" || fmt != "wcnf" || v < 0 || t < 1)
                fail("expected header 'p wcnf V C TOP'");
            have_header = true;
            top = t;
            declared_vars = static_cast<int>(v);
            inst.ensure_vars(declared_vars);
            continue;
        }
        std::int64_t w;
        if (!(ls >> w)) fail("expected clause weight");
        if (w < 1) fail("clause weight must be >= 1");
        std::vector<Lit> lits;
        long long l;
        bool terminated = false;
        while (ls >> l) {
            if (l == 0) {
                terminated = true;
                break;
            }
            if (var_of(static_cast<Lit>(l)) > declared_vars)
                fail("literal exceeds declared variable count");
            lits.push_back(static_cast<Lit>(l));
        }
        if (!terminated) fail("clause not terminated by 0");
        if (w >= top)
            inst.add_hard(std::move(lits));
        else
            inst.add_soft(std::move(lits), w);
    }
    if (!have_header) {
        lineno = std::max(lineno, 1);
        fail("missing 'p wcnf' header");
    }
    return inst;
}

void write_wcnf_file(const WpmsInstance& instance, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    write_wcnf(instance, out);
}

WpmsInstance read_wcnf_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return read_wcnf(in);
}

WpmsSolution solve_external(const WpmsInstance& instance, const std::string& solver_path) {
    char tmpl[] = "/tmp/oaru-wcnf-XXXXXX";
    int fd = mkstemp(tmpl);
    if (fd < 0) throw std::runtime_error("cannot create temporary WCNF file");
    close(fd);
    std::string wcnf_path(tmpl);
    write_wcnf_file(instance, wcnf_path);

    std::string cmd = solver_path + " " + wcnf_path + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        std::remove(wcnf_path.c_str());
        throw std::runtime_error("cannot run external solver: " + solver_path);
    }
    std::string output;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) output.append(buf, n);
    int rc = pclose(pipe);
    std::remove(wcnf_path.c_str());
    if (rc == -1) throw std::runtime_error("external solver failed: " + solver_path);

    std::optional<std::int64_t> reported_cost;
    std::vector<std::uint8_t> assignment(static_cast<std::size_t>(instance.var_count()) + 1, 0);
    bool have_values = false;
    bool unsat = false;
    std::istringstream lines(output);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind("o ", 0) == 0) {
            reported_cost = std::stoll(line.substr(2));
        } else if (line.rfind("s UNSATISFIABLE", 0) == 0) {
            unsat = true;
        } else if (line.rfind("v ", 0) == 0) {
            std::istringstream vs(line.substr(2));
            long long l;
            while (vs >> l) {
                if (l == 0) continue;
                int v = var_of(static_cast<Lit>(l));
                if (v <= instance.var_count())
                    assignment[static_cast<std::size_t>(v)] = l > 0 ? 1 : 0;
            }
            have_values = true;
        }
    }

    WpmsSolution out;
    if (unsat) {
        out.status = WpmsSolution::Status::Unsat;
        return out;
    }
    if (!have_values)
        throw std::runtime_error("external solver printed no 'v' line: " + solver_path);
    auto cost = evaluate(instance, assignment);
    if (!cost)
        throw std::runtime_error("external solver assignment violates hard clauses");
    if (reported_cost && *reported_cost != *cost)
        throw std::runtime_error("external solver cost mismatch: reported " +
                                 std::to_string(*reported_cost) + ", recomputed " +
                                 std::to_string(*cost));
    out.status = WpmsSolution::Status::Optimal;
    out.assignment = std::move(assignment);
    out.cost = *cost;
    return out;
}

}  // namespace oaru::wpms
