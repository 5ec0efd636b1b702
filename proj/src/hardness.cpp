#include "mpst/hardness.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <set>

namespace mpst {

namespace {

struct QbfParser {
    const std::string& s;
    std::size_t i = 0;

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool accept(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", i);
    }
    std::string ident() {
        skip();
        std::size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        if (j == i) throw ParseError("expected variable", i);
        std::string id = s.substr(i, j - i);
        i = j;
        return id;
    }
    // A quantifier is `A` or `E` followed by a variable.
    bool at_quantifier() {
        skip();
        if (i + 1 >= s.size() || (s[i] != 'A' && s[i] != 'E')) return false;
        return std::isspace(static_cast<unsigned char>(s[i + 1]));
    }

    Qbf parse() {
        Qbf f;
        while (at_quantifier()) {
            bool universal = s[i] == 'A';
            ++i;
            f.prefix.push_back({universal, ident()});
            expect('.');
        }
        do {
            expect('(');
            std::array<QbfLiteral, 3> c;
            for (std::size_t k = 0; k < 3; ++k) {
                if (k) expect('|');
                bool neg = accept('~');
                c[k] = {ident(), neg};
            }
            expect(')');
            f.clauses.push_back(c);
        } while (accept('&'));
        skip();
        if (i != s.size()) throw ParseError("trailing input in formula", i);
        return f;
    }
};

std::string literal(const QbfLiteral& l) { return (l.negated ? "~" : "") + l.var; }

}  // namespace

Qbf parse_qbf(const std::string& text) {
    Qbf f = QbfParser{text}.parse();
    try {
        validate(f);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what(), 0);
    }
    return f;
}

std::string print(const Qbf& f) {
    std::string out;
    for (const auto& q : f.prefix) out += std::string(q.universal ? "A " : "E ") + q.var + ". ";
    for (std::size_t c = 0; c < f.clauses.size(); ++c) {
        if (c) out += " & ";
        const auto& cl = f.clauses[c];
        out += "(" + literal(cl[0]) + " | " + literal(cl[1]) + " | " + literal(cl[2]) + ")";
    }
    return out;
}

void validate(const Qbf& f) {
    if (f.prefix.empty()) throw Error("formula has no variables");
    if (f.clauses.empty()) throw Error("formula has no clauses");
    std::set<std::string> bound;
    for (const auto& q : f.prefix)
        if (!bound.insert(q.var).second) throw Error("variable " + q.var + " is bound twice");
    for (const auto& c : f.clauses)
        for (const auto& l : c)
            if (!bound.count(l.var)) throw Error("variable " + l.var + " is not bound");
}

bool eval_qbf(const Qbf& f) {
    validate(f);
    if (f.prefix.size() > 20) throw Error("formula has more than 20 variables");
    std::map<std::string, std::size_t> pos;
    for (std::size_t k = 0; k < f.prefix.size(); ++k) pos[f.prefix[k].var] = k;
    std::vector<bool> val(f.prefix.size());
    std::function<bool(std::size_t)> go = [&](std::size_t k) {
        if (k == f.prefix.size()) {
            for (const auto& c : f.clauses) {
                bool sat = false;
                for (const auto& l : c) sat = sat || (val[pos.at(l.var)] != l.negated);
                if (!sat) return false;
            }
            return true;
        }
        val[k] = false;
        bool lo = go(k + 1);
        if (f.prefix[k].universal && !lo) return false;
        if (!f.prefix[k].universal && lo) return true;
        val[k] = true;
        return go(k + 1);
    };
    return go(0);
}

namespace {

const Sort kInt = Sort::integer();

std::string p_name(std::size_t i) { return i == 0 ? "s" : "p" + std::to_string(i); }
std::string query(std::size_t j) { return "query_" + p_name(j); }

LType sel1(const std::string& peer, const std::string& label, LType cont) { return lt::sel(peer, {{label, cont}}); }

LType v(const char* name) { return lt::free(name); }

// Forwards a query for participant j to the left neighbour and relays the
// answer to the right, then continues with `back`.
LBranch forward(std::size_t j, const std::string& left, const std::string& right, LType back) {
    return {query(j), sel1(left, query(j), lt::bra(left, {{"no", sel1(right, "no", back)},
                                                          {"yes", sel1(right, "yes", back)}}))};
}

}  // namespace

TypingContext gen_qbf_context(const Qbf& f, Property prop) {
    validate(f);
    std::size_t n = f.prefix.size(), m = f.clauses.size();
    std::map<std::string, std::size_t> index;
    for (std::size_t k = 0; k < n; ++k) index[f.prefix[k].var] = k + 1;
    auto r_name = [&](std::size_t i) { return i == 0 ? p_name(n) : "r" + std::to_string(i); };
    auto right_of_p = [&](std::size_t i) { return i == n ? r_name(1) : p_name(i + 1); };

    TypingContext ctx;
    LType bad = prop == Property::Safety ? lt::out("p1", Sort::boolean(), lt::end()) : lt::end();
    ctx.emplace_back("s", lt::bind("t", lt::out("p1", kInt, lt::bra("p1", {{"doneyes", v("t")}, {"doneno", bad}}))));

    for (std::size_t i = 1; i <= n; ++i) {
        std::string left = p_name(i - 1), right = right_of_p(i);
        bool forall = f.prefix[i - 1].universal;
        std::string resolve = forall ? "doneno" : "doneyes";
        std::string resolved = forall ? "doneyes" : "doneno";
        // Variable set to true: own queries answer yes, results pass through.
        std::vector<LBranch> tb;
        for (std::size_t j = 1; j < i; ++j) tb.push_back(forward(j, left, right, v("t3")));
        tb.push_back({query(i), sel1(right, "yes", v("t3"))});
        tb.push_back({"doneno", sel1(left, "doneno", v("t1"))});
        tb.push_back({"doneyes", sel1(left, "doneyes", v("t1"))});
        LType true_state = lt::bind("t3", lt::bra(right, tb));
        // Variable set to false first.
        std::vector<LBranch> fb;
        for (std::size_t j = 1; j < i; ++j) fb.push_back(forward(j, left, right, v("t2")));
        fb.push_back({query(i), sel1(right, "no", v("t2"))});
        fb.push_back({resolve, sel1(left, resolve, v("t1"))});
        fb.push_back({resolved, lt::out(right, kInt, true_state)});
        LType false_state = lt::bind("t2", lt::bra(right, fb));
        ctx.emplace_back(p_name(i), lt::bind("t1", lt::in(left, kInt, lt::out(right, kInt, false_state))));
    }

    for (std::size_t i = 1; i <= m; ++i) {
        std::string left = r_name(i - 1), right = r_name(i + 1);
        // Clause evaluation, literal by literal: the first true literal
        // answers doneyes, all false answers doneno.
        LType verdict = sel1(left, "doneno", v("t1"));
        for (std::size_t w = 3; w-- > 0;) {
            const QbfLiteral& l = f.clauses[i - 1][w];
            std::string exp = l.negated ? "no" : "yes", expd = l.negated ? "yes" : "no";
            verdict = sel1(left, query(index.at(l.var)),
                           lt::bra(left, {{exp, sel1(left, "doneyes", v("t1"))}, {expd, verdict}}));
        }
        std::vector<LBranch> bs;
        for (std::size_t j = 1; j <= n; ++j) bs.push_back(forward(j, left, right, v("t2")));
        bs.push_back({"doneno", sel1(left, "doneno", v("t1"))});
        bs.push_back({"doneyes", verdict});
        LType wait = lt::bind("t2", lt::bra(right, bs));
        ctx.emplace_back(r_name(i), lt::bind("t1", lt::in(left, kInt, lt::out(right, kInt, wait))));
    }
    ctx.emplace_back(r_name(m + 1), lt::bind("t1", lt::in(r_name(m), kInt, sel1(r_name(m), "doneyes", v("t1")))));

    std::sort(ctx.begin(), ctx.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return ctx;
}

std::string qbf_protocol_summary(const Qbf& f) {
    validate(f);
    std::size_t n = f.prefix.size(), m = f.clauses.size();
    std::string out = "s: starts each round by messaging p1; doneyes repeats, doneno enters the bad state\n";
    for (std::size_t i = 1; i <= n; ++i) {
        const auto& q = f.prefix[i - 1];
        out += p_name(i) + ": holds " + q.var + " (" + (q.universal ? "forall" : "exists") +
               "), tries false then true, answers " + query(i) + "\n";
    }
    for (std::size_t i = 1; i <= m; ++i) {
        const auto& c = f.clauses[i - 1];
        out += "r" + std::to_string(i) + ": evaluates " + literal(c[0]) + " | " + literal(c[1]) + " | " + literal(c[2]) +
               " after r" + std::to_string(i + 1) + " answers doneyes\n";
    }
    out += "r" + std::to_string(m + 1) + ": answers doneyes to every round\n";
    return out;
}

ReductionCheck validate_reduction(const Qbf& f, Property prop, std::size_t max_states) {
    ReductionCheck r;
    r.formula = eval_qbf(f);
    r.verdict = check(gen_qbf_context(f, prop), prop, max_states);
    return r;
}

std::vector<Qbf> all_qbfs(unsigned vars, unsigned clauses) {
    static const char* names[] = {"x", "y", "z", "w", "u", "v"};
    if (vars == 0 || vars > 6 || clauses == 0) throw Error("all_qbfs supports 1..6 variables and at least one clause");
    std::vector<QbfLiteral> lits;
    for (unsigned k = 0; k < vars; ++k) {
        lits.push_back({names[k], false});
        lits.push_back({names[k], true});
    }
    std::uint64_t per_clause = lits.size() * lits.size() * lits.size();
    std::uint64_t matrices = 1;
    for (unsigned c = 0; c < clauses; ++c) matrices *= per_clause;
    std::vector<Qbf> out;
    for (unsigned mask = 0; mask < (1u << vars); ++mask)
        for (std::uint64_t mi = 0; mi < matrices; ++mi) {
            Qbf f;
            for (unsigned k = 0; k < vars; ++k) f.prefix.push_back({((mask >> k) & 1u) != 0, names[k]});
            std::uint64_t code = mi;
            for (unsigned c = 0; c < clauses; ++c) {
                std::array<QbfLiteral, 3> cl;
                for (auto& l : cl) {
                    l = lits[code % lits.size()];
                    code /= lits.size();
                }
                f.clauses.push_back(cl);
            }
            out.push_back(f);
        }
    return out;
}

}  // namespace mpst
