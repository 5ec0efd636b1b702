#include "mpst/pipeline.hpp"

#include <chrono>

#include "mpst/inference.hpp"

namespace mpst {

namespace {

class Stopwatch {
public:
    explicit Stopwatch(std::vector<StageTime>& out) : out_(out), start_(std::chrono::steady_clock::now()) {}
    void lap(const std::string& stage) {
        auto now = std::chrono::steady_clock::now();
        out_.push_back({stage, static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(now - start_).count())});
        start_ = now;
    }

private:
    std::vector<StageTime>& out_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace

TopDownReport run_topdown(const Session& m, GType g, ProjKind kind) {
    TopDownReport r;
    Stopwatch clock(r.timings);
    auto fail = [&](const std::string& stage, const std::string& why) {
        r.failed_stage = stage;
        r.reason = why;
        return r;
    };
    for (const auto& p : participants(g)) {
        bool present = false;
        for (const auto& [q, proc] : m) present = present || q == p;
        if (!present) return fail("participants", "participant " + p + " of the global type has no process");
    }
    if (kind == ProjKind::Subset) {
        if (auto bad = find_imbalance(g)) return fail("precondition", "global type is not balanced");
    }
    for (const auto& [p, proc] : m) {
        Projection pj = project(g, p, kind);
        if (!pj.defined) return fail("projection", "projection onto " + p + " is undefined: " + pj.reason);
        r.projections[p] = pj.type;
    }
    clock.lap("projection");
    for (const auto& [p, proc] : m) {
        Inference inf = infer_min_type(proc);
        if (!inf.typable) return fail("inference", "process of " + p + " is untypable: " + inf.reason);
        r.inferred[p] = inf.type;
    }
    clock.lap("inference");
    for (const auto& [p, proc] : m)
        if (!below_up_to_sorts(r.inferred[p], r.projections[p])) {
            clock.lap("subtyping");
            return fail("subtyping", "minimum type of " + p + " is not a subtype of its projection");
        }
    clock.lap("subtyping");
    r.accepted = true;
    return r;
}

TypingContext infer_context(const Session& m) {
    TypingContext ctx;
    for (const auto& [p, proc] : m) {
        Inference inf = infer_min_type(proc);
        if (!inf.typable) throw Error("process of " + p + " is untypable: " + inf.reason);
        LType t = map_sorts(inf.type, [&](const Sort& s) { return s.is_var() ? Sort::variable(p + "." + s.var) : s; });
        ctx.emplace_back(p, t);
    }
    return ctx;
}

BottomUpReport run_bottomup(const Session& m, Property prop, std::size_t max_states) {
    BottomUpReport r;
    Stopwatch clock(r.timings);
    TypingContext open;
    try {
        open = infer_context(m);
    } catch (const BudgetExceeded&) {
        throw;
    } catch (const Error& e) {
        r.reason = e.what();
        return r;
    }
    clock.lap("inference");
    r.typable = true;
    std::vector<std::string> vars;
    for (const auto& [p, t] : open)
        for (const auto& v : sort_vars(t)) vars.push_back(v);
    static const Sort ground[] = {Sort::integer(), Sort::boolean(), Sort::nat()};
    std::uint64_t choices = 1;
    for (std::size_t k = 0; k < vars.size() && choices <= 729; ++k) choices *= 3;
    if (choices > 729) choices = 1;  // too many to search; all int
    auto instantiate = [&](std::uint64_t code) {
        std::map<std::string, Sort> pi;
        for (const auto& v : vars) {
            pi[v] = ground[code % 3];
            code /= 3;
        }
        TypingContext c;
        for (const auto& [p, t] : open)
            c.emplace_back(p, map_sorts(t, [&](const Sort& s) { return s.is_var() ? pi.at(s.var) : s; }));
        return c;
    };
    for (std::uint64_t code = 0; code < choices; ++code) {
        TypingContext c = instantiate(code);
        Verdict v = check(c, prop, max_states);
        if (code == 0 || v.holds) {
            r.context = c;
            r.verdict = v;
        }
        if (v.holds) break;
    }
    clock.lap("checking");
    return r;
}

Session realize_session(Rng& rng, const TypingContext& ctx) {
    Session m;
    for (const auto& [p, t] : ctx) m.emplace_back(p, normalize(realize(rng, t)));
    return m;
}

}  // namespace mpst
