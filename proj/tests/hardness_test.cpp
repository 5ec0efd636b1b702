#include <gtest/gtest.h>

#include "mpst/hardness.hpp"

using namespace mpst;

namespace {

const Property kProps[] = {Property::Safety, Property::DeadlockFree, Property::Live};

TEST(Qbf, ParsePrintRoundTrip) {
    Qbf f = parse_qbf("A x. E y. (x | ~y | y) & (~x|x|y)");
    ASSERT_EQ(f.prefix.size(), 2u);
    EXPECT_TRUE(f.prefix[0].universal);
    EXPECT_FALSE(f.prefix[1].universal);
    ASSERT_EQ(f.clauses.size(), 2u);
    EXPECT_TRUE(f.clauses[0][1].negated);
    EXPECT_EQ(f.clauses[1][0].var, "x");
    EXPECT_EQ(print(f), "A x. E y. (x | ~y | y) & (~x | x | y)");
    EXPECT_EQ(print(parse_qbf(print(f))), print(f));
}

TEST(Qbf, ParseErrors) {
    EXPECT_THROW(parse_qbf("E x. (x | y | x)"), ParseError);    // unbound
    EXPECT_THROW(parse_qbf("E x. E x. (x | x | x)"), ParseError);
    EXPECT_THROW(parse_qbf("E x. (x | x)"), ParseError);         // two literals
    EXPECT_THROW(parse_qbf("E x. (x | x | x) &"), ParseError);
    EXPECT_THROW(parse_qbf("(x | x | x)"), ParseError);          // no prefix
}

TEST(Qbf, Eval) {
    EXPECT_TRUE(eval_qbf(parse_qbf("E x. (x | x | x)")));
    EXPECT_FALSE(eval_qbf(parse_qbf("A x. (x | x | x)")));
    EXPECT_TRUE(eval_qbf(parse_qbf("A x. E y. (x | y | y) & (~x | ~y | ~y)")));
    EXPECT_FALSE(eval_qbf(parse_qbf("E y. A x. (x | y | y) & (~x | ~y | ~y)")));
    EXPECT_TRUE(eval_qbf(parse_qbf("A x. (x | ~x | x)")));
}

// Independent evaluator: expand the formula over all assignments and fold the
// prefix from the innermost quantifier outwards.
bool eval_by_table(const Qbf& f) {
    std::size_t n = f.prefix.size();
    std::vector<bool> table(std::size_t{1} << n);
    for (std::size_t a = 0; a < table.size(); ++a) {
        bool all = true;
        for (const auto& c : f.clauses) {
            bool any = false;
            for (const auto& l : c) {
                std::size_t k = 0;
                while (f.prefix[k].var != l.var) ++k;
                any = any || (((a >> k) & 1u) != 0) != l.negated;
            }
            all = all && any;
        }
        table[a] = all;
    }
    for (std::size_t k = n; k-- > 0;) {
        std::vector<bool> next(std::size_t{1} << k);
        for (std::size_t a = 0; a < next.size(); ++a) {
            bool lo = table[a], hi = table[a | (std::size_t{1} << k)];
            next[a] = f.prefix[k].universal ? lo && hi : lo || hi;
        }
        table = next;
    }
    return table[0];
}

TEST(Qbf, EvalMatchesTruthTable) {
    for (unsigned n = 1; n <= 3; ++n)
        for (const Qbf& f : all_qbfs(n, n == 3 ? 1 : 2))
            ASSERT_EQ(eval_qbf(f), eval_by_table(f)) << print(f);
}

TEST(Qbf, Enumeration) {
    EXPECT_EQ(all_qbfs(1, 1).size(), 2u * 8u);
    EXPECT_EQ(all_qbfs(2, 1).size(), 4u * 64u);
}

TEST(Gadget, Shape) {
    Qbf f = parse_qbf("E x. (x | x | x)");
    TypingContext c = gen_qbf_context(f, Property::DeadlockFree);
    ASSERT_EQ(c.size(), 4u);
    EXPECT_EQ(c[0].first, "p1");
    EXPECT_EQ(c[1].first, "r1");
    EXPECT_EQ(c[2].first, "r2");
    EXPECT_EQ(c[3].first, "s");
    EXPECT_EQ(print(c[3].second), "rec t. p1!(int); p1&{doneno: end, doneyes: t}");
    EXPECT_EQ(print(gen_qbf_context(f, Property::Safety)[3].second),
              "rec t. p1!(int); p1&{doneno: p1!(bool); end, doneyes: t}");
    EXPECT_EQ(print(c[2].second), "rec t. r1?(int); r1+{doneyes: t}");
    EXPECT_NE(qbf_protocol_summary(f).find("r1: evaluates x | x | x"), std::string::npos);
}

TEST(Gadget, RoundTripsAndStateBound) {
    for (const Qbf& f : all_qbfs(2, 1)) {
        TypingContext c = gen_qbf_context(f, Property::Live);
        EXPECT_EQ(parse_context(print(c)), c);
        auto g = reachable_graph(c);
        std::uint64_t prod = 1;
        for (const auto& [p, t] : c) prod *= size(t);
        EXPECT_LE(g.states.size(), prod);
    }
}

TEST(Gadget, Deterministic) {
    for (unsigned n = 1; n <= 2; ++n)
        for (const Qbf& f : all_qbfs(n, 1))
            for (Property p : kProps) {
                auto g = reachable_graph(gen_qbf_context(f, p));
                for (const auto& s : g.succ) ASSERT_LE(s.size(), 1u) << print(f);
                // A true formula cycles back to the initial context.
                bool returns = false;
                for (const auto& s : g.succ)
                    for (const auto& e : s) returns = returns || e.to == 0;
                EXPECT_EQ(returns, eval_qbf(f)) << print(f);
            }
}

TEST(Gadget, QueriesReturnCurrentValue) {
    int checked = 0;
    for (const Qbf& f : all_qbfs(2, 1)) {
        auto g = reachable_graph(gen_qbf_context(f, Property::DeadlockFree));
        // Walk the unique path. p_i holds true once it has sent its second
        // start message since its own start.
        int starts[3] = {0, 0, 0};
        std::string pending;
        int s = 0;
        for (std::size_t steps = 0; steps < g.states.size() && !g.succ[static_cast<std::size_t>(s)].empty(); ++steps) {
            const auto& e = g.succ[static_cast<std::size_t>(s)][0];
            const CtxLabel& l = e.label;
            if (l.kind == CtxLabelKind::Comm && l.p == "s") starts[1] = starts[2] = 0;
            if (l.kind == CtxLabelKind::Comm && l.p == "p1") starts[1]++, starts[2] = 0;
            if (l.kind == CtxLabelKind::Comm && l.p == "p2") starts[2]++;
            if (l.kind == CtxLabelKind::Choice && l.label.rfind("query_", 0) == 0 && l.label == "query_" + l.q) pending = l.q;
            if (l.kind == CtxLabelKind::Choice && !pending.empty() && l.p == pending) {
                int holder = pending == "p1" ? 1 : 2;
                EXPECT_EQ(l.label, starts[holder] == 2 ? "yes" : "no") << print(f);
                pending.clear();
                ++checked;
            }
            s = e.to;
        }
    }
    EXPECT_GT(checked, 500);
}

TEST(Reduction, Examples) {
    auto a = validate_reduction(parse_qbf("E x. (x | x | x)"), Property::Safety);
    EXPECT_TRUE(a.formula);
    EXPECT_TRUE(a.verdict.holds);
    auto b = validate_reduction(parse_qbf("A x. (x | x | x)"), Property::DeadlockFree);
    EXPECT_FALSE(b.formula);
    EXPECT_FALSE(b.verdict.holds);
    auto c = validate_reduction(parse_qbf("A x. E y. (x | y | y) & (~x | ~y | ~y)"), Property::Live);
    EXPECT_TRUE(c.formula);
    EXPECT_TRUE(c.verdict.holds);
}

TEST(Reduction, UnsafeTraceEndsAtController) {
    Qbf f = parse_qbf("A x. (x | x | x)");
    TypingContext c = gen_qbf_context(f, Property::Safety);
    Verdict v = check_safety(c);
    ASSERT_FALSE(v.holds);
    ASSERT_TRUE(v.trace);
    EXPECT_TRUE(replays(c, *v.trace));
    const TypingContext& last = v.trace->states.back();
    EXPECT_EQ(print(last.back().second), "p1!(bool); end");
    EXPECT_EQ(v.trace->labels.back().label, "doneno");
}

TEST(Reduction, ExhaustiveSmallFormulas) {
    for (unsigned n = 1; n <= 2; ++n)
        for (const Qbf& f : all_qbfs(n, 1))
            for (Property p : kProps) ASSERT_TRUE(validate_reduction(f, p).agrees()) << print(f) << " " << to_string(p);
}

TEST(Reduction, TwoClausesThreeVariables) {
    for (const char* s : {"A x. E y. A z. (x | y | z) & (~x | ~y | z)", "E x. A y. E z. (x | ~y | z) & (~x | y | ~z)",
                          "A x. A y. A z. (x | y | z) & (~x | y | z)"})
        for (Property p : kProps) EXPECT_TRUE(validate_reduction(parse_qbf(s), p).agrees()) << s;
}

}  // namespace
