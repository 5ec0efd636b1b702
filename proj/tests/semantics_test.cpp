#include <gtest/gtest.h>

#include "mpst/pipeline.hpp"
#include "mpst/semantics.hpp"

using namespace mpst;

namespace {

std::optional<Value> eval1(const char* text, std::uint64_t seed = 0) {
    Rng rng(seed);
    return eval_expr(parse_expr(text), {}, rng);
}

TEST(Eval, Examples) {
    EXPECT_EQ(eval1("!true"), Value::boolean(false));
    EXPECT_EQ(eval1("neg 5"), Value::integer(-5));
    EXPECT_EQ(eval1("1 + 2"), Value::nat(3));
    EXPECT_EQ(eval1("+1 + neg 4"), Value::integer(-3));
    EXPECT_EQ(eval1("false \\/ !false"), Value::boolean(true));
    EXPECT_EQ(eval1("true \\/ (1 + true)"), Value::boolean(true));
    EXPECT_FALSE(eval1("true + 1"));
    EXPECT_FALSE(eval1("!3"));
    EXPECT_FALSE(eval1("false \\/ 2"));
    EXPECT_FALSE(eval1("y"));
    Rng rng(1);
    EXPECT_EQ(eval_expr(parse_expr("y + 1"), {{"y", Value::nat(4)}}, rng), Value::nat(5));
}

TEST(Eval, NonDeterminismReachesBothSides) {
    std::set<std::int64_t> seen;
    for (std::uint64_t s = 0; s < 40; ++s) seen.insert(eval1("1 (+) 2", s)->number);
    EXPECT_EQ(seen, (std::set<std::int64_t>{1, 2}));
    auto all = eval_all(parse_expr("1 (+) 2"));
    EXPECT_EQ(all.size(), 2u);
    auto mixed = eval_all(parse_expr("(true (+) 3) \\/ false"));
    ASSERT_EQ(mixed.size(), 2u);
    EXPECT_EQ(mixed[0], Value::boolean(true));
    EXPECT_FALSE(mixed[1]);
}

// Every seeded evaluation lands in eval_all.
TEST(Eval, SeededOutcomesAreEnumerated) {
    Rng gen(3);
    for (int i = 0; i < 300; ++i) {
        ExprP e = random_expr(gen, 7, {});
        auto all = eval_all(e);
        for (std::uint64_t s = 0; s < 8; ++s) {
            Rng rng(s);
            auto v = eval_expr(e, {}, rng);
            EXPECT_NE(std::find(all.begin(), all.end(), v), all.end()) << print(e);
        }
    }
}

SessionState S(const char* text) { return {parse_session(text), false}; }

TEST(Step, Communication) {
    auto steps = session_step(S("p :: q!<1>; 0 | q :: p?(x); r!<x>; 0 | r :: q?(y); 0"));
    ASSERT_EQ(steps.size(), 1u);
    EXPECT_EQ(steps[0].rule, "r-comm");
    EXPECT_EQ(print(steps[0].next.session), print(parse_session("p :: 0 | q :: r!<1>; 0 | r :: q?(y); 0")));
    auto done = session_step(S("p :: q!<1>; 0 | q :: p?(x); 0"));
    ASSERT_EQ(done.size(), 1u);
    EXPECT_TRUE(all_inactive(done[0].next.session));
}

TEST(Step, ShadowedValueVariable) {
    Proc p = parse_process("q?(x); r!<x>; 0");
    // x is bound again by the inner input, so only the outer occurrence changes.
    Proc body = p->cont;
    Proc q = pr::send("r", ex::var("x"), pr::recv("q", "x", pr::send("r", ex::var("x"), pr::inact())));
    Proc s = substitute_value(q, "x", Value::nat(7));
    EXPECT_EQ(print(s), print(pr::send("r", ex::nat(7), pr::recv("q", "x", pr::send("r", ex::var("x"), pr::inact())))));
    EXPECT_EQ(print(substitute_value(body, "x", Value::boolean(true))), "r!<true>; 0");
}

TEST(Step, Errors) {
    auto c = session_step(S("p :: q(+)l; 0 | q :: p&{m: 0}"));
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].rule, "c-err");
    EXPECT_TRUE(c[0].next.error);
    auto v = session_step(S("p :: if 1 then 0 else 0"));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].rule, "v-err");
    auto b = session_step(S("p :: q(+)l; 0 | q :: p&{l: 0, m: 0}"));
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b[0].rule, "r-bra");
    EXPECT_TRUE(session_step(SessionState{{}, true}).empty());
}

TEST(Step, CondAndRecursion) {
    auto c = session_step(S("p :: if true (+) false then q!<1>; 0 else 0 | q :: p?(x); 0"));
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0].rule, "t-cond");
    EXPECT_EQ(c[1].rule, "f-cond");
    auto r = session_step(S("p :: rec X. q!<1>; X | q :: rec Y. p?(x); Y"));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].rule, "r-comm");
    EXPECT_NE(print(r[0].next.session).find("rec"), std::string::npos);
}

TEST(Explore, Examples) {
    auto e = explore_session(parse_session("p :: q(+)l; 0 | q :: p&{m: 0}"), 5, 3, 1);
    EXPECT_TRUE(e.error_reached);
    EXPECT_EQ(e.witness.size(), 1u);
    auto loop = explore_session(parse_session("p :: rec X. q!<1>; X | q :: rec Y. p?(x); Y"), 10, 5, 1);
    EXPECT_FALSE(loop.error_reached);
    EXPECT_FALSE(loop.stuck_nonterminal);
    auto stuck = explore_session(parse_session("p :: q?(x); 0 | q :: p?(y); 0"), 4, 2, 1);
    EXPECT_TRUE(stuck.stuck_nonterminal);
    EXPECT_TRUE(stuck.complete);
    EXPECT_EQ(stuck.states, 1u);
    auto ex1 = explore_session(parse_session("r :: if true then p&{l1: q(+)l2; 0, l3: 0} else p&{l1: q(+)l4; 0, l5: 0} "
                                             "| p :: r(+)l1; 0 | q :: r&{l2: 0, l4: 0}"),
                               20, 10, 7);
    EXPECT_FALSE(ex1.error_reached);
    EXPECT_FALSE(ex1.stuck_nonterminal);
}

TEST(Explore, DeterministicExhaustiveSearch) {
    Session m = parse_session("p :: if true (+) false then q!<1 (+) 2>; 0 else q!<3>; 0 | q :: p?(x); 0");
    auto a = explore_session(m, 6, 0, 1), b = explore_session(m, 6, 0, 99);
    EXPECT_EQ(a.states, b.states);
    // Initial, the two branches, and the final state every delivery reaches.
    EXPECT_EQ(a.states, 4u);
    auto c = explore_session(parse_session("p :: if true (+) false then q!<1 (+) 2>; 0 else q!<3>; 0 | q :: p?(x); r!<x>; 0 | r :: q?(y); 0"), 6, 0, 1);
    EXPECT_EQ(c.states, 7u);
}

TEST(Explore, BudgetExceeded) {
    Session m = parse_session("p :: q!<1>; q!<2>; 0 | q :: p?(x); p?(y); 0");
    EXPECT_EQ(explore_session(m, 50, 0, 1, 3).states, 3u);
    EXPECT_THROW(explore_session(m, 50, 0, 1, 2), BudgetExceeded);
}

// Sessions realizing projections of random global types, plus sessions
// realizing independent random contexts.
Session random_session(Rng& rng, bool coupled) {
    for (;;) {
        TypingContext ctx;
        if (coupled) {
            GType g = random_global(rng, 10);
            bool ok = g->closed() && participants(g).size() >= 2;
            for (const auto& p : ok ? participants(g) : std::set<std::string>{}) {
                auto pj = project(g, p, ProjKind::Subset);
                if (!pj.defined) {
                    ok = false;
                    break;
                }
                ctx.emplace_back(p, pj.type);
            }
            if (!ok) continue;
        } else {
            ctx = random_context(rng, 2 + static_cast<int>(rng() % 2), 5);
        }
        return realize_session(rng, ctx);
    }
}

TEST(TypedOracle, SafeContextsNeverError) {
    Rng rng(21);
    int safe = 0, unsafe_errors = 0;
    for (int i = 0; i < 300 && safe < 100; ++i) {
        Session m = random_session(rng, i % 3 != 0);
        BottomUpReport r = run_bottomup(m, Property::Safety);
        ASSERT_TRUE(r.typable) << r.reason;
        auto e = explore_session(m, 12, 20, static_cast<std::uint64_t>(i), 200'000);
        if (r.verdict->holds) {
            ++safe;
            EXPECT_FALSE(e.error_reached) << print(m);
        } else {
            unsafe_errors += e.error_reached;
        }
    }
    EXPECT_EQ(safe, 100);
    EXPECT_GT(unsafe_errors, 0);
}

TEST(TypedOracle, DeadlockFreeContextsOnlyStopWhenDone) {
    Rng rng(22);
    int df = 0, stuck_elsewhere = 0;
    for (int i = 0; i < 300 && df < 100; ++i) {
        Session m = random_session(rng, i % 3 != 0);
        BottomUpReport r = run_bottomup(m, Property::DeadlockFree);
        auto e = explore_session(m, 12, 20, static_cast<std::uint64_t>(i), 200'000);
        if (r.verdict->holds) {
            ++df;
            EXPECT_FALSE(e.stuck_nonterminal) << print(m);
        } else {
            stuck_elsewhere += e.stuck_nonterminal;
        }
    }
    EXPECT_EQ(df, 100);
    EXPECT_GT(stuck_elsewhere, 0);
}

}  // namespace
