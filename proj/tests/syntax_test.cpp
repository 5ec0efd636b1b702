#include <gtest/gtest.h>

#include <set>

#include "mpst/random.hpp"
#include "mpst/syntax.hpp"
#include "support/named.hpp"

using namespace mpst;

namespace {

const char* kT1 = "rec t. p+{l1: p+{l1: t}, l2: end}";

TEST(Parse, UnfoldingExample) {
    LType t1 = parse_local(kT1);
    ASSERT_EQ(t1->kind, LKind::Rec);
    LType body = t1->cont;
    ASSERT_EQ(body->kind, LKind::Sel);
    ASSERT_EQ(body->branches.size(), 2u);
    EXPECT_EQ(body->branches[0].label, "l1");
    EXPECT_EQ(body->branches[0].cont->branches[0].cont, lt::var(0));
    EXPECT_EQ(body->branches[1].cont, lt::end());
}

TEST(Parse, End) { EXPECT_EQ(parse_local("end"), lt::end()); }

TEST(Parse, Errors) {
    EXPECT_THROW(parse_global("p->p{l: end}"), ParseError);
    EXPECT_THROW(parse_global("p->p(int); end"), ParseError);
    EXPECT_THROW(parse_local("rec t. t"), ParseError);
    EXPECT_THROW(parse_local("rec t. rec u. t"), ParseError);
    EXPECT_THROW(parse_local("p+{l: end, l: end}"), ParseError);
    EXPECT_THROW(parse_local("p+{}"), ParseError);
    EXPECT_THROW(parse_local("p!(float); end"), ParseError);
    EXPECT_THROW(parse_local("end end"), ParseError);
    EXPECT_THROW(parse_process("rec X. X"), ParseError);
    EXPECT_THROW(parse_process("rec X. if true then X else 0"), ParseError);
    EXPECT_THROW(parse_process("Y"), ParseError);
    EXPECT_THROW(parse_session("p :: 0 | p :: 0"), ParseError);
    EXPECT_THROW(parse_context("p: t"), ParseError);
    try {
        parse_local("p!(int) end");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.pos, 8u);
    }
}

TEST(Parse, GuardedThroughPrefix) {
    EXPECT_NO_THROW(parse_local("rec t. rec u. p!(int); t"));
    EXPECT_NO_THROW(parse_process("rec X. p!<1>; X"));
    EXPECT_NO_THROW(parse_process("rec X. if true then p!<1>; X else 0"));
}

TEST(Size, Clauses) {
    EXPECT_EQ(size(lt::end()), 1u);
    EXPECT_EQ(size(parse_local("rec t. p?(int); t")), 3u);
    EXPECT_EQ(size(parse_local(kT1)), 5u);
    EXPECT_EQ(size(parse_global("p->q(int); end")), 2u);
    EXPECT_EQ(size(parse_process("0")), 1u);
    EXPECT_EQ(size(parse_process("p?(x); 0")), 3u);
}

TEST(Unfold, Example) {
    LType t1 = parse_local(kT1);
    LType expect = parse_local(std::string("p+{l1: p+{l1: ") + kT1 + "}, l2: end}");
    EXPECT_EQ(unfold(t1), expect);
    EXPECT_EQ(unfold(lt::end()), lt::end());
    EXPECT_EQ(unfold(parse_local("rec t. rec u. p!(int); t"))->kind, LKind::Out);
}

TEST(Subformulas, Example) {
    LType t1 = parse_local(kT1);
    auto subs = subformulas(t1);
    std::set<LType> s(subs.begin(), subs.end());
    EXPECT_TRUE(s.count(parse_local(std::string("p+{l1: ") + kT1 + "}")));
    EXPECT_TRUE(s.count(t1));
    EXPECT_TRUE(s.count(lt::end()));
    EXPECT_EQ(subformulas(lt::end()), std::vector<LType>{lt::end()});
}

TEST(Participants, Examples) {
    EXPECT_TRUE(participants(gt::end()).empty());
    EXPECT_EQ(participants(parse_global("p->q(int); end")), (std::set<std::string>{"p", "q"}));
    GType gif = parse_global("rec t. q->p{l1: q->r{l1: t}, l2: q->r{l2: r->p{l2: end}}}");
    EXPECT_EQ(participants(gif), (std::set<std::string>{"p", "q", "r"}));
}

// Named-variable oracle: sizes, unfolding and subformulas computed by textbook
// substitution must agree with the interned implementation.
TEST(Oracle, NamedAgreement) {
    oracle::NGen gen(7);
    for (int i = 0; i < 500; ++i) {
        auto n = gen.type(12);
        ASSERT_TRUE(oracle::fv(n).empty());
        LType t = parse_local(oracle::show(n));
        ASSERT_EQ(size(t), oracle::nsize(n)) << oracle::show(n);
        ASSERT_EQ(unfold(t), parse_local(oracle::show(oracle::nunfold(n)))) << oracle::show(n);
        std::set<LType> expect;
        for (auto& u : oracle::nsub(n)) expect.insert(parse_local(oracle::show(u)));
        auto got = subformulas(t);
        std::set<LType> gs(got.begin(), got.end());
        ASSERT_EQ(gs, expect) << oracle::show(n);
        ASSERT_LE(gs.size(), size(t));
    }
}

TEST(RoundTrip, Local) {
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        LType t = random_local(rng, 14);
        ASSERT_TRUE(t->closed());
        ASSERT_EQ(parse_local(print(t)), t) << print(t);
    }
}

TEST(RoundTrip, Global) {
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
        GType g = random_global(rng, 14);
        ASSERT_TRUE(g->closed());
        ASSERT_EQ(parse_global(print(g)), g) << print(g);
    }
}

TEST(RoundTrip, ProcessAndExpr) {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        Proc p = random_process(rng, 14);
        Proc q = parse_process(print(p));
        ASSERT_TRUE(alpha_equal(p, q)) << print(p);
        ExprP e = random_expr(rng, 8, {"x", "y"});
        ASSERT_TRUE(equal(parse_expr(print(e)), e)) << print(e);
    }
}

TEST(RoundTrip, SessionAndContext) {
    Rng rng(4);
    for (int i = 0; i < 1000; ++i) {
        TypingContext c = random_context(rng, 3, 6);
        TypingContext d = parse_context(print(c));
        ASSERT_EQ(c, d) << print(c);
        Session s{{"p", random_process(rng, 8)}, {"q", random_process(rng, 8)}};
        Session s2 = parse_session(print(s));
        ASSERT_EQ(s2.size(), 2u);
        for (std::size_t k = 0; k < 2; ++k) {
            ASSERT_EQ(s2[k].first, s[k].first);
            ASSERT_TRUE(alpha_equal(s2[k].second, s[k].second));
        }
    }
}

TEST(Printer, Shapes) {
    EXPECT_EQ(print(parse_local("p!(int); end")), "p!(int); end");
    EXPECT_EQ(print(parse_local("rec x. p+{b: x, a: end}")), "rec t. p+{a: end, b: t}");
    EXPECT_EQ(print(parse_global("p->q{l: end}")), "p->q{l: end}");
    EXPECT_EQ(print(parse_expr("1 + -2 (+) !true")), "((1 + -2) (+) !true)");
}

TEST(Participants, MatchesNaive) {
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        GType g = random_global(rng, 12);
        std::set<std::string> naive;
        std::function<void(GType)> walk = [&](GType h) {
            if (h->kind == GKind::Msg || h->kind == GKind::Choice) {
                naive.insert(h->from);
                naive.insert(h->to);
            }
            if (h->cont) walk(h->cont);
            for (auto& b : h->branches) walk(b.cont);
        };
        walk(g);
        ASSERT_EQ(participants(g), naive);
    }
}

TEST(Processes, Normalize) {
    Proc p = parse_process("rec Y. p&{a: rec Z. q!<1>; Z, b: Y}");
    EXPECT_EQ(print(p), "rec X. p&{a: rec X1. q!<1>; X1, b: X}");
    Proc q = parse_process("rec A. p&{a: rec B. q!<1>; B, b: A}");
    EXPECT_TRUE(alpha_equal(p, q));
    EXPECT_FALSE(alpha_equal(p, parse_process("rec A. p&{a: rec B. q!<1>; A, b: A}")));
}

}  // namespace
