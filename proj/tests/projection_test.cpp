#include <gtest/gtest.h>

#include <map>
#include <set>

#include "mpst/projection.hpp"
#include "mpst/random.hpp"

using namespace mpst;

namespace {

const char* kGip = "rec t. q->r{l1: r->p{l1: t}, l2: r->p{l1: t}}";
const char* kGif = "rec t. q->r{l1: r->p{l1: t}, l2: r->p{l2: end}}";
const char* kGcp = "q->r{l1: rec t. q->p(int); t, l2: rec t. q->p(int); q->p(int); t}";

LType L(const char* s) { return parse_local(s); }
GType G(const char* s) { return parse_global(s); }

// Projection graph states by a powerset walk over the global graph's node
// indices, with moves that do not involve p treated as silent.
std::size_t powerset_states(GType g, const std::string& p) {
    GlobalGraph gg = global_graph(g);
    auto involves = [&](int i) { return gg.heads[static_cast<std::size_t>(i)]->involves(p); };
    auto close = [&](std::set<int> s) {
        std::vector<int> todo(s.begin(), s.end());
        while (!todo.empty()) {
            int i = todo.back();
            todo.pop_back();
            if (involves(i)) continue;
            for (int j : gg.succ[static_cast<std::size_t>(i)])
                if (s.insert(j).second) todo.push_back(j);
        }
        return s;
    };
    std::set<std::set<int>> seen;
    std::vector<std::set<int>> todo{close({0})};
    while (!todo.empty()) {
        auto s = todo.back();
        todo.pop_back();
        if (!seen.insert(s).second) continue;
        // Group successors of involving nodes by the action p performs.
        std::map<std::string, std::set<int>> moves;
        for (int i : s) {
            if (!involves(i)) continue;
            GType h = gg.heads[static_cast<std::size_t>(i)];
            if (h->kind == GKind::Msg) moves["msg"].insert(gg.index.at(h->cont));
            else
                for (const auto& b : h->branches) moves[b.label].insert(gg.index.at(b.cont));
        }
        for (auto& [a, t] : moves) todo.push_back(close(t));
    }
    return seen.size();
}

std::vector<GType> random_balanced(std::size_t n, unsigned seed, int max_size) {
    Rng rng(seed);
    std::vector<GType> out;
    while (out.size() < n) {
        GType g = random_global(rng, max_size);
        if (is_balanced(g)) out.push_back(g);
    }
    return out;
}

}  // namespace

TEST(Projection, FullMergingExample) {
    GType gip = G(kGip), gif = G(kGif);
    LType want_ip = L("rec t. r&{l1: t}");
    for (auto k : {MergeKind::Plain, MergeKind::Full}) {
        auto r = project_inductive(gip, "p", k);
        ASSERT_TRUE(r.defined) << r.reason;
        EXPECT_EQ(r.type, want_ip);
    }
    auto plain = project_inductive(gif, "p", MergeKind::Plain);
    EXPECT_FALSE(plain.defined);
    EXPECT_FALSE(plain.reason.empty());
    auto full = project_inductive(gif, "p", MergeKind::Full);
    ASSERT_TRUE(full.defined) << full.reason;
    EXPECT_EQ(full.type, L("rec t. r&{l1: t, l2: end}"));
    EXPECT_EQ(project_full_optimized(gif, "p").type, full.type);
}

TEST(Projection, CoinductiveExample) {
    GType gcp = G(kGcp), gif = G(kGif);
    EXPECT_FALSE(project_inductive(gcp, "p", MergeKind::Plain).defined);
    EXPECT_FALSE(project_inductive(gcp, "p", MergeKind::Full).defined);
    auto tb = project_tirore(gcp, "p");
    ASSERT_TRUE(tb.defined) << tb.reason;
    EXPECT_TRUE(graph_equiv(tb.type, L("rec t. q?(int); t")));
    EXPECT_FALSE(project_tirore(gif, "p").defined);

    auto s = project_subset(gif, "p");
    ASSERT_TRUE(s.defined) << s.reason;
    EXPECT_TRUE(graph_equiv(s.graph, local_graph(L("rec t. r&{l1: t, l2: end}"))));
    auto scp = project_subset(gcp, "p");
    ASSERT_TRUE(scp.defined) << scp.reason;
    EXPECT_TRUE(graph_equiv(scp.graph, local_graph(L("rec t. q?(int); t"))));
}

TEST(Projection, SubsetExample) {
    GType g = G("p->q{l1: q->r(int); q->r{l3: r->p(int); end}, l2: q->r(int); q->r{l4: r->p(bool); end}}");
    auto s = project_subset(g, "r");
    ASSERT_TRUE(s.defined) << s.reason;
    LType want = L("q?(int); q&{l3: p!(int); end, l4: p!(bool); end}");
    EXPECT_TRUE(graph_equiv(s.graph, local_graph(want)));
    EXPECT_EQ(graph_to_type(s.graph), want);
    EXPECT_EQ(s.nodes[static_cast<std::size_t>(s.graph.init)].size(), 3u);
    EXPECT_FALSE(project_inductive(g, "r", MergeKind::Plain).defined);
    EXPECT_EQ(project_inductive(g, "r", MergeKind::Full).type, want);
}

TEST(Projection, Trivial) {
    for (auto k : {ProjKind::Plain, ProjKind::Full, ProjKind::Tirore, ProjKind::Subset}) {
        auto r = project(gt::end(), "p", k);
        ASSERT_TRUE(r.defined) << to_string(k);
        EXPECT_EQ(r.type, lt::end());
        auto m = project(G("p->q(int); end"), "p", k);
        ASSERT_TRUE(m.defined);
        EXPECT_EQ(m.type, L("q!(int); end"));
        EXPECT_EQ(project(G("p->q(int); end"), "q", k).type, L("p?(int); end"));
        EXPECT_EQ(project(G("p->q(int); end"), "z", k).type, lt::end());
        EXPECT_EQ(proj_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(proj_kind_from_string("coind"), Error);
}

TEST(Projection, UnguardedProjectedRecursion) {
    GType g = G("rec t. q->r{l1: t, l2: q->r(int); t}");
    // p does not occur: projection is end.
    EXPECT_EQ(project_inductive(g, "p", MergeKind::Plain).type, lt::end());
    GType h = G("p->q(int); rec t. q->r(int); t");
    EXPECT_EQ(project_inductive(h, "p", MergeKind::Plain).type, L("q!(int); end"));
    GType u = G("rec t. q->r(int); q->p(int); rec t1. q->r(bool); t1");
    for (auto k : {MergeKind::Plain, MergeKind::Full}) {
        auto r = project_inductive(u, "p", k);
        EXPECT_TRUE(r.defined) << r.reason;
    }
    GType bad = G("rec t. q->r{l1: q->p(int); t, l2: t}");
    auto r = project_inductive(bad, "p", MergeKind::Full);
    EXPECT_FALSE(r.defined);
    EXPECT_FALSE(project_full_optimized(bad, "p").defined);
    EXPECT_FALSE(project_tirore(bad, "p").defined);
}

TEST(Merge, Examples) {
    LType a = L("q&{l1: end, l2: end}"), b = L("q&{l3: end}");
    std::uint64_t w = 0;
    EXPECT_EQ(merge_full_optimized(a, b, &w), L("q&{l1: end, l2: end, l3: end}"));
    EXPECT_GT(w, 0u);
    EXPECT_EQ(merge_naive(a, b, MergeKind::Full), L("q&{l1: end, l2: end, l3: end}"));
    EXPECT_FALSE(merge_naive(a, b, MergeKind::Plain));
    EXPECT_FALSE(merge_naive(L("q+{l1: end}"), L("q+{l2: end}"), MergeKind::Full));
    EXPECT_FALSE(merge_full_optimized(L("q+{l1: end}"), L("q+{l2: end}")));
    EXPECT_FALSE(merge_full_optimized(L("q!(int); end"), L("q!(bool); end")));
    EXPECT_FALSE(merge_full_optimized(L("q!(int); end"), L("r!(int); end")));
    EXPECT_FALSE(merge_full_optimized(L("end"), L("q!(int); end")));
    LType r = L("rec t. q&{l1: t, l2: end}");
    EXPECT_EQ(merge_full_optimized(r, L("rec t. q&{l3: t}")), L("rec t. q&{l1: t, l2: end, l3: t}"));
}

TEST(Merge, OptimizedAgreesWithNaive) {
    Rng rng(11);
    int defined = 0;
    for (int i = 0; i < 1000; ++i) {
        LType a = random_local(rng, 10);
        LType b = std::bernoulli_distribution(0.7)(rng) ? mutate_local(rng, a) : random_local(rng, 10);
        auto n = merge_naive(a, b, MergeKind::Full);
        auto o = merge_full_optimized(a, b);
        ASSERT_EQ(n.has_value(), o.has_value()) << print(a) << " | " << print(b);
        if (!n) continue;
        ++defined;
        EXPECT_EQ(*n, *o);
        EXPECT_TRUE(graph_equiv(*n, *o));
        // Idempotence and commutativity of the full merge.
        EXPECT_EQ(merge_full_optimized(a, a), a);
        EXPECT_EQ(merge_full_optimized(b, a), o);
        EXPECT_LT(size(*o), size(a) + size(b));
        // Plain merge is defined exactly on equal operands.
        EXPECT_EQ(merge_naive(a, b, MergeKind::Plain).has_value(), a == b);
    }
    EXPECT_GT(defined, 100);
}

TEST(Projection, LatticeOnRandomBalanced) {
    int plain = 0, full = 0, subset = 0;
    for (GType g : random_balanced(500, 5, 15)) {
        for (const auto& p : participants(g)) {
            auto pl = project_inductive(g, p, MergeKind::Plain);
            auto fu = project_inductive(g, p, MergeKind::Full);
            auto op = project_full_optimized(g, p);
            auto sb = project_subset(g, p);
            ASSERT_EQ(fu.defined, op.defined) << print(g) << " onto " << p;
            if (fu.defined) {
                EXPECT_EQ(fu.type, op.type);
                EXPECT_LE(size(fu.type), size(g));
            }
            if (pl.defined) {
                ++plain;
                EXPECT_LE(size(pl.type), size(g));
                ASSERT_TRUE(fu.defined) << print(g) << " onto " << p;
                EXPECT_TRUE(graph_equiv(pl.type, fu.type));
            }
            if (fu.defined) {
                ++full;
                ASSERT_TRUE(sb.defined) << print(g) << " onto " << p << ": " << sb.reason;
                EXPECT_TRUE(graph_equiv(local_graph(fu.type), sb.graph)) << print(g) << " onto " << p;
            }
            if (sb.defined) {
                ++subset;
                EXPECT_EQ(sb.nodes.size(), powerset_states(g, p)) << print(g) << " onto " << p;
            }
            auto tb = project_tirore(g, p);
            if (tb.defined) {
                ASSERT_TRUE(sb.defined) << print(g) << " onto " << p;
                EXPECT_TRUE(graph_equiv(local_graph(tb.type), sb.graph)) << print(g) << " onto " << p;
            }
        }
    }
    EXPECT_GT(plain, 200);
    EXPECT_GT(full, plain);
    EXPECT_GE(subset, full);
}

TEST(Projection, PlainProjectableImpliesBalanced) {
    Rng rng(8);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
        GType g = random_global(rng, 14);
        bool all = true;
        for (const auto& p : participants(g)) all = all && project_inductive(g, p, MergeKind::Plain).defined;
        if (!all) continue;
        ++checked;
        EXPECT_TRUE(is_balanced(g)) << print(g);
    }
    EXPECT_GT(checked, 100);
}

TEST(Projection, SubsetRejectsUnbalanced) {
    GType g = G("rec t. p->q{l1: t, l2: q->r(int); end}");
    ASSERT_FALSE(is_balanced(g));
    auto s = project_subset(g, "r");
    EXPECT_FALSE(s.defined);
    EXPECT_TRUE(s.not_balanced);
    auto s2 = project_subset(g, "r", false);
    EXPECT_FALSE(s2.not_balanced);
}

TEST(Projection, SubsetInvalidNode) {
    // r is either done or must receive: the closure mixes end with an input.
    auto s = project_subset(G("p->q{l1: end, l2: q->r(int); end}"), "r");
    EXPECT_FALSE(s.defined);
    EXPECT_FALSE(s.not_balanced);
    EXPECT_FALSE(project_subset(G("p->q{l1: q->r(int); end, l2: q->r(bool); end}"), "r").defined);
    EXPECT_FALSE(project_subset(G("p->q{l1: r->q(int); end, l2: q->r(int); end}"), "r").defined);
    EXPECT_FALSE(project_subset(G("p->q{l1: r->q{a: end}, l2: r->q{b: end}}"), "r").defined);
    EXPECT_TRUE(project_subset(G("p->q{l1: q->r{a: end}, l2: q->r{b: end}}"), "r").defined);
}

TEST(Projection, ClosureIdempotent) {
    for (GType g : random_balanced(200, 3, 12))
        for (const auto& p : participants(g)) {
            auto c = p_closure({g}, p);
            EXPECT_EQ(p_closure(c, p), c);
            EXPECT_TRUE(std::find(c.begin(), c.end(), g) != c.end());
        }
}

TEST(Families, Shapes) {
    EXPECT_EQ(gen_plain_nlogn(0), gt::end());
    EXPECT_EQ(gen_plain_nlogn(1), G("p->r(int); p->q{l1: end, l2: end}"));
    EXPECT_EQ(gen_fullmerge_quadratic(2),
              G("q->r{l1: q->r{l1: q->p{l0: end}, l2: q->p{l1: end}}, l2: q->p{l2: end}}"));
    EXPECT_EQ(gen_fullmerge_opt(1), G("p->q{l1: p->r{l0: end}, l2: p->r{l1: end}}"));
    EXPECT_EQ(gen_tbc_quadratic(1), G("rec t. q->r{l1: rec t1. p->q(int); t1, l2: rec t1. p->q(int); p->q(int); t1}"));
    EXPECT_EQ(gen_cf({2}), G("p->r{l1: rec t. p->q{a: p->q{a: t}, b: p->q{l1: end}}}"));
    EXPECT_EQ(gen_lowerbound_family("tbc_quadratic", 3), gen_tbc_quadratic(3));
    EXPECT_THROW(gen_lowerbound_family("nope", 1), Error);
    std::vector<unsigned> ns{2, 3, 5};
    EXPECT_EQ(size(gen_cf(ns)), 1u + 4 * 3 + 10);
}

TEST(Families, FullMergeQuadraticProjection) {
    for (unsigned n = 0; n < 6; ++n) {
        auto r = project_inductive(gen_fullmerge_quadratic(n), "p", MergeKind::Full);
        ASSERT_TRUE(r.defined);
        std::vector<LBranch> bs;
        for (unsigned i = 0; i <= n; ++i) bs.push_back({"l" + std::to_string(i), lt::end()});
        EXPECT_EQ(r.type, lt::bra("q", bs));
        EXPECT_EQ(project_full_optimized(gen_fullmerge_quadratic(n), "p").type, r.type);
    }
}


TEST(Families, CfStateCounts) {
    for (std::vector<unsigned> ns : {std::vector<unsigned>{2, 3}, {2, 3, 5}, {1}, {2, 2}, {3, 4}}) {
        GType g = gen_cf(ns);
        ASSERT_TRUE(is_balanced(g));
        auto s = project_subset(g, "q");
        ASSERT_TRUE(s.defined) << s.reason;
        EXPECT_EQ(s.nodes.size(), powerset_states(g, "q"));
        unsigned prod = 1;
        for (unsigned n : ns) prod *= n;
        EXPECT_GE(s.nodes.size(), prod);
        if (ns.size() < 2 || ns[0] == ns[1]) continue;
        for (auto k : {ProjKind::Plain, ProjKind::Full, ProjKind::Tirore}) EXPECT_FALSE(project(g, "q", k).defined);
    }
}

TEST(Association, Examples) {
    TypingContext d5 = parse_context(
        "q: p&{l1: r&{l2: end, l3: end}, l4: r&{l2: end, l5: end}}, p: q+{l1: end, l4: end}, r: q+{l2: end}");
    GType g = G("p->q{l1: r->q{l2: end}, l4: r->q{l2: end}}");
    for (auto k : {ProjKind::Plain, ProjKind::Full, ProjKind::Subset}) EXPECT_TRUE(check_association(d5, g, k).holds);
    TypingContext bad = parse_context(
        "q: p&{l1: r&{l2: end, l3: end}, l4: r&{l2: end, l5: end}}, p: q+{l1: end, l4: end}, r: q+{l2: end, l9: end}");
    EXPECT_FALSE(check_association(bad, g, ProjKind::Full).holds);
    TypingContext missing = parse_context("p: q+{l1: end, l4: end}, q: p&{l1: end, l4: end}");
    EXPECT_FALSE(check_association(missing, g, ProjKind::Full).holds);
}

TEST(Association, ExactProjections) {
    for (GType g : random_balanced(100, 21, 12)) {
        TypingContext ctx;
        bool ok = true;
        for (const auto& p : participants(g)) {
            auto r = project_full_optimized(g, p);
            if (!r.defined) ok = false;
            else ctx.emplace_back(p, r.type);
        }
        if (!ok || ctx.empty()) continue;
        EXPECT_TRUE(check_association(ctx, g, ProjKind::Full).holds) << print(g);
        EXPECT_TRUE(check_association(ctx, g, ProjKind::Subset).holds) << print(g);
    }
}
