#include "mpst/projection.hpp"

#include <deque>
#include <map>
#include <set>

namespace mpst {

std::string to_string(ProjKind k) {
    switch (k) {
    case ProjKind::Plain: return "plain";
    case ProjKind::Full: return "full";
    case ProjKind::Tirore: return "tbc";
    case ProjKind::Subset: return "subset";
    }
    return "?";
}

ProjKind proj_kind_from_string(const std::string& s) {
    if (s == "plain") return ProjKind::Plain;
    if (s == "full") return ProjKind::Full;
    if (s == "tbc") return ProjKind::Tirore;
    if (s == "subset") return ProjKind::Subset;
    throw Error("unknown projection '" + s + "' (expected plain, full, tbc or subset)");
}

namespace {

struct Undefined {
    std::string reason;
};

enum class Merge { Plain, Full, Left };

bool same_labels(const std::vector<LBranch>& a, const std::vector<LBranch>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].label != b[i].label) return false;
    return true;
}

bool struct_equal(LType a, LType b, std::uint64_t& work) {
    ++work;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case LKind::End: return true;
    case LKind::Var: return a->index == b->index;
    case LKind::Free: return a->peer == b->peer;
    case LKind::Rec: return struct_equal(a->cont, b->cont, work);
    case LKind::In:
    case LKind::Out: return a->peer == b->peer && a->sort == b->sort && struct_equal(a->cont, b->cont, work);
    case LKind::Sel:
    case LKind::Bra:
        if (a->peer != b->peer || !same_labels(a->branches, b->branches)) return false;
        for (std::size_t i = 0; i < a->branches.size(); ++i)
            if (!struct_equal(a->branches[i].cont, b->branches[i].cont, work)) return false;
        return true;
    }
    return false;
}

std::string mismatch(LType a, LType b) { return "cannot merge " + print(a) + " with " + print(b); }

LType full_merge(LType a, LType b, std::uint64_t& work) {
    ++work;
    if (a->kind != b->kind) throw Undefined{mismatch(a, b)};
    switch (a->kind) {
    case LKind::End: return a;
    case LKind::Var:
        if (a->index != b->index) throw Undefined{mismatch(a, b)};
        return a;
    case LKind::Free:
        if (a->peer != b->peer) throw Undefined{mismatch(a, b)};
        return a;
    case LKind::Rec: return lt::rec(full_merge(a->cont, b->cont, work));
    case LKind::In:
    case LKind::Out:
        if (a->peer != b->peer || a->sort != b->sort) throw Undefined{mismatch(a, b)};
        return a->kind == LKind::In ? lt::in(a->peer, a->sort, full_merge(a->cont, b->cont, work))
                                    : lt::out(a->peer, a->sort, full_merge(a->cont, b->cont, work));
    case LKind::Sel: {
        if (a->peer != b->peer || !same_labels(a->branches, b->branches)) throw Undefined{mismatch(a, b)};
        std::vector<LBranch> bs;
        for (std::size_t i = 0; i < a->branches.size(); ++i)
            bs.push_back({a->branches[i].label, full_merge(a->branches[i].cont, b->branches[i].cont, work)});
        return lt::sel(a->peer, std::move(bs));
    }
    case LKind::Bra: {
        if (a->peer != b->peer) throw Undefined{mismatch(a, b)};
        // Walk both sorted branch lists in step.
        std::vector<LBranch> bs;
        std::size_t i = 0, j = 0;
        const auto& x = a->branches;
        const auto& y = b->branches;
        while (i < x.size() || j < y.size()) {
            ++work;
            if (j == y.size() || (i < x.size() && x[i].label < y[j].label)) bs.push_back(x[i++]);
            else if (i == x.size() || y[j].label < x[i].label) bs.push_back(y[j++]);
            else {
                bs.push_back({x[i].label, full_merge(x[i].cont, y[j].cont, work)});
                ++i, ++j;
            }
        }
        return lt::bra(a->peer, std::move(bs));
    }
    }
    throw Undefined{mismatch(a, b)};
}

LType merge_with(LType a, LType b, Merge m, std::uint64_t& work) {
    switch (m) {
    case Merge::Left: ++work; return a;
    case Merge::Plain:
        if (!struct_equal(a, b, work)) throw Undefined{mismatch(a, b)};
        return a;
    case Merge::Full: return full_merge(a, b, work);
    }
    return a;
}

LType make_rec(LType body) {
    try {
        return lt::rec(body);
    } catch (const Error&) {
        throw Undefined{"projected recursion is unguarded: rec t. " + print(body)};
    }
}

struct Inductive {
    const std::string& p;
    Merge merge;
    std::uint64_t work = 0;

    LType go(GType g) {
        ++work;
        switch (g->kind) {
        case GKind::End: return lt::end();
        case GKind::Var: return lt::var(g->index);
        case GKind::Free: throw Undefined{"free type variable " + g->from};
        case GKind::Msg:
            if (g->from == p) return lt::out(g->to, g->sort, go(g->cont));
            if (g->to == p) return lt::in(g->from, g->sort, go(g->cont));
            return go(g->cont);
        case GKind::Choice: {
            if (g->from == p || g->to == p) {
                std::vector<LBranch> bs;
                for (const auto& b : g->branches) bs.push_back({b.label, go(b.cont)});
                return g->from == p ? lt::sel(g->to, std::move(bs)) : lt::bra(g->from, std::move(bs));
            }
            LType acc = go(g->branches[0].cont);
            for (std::size_t i = 1; i < g->branches.size(); ++i) acc = merge_with(acc, go(g->branches[i].cont), merge, work);
            return acc;
        }
        case GKind::Rec:
            if (!g->parts.count(p) && g->closed()) return lt::end();
            return make_rec(go(g->cont));
        }
        throw Undefined{"ill-formed global type"};
    }
};

Projection run_inductive(GType g, const std::string& p, Merge m) {
    Projection r;
    Inductive ind{p, m};
    try {
        if (!g->closed()) throw Undefined{"global type is not closed"};
        r.type = ind.go(g);
        r.defined = true;
    } catch (const Undefined& u) {
        r.reason = u.reason;
    }
    r.work = ind.work;
    return r;
}

// Mutable local types for the optimized merge; branches live in ordered maps.
struct MNode {
    LKind kind = LKind::End;
    std::string peer;
    Sort sort;
    MNode* cont = nullptr;
    std::map<std::string, MNode*> br;
    std::uint32_t index = 0;
};

class Arena {
public:
    MNode* make(LKind k) {
        nodes_.emplace_back();
        nodes_.back().kind = k;
        return &nodes_.back();
    }

    MNode* from_type(LType t) {
        MNode* n = make(t->kind);
        n->peer = t->peer;
        n->sort = t->sort;
        n->index = t->index;
        if (t->cont) n->cont = from_type(t->cont);
        for (const auto& b : t->branches) n->br.emplace(b.label, from_type(b.cont));
        return n;
    }

private:
    std::deque<MNode> nodes_;
};

LType to_type(const MNode* n) {
    switch (n->kind) {
    case LKind::End: return lt::end();
    case LKind::Var: return lt::var(n->index);
    case LKind::Free: return lt::free(n->peer);
    case LKind::Rec: return make_rec(to_type(n->cont));
    case LKind::In: return lt::in(n->peer, n->sort, to_type(n->cont));
    case LKind::Out: return lt::out(n->peer, n->sort, to_type(n->cont));
    case LKind::Sel:
    case LKind::Bra: {
        std::vector<LBranch> bs;
        for (const auto& [l, c] : n->br) bs.push_back({l, to_type(c)});
        return n->kind == LKind::Sel ? lt::sel(n->peer, std::move(bs)) : lt::bra(n->peer, std::move(bs));
    }
    }
    return lt::end();
}

// Destructive; returns whichever operand now holds the merge.
MNode* mmerge(MNode* a, MNode* b, std::uint64_t& work) {
    ++work;
    auto fail = [&] { throw Undefined{mismatch(to_type(a), to_type(b))}; };
    if (a->kind != b->kind) fail();
    switch (a->kind) {
    case LKind::End: return a;
    case LKind::Var:
        if (a->index != b->index) fail();
        return a;
    case LKind::Free:
        if (a->peer != b->peer) fail();
        return a;
    case LKind::Rec:
        a->cont = mmerge(a->cont, b->cont, work);
        return a;
    case LKind::In:
    case LKind::Out:
        if (a->peer != b->peer || a->sort != b->sort) fail();
        a->cont = mmerge(a->cont, b->cont, work);
        return a;
    case LKind::Sel:
        if (a->peer != b->peer || a->br.size() != b->br.size()) fail();
        for (auto& [l, c] : b->br) {
            ++work;
            auto it = a->br.find(l);
            if (it == a->br.end()) fail();
            it->second = mmerge(it->second, c, work);
        }
        return a;
    case LKind::Bra:
        if (a->peer != b->peer) fail();
        if (a->br.size() < b->br.size()) std::swap(a, b);
        for (auto& [l, c] : b->br) {
            ++work;
            auto it = a->br.find(l);
            if (it == a->br.end()) a->br.emplace(l, c);
            else it->second = mmerge(it->second, c, work);
        }
        return a;
    }
    fail();
    return a;
}

struct Optimized {
    const std::string& p;
    Arena arena;
    std::uint64_t work = 0;

    MNode* go(GType g) {
        ++work;
        switch (g->kind) {
        case GKind::End: return arena.make(LKind::End);
        case GKind::Var: {
            MNode* n = arena.make(LKind::Var);
            n->index = g->index;
            return n;
        }
        case GKind::Free: throw Undefined{"free type variable " + g->from};
        case GKind::Msg: {
            if (g->from != p && g->to != p) return go(g->cont);
            MNode* n = arena.make(g->from == p ? LKind::Out : LKind::In);
            n->peer = g->from == p ? g->to : g->from;
            n->sort = g->sort;
            n->cont = go(g->cont);
            return n;
        }
        case GKind::Choice: {
            if (g->from == p || g->to == p) {
                MNode* n = arena.make(g->from == p ? LKind::Sel : LKind::Bra);
                n->peer = g->from == p ? g->to : g->from;
                for (const auto& b : g->branches) n->br.emplace(b.label, go(b.cont));
                return n;
            }
            MNode* acc = go(g->branches[0].cont);
            for (std::size_t i = 1; i < g->branches.size(); ++i) acc = mmerge(acc, go(g->branches[i].cont), work);
            return acc;
        }
        case GKind::Rec: {
            if (!g->parts.count(p) && g->closed()) return arena.make(LKind::End);
            MNode* n = arena.make(LKind::Rec);
            n->cont = go(g->cont);
            return n;
        }
        }
        throw Undefined{"ill-formed global type"};
    }
};

}  // namespace

Projection project_inductive(GType g, const std::string& p, MergeKind kind) {
    return run_inductive(g, p, kind == MergeKind::Plain ? Merge::Plain : Merge::Full);
}

Projection project_full_optimized(GType g, const std::string& p) {
    Projection r;
    Optimized opt{p, {}};
    try {
        if (!g->closed()) throw Undefined{"global type is not closed"};
        r.type = to_type(opt.go(g));
        r.defined = true;
    } catch (const Undefined& u) {
        r.reason = u.reason;
    }
    r.work = opt.work;
    return r;
}

std::optional<LType> merge_naive(LType a, LType b, MergeKind kind, std::uint64_t* work) {
    std::uint64_t w = 0;
    std::optional<LType> r;
    try {
        r = merge_with(a, b, kind == MergeKind::Plain ? Merge::Plain : Merge::Full, w);
    } catch (const Undefined&) {
    }
    if (work) *work += w;
    return r;
}

std::optional<LType> merge_full_optimized(LType a, LType b, std::uint64_t* work) {
    std::uint64_t w = 0;
    std::optional<LType> r;
    Arena arena;
    try {
        r = to_type(mmerge(arena.from_type(a), arena.from_type(b), w));
    } catch (const Undefined&) {
    }
    if (work) *work += w;
    return r;
}

std::optional<LType> candidate_projection(GType g, const std::string& p) {
    Projection r = run_inductive(g, p, Merge::Left);
    if (!r.defined) return std::nullopt;
    return r.type;
}

Projection project_tirore(GType g, const std::string& p) {
    Projection r;
    Projection cand = run_inductive(g, p, Merge::Left);
    r.work = cand.work;
    if (!cand.defined) {
        r.reason = "candidate projection undefined: " + cand.reason;
        return r;
    }
    GlobalGraph gg = global_graph(g);
    LocalGraph lg = local_graph(cand.type);
    std::size_t n = gg.nodes.size();

    std::vector<char> involves(n), reaches(n), guarded(n);
    for (std::size_t i = 0; i < n; ++i) involves[i] = gg.heads[i]->involves(p);
    // A p-involving node is reachable (reflexively).
    for (std::size_t i = 0; i < n; ++i) reaches[i] = involves[i];
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (reaches[i]) continue;
            for (int j : gg.succ[i])
                if (reaches[static_cast<std::size_t>(j)]) {
                    reaches[i] = 1;
                    changed = true;
                    break;
                }
        }
    }
    // Every maximal path reaches a p-involving node (least fixpoint).
    for (std::size_t i = 0; i < n; ++i) guarded[i] = involves[i];
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (guarded[i] || gg.succ[i].empty()) continue;
            bool all = true;
            for (int j : gg.succ[i]) all = all && guarded[static_cast<std::size_t>(j)];
            if (all) {
                guarded[i] = 1;
                changed = true;
            }
        }
    }

    std::set<std::pair<int, int>> seen;
    std::deque<std::pair<int, int>> queue{{0, lg.init}};
    auto fail = [&](int gi, int li, const std::string& why) {
        r.reason = why + " at (" + print(gg.nodes[static_cast<std::size_t>(gi)]) + ", " +
                   print(lg.types[static_cast<std::size_t>(li)]) + ")";
    };
    while (!queue.empty()) {
        auto [gi, li] = queue.front();
        queue.pop_front();
        if (!seen.insert({gi, li}).second) continue;
        ++r.work;
        auto ugi = static_cast<std::size_t>(gi);
        GType h = gg.heads[ugi];
        LType t = unfold(lg.types[static_cast<std::size_t>(li)]);
        auto gidx = [&](GType x) { return gg.index.at(x); };
        auto lidx = [&](LType x) { return lg.index.at(x); };
        if (involves[ugi]) {
            bool out = h->from == p;
            const std::string& peer = out ? h->to : h->from;
            if (h->kind == GKind::Msg) {
                LKind want = out ? LKind::Out : LKind::In;
                if (t->kind != want || t->peer != peer || t->sort != h->sort) {
                    fail(gi, li, "communication mismatch");
                    return r;
                }
                queue.push_back({gidx(h->cont), lidx(t->cont)});
            } else {
                LKind want = out ? LKind::Sel : LKind::Bra;
                bool labels_ok = t->kind == want && t->peer == peer && t->branches.size() == h->branches.size();
                for (std::size_t k = 0; labels_ok && k < h->branches.size(); ++k)
                    labels_ok = t->branches[k].label == h->branches[k].label;
                if (!labels_ok) {
                    fail(gi, li, "choice mismatch");
                    return r;
                }
                for (std::size_t k = 0; k < h->branches.size(); ++k)
                    queue.push_back({gidx(h->branches[k].cont), lidx(t->branches[k].cont)});
            }
        } else if (reaches[ugi]) {
            if (!guarded[ugi]) {
                fail(gi, li, "participant not reached on every path");
                return r;
            }
            for (int j : gg.succ[ugi]) queue.push_back({j, li});
        } else if (t->kind != LKind::End) {
            fail(gi, li, "participant finished but local type continues");
            return r;
        }
    }
    r.defined = true;
    r.type = cand.type;
    return r;
}

std::vector<GType> p_closure(const std::vector<GType>& gs, const std::string& p) {
    std::set<GType> out(gs.begin(), gs.end());
    std::vector<GType> work(gs.begin(), gs.end());
    while (!work.empty()) {
        GType g = work.back();
        work.pop_back();
        GType h = unfold(g);
        if ((h->kind != GKind::Msg && h->kind != GKind::Choice) || h->involves(p)) continue;
        auto add = [&](GType x) {
            if (out.insert(x).second) work.push_back(x);
        };
        if (h->kind == GKind::Msg) add(h->cont);
        for (const auto& b : h->branches) add(b.cont);
    }
    return {out.begin(), out.end()};
}

SubsetProjection project_subset(GType g, const std::string& p, bool require_balanced) {
    SubsetProjection r;
    if (!g->closed()) {
        r.reason = "global type is not closed";
        return r;
    }
    if (require_balanced) {
        if (auto w = find_imbalance(g)) {
            r.not_balanced = true;
            r.reason = "not balanced: participant " + w->participant + " avoided on a cycle through " + print(w->node);
            return r;
        }
    }
    std::map<std::vector<GType>, int> ids;
    std::deque<int> queue;
    auto node = [&](std::vector<GType> set) {
        auto closed = p_closure(set, p);
        auto it = ids.find(closed);
        if (it != ids.end()) return it->second;
        int id = r.graph.add_node();
        ids.emplace(closed, id);
        r.nodes.push_back(std::move(closed));
        queue.push_back(id);
        return id;
    };
    auto invalid = [&](int id, const std::string& why) {
        std::string s;
        for (GType x : r.nodes[static_cast<std::size_t>(id)]) s += (s.empty() ? "" : ", ") + print(x);
        r.reason = why + " at {" + s + "}";
        r.graph = TypeGraph{};
        r.nodes.clear();
    };
    r.graph.init = node({g});
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        std::vector<GType> set = r.nodes[static_cast<std::size_t>(id)];
        std::vector<GType> inv;
        for (GType x : set) {
            GType h = unfold(x);
            if (h->involves(p)) inv.push_back(h);
        }
        std::vector<TypeGraph::Edge> es;
        if (inv.empty()) {
            es.push_back({Action::end(), TypeGraph::kSkip});
        } else {
            for (GType x : set)
                if (!x->parts.count(p)) {
                    invalid(id, "participant may or may not continue");
                    return r;
                }
            GType h0 = inv[0];
            bool out = h0->from == p;
            const std::string& peer = out ? h0->to : h0->from;
            for (GType h : inv) {
                bool same = h->kind == h0->kind && (h->from == p) == out && (out ? h->to : h->from) == peer;
                if (same && h->kind == GKind::Msg) same = h->sort == h0->sort;
                if (same && h->kind == GKind::Choice && out) {
                    same = h->branches.size() == h0->branches.size();
                    for (std::size_t k = 0; same && k < h->branches.size(); ++k)
                        same = h->branches[k].label == h0->branches[k].label;
                }
                if (!same) {
                    invalid(id, "conflicting communications");
                    return r;
                }
            }
            if (h0->kind == GKind::Msg) {
                std::vector<GType> next;
                for (GType h : inv) next.push_back(h->cont);
                int to = node(next);
                es.push_back({out ? Action::out(peer, h0->sort) : Action::in(peer, h0->sort), to});
            } else {
                std::map<std::string, std::vector<GType>> by_label;
                for (GType h : inv)
                    for (const auto& b : h->branches) by_label[b.label].push_back(b.cont);
                for (auto& [l, next] : by_label) {
                    int to = node(next);
                    es.push_back({out ? Action::sel(peer, l) : Action::bra(peer, l), to});
                }
            }
        }
        r.graph.out[static_cast<std::size_t>(id)] = std::move(es);
    }
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        std::string s;
        for (GType x : r.nodes[i]) s += (s.empty() ? "" : ", ") + print(x);
        r.graph.labels[i] = "{" + s + "}";
    }
    r.graph.validate();
    r.defined = true;
    return r;
}

Projection project(GType g, const std::string& p, ProjKind kind) {
    switch (kind) {
    case ProjKind::Plain: return project_inductive(g, p, MergeKind::Plain);
    case ProjKind::Full: return project_full_optimized(g, p);
    case ProjKind::Tirore: return project_tirore(g, p);
    case ProjKind::Subset: {
        SubsetProjection s = project_subset(g, p);
        Projection r;
        r.defined = s.defined;
        r.reason = s.reason;
        r.work = s.nodes.size();
        if (s.defined) r.type = graph_to_type(s.graph);
        return r;
    }
    }
    return {};
}

GType gen_plain_nlogn(unsigned m) {
    GType g = gt::end();
    for (unsigned i = 0; i < m; ++i) g = gt::msg("p", "r", Sort::integer(), gt::choice("p", "q", {{"l1", g}, {"l2", g}}));
    return g;
}

GType gen_fullmerge_quadratic(unsigned n) {
    GType g = gt::choice("q", "p", {{"l0", gt::end()}});
    for (unsigned i = 0; i < n; ++i)
        g = gt::choice("q", "r", {{"l1", g}, {"l2", gt::choice("q", "p", {{"l" + std::to_string(i + 1), gt::end()}})}});
    return g;
}

namespace {
GType fullmerge_opt(unsigned k, unsigned long j) {
    if (k == 0) return gt::choice("p", "r", {{"l" + std::to_string(j), gt::end()}});
    return gt::choice("p", "q", {{"l1", fullmerge_opt(k - 1, 2 * j)}, {"l2", fullmerge_opt(k - 1, 2 * j + 1)}});
}
}  // namespace

GType gen_fullmerge_opt(unsigned k) { return fullmerge_opt(k, 0); }

GType gen_tbc_quadratic(unsigned n) {
    auto rep = [](unsigned k) {
        GType g = gt::var(0);
        for (unsigned i = 0; i < k; ++i) g = gt::msg("p", "q", Sort::integer(), g);
        return gt::rec(g);
    };
    return gt::rec(gt::choice("q", "r", {{"l1", rep(n)}, {"l2", rep(n + 1)}}));
}

GType gen_cf(const std::vector<unsigned>& ns) {
    if (ns.empty()) throw Error("cf family needs at least one cycle length");
    std::vector<GBranch> outer;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ns[i] < 1) throw Error("cf family needs cycle lengths >= 1");
        std::string li = "l" + std::to_string(i + 1);
        GType chain = gt::var(0);
        for (unsigned k = 1; k < ns[i]; ++k) chain = gt::choice("p", "q", {{"a", chain}});
        GType top = gt::choice("p", "q", {{"a", chain}, {"b", gt::choice("p", "q", {{li, gt::end()}})}});
        outer.push_back({li, gt::rec(top)});
    }
    return gt::choice("p", "r", std::move(outer));
}

GType gen_lowerbound_family(const std::string& name, unsigned n) {
    if (name == "plain_nlogn") return gen_plain_nlogn(n);
    if (name == "fullmerge_quadratic") return gen_fullmerge_quadratic(n);
    if (name == "fullmergeopt") return gen_fullmerge_opt(n);
    if (name == "tbc_quadratic") return gen_tbc_quadratic(n);
    throw Error("unknown family '" + name + "'");
}

Association check_association(const TypingContext& ctx, GType g, ProjKind kind) {
    Association a;
    std::set<std::string> dom;
    for (const auto& [p, t] : ctx) dom.insert(p);
    if (dom != participants(g)) {
        a.reason = "context participants differ from the global type's";
        return a;
    }
    for (const auto& [p, t] : ctx) {
        bool ok;
        if (kind == ProjKind::Subset) {
            SubsetProjection s = project_subset(g, p);
            if (!s.defined) {
                a.reason = "projection onto " + p + " undefined: " + s.reason;
                return a;
            }
            ok = graph_subtype(local_graph(t), s.graph);
        } else {
            Projection pr = project(g, p, kind);
            if (!pr.defined) {
                a.reason = "projection onto " + p + " undefined: " + pr.reason;
                return a;
            }
            ok = subtype_sim(t, pr.type).holds;
        }
        if (!ok) {
            a.reason = "type of " + p + " is not a subtype of its projection";
            return a;
        }
    }
    a.holds = true;
    return a;
}

}  // namespace mpst
