#include "mpst/subtyping.hpp"

#include <deque>
#include <unordered_set>

namespace mpst {

namespace {

struct PairHash {
    std::size_t operator()(const std::pair<int, int>& p) const {
        return std::hash<std::uint64_t>()((static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.first)) << 32) |
                                          static_cast<std::uint32_t>(p.second));
    }
};

using Edges = std::vector<TypeGraph::Edge>;

const TypeGraph::Edge* find_label(const Edges& es, const std::string& label) {
    for (const auto& e : es)
        if (e.act.label == label) return &e;
    return nullptr;
}

// Head conditions of the subtyping rules. Appends the forced successor pairs.
bool consistent(const Edges& a, const Edges& b, std::vector<std::pair<int, int>>& next) {
    const Action& x = a[0].act;
    const Action& y = b[0].act;
    if (x.kind != y.kind) return false;
    switch (x.kind) {
    case ActKind::End: return true;
    case ActKind::In:
    case ActKind::Out:
        if (x.peer != y.peer || x.sort != y.sort) return false;
        next.emplace_back(a[0].to, b[0].to);
        return true;
    case ActKind::Sel:
        if (x.peer != y.peer) return false;
        for (const auto& e : a) {
            const auto* f = find_label(b, e.act.label);
            if (!f) return false;
            next.emplace_back(e.to, f->to);
        }
        return true;
    case ActKind::Bra:
        if (x.peer != y.peer) return false;
        for (const auto& f : b) {
            const auto* e = find_label(a, f.act.label);
            if (!e) return false;
            next.emplace_back(e->to, f.to);
        }
        return true;
    }
    return false;
}

}  // namespace

SimResult simulate(const TypeGraph& left, const TypeGraph& right) {
    SimResult r;
    std::unordered_set<std::pair<int, int>, PairHash> visited;
    std::deque<std::pair<int, int>> queue{{left.init, right.init}};
    std::vector<std::pair<int, int>> next;
    while (!queue.empty()) {
        auto node = queue.front();
        queue.pop_front();
        if (!visited.insert(node).second) continue;
        ++r.stats.nodes_visited;
        next.clear();
        if (!consistent(left.out[static_cast<std::size_t>(node.first)], right.out[static_cast<std::size_t>(node.second)],
                        next)) {
            r.witness = node;
            return r;
        }
        r.stats.edges_visited += next.size();
        for (const auto& n : next)
            if (!visited.count(n)) queue.push_back(n);
    }
    r.holds = true;
    return r;
}

SimResult subtype_sim(LType t1, LType t2) { return simulate(local_graph(t1), local_graph(t2)); }

bool graph_subtype(const TypeGraph& left, const TypeGraph& right) { return simulate(left, right).holds; }

bool graph_equiv(const TypeGraph& a, const TypeGraph& b) { return graph_subtype(a, b) && graph_subtype(b, a); }

bool graph_equiv(LType a, LType b) { return graph_equiv(local_graph(a), local_graph(b)); }

namespace {

struct LPairHash {
    std::size_t operator()(const std::pair<LType, LType>& p) const {
        return std::hash<const void*>()(p.first) * 31 + std::hash<const void*>()(p.second);
    }
};

class Prover {
public:
    explicit Prover(std::uint64_t cap) : cap_(cap) {}

    bool prove(LType a, LType b) {
        if (++judgements_ > cap_) throw BudgetExceeded("inductive subtyping exceeded " + std::to_string(cap_) + " judgements");
        if (theta_.count({a, b})) return true;  // Alg-Assump
        if (a->kind == LKind::End && b->kind == LKind::End) return true;
        if (a->kind == LKind::Rec) return assume(a, b, instantiate(a->cont, a), b);
        if (b->kind == LKind::Rec) return assume(a, b, a, instantiate(b->cont, b));
        if (a->kind != b->kind || a->peer != b->peer) return false;
        switch (a->kind) {
        case LKind::In:
        case LKind::Out: return a->sort == b->sort && prove(a->cont, b->cont);
        case LKind::Sel:
            // Alg-Sel: the left offers a subset of the right's labels.
            for (const auto& x : a->branches) {
                LType y = branch(b, x.label);
                if (!y || !prove(x.cont, y)) return false;
            }
            return true;
        case LKind::Bra:
            for (const auto& y : b->branches) {
                LType x = branch(a, y.label);
                if (!x || !prove(x, y.cont)) return false;
            }
            return true;
        default: return false;
        }
    }

    std::uint64_t judgements() const { return judgements_; }

private:
    static LType branch(LType t, const std::string& label) {
        for (const auto& b : t->branches)
            if (b.label == label) return b.cont;
        return nullptr;
    }

    bool assume(LType a, LType b, LType a2, LType b2) {
        theta_.insert({a, b});
        bool ok = prove(a2, b2);
        theta_.erase({a, b});
        return ok;
    }

    std::uint64_t cap_;
    std::uint64_t judgements_ = 0;
    std::unordered_set<std::pair<LType, LType>, LPairHash> theta_;
};

}  // namespace

InductiveResult subtype_inductive(LType t1, LType t2, std::uint64_t cap) {
    Prover p(cap);
    InductiveResult r;
    r.holds = p.prove(t1, t2);
    r.judgements = p.judgements();
    return r;
}

namespace {

LType exp_c() {
    LType v = lt::var(0);
    return lt::rec(lt::sel("p", {{"l1", v}, {"l2", v}}));
}

// Fragments with the outer binder left as the free name t.
LType exp_bf(unsigned r) {
    if (r == 0) return lt::free("t");
    return lt::sel("p", {{"l1", exp_bf(r - 1)}, {"l2", exp_c()}});
}

LType exp_af(unsigned r) {
    if (r == 0) return lt::free("t");
    // The binder over the b fragment is vacuous on purpose.
    return lt::sel("p", {{"l1", exp_af(r - 1)}, {"l2", lt::rec(exp_bf(r - 1))}});
}

}  // namespace

std::pair<LType, LType> gen_exponential_pair(unsigned k) {
    if (k < 1) throw Error("exponential family needs k >= 1");
    return {lt::bind("t", exp_af(k)), lt::bind("t", exp_af(k + 1))};
}

std::pair<LType, LType> gen_coprime_pair(unsigned n1, unsigned n2) {
    if (n1 < 1 || n2 < 1) throw Error("coprime family needs n >= 1");
    auto cycle = [](unsigned n) {
        LType body = lt::var(0);
        for (unsigned i = 0; i < n; ++i) body = lt::in("p", Sort::integer(), body);
        return lt::rec(body);
    };
    return {cycle(n1), cycle(n2)};
}

}  // namespace mpst
