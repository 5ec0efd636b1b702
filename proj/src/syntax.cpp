#include "mpst/syntax.hpp"

#include <algorithm>
#include <functional>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

namespace mpst {

std::string to_string(const Sort& s) {
    switch (s.kind) {
    case SortKind::Bool: return "bool";
    case SortKind::Nat: return "nat";
    case SortKind::Int: return "int";
    case SortKind::Var: return "'" + s.var;
    }
    return "?";
}

namespace {

inline void mix(std::size_t& h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
}

std::size_t hash_sort(const Sort& s) {
    std::size_t h = static_cast<std::size_t>(s.kind);
    mix(h, std::hash<std::string>{}(s.var));
    return h;
}

bool same(const LocalType& a, const LocalType& b) {
    return a.kind == b.kind && a.index == b.index && a.cont == b.cont && a.peer == b.peer &&
           a.sort == b.sort && a.branches == b.branches;
}

bool same(const GlobalType& a, const GlobalType& b) {
    return a.kind == b.kind && a.index == b.index && a.cont == b.cont && a.from == b.from &&
           a.to == b.to && a.sort == b.sort && a.branches == b.branches;
}

// Interning tables. Entries are leaked deliberately: handles stay valid for the
// life of the process.
template <class Node>
struct InternTable {
    struct Hash {
        std::size_t operator()(const Node* n) const { return n->hash; }
    };
    struct Eq {
        bool operator()(const Node* a, const Node* b) const { return same(*a, *b); }
    };
    std::mutex mu;
    std::unordered_set<const Node*, Hash, Eq> set;

    const Node* intern(Node&& n) {
        std::lock_guard<std::mutex> lock(mu);
        auto it = set.find(&n);
        if (it != set.end()) return *it;
        auto* fresh = new Node(std::move(n));
        set.insert(fresh);
        return fresh;
    }
};

InternTable<LocalType>& ltable() {
    static auto* t = new InternTable<LocalType>();
    return *t;
}

InternTable<GlobalType>& gtable() {
    static auto* t = new InternTable<GlobalType>();
    return *t;
}

LType finish(LocalType&& n) {
    std::size_t h = static_cast<std::size_t>(n.kind);
    mix(h, n.index);
    mix(h, std::hash<std::string>{}(n.peer));
    mix(h, hash_sort(n.sort));
    n.size = 1;
    n.open = 0;
    n.has_free = n.kind == LKind::Free;
    if (n.kind == LKind::Var) n.open = n.index + 1;
    if (n.cont) {
        mix(h, n.cont->hash);
        n.size += n.cont->size;
        n.has_free = n.has_free || n.cont->has_free;
        n.open = n.kind == LKind::Rec ? (n.cont->open > 0 ? n.cont->open - 1 : 0) : n.cont->open;
    }
    for (const auto& b : n.branches) {
        mix(h, std::hash<std::string>{}(b.label));
        mix(h, b.cont->hash);
        n.size += b.cont->size;
        n.open = std::max(n.open, b.cont->open);
        n.has_free = n.has_free || b.cont->has_free;
    }
    n.hash = h;
    return ltable().intern(std::move(n));
}

template <class B>
void check_branches(std::vector<B>& bs) {
    if (bs.empty()) throw Error("choice with no branches");
    std::sort(bs.begin(), bs.end(), [](const B& a, const B& b) { return a.label < b.label; });
    for (std::size_t i = 1; i < bs.size(); ++i)
        if (bs[i].label == bs[i - 1].label) throw Error("duplicate label '" + bs[i].label + "'");
}

template <class T, class K>
bool unguarded_in_body(T body, K rec_kind, K var_kind) {
    std::uint32_t depth = 0;
    while (body->kind == rec_kind) {
        body = body->cont;
        ++depth;
    }
    return body->kind == var_kind && body->index == depth;
}

}  // namespace

namespace lt {

LType end() {
    static LType e = finish(LocalType{LKind::End});
    return e;
}

LType out(const std::string& peer, const Sort& s, LType cont) {
    LocalType n{LKind::Out};
    n.peer = peer;
    n.sort = s;
    n.cont = cont;
    return finish(std::move(n));
}

LType in(const std::string& peer, const Sort& s, LType cont) {
    LocalType n{LKind::In};
    n.peer = peer;
    n.sort = s;
    n.cont = cont;
    return finish(std::move(n));
}

LType sel(const std::string& peer, std::vector<LBranch> branches) {
    check_branches(branches);
    LocalType n{LKind::Sel};
    n.peer = peer;
    n.branches = std::move(branches);
    return finish(std::move(n));
}

LType bra(const std::string& peer, std::vector<LBranch> branches) {
    check_branches(branches);
    LocalType n{LKind::Bra};
    n.peer = peer;
    n.branches = std::move(branches);
    return finish(std::move(n));
}

LType rec(LType body) {
    if (unguarded_in_body(body, LKind::Rec, LKind::Var)) throw Error("unguarded recursion");
    LocalType n{LKind::Rec};
    n.cont = body;
    return finish(std::move(n));
}

LType var(std::uint32_t index) {
    LocalType n{LKind::Var};
    n.index = index;
    return finish(std::move(n));
}

LType free(const std::string& name) {
    LocalType n{LKind::Free};
    n.peer = name;
    return finish(std::move(n));
}

}  // namespace lt

namespace {

LType rebuild(LType t, LType cont, std::vector<LBranch> bs) {
    switch (t->kind) {
    case LKind::Out: return lt::out(t->peer, t->sort, cont);
    case LKind::In: return lt::in(t->peer, t->sort, cont);
    case LKind::Sel: return lt::sel(t->peer, std::move(bs));
    case LKind::Bra: return lt::bra(t->peer, std::move(bs));
    case LKind::Rec: return lt::rec(cont);
    default: return t;
    }
}

// Generic structure-preserving rewrite that tracks binder depth.
struct LRewriter {
    std::function<std::optional<LType>(LType, std::uint32_t)> leaf;  // nullopt: recurse
    std::function<bool(LType, std::uint32_t)> skip;                  // true: keep unchanged
    std::map<std::pair<LType, std::uint32_t>, LType> cache;

    LType go(LType t, std::uint32_t depth) {
        if (skip && skip(t, depth)) return t;
        auto key = std::make_pair(t, depth);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        LType r;
        if (auto l = leaf(t, depth)) {
            r = *l;
        } else {
            LType c = t->cont ? go(t->cont, depth + (t->kind == LKind::Rec ? 1 : 0)) : nullptr;
            std::vector<LBranch> bs;
            bs.reserve(t->branches.size());
            for (const auto& b : t->branches) bs.push_back({b.label, go(b.cont, depth)});
            r = rebuild(t, c, std::move(bs));
        }
        cache.emplace(key, r);
        return r;
    }
};

LType shift(LType t, std::uint32_t by) {
    if (by == 0 || t->open == 0) return t;
    LRewriter rw;
    rw.skip = [](LType n, std::uint32_t d) { return n->open <= d; };
    rw.leaf = [by](LType n, std::uint32_t d) -> std::optional<LType> {
        if (n->kind == LKind::Var) return n->index >= d ? lt::var(n->index + by) : n;
        return std::nullopt;
    };
    return rw.go(t, 0);
}

}  // namespace

LType instantiate(LType body, LType s) {
    LRewriter rw;
    rw.skip = [](LType n, std::uint32_t d) { return n->open <= d; };
    rw.leaf = [s](LType n, std::uint32_t d) -> std::optional<LType> {
        if (n->kind != LKind::Var) return std::nullopt;
        if (n->index == d) return shift(s, d);
        if (n->index > d) return lt::var(n->index - 1);
        return n;
    };
    return rw.go(body, 0);
}

namespace lt {
LType bind(const std::string& name, LType body) {
    LRewriter rw;
    rw.leaf = [&name](LType n, std::uint32_t d) -> std::optional<LType> {
        if (n->kind == LKind::Free) return n->peer == name ? lt::var(d) : n;
        if (n->kind == LKind::Var) return n->index >= d ? lt::var(n->index + 1) : n;
        return std::nullopt;
    };
    // Indices escaping body move up by one under the new binder.
    rw.skip = [](LType n, std::uint32_t d) { return !n->has_free && n->open <= d; };
    return lt::rec(rw.go(body, 0));
}
}  // namespace lt

LType unfold(LType t) {
    if (t->kind != LKind::Rec) return t;
    static std::mutex mu;
    static auto* cache = new std::unordered_map<LType, LType>();
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache->find(t);
        if (it != cache->end()) return it->second;
    }
    LType u = t;
    while (u->kind == LKind::Rec) u = instantiate(u->cont, u);
    std::lock_guard<std::mutex> lock(mu);
    cache->emplace(t, u);
    return u;
}

std::uint64_t size(LType t) { return t->size; }

std::vector<LType> subformulas(LType t) {
    std::unordered_map<LType, std::vector<LType>> memo;
    std::function<const std::vector<LType>&(LType)> sub = [&](LType n) -> const std::vector<LType>& {
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        std::vector<LType> out{n};
        std::unordered_set<LType> seen{n};
        auto add = [&](LType x) {
            if (seen.insert(x).second) out.push_back(x);
        };
        if (n->kind == LKind::Rec) {
            for (LType x : sub(n->cont)) add(instantiate(x, n));
        } else {
            if (n->cont) for (LType x : sub(n->cont)) add(x);
            for (const auto& b : n->branches) for (LType x : sub(b.cont)) add(x);
        }
        return memo.emplace(n, std::move(out)).first->second;
    };
    return sub(t);
}

LType map_sorts(LType t, const std::function<Sort(const Sort&)>& f) {
    std::unordered_map<LType, LType> memo;
    std::function<LType(LType)> go = [&](LType n) -> LType {
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        LType r = n;
        LType c = n->cont ? go(n->cont) : nullptr;
        std::vector<LBranch> bs;
        for (const auto& b : n->branches) bs.push_back({b.label, go(b.cont)});
        switch (n->kind) {
        case LKind::Out: r = lt::out(n->peer, f(n->sort), c); break;
        case LKind::In: r = lt::in(n->peer, f(n->sort), c); break;
        default: r = rebuild(n, c, std::move(bs)); break;
        }
        memo.emplace(n, r);
        return r;
    };
    return go(t);
}

std::set<std::string> sort_vars(LType t) {
    std::set<std::string> out;
    std::unordered_set<LType> seen;
    std::function<void(LType)> go = [&](LType n) {
        if (!seen.insert(n).second) return;
        if (n->is_prefix() && n->sort.is_var()) out.insert(n->sort.var);
        if (n->cont) go(n->cont);
        for (const auto& b : n->branches) go(b.cont);
    };
    go(t);
    return out;
}

LType substitute_free(LType t, const std::map<std::string, LType>& sub) {
    LRewriter rw;
    rw.skip = [](LType n, std::uint32_t) { return !n->has_free; };
    rw.leaf = [&sub](LType n, std::uint32_t d) -> std::optional<LType> {
        if (n->kind != LKind::Free) return std::nullopt;
        auto it = sub.find(n->peer);
        if (it == sub.end()) return n;
        return shift(it->second, d);
    };
    return rw.go(t, 0);
}

namespace {

// Binder names by depth, skipping any names that occur free.
struct Namer {
    std::string base;
    std::set<std::string> avoid;
    std::vector<std::string> stack;

    std::string fresh() {
        for (std::size_t i = stack.size();; ++i) {
            std::string cand = i == 0 ? base : base + std::to_string(i);
            if (!avoid.count(cand) && std::find(stack.begin(), stack.end(), cand) == stack.end())
                return cand;
        }
    }
};

void collect_free(LType t, std::set<std::string>& out) {
    if (!t->has_free) return;
    if (t->kind == LKind::Free) out.insert(t->peer);
    if (t->cont) collect_free(t->cont, out);
    for (const auto& b : t->branches) collect_free(b.cont, out);
}

void print_rec(LType t, Namer& nm, std::string& out) {
    switch (t->kind) {
    case LKind::End: out += "end"; return;
    case LKind::Free: out += t->peer; return;
    case LKind::Var:
        if (t->index < nm.stack.size()) out += nm.stack[nm.stack.size() - 1 - t->index];
        else out += "#" + std::to_string(t->index - nm.stack.size());
        return;
    case LKind::Out:
    case LKind::In:
        out += t->peer;
        out += t->kind == LKind::Out ? "!(" : "?(";
        out += to_string(t->sort);
        out += "); ";
        print_rec(t->cont, nm, out);
        return;
    case LKind::Sel:
    case LKind::Bra:
        out += t->peer;
        out += t->kind == LKind::Sel ? "+{" : "&{";
        for (std::size_t i = 0; i < t->branches.size(); ++i) {
            if (i) out += ", ";
            out += t->branches[i].label;
            out += ": ";
            print_rec(t->branches[i].cont, nm, out);
        }
        out += "}";
        return;
    case LKind::Rec: {
        std::string name = nm.fresh();
        out += "rec " + name + ". ";
        nm.stack.push_back(name);
        print_rec(t->cont, nm, out);
        nm.stack.pop_back();
        return;
    }
    }
}

}  // namespace

std::set<std::string> free_names(LType t) {
    std::set<std::string> out;
    collect_free(t, out);
    return out;
}

std::string print(LType t) {
    Namer nm{"t", {}, {}};
    collect_free(t, nm.avoid);
    std::string out;
    print_rec(t, nm, out);
    return out;
}

// ---------------------------------------------------------------------------
// Global types

namespace {

GType gfinish(GlobalType&& n) {
    std::size_t h = static_cast<std::size_t>(n.kind) + 17;
    mix(h, n.index);
    mix(h, std::hash<std::string>{}(n.from));
    mix(h, std::hash<std::string>{}(n.to));
    mix(h, hash_sort(n.sort));
    n.size = 1;
    n.open = n.kind == GKind::Var ? n.index + 1 : 0;
    n.has_free = n.kind == GKind::Free;
    if (n.kind == GKind::Msg || n.kind == GKind::Choice) {
        n.parts.insert(n.from);
        n.parts.insert(n.to);
    }
    if (n.cont) {
        mix(h, n.cont->hash);
        n.size += n.cont->size;
        n.has_free = n.has_free || n.cont->has_free;
        n.open = n.kind == GKind::Rec ? (n.cont->open > 0 ? n.cont->open - 1 : 0) : n.cont->open;
        n.parts.insert(n.cont->parts.begin(), n.cont->parts.end());
    }
    for (const auto& b : n.branches) {
        mix(h, std::hash<std::string>{}(b.label));
        mix(h, b.cont->hash);
        n.size += b.cont->size;
        n.open = std::max(n.open, b.cont->open);
        n.has_free = n.has_free || b.cont->has_free;
        n.parts.insert(b.cont->parts.begin(), b.cont->parts.end());
    }
    n.hash = h;
    return gtable().intern(std::move(n));
}

}  // namespace

namespace gt {

GType end() {
    static GType e = gfinish(GlobalType{GKind::End});
    return e;
}

GType msg(const std::string& from, const std::string& to, const Sort& s, GType cont) {
    if (from == to) throw Error("self-communication of '" + from + "'");
    GlobalType n{GKind::Msg};
    n.from = from;
    n.to = to;
    n.sort = s;
    n.cont = cont;
    return gfinish(std::move(n));
}

GType choice(const std::string& from, const std::string& to, std::vector<GBranch> branches) {
    if (from == to) throw Error("self-communication of '" + from + "'");
    check_branches(branches);
    GlobalType n{GKind::Choice};
    n.from = from;
    n.to = to;
    n.branches = std::move(branches);
    return gfinish(std::move(n));
}

GType rec(GType body) {
    if (unguarded_in_body(body, GKind::Rec, GKind::Var)) throw Error("unguarded recursion");
    GlobalType n{GKind::Rec};
    n.cont = body;
    return gfinish(std::move(n));
}

GType var(std::uint32_t index) {
    GlobalType n{GKind::Var};
    n.index = index;
    return gfinish(std::move(n));
}

GType free(const std::string& name) {
    GlobalType n{GKind::Free};
    n.from = name;
    return gfinish(std::move(n));
}

}  // namespace gt

namespace {

GType grebuild(GType t, GType cont, std::vector<GBranch> bs) {
    switch (t->kind) {
    case GKind::Msg: return gt::msg(t->from, t->to, t->sort, cont);
    case GKind::Choice: return gt::choice(t->from, t->to, std::move(bs));
    case GKind::Rec: return gt::rec(cont);
    default: return t;
    }
}

struct GRewriter {
    std::function<std::optional<GType>(GType, std::uint32_t)> leaf;
    std::function<bool(GType, std::uint32_t)> skip;
    std::map<std::pair<GType, std::uint32_t>, GType> cache;

    GType go(GType t, std::uint32_t depth) {
        if (skip && skip(t, depth)) return t;
        auto key = std::make_pair(t, depth);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        GType r;
        if (auto l = leaf(t, depth)) {
            r = *l;
        } else {
            GType c = t->cont ? go(t->cont, depth + (t->kind == GKind::Rec ? 1 : 0)) : nullptr;
            std::vector<GBranch> bs;
            for (const auto& b : t->branches) bs.push_back({b.label, go(b.cont, depth)});
            r = grebuild(t, c, std::move(bs));
        }
        cache.emplace(key, r);
        return r;
    }
};

GType gshift(GType t, std::uint32_t by) {
    if (by == 0 || t->open == 0) return t;
    GRewriter rw;
    rw.skip = [](GType n, std::uint32_t d) { return n->open <= d; };
    rw.leaf = [by](GType n, std::uint32_t d) -> std::optional<GType> {
        if (n->kind == GKind::Var) return n->index >= d ? gt::var(n->index + by) : n;
        return std::nullopt;
    };
    return rw.go(t, 0);
}

}  // namespace

GType instantiate(GType body, GType s) {
    GRewriter rw;
    rw.skip = [](GType n, std::uint32_t d) { return n->open <= d; };
    rw.leaf = [s](GType n, std::uint32_t d) -> std::optional<GType> {
        if (n->kind != GKind::Var) return std::nullopt;
        if (n->index == d) return gshift(s, d);
        if (n->index > d) return gt::var(n->index - 1);
        return n;
    };
    return rw.go(body, 0);
}

namespace gt {
GType bind(const std::string& name, GType body) {
    GRewriter rw;
    rw.skip = [](GType n, std::uint32_t d) { return !n->has_free && n->open <= d; };
    rw.leaf = [&name](GType n, std::uint32_t d) -> std::optional<GType> {
        if (n->kind == GKind::Free) return n->from == name ? gt::var(d) : n;
        if (n->kind == GKind::Var) return n->index >= d ? gt::var(n->index + 1) : n;
        return std::nullopt;
    };
    return gt::rec(rw.go(body, 0));
}
}  // namespace gt

GType unfold(GType g) {
    if (g->kind != GKind::Rec) return g;
    static std::mutex mu;
    static auto* cache = new std::unordered_map<GType, GType>();
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache->find(g);
        if (it != cache->end()) return it->second;
    }
    GType u = g;
    while (u->kind == GKind::Rec) u = instantiate(u->cont, u);
    std::lock_guard<std::mutex> lock(mu);
    cache->emplace(g, u);
    return u;
}

std::uint64_t size(GType g) { return g->size; }

const std::set<std::string>& participants(GType g) { return g->parts; }

std::vector<GType> subformulas(GType g) {
    std::unordered_map<GType, std::vector<GType>> memo;
    std::function<const std::vector<GType>&(GType)> sub = [&](GType n) -> const std::vector<GType>& {
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        std::vector<GType> out{n};
        std::unordered_set<GType> seen{n};
        auto add = [&](GType x) {
            if (seen.insert(x).second) out.push_back(x);
        };
        if (n->kind == GKind::Rec) {
            // The body itself is listed in place of the binder, then every
            // subformula of the body with the binder substituted.
            for (GType x : sub(n->cont)) add(instantiate(x, n));
        } else {
            if (n->cont) for (GType x : sub(n->cont)) add(x);
            for (const auto& b : n->branches) for (GType x : sub(b.cont)) add(x);
        }
        return memo.emplace(n, std::move(out)).first->second;
    };
    return sub(g);
}

namespace {

void collect_free(GType t, std::set<std::string>& out) {
    if (!t->has_free) return;
    if (t->kind == GKind::Free) out.insert(t->from);
    if (t->cont) collect_free(t->cont, out);
    for (const auto& b : t->branches) collect_free(b.cont, out);
}

void print_rec(GType t, Namer& nm, std::string& out) {
    switch (t->kind) {
    case GKind::End: out += "end"; return;
    case GKind::Free: out += t->from; return;
    case GKind::Var:
        if (t->index < nm.stack.size()) out += nm.stack[nm.stack.size() - 1 - t->index];
        else out += "#" + std::to_string(t->index - nm.stack.size());
        return;
    case GKind::Msg:
        out += t->from + "->" + t->to + "(" + to_string(t->sort) + "); ";
        print_rec(t->cont, nm, out);
        return;
    case GKind::Choice:
        out += t->from + "->" + t->to + "{";
        for (std::size_t i = 0; i < t->branches.size(); ++i) {
            if (i) out += ", ";
            out += t->branches[i].label + ": ";
            print_rec(t->branches[i].cont, nm, out);
        }
        out += "}";
        return;
    case GKind::Rec: {
        std::string name = nm.fresh();
        out += "rec " + name + ". ";
        nm.stack.push_back(name);
        print_rec(t->cont, nm, out);
        nm.stack.pop_back();
        return;
    }
    }
}

}  // namespace

std::string print(GType g) {
    Namer nm{"t", {}, {}};
    collect_free(g, nm.avoid);
    std::string out;
    print_rec(g, nm, out);
    return out;
}

// ---------------------------------------------------------------------------
// Expressions

namespace ex {
namespace {
ExprP make(EKind k, std::int64_t v = 0, std::string name = {}, ExprP a = {}, ExprP b = {}) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->value = v;
    e->name = std::move(name);
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}
}  // namespace
ExprP tt() { return make(EKind::True); }
ExprP ff() { return make(EKind::False); }
ExprP nat(std::int64_t v) {
    if (v < 0) throw Error("negative nat literal");
    return make(EKind::Nat, v);
}
ExprP integer(std::int64_t v) { return make(EKind::Int, v); }
ExprP var(const std::string& x) { return make(EKind::Var, 0, x); }
ExprP lor(ExprP a, ExprP b) { return make(EKind::Or, 0, {}, std::move(a), std::move(b)); }
ExprP lnot(ExprP a) { return make(EKind::Not, 0, {}, std::move(a)); }
ExprP add(ExprP a, ExprP b) { return make(EKind::Add, 0, {}, std::move(a), std::move(b)); }
ExprP nondet(ExprP a, ExprP b) { return make(EKind::NonDet, 0, {}, std::move(a), std::move(b)); }
ExprP neg(ExprP a) { return make(EKind::Neg, 0, {}, std::move(a)); }
}  // namespace ex

std::uint64_t size(const ExprP& e) {
    std::uint64_t s = 1;
    if (e->lhs) s += size(e->lhs);
    if (e->rhs) s += size(e->rhs);
    return s;
}

std::string print(const ExprP& e) {
    switch (e->kind) {
    case EKind::True: return "true";
    case EKind::False: return "false";
    case EKind::Nat: return std::to_string(e->value);
    case EKind::Int: return e->value < 0 ? std::to_string(e->value) : "+" + std::to_string(e->value);
    case EKind::Var: return e->name;
    case EKind::Or: return "(" + print(e->lhs) + " \\/ " + print(e->rhs) + ")";
    case EKind::Add: return "(" + print(e->lhs) + " + " + print(e->rhs) + ")";
    case EKind::NonDet: return "(" + print(e->lhs) + " (+) " + print(e->rhs) + ")";
    case EKind::Not: return "!" + print(e->lhs);
    case EKind::Neg: return "neg " + print(e->lhs);
    }
    return "?";
}

bool equal(const ExprP& a, const ExprP& b) {
    if (!a || !b) return a == b;
    return a->kind == b->kind && a->value == b->value && a->name == b->name && equal(a->lhs, b->lhs) &&
           equal(a->rhs, b->rhs);
}

// ---------------------------------------------------------------------------
// Processes

namespace pr {
namespace {
std::shared_ptr<Process> node(PKind k) {
    auto p = std::make_shared<Process>();
    p->kind = k;
    return p;
}
}  // namespace
Proc inact() { return node(PKind::Inact); }
Proc send(const std::string& peer, ExprP e, Proc cont) {
    auto p = node(PKind::Send);
    p->peer = peer;
    p->expr = std::move(e);
    p->cont = std::move(cont);
    return p;
}
Proc recv(const std::string& peer, const std::string& x, Proc cont) {
    auto p = node(PKind::Recv);
    p->peer = peer;
    p->name = x;
    p->cont = std::move(cont);
    return p;
}
Proc sel(const std::string& peer, const std::string& label, Proc cont) {
    auto p = node(PKind::Sel);
    p->peer = peer;
    p->label = label;
    p->cont = std::move(cont);
    return p;
}
Proc bra(const std::string& peer, std::vector<PBranch> branches) {
    check_branches(branches);
    auto p = node(PKind::Bra);
    p->peer = peer;
    p->branches = std::move(branches);
    return p;
}
Proc cond(ExprP e, Proc then_p, Proc else_p) {
    auto p = node(PKind::Cond);
    p->expr = std::move(e);
    p->cont = std::move(then_p);
    p->alt = std::move(else_p);
    return p;
}
Proc rec(const std::string& x, Proc body) {
    auto p = node(PKind::Rec);
    p->name = x;
    p->cont = std::move(body);
    return p;
}
Proc var(const std::string& x) {
    auto p = node(PKind::Var);
    p->name = x;
    return p;
}
}  // namespace pr

std::uint64_t size(const Proc& p) {
    switch (p->kind) {
    case PKind::Inact:
    case PKind::Var: return 1;
    case PKind::Rec: return size(p->cont) + 1;
    case PKind::Send: return size(p->cont) + size(p->expr) + 1;
    case PKind::Recv: return size(p->cont) + 2;  // the bound variable counts as an expression
    case PKind::Sel: return size(p->cont) + 1;
    case PKind::Bra: {
        std::uint64_t s = 1;
        for (const auto& b : p->branches) s += size(b.cont);
        return s;
    }
    case PKind::Cond: return size(p->cont) + size(p->alt) + size(p->expr) + 1;
    }
    return 0;
}

namespace {
void print_rec(const Proc& p, std::string& out) {
    switch (p->kind) {
    case PKind::Inact: out += "0"; return;
    case PKind::Var: out += p->name; return;
    case PKind::Rec:
        out += "rec " + p->name + ". ";
        print_rec(p->cont, out);
        return;
    case PKind::Send:
        out += p->peer + "!<" + print(p->expr) + ">; ";
        print_rec(p->cont, out);
        return;
    case PKind::Recv:
        out += p->peer + "?(" + p->name + "); ";
        print_rec(p->cont, out);
        return;
    case PKind::Sel:
        out += p->peer + "(+)" + p->label + "; ";
        print_rec(p->cont, out);
        return;
    case PKind::Bra:
        out += p->peer + "&{";
        for (std::size_t i = 0; i < p->branches.size(); ++i) {
            if (i) out += ", ";
            out += p->branches[i].label + ": ";
            print_rec(p->branches[i].cont, out);
        }
        out += "}";
        return;
    case PKind::Cond:
        out += "if " + print(p->expr) + " then ";
        print_rec(p->cont, out);
        out += " else ";
        print_rec(p->alt, out);
        return;
    }
}
}  // namespace

std::string print(const Proc& p) {
    std::string out;
    print_rec(p, out);
    return out;
}

namespace {

using Env = std::vector<std::pair<std::string, std::string>>;

std::string lookup(const Env& env, const std::string& x) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == x) return it->second;
    return "free:" + x;
}

bool expr_alpha(const ExprP& a, const ExprP& b, const Env& ea, const Env& eb) {
    if (a->kind != b->kind || a->value != b->value) return false;
    if (a->kind == EKind::Var) return lookup(ea, a->name) == lookup(eb, b->name);
    if (static_cast<bool>(a->lhs) != static_cast<bool>(b->lhs)) return false;
    if (a->lhs && !expr_alpha(a->lhs, b->lhs, ea, eb)) return false;
    if (static_cast<bool>(a->rhs) != static_cast<bool>(b->rhs)) return false;
    if (a->rhs && !expr_alpha(a->rhs, b->rhs, ea, eb)) return false;
    return true;
}

bool proc_alpha(const Proc& a, const Proc& b, Env& pa, Env& pb, Env& va, Env& vb, int& fresh) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case PKind::Inact: return true;
    case PKind::Var: return lookup(pa, a->name) == lookup(pb, b->name);
    case PKind::Rec: {
        std::string id = "#" + std::to_string(fresh++);
        pa.emplace_back(a->name, id);
        pb.emplace_back(b->name, id);
        bool ok = proc_alpha(a->cont, b->cont, pa, pb, va, vb, fresh);
        pa.pop_back();
        pb.pop_back();
        return ok;
    }
    case PKind::Send:
        return a->peer == b->peer && expr_alpha(a->expr, b->expr, va, vb) &&
               proc_alpha(a->cont, b->cont, pa, pb, va, vb, fresh);
    case PKind::Recv: {
        if (a->peer != b->peer) return false;
        std::string id = "#" + std::to_string(fresh++);
        va.emplace_back(a->name, id);
        vb.emplace_back(b->name, id);
        bool ok = proc_alpha(a->cont, b->cont, pa, pb, va, vb, fresh);
        va.pop_back();
        vb.pop_back();
        return ok;
    }
    case PKind::Sel:
        return a->peer == b->peer && a->label == b->label && proc_alpha(a->cont, b->cont, pa, pb, va, vb, fresh);
    case PKind::Bra:
        if (a->peer != b->peer || a->branches.size() != b->branches.size()) return false;
        for (std::size_t i = 0; i < a->branches.size(); ++i)
            if (a->branches[i].label != b->branches[i].label ||
                !proc_alpha(a->branches[i].cont, b->branches[i].cont, pa, pb, va, vb, fresh))
                return false;
        return true;
    case PKind::Cond:
        return expr_alpha(a->expr, b->expr, va, vb) && proc_alpha(a->cont, b->cont, pa, pb, va, vb, fresh) &&
               proc_alpha(a->alt, b->alt, pa, pb, va, vb, fresh);
    }
    return false;
}

// Process variables reachable from p without passing a prefix.
void unguarded(const Proc& p, std::set<std::string>& out) {
    switch (p->kind) {
    case PKind::Var: out.insert(p->name); return;
    case PKind::Rec: {
        std::set<std::string> inner;
        unguarded(p->cont, inner);
        if (inner.count(p->name)) throw Error("unguarded recursion on " + p->name);
        out.insert(inner.begin(), inner.end());
        return;
    }
    case PKind::Cond:
        unguarded(p->cont, out);
        unguarded(p->alt, out);
        return;
    default: return;
    }
}

Proc normalize_rec(const Proc& p, Env& env, int& counter) {
    switch (p->kind) {
    case PKind::Inact: return p;
    case PKind::Var: {
        for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->first == p->name) return pr::var(it->second);
        throw Error("free process variable " + p->name);
    }
    case PKind::Rec: {
        std::string fresh = counter == 0 ? "X" : "X" + std::to_string(counter);
        ++counter;
        env.emplace_back(p->name, fresh);
        Proc body = normalize_rec(p->cont, env, counter);
        env.pop_back();
        return pr::rec(fresh, body);
    }
    case PKind::Send: return pr::send(p->peer, p->expr, normalize_rec(p->cont, env, counter));
    case PKind::Recv: return pr::recv(p->peer, p->name, normalize_rec(p->cont, env, counter));
    case PKind::Sel: return pr::sel(p->peer, p->label, normalize_rec(p->cont, env, counter));
    case PKind::Bra: {
        std::vector<PBranch> bs;
        for (const auto& b : p->branches) bs.push_back({b.label, normalize_rec(b.cont, env, counter)});
        return pr::bra(p->peer, std::move(bs));
    }
    case PKind::Cond: {
        Proc a = normalize_rec(p->cont, env, counter);
        Proc b = normalize_rec(p->alt, env, counter);
        return pr::cond(p->expr, a, b);
    }
    }
    return p;
}

bool closed_rec(const Proc& p, std::vector<std::string>& bound) {
    switch (p->kind) {
    case PKind::Var: return std::find(bound.begin(), bound.end(), p->name) != bound.end();
    case PKind::Rec: {
        bound.push_back(p->name);
        bool ok = closed_rec(p->cont, bound);
        bound.pop_back();
        return ok;
    }
    case PKind::Bra:
        for (const auto& b : p->branches)
            if (!closed_rec(b.cont, bound)) return false;
        return true;
    case PKind::Cond: return closed_rec(p->cont, bound) && closed_rec(p->alt, bound);
    case PKind::Inact: return true;
    default: return closed_rec(p->cont, bound);
    }
}

}  // namespace

bool alpha_equal(const Proc& a, const Proc& b) {
    Env pa, pb, va, vb;
    int fresh = 0;
    return proc_alpha(a, b, pa, pb, va, vb, fresh);
}

Proc normalize(const Proc& p) {
    std::set<std::string> top;
    unguarded(p, top);
    Env env;
    int counter = 0;
    return normalize_rec(p, env, counter);
}

Proc substitute(const Proc& p, const std::string& x, const Proc& s) {
    switch (p->kind) {
    case PKind::Inact: return p;
    case PKind::Var: return p->name == x ? s : p;
    case PKind::Rec: return p->name == x ? p : pr::rec(p->name, substitute(p->cont, x, s));
    case PKind::Send: return pr::send(p->peer, p->expr, substitute(p->cont, x, s));
    case PKind::Recv: return pr::recv(p->peer, p->name, substitute(p->cont, x, s));
    case PKind::Sel: return pr::sel(p->peer, p->label, substitute(p->cont, x, s));
    case PKind::Bra: {
        std::vector<PBranch> bs;
        for (const auto& b : p->branches) bs.push_back({b.label, substitute(b.cont, x, s)});
        return pr::bra(p->peer, std::move(bs));
    }
    case PKind::Cond: return pr::cond(p->expr, substitute(p->cont, x, s), substitute(p->alt, x, s));
    }
    return p;
}

bool is_closed(const Proc& p) {
    std::vector<std::string> bound;
    return closed_rec(p, bound);
}

std::uint64_t size(const Session& s) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < s.size(); ++i) total += size(s[i].second) + 1 + (i ? 1 : 0);
    return total;
}

std::string print(const Session& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += " | ";
        out += s[i].first + " :: " + print(s[i].second);
    }
    return out;
}

std::string print(const TypingContext& c) {
    std::string out;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) out += ", ";
        out += c[i].first + ": " + print(c[i].second);
    }
    return out;
}

}  // namespace mpst
