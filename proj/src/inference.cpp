#include "mpst/inference.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>

#include "mpst/subtyping.hpp"

namespace mpst {

namespace {
std::string xi(int v) { return "xi" + std::to_string(v); }

std::string print_vars(const std::vector<int>& vs) {
    std::string s = "{";
    for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? ", " : "") + xi(vs[i]);
    return s + "}";
}
}  // namespace

std::string print(const Constraint& c) {
    using K = Constraint::Kind;
    auto bs = [&] {
        std::string s = "{";
        for (std::size_t i = 0; i < c.branches.size(); ++i)
            s += (i ? ", " : "") + c.branches[i].first + ": " + xi(c.branches[i].second);
        return s + "}";
    };
    switch (c.kind) {
    case K::End: return "end <= " + xi(c.rhs);
    case K::Var: return xi(c.lhs) + " <= " + xi(c.rhs);
    case K::In: return c.peer + "?(" + to_string(c.sort) + "); " + xi(c.lhs) + " <= " + xi(c.rhs);
    case K::Out: return c.peer + "!(" + to_string(c.sort) + "); " + xi(c.lhs) + " <= " + xi(c.rhs);
    case K::Sel: return c.peer + "+" + bs() + " <= " + xi(c.rhs);
    case K::Bra: return c.peer + "&" + bs() + " <= " + xi(c.rhs);
    case K::SortEq: return to_string(c.sort) + " = " + to_string(c.other);
    }
    return "?";
}

namespace {

using Kind = Constraint::Kind;

// Sort equations are unordered for deduplication.
std::string key(const Constraint& k) {
    if (k.kind != Kind::SortEq) return print(k);
    auto a = to_string(k.sort), b = to_string(k.other);
    return a < b ? a + " = " + b : b + " = " + a;
}

class Deriver {
public:
    Constraints run(const Proc& p) {
        c_.root = proc(p, {}, {}, std::nullopt);
        return std::move(c_);
    }

private:
    using Env = std::map<std::string, Sort>;
    using PEnv = std::map<std::string, int>;

    int fresh() { return c_.type_vars++; }
    Sort fresh_sort() { return Sort::variable("a" + std::to_string(c_.sort_vars++)); }

    void add(Constraint k) {
        if (seen_.insert(key(k)).second) c_.items.push_back(std::move(k));
    }
    void eq(const Sort& a, const Sort& b) {
        Constraint k;
        k.kind = Kind::SortEq;
        k.sort = a;
        k.other = b;
        add(std::move(k));
    }
    void sub(Kind kind, int lhs, int rhs, std::string peer = {}, Sort s = {}) {
        Constraint k;
        k.kind = kind;
        k.lhs = lhs;
        k.rhs = rhs;
        k.peer = std::move(peer);
        k.sort = std::move(s);
        add(std::move(k));
    }

    Sort expr(const ExprP& e, const Env& env) {
        switch (e->kind) {
        case EKind::True:
        case EKind::False: {
            Sort a = fresh_sort();
            eq(a, Sort::boolean());
            return a;
        }
        case EKind::Nat: {
            Sort a = fresh_sort();
            eq(a, Sort::nat());
            return a;
        }
        case EKind::Int: {
            Sort a = fresh_sort();
            eq(a, Sort::integer());
            return a;
        }
        case EKind::Var: {
            auto it = env.find(e->name);
            if (it == env.end()) throw Error("free value variable " + e->name);
            return it->second;
        }
        case EKind::Neg: {
            Sort a = expr(e->lhs, env);
            eq(a, Sort::integer());
            return a;
        }
        case EKind::Not: {
            Sort a = expr(e->lhs, env);
            eq(a, Sort::boolean());
            return a;
        }
        case EKind::Or:
        case EKind::NonDet:
        case EKind::Add: {
            Sort a1 = expr(e->lhs, env), a2 = expr(e->rhs, env);
            Sort b = fresh_sort();
            if (e->kind == EKind::Or) {
                eq(a1, Sort::boolean());
                eq(a2, Sort::boolean());
                eq(b, Sort::boolean());
            } else {
                eq(a1, b);
                eq(a2, b);
                if (e->kind == EKind::Add) eq(b, Sort::integer());
            }
            return b;
        }
        }
        throw Error("unknown expression");
    }

    // hint: the variable a recursion binder fixed for this process.
    int proc(const Proc& p, const Env& env, const PEnv& penv, std::optional<int> hint) {
        auto var = [&] { return hint ? *hint : fresh(); };
        switch (p->kind) {
        case PKind::Inact: {
            int x = var();
            sub(Kind::End, -1, x);
            return x;
        }
        case PKind::Var: {
            auto it = penv.find(p->name);
            if (it == penv.end()) throw Error("free process variable " + p->name);
            int x = var();
            sub(Kind::Var, it->second, x);
            return x;
        }
        case PKind::Rec: {
            int x = var();
            PEnv inner = penv;
            inner[p->name] = x;
            proc(p->cont, env, inner, x);
            return x;
        }
        case PKind::Recv: {
            Sort a = fresh_sort();
            Env inner = env;
            inner[p->name] = a;
            int psi = proc(p->cont, inner, penv, std::nullopt);
            int x = var();
            sub(Kind::In, psi, x, p->peer, a);
            return x;
        }
        case PKind::Send: {
            int psi = proc(p->cont, env, penv, std::nullopt);
            Sort a = expr(p->expr, env);
            int x = var();
            sub(Kind::Out, psi, x, p->peer, a);
            return x;
        }
        case PKind::Sel:
        case PKind::Bra: {
            Constraint k;
            k.kind = p->kind == PKind::Sel ? Kind::Sel : Kind::Bra;
            k.peer = p->peer;
            if (p->kind == PKind::Sel) k.branches.push_back({p->label, proc(p->cont, env, penv, std::nullopt)});
            else
                for (const auto& b : p->branches) k.branches.push_back({b.label, proc(b.cont, env, penv, std::nullopt)});
            k.rhs = var();
            add(std::move(k));
            return k.rhs;
        }
        case PKind::Cond: {
            int psi1 = proc(p->cont, env, penv, std::nullopt);
            int psi2 = proc(p->alt, env, penv, std::nullopt);
            Sort a = expr(p->expr, env);
            int x = var();
            eq(Sort::boolean(), a);
            sub(Kind::Var, psi1, x);
            sub(Kind::Var, psi2, x);
            return x;
        }
        }
        throw Error("unknown process");
    }

    Constraints c_;
    std::set<std::string> seen_;
};

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto ux = static_cast<std::size_t>(x);
            parent[ux] = parent[static_cast<std::size_t>(parent[ux])];
            x = parent[ux];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a), b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
    }
};

}  // namespace

Constraints derive_constraints(const Proc& p) { return Deriver{}.run(p); }

Constraints eliminate_transitive(const Constraints& c) {
    auto n = static_cast<std::size_t>(c.type_vars);
    std::vector<std::vector<int>> below(n);
    std::vector<char> defined(n);
    Constraints out;
    out.type_vars = c.type_vars;
    out.sort_vars = c.sort_vars;
    out.root = c.root;
    for (const auto& k : c.items) {
        if (k.kind == Kind::Var) {
            if (k.lhs != k.rhs) below[static_cast<std::size_t>(k.rhs)].push_back(k.lhs);
            continue;
        }
        if (k.kind != Kind::SortEq) defined[static_cast<std::size_t>(k.rhs)] = 1;
        out.items.push_back(k);
    }
    out.bounds.resize(n);
    std::vector<int> mark(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
        std::vector<int> todo{static_cast<int>(v)};
        mark[v] = static_cast<int>(v);
        while (!todo.empty()) {
            auto u = static_cast<std::size_t>(todo.back());
            todo.pop_back();
            if (defined[u]) out.bounds[v].push_back(static_cast<int>(u));
            for (int w : below[u])
                if (mark[static_cast<std::size_t>(w)] != static_cast<int>(v)) {
                    mark[static_cast<std::size_t>(w)] = static_cast<int>(v);
                    todo.push_back(w);
                }
        }
        std::sort(out.bounds[v].begin(), out.bounds[v].end());
    }
    return out;
}

std::vector<int> lower_closure(const Constraints& c, const std::vector<int>& vars) {
    std::set<int> s;
    for (int v : vars) {
        if (c.bounds.empty()) s.insert(v);
        else s.insert(c.bounds.at(static_cast<std::size_t>(v)).begin(), c.bounds.at(static_cast<std::size_t>(v)).end());
    }
    return {s.begin(), s.end()};
}

MinGraph build_min_graph(const Constraints& c, std::uint64_t max_nodes,
                         const std::vector<std::vector<int>>& extra_roots) {
    MinGraph g;
    std::vector<std::vector<const Constraint*>> by_rhs(static_cast<std::size_t>(c.type_vars));
    for (const auto& k : c.items) {
        if (k.kind == Kind::Var) throw Error("build_min_graph expects constraints without xi <= psi");
        if (k.kind == Kind::SortEq) g.sort_eqs.push_back({k.sort, k.other});
        else by_rhs[static_cast<std::size_t>(k.rhs)].push_back(&k);
    }
    int next_sort = c.sort_vars;
    auto& ids = g.index;
    std::deque<int> queue;
    auto node = [&](const std::set<int>& s) {
        std::vector<int> vs = lower_closure(c, {s.begin(), s.end()});
        if (vs.empty()) vs = {s.begin(), s.end()};  // reported as unbounded below
        auto it = ids.find(vs);
        if (it != ids.end()) return it->second;
        if (ids.size() >= max_nodes) throw BudgetExceeded("minimum type graph exceeds " + std::to_string(max_nodes) + " nodes");
        int id = g.graph.add_node(print_vars(vs));
        ids.emplace(vs, id);
        g.nodes.push_back(std::move(vs));
        queue.push_back(id);
        return id;
    };
    auto fail = [&](int id, const std::string& why) {
        g.failure_node = g.nodes[static_cast<std::size_t>(id)];
        g.reason = why + " at " + print_vars(g.failure_node);
        g.graph = TypeGraph{};
        g.nodes.clear();
        g.index.clear();
        return g;
    };
    g.graph.init = node({c.root});
    for (const auto& r : extra_roots) {
        if (r.empty()) throw Error("empty root set");
        node(std::set<int>(r.begin(), r.end()));
    }
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        std::vector<const Constraint*> deps;
        for (int v : g.nodes[static_cast<std::size_t>(id)]) {
            const auto& ks = by_rhs[static_cast<std::size_t>(v)];
            if (ks.empty()) return fail(id, "no constraint bounds " + xi(v));
            deps.insert(deps.end(), ks.begin(), ks.end());
        }
        const Constraint& d0 = *deps[0];
        for (const Constraint* d : deps)
            if (d->kind != d0.kind || d->peer != d0.peer) return fail(id, "no rule applies (mixed actions)");
        auto& edges = g.graph.out[static_cast<std::size_t>(id)];
        switch (d0.kind) {
        case Kind::End: edges.push_back({Action::end(), TypeGraph::kSkip}); break;
        case Kind::In:
        case Kind::Out: {
            Sort a = Sort::variable("a" + std::to_string(next_sort++));
            std::set<int> to;
            for (const Constraint* d : deps) {
                g.sort_eqs.push_back({a, d->sort});
                to.insert(d->lhs);
            }
            int t = node(to);
            g.graph.out[static_cast<std::size_t>(id)].push_back(
                {d0.kind == Kind::In ? Action::in(d0.peer, a) : Action::out(d0.peer, a), t});
            break;
        }
        case Kind::Sel:
        case Kind::Bra: {
            std::map<std::string, std::set<int>> targets;
            std::map<std::string, std::size_t> count;
            for (const Constraint* d : deps)
                for (const auto& [l, v] : d->branches) {
                    targets[l].insert(v);
                    ++count[l];
                }
            std::vector<TypeGraph::Edge> es;
            for (auto& [l, to] : targets) {
                if (d0.kind == Kind::Bra && count[l] != deps.size()) continue;
                int t = node(to);
                es.push_back({d0.kind == Kind::Sel ? Action::sel(d0.peer, l) : Action::bra(d0.peer, l), t});
            }
            if (es.empty()) return fail(id, "branchings share no label");
            g.graph.out[static_cast<std::size_t>(id)] = std::move(es);
            break;
        }
        default: return fail(id, "unexpected constraint");
        }
    }
    g.graph.validate();
    g.defined = true;
    return g;
}

std::optional<std::map<std::string, Sort>> solve_sorts(const std::vector<std::pair<Sort, Sort>>& eqs) {
    // Classes over printed sorts; concrete sorts are nodes of their own.
    std::map<std::string, int> id;
    std::vector<Sort> sorts;
    auto get = [&](const Sort& s) {
        auto [it, fresh] = id.emplace(to_string(s), static_cast<int>(sorts.size()));
        if (fresh) sorts.push_back(s);
        return it->second;
    };
    for (const auto& [a, b] : eqs) get(a), get(b);
    UnionFind uf(static_cast<int>(sorts.size()));
    for (const auto& [a, b] : eqs) uf.unite(get(a), get(b));
    std::vector<std::optional<Sort>> concrete(sorts.size());
    for (std::size_t i = 0; i < sorts.size(); ++i) {
        if (sorts[i].is_var()) continue;
        auto& slot = concrete[static_cast<std::size_t>(uf.find(static_cast<int>(i)))];
        if (slot && *slot != sorts[i]) return std::nullopt;
        slot = sorts[i];
    }
    std::map<std::string, Sort> pi;
    for (std::size_t i = 0; i < sorts.size(); ++i) {
        if (!sorts[i].is_var()) continue;
        auto r = static_cast<std::size_t>(uf.find(static_cast<int>(i)));
        pi[sorts[i].var] = concrete[r] ? *concrete[r] : sorts[r];
    }
    return pi;
}

namespace {

Sort subst_sort(const std::map<std::string, Sort>& pi, const Sort& s) {
    if (!s.is_var()) return s;
    auto it = pi.find(s.var);
    return it == pi.end() ? s : it->second;
}

void sort_vars_in_order(LType t, std::vector<std::string>& out) {
    if (t->is_prefix() && t->sort.is_var() && std::find(out.begin(), out.end(), t->sort.var) == out.end())
        out.push_back(t->sort.var);
    if (t->cont) sort_vars_in_order(t->cont, out);
    for (const auto& b : t->branches) sort_vars_in_order(b.cont, out);
}

std::string letter_name(std::size_t i) {
    std::string s(1, static_cast<char>('a' + i % 26));
    return i < 26 ? s : s + std::to_string(i / 26);
}

}  // namespace

Inference infer_min_type(const Proc& p, std::uint64_t max_nodes) {
    Inference r;
    r.constraints = derive_constraints(p);
    r.reduced = eliminate_transitive(r.constraints);
    r.graph = build_min_graph(r.reduced, max_nodes);
    if (!r.graph.defined) {
        r.reason = "minimum type graph undefined: " + r.graph.reason;
        return r;
    }
    auto pi = solve_sorts(r.graph.sort_eqs);
    if (!pi) {
        r.reason = "sort constraints unsatisfiable";
        return r;
    }
    TypeGraph g = r.graph.graph;
    for (auto& es : g.out)
        for (auto& e : es) e.act.sort = subst_sort(*pi, e.act.sort);
    LType t = graph_to_type(g);
    std::vector<std::string> order;
    sort_vars_in_order(t, order);
    std::map<std::string, Sort> rename;
    for (std::size_t i = 0; i < order.size(); ++i) rename[order[i]] = Sort::variable(letter_name(i));
    r.type = map_sorts(t, [&](const Sort& s) { return subst_sort(rename, s); });
    r.typable = true;
    return r;
}

Proc gen_lcm_process(const std::vector<unsigned>& divisors) {
    if (divisors.empty()) throw Error("lcm family needs at least one divisor");
    auto cycle = [](unsigned n) {
        if (n < 1) throw Error("lcm family divisors must be >= 1");
        Proc body = pr::bra("p", {{"l1", pr::var("X")}, {"l2", pr::var("X")}});
        for (unsigned i = 1; i < n; ++i) body = pr::bra("p", {{"l1", body}});
        return pr::rec("X", body);
    };
    Proc p = cycle(divisors[0]);
    for (std::size_t i = 1; i < divisors.size(); ++i) p = pr::cond(ex::nondet(ex::tt(), ex::ff()), cycle(divisors[i]), p);
    return normalize(p);
}

namespace {

struct Realizer {
    Rng& rng;
    std::vector<std::string> recs;
    std::vector<std::pair<std::string, Sort>> vals;
    int next_val = 0;

    bool coin() { return std::bernoulli_distribution(0.5)(rng); }

    ExprP value(const Sort& s) {
        std::vector<std::string> cands;
        for (const auto& [x, t] : vals)
            if (t == s) cands.push_back(x);
        if (!cands.empty() && coin()) return ex::var(cands[std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng)]);
        switch (s.kind) {
        case SortKind::Bool: return coin() ? ex::tt() : ex::lnot(ex::ff());
        case SortKind::Nat: return ex::nat(std::uniform_int_distribution<int>(0, 9)(rng));
        case SortKind::Int: return coin() ? ex::integer(3) : ex::neg(ex::integer(2));
        case SortKind::Var: break;
        }
        throw Error("cannot realize an unknown sort");
    }

    Proc go(LType t) {
        switch (t->kind) {
        case LKind::End: return pr::inact();
        case LKind::Var: return pr::var(recs[recs.size() - 1 - t->index]);
        case LKind::Free: throw Error("cannot realize an open type");
        case LKind::Rec: {
            recs.push_back("X" + std::to_string(recs.size()));
            Proc body = go(t->cont);
            std::string x = recs.back();
            recs.pop_back();
            return pr::rec(x, body);
        }
        case LKind::Out: return pr::send(t->peer, value(t->sort), go(t->cont));
        case LKind::In: {
            std::string x = "x" + std::to_string(next_val++);
            vals.push_back({x, t->sort});
            Proc body = go(t->cont);
            vals.pop_back();
            return pr::recv(t->peer, x, body);
        }
        case LKind::Bra: {
            std::vector<PBranch> bs;
            for (const auto& b : t->branches) bs.push_back({b.label, go(b.cont)});
            return pr::bra(t->peer, std::move(bs));
        }
        case LKind::Sel: {
            std::vector<const LBranch*> picked;
            for (const auto& b : t->branches)
                if (coin()) picked.push_back(&b);
            if (picked.empty())
                picked.push_back(&t->branches[std::uniform_int_distribution<std::size_t>(0, t->branches.size() - 1)(rng)]);
            Proc p = pr::sel(t->peer, picked.back()->label, go(picked.back()->cont));
            for (std::size_t i = picked.size() - 1; i-- > 0;) {
                Proc alt = pr::sel(t->peer, picked[i]->label, go(picked[i]->cont));
                p = pr::cond(ex::nondet(ex::tt(), ex::ff()), alt, p);
            }
            return p;
        }
        }
        throw Error("unknown local type");
    }
};

}  // namespace

Proc realize(Rng& rng, LType t) {
    if (!t->closed()) throw Error("cannot realize an open type");
    Realizer r{rng};
    return normalize(r.go(t));
}

std::optional<std::map<std::string, Sort>> match_sorts(LType lower, LType upper) {
    LocalGraph a = local_graph(lower), b = local_graph(upper);
    std::map<std::string, Sort> pi;
    std::set<std::pair<int, int>> seen;
    std::deque<std::pair<int, int>> queue{{a.init, b.init}};
    while (!queue.empty()) {
        auto [u, v] = queue.front();
        queue.pop_front();
        if (u == TypeGraph::kSkip || v == TypeGraph::kSkip || !seen.insert({u, v}).second) continue;
        const auto& eu = a.out[static_cast<std::size_t>(u)];
        const auto& ev = b.out[static_cast<std::size_t>(v)];
        for (const auto& x : eu)
            for (const auto& y : ev) {
                if (x.act.kind != y.act.kind || x.act.peer != y.act.peer) continue;
                if (x.act.kind == ActKind::In || x.act.kind == ActKind::Out) {
                    if (x.act.sort.is_var()) {
                        auto [it, fresh] = pi.emplace(x.act.sort.var, y.act.sort);
                        if (!fresh && it->second != y.act.sort) return std::nullopt;
                    }
                } else if (x.act.label != y.act.label) {
                    continue;
                }
                queue.push_back({x.to, y.to});
            }
    }
    return pi;
}

bool below_up_to_sorts(LType lower, LType upper) {
    auto pi = match_sorts(lower, upper);
    if (!pi) return false;
    LType t = map_sorts(lower, [&](const Sort& s) { return subst_sort(*pi, s); });
    return subtype_sim(t, upper).holds;
}

}  // namespace mpst
