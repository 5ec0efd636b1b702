#include "mpst/typegraph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace mpst {

std::string print(const Action& a) {
    switch (a.kind) {
    case ActKind::In: return a.peer + "?(" + to_string(a.sort) + ")";
    case ActKind::Out: return a.peer + "!(" + to_string(a.sort) + ")";
    case ActKind::Sel: return a.peer + "+" + a.label;
    case ActKind::Bra: return a.peer + "&" + a.label;
    case ActKind::End: return "end";
    }
    return "?";
}

int TypeGraph::add_node(std::string label) {
    out.emplace_back();
    labels.push_back(std::move(label));
    return static_cast<int>(out.size()) - 1;
}

std::size_t TypeGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& es : out) n += es.size();
    return n;
}

void TypeGraph::validate() const {
    auto fail = [](std::size_t n, const std::string& why) {
        throw Error("malformed type graph at node " + std::to_string(n) + ": " + why);
    };
    if (init < 0 || static_cast<std::size_t>(init) >= out.size()) throw Error("malformed type graph: bad initial node");
    for (std::size_t n = 0; n < out.size(); ++n) {
        const auto& es = out[n];
        if (es.empty()) fail(n, "no out-edges");
        for (const auto& e : es)
            if (e.to != kSkip && (e.to < 0 || static_cast<std::size_t>(e.to) >= out.size())) fail(n, "dangling edge");
        ActKind k = es[0].act.kind;
        switch (k) {
        case ActKind::End:
            if (es.size() != 1 || es[0].to != kSkip) fail(n, "end must be the only edge and lead to Skip");
            break;
        case ActKind::In:
        case ActKind::Out:
            if (es.size() != 1) fail(n, "communication node with several edges");
            if (es[0].to == kSkip) fail(n, "only end leads to Skip");
            break;
        case ActKind::Sel:
        case ActKind::Bra: {
            std::set<std::string> seen;
            for (const auto& e : es) {
                if (e.act.kind != k || e.act.peer != es[0].act.peer) fail(n, "mixed choice");
                if (!seen.insert(e.act.label).second) fail(n, "duplicate label " + e.act.label);
                if (e.to == kSkip) fail(n, "only end leads to Skip");
            }
            break;
        }
        }
    }
}

TypeGraph TypeGraph::trimmed() const {
    std::vector<int> id(out.size(), -1);
    std::vector<int> order;
    std::deque<int> q{init};
    id[static_cast<std::size_t>(init)] = 0;
    order.push_back(init);
    while (!q.empty()) {
        int n = q.front();
        q.pop_front();
        for (const auto& e : out[static_cast<std::size_t>(n)]) {
            if (e.to == kSkip || id[static_cast<std::size_t>(e.to)] >= 0) continue;
            id[static_cast<std::size_t>(e.to)] = static_cast<int>(order.size());
            order.push_back(e.to);
            q.push_back(e.to);
        }
    }
    TypeGraph g;
    for (int n : order) {
        g.add_node(labels.size() > static_cast<std::size_t>(n) ? labels[static_cast<std::size_t>(n)] : "");
        auto& es = g.out.back();
        for (const auto& e : out[static_cast<std::size_t>(n)])
            es.push_back({e.act, e.to == kSkip ? kSkip : id[static_cast<std::size_t>(e.to)]});
    }
    g.init = 0;
    return g;
}

LocalGraph local_graph(LType t) {
    if (!t->closed()) throw Error("type graph of an open type");
    LocalGraph g;
    auto node = [&](LType u) {
        auto it = g.index.find(u);
        if (it != g.index.end()) return it->second;
        int id = g.add_node(print(u));
        g.types.push_back(u);
        g.index.emplace(u, id);
        return id;
    };
    g.init = node(t);
    for (std::size_t n = 0; n < g.out.size(); ++n) {
        LType h = unfold(g.types[n]);
        std::vector<TypeGraph::Edge> es;
        switch (h->kind) {
        case LKind::End: es.push_back({Action::end(), TypeGraph::kSkip}); break;
        case LKind::Out: es.push_back({Action::out(h->peer, h->sort), node(h->cont)}); break;
        case LKind::In: es.push_back({Action::in(h->peer, h->sort), node(h->cont)}); break;
        case LKind::Sel:
            for (const auto& b : h->branches) es.push_back({Action::sel(h->peer, b.label), node(b.cont)});
            break;
        case LKind::Bra:
            for (const auto& b : h->branches) es.push_back({Action::bra(h->peer, b.label), node(b.cont)});
            break;
        default: throw Error("type graph of an ill-formed type");
        }
        g.out[n] = std::move(es);
    }
    return g;
}

LType graph_to_type(const TypeGraph& g) {
    g.validate();
    std::vector<LType> done(g.out.size(), nullptr);
    std::vector<char> on_stack(g.out.size(), 0);
    auto name = [](int n) { return "%n" + std::to_string(n); };

    std::function<LType(int)> go = [&](int n) -> LType {
        auto un = static_cast<std::size_t>(n);
        if (done[un]) return done[un];
        if (on_stack[un]) return lt::free(name(n));
        on_stack[un] = 1;
        const auto& es = g.out[un];
        LType body = nullptr;
        const Action& a = es[0].act;
        switch (a.kind) {
        case ActKind::End: body = lt::end(); break;
        case ActKind::In: body = lt::in(a.peer, a.sort, go(es[0].to)); break;
        case ActKind::Out: body = lt::out(a.peer, a.sort, go(es[0].to)); break;
        case ActKind::Sel:
        case ActKind::Bra: {
            std::vector<LBranch> bs;
            for (const auto& e : es) bs.push_back({e.act.label, go(e.to)});
            body = a.kind == ActKind::Sel ? lt::sel(a.peer, std::move(bs)) : lt::bra(a.peer, std::move(bs));
            break;
        }
        }
        on_stack[un] = 0;
        // A binder is needed only if something below refers back to this node.
        LType result = free_names(body).count(name(n)) ? lt::bind(name(n), body) : body;
        if (result->closed()) done[un] = result;
        return result;
    };
    return go(g.init);
}

GlobalGraph global_graph(GType g) {
    if (!g->closed()) throw Error("global graph of an open type");
    GlobalGraph gg;
    auto node = [&](GType u) {
        auto [it, fresh] = gg.index.emplace(u, static_cast<int>(gg.nodes.size()));
        if (fresh) gg.nodes.push_back(u);
        return it->second;
    };
    node(g);
    for (std::size_t n = 0; n < gg.nodes.size(); ++n) {
        GType h = unfold(gg.nodes[n]);
        std::vector<int> succ;
        if (h->kind == GKind::Msg) succ.push_back(node(h->cont));
        for (const auto& b : h->branches) succ.push_back(node(b.cont));
        std::sort(succ.begin(), succ.end());
        succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
        gg.succ.push_back(std::move(succ));
        gg.heads.push_back(h);
    }
    return gg;
}

std::optional<Imbalance> find_imbalance(GType g) {
    GlobalGraph gg = global_graph(g);
    std::size_t n = gg.nodes.size();
    std::vector<std::vector<int>> pred(n);
    for (std::size_t i = 0; i < n; ++i)
        for (int j : gg.succ[i]) pred[static_cast<std::size_t>(j)].push_back(static_cast<int>(i));

    for (const auto& p : participants(g)) {
        // Nodes not involving p from which a p-involving node is reachable.
        std::vector<char> reach(n, 0);
        std::vector<int> stack;
        for (std::size_t i = 0; i < n; ++i)
            if (gg.heads[i]->involves(p)) stack.push_back(static_cast<int>(i));
        std::vector<char> involving(n, 0);
        for (int i : stack) involving[static_cast<std::size_t>(i)] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int u : pred[static_cast<std::size_t>(v)]) {
                auto uu = static_cast<std::size_t>(u);
                if (involving[uu] || reach[uu]) continue;
                reach[uu] = 1;
                stack.push_back(u);
            }
        }
        // Cycle detection in the subgraph induced by those nodes.
        std::vector<char> colour(n, 0);  // 0 white, 1 on stack, 2 done
        std::function<int(int)> dfs = [&](int v) -> int {
            auto uv = static_cast<std::size_t>(v);
            colour[uv] = 1;
            for (int w : gg.succ[uv]) {
                auto uw = static_cast<std::size_t>(w);
                if (!reach[uw]) continue;
                if (colour[uw] == 1) return w;
                if (colour[uw] == 0) {
                    int c = dfs(w);
                    if (c >= 0) return c;
                }
            }
            colour[uv] = 2;
            return -1;
        };
        for (std::size_t i = 0; i < n; ++i) {
            if (!reach[i] || colour[i]) continue;
            int c = dfs(static_cast<int>(i));
            if (c >= 0) return Imbalance{p, gg.nodes[static_cast<std::size_t>(c)]};
        }
    }
    return std::nullopt;
}

bool is_balanced(GType g) { return !find_imbalance(g).has_value(); }

namespace {

std::string dot_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '"' || c == '\\') o += '\\';
        o += c;
    }
    return o;
}

}  // namespace

std::string to_dot(const TypeGraph& g, const std::string& name) {
    std::ostringstream os;
    os << "digraph \"" << dot_escape(name) << "\" {\n";
    bool skip = false;
    for (std::size_t n = 0; n < g.out.size(); ++n) {
        std::string label = n < g.labels.size() && !g.labels[n].empty() ? g.labels[n] : std::to_string(n);
        os << "  n" << n << " [label=\"" << dot_escape(label) << "\"" << (static_cast<int>(n) == g.init ? ", shape=box" : "")
           << "];\n";
        for (const auto& e : g.out[n]) {
            skip |= e.to == TypeGraph::kSkip;
            os << "  n" << n << " -> " << (e.to == TypeGraph::kSkip ? std::string("skip") : "n" + std::to_string(e.to))
               << " [label=\"" << dot_escape(print(e.act)) << "\"];\n";
        }
    }
    if (skip) os << "  skip [label=\"Skip\", shape=point];\n";
    os << "}\n";
    return os.str();
}

std::string to_dot(const GlobalGraph& g, const std::string& name) {
    std::ostringstream os;
    os << "digraph \"" << dot_escape(name) << "\" {\n";
    for (std::size_t n = 0; n < g.nodes.size(); ++n) {
        os << "  n" << n << " [label=\"" << dot_escape(print(g.nodes[n])) << "\"" << (n == 0 ? ", shape=box" : "")
           << "];\n";
        for (int w : g.succ[n]) os << "  n" << n << " -> n" << w << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace mpst
