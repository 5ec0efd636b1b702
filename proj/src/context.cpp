#include "mpst/context.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace mpst {

std::string print(const CtxLabel& l) {
    switch (l.kind) {
    case CtxLabelKind::In: return l.p + l.q + "?" + to_string(l.sort);
    case CtxLabelKind::Out: return l.p + l.q + "!" + to_string(l.sort);
    case CtxLabelKind::Bra: return l.p + l.q + "&" + l.label;
    case CtxLabelKind::Sel: return l.p + l.q + "+" + l.label;
    case CtxLabelKind::Comm: return l.p + l.q;
    case CtxLabelKind::Choice: return l.p + l.q + ":" + l.label;
    }
    return "?";
}

std::string print(const Barb& b) {
    const char* k = b.kind == BarbKind::Out ? "!" : b.kind == BarbKind::In ? "?" : b.kind == BarbKind::Sel ? "+" : "&";
    return b.p + b.q + k;
}

std::string to_string(Property p) {
    switch (p) {
    case Property::Safety: return "safety";
    case Property::DeadlockFree: return "deadlock-freedom";
    case Property::Live: return "liveness";
    }
    return "?";
}

namespace {

using Heads = std::vector<const std::vector<TypeGraph::Edge>*>;

struct Sync {
    CtxLabel label;
    std::size_t i, ei, j, ej;  // participant and edge index on each side
};

std::size_t find_participant(const std::vector<std::string>& ps, const std::string& q) {
    auto it = std::lower_bound(ps.begin(), ps.end(), q);
    return it != ps.end() && *it == q ? static_cast<std::size_t>(it - ps.begin()) : ps.size();
}

std::vector<Sync> syncs(const std::vector<std::string>& ps, const Heads& h) {
    std::vector<Sync> out;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const auto& es = *h[i];
        for (std::size_t ei = 0; ei < es.size(); ++ei) {
            const Action& a = es[ei].act;
            if (a.kind != ActKind::Out && a.kind != ActKind::Sel) continue;
            std::size_t j = find_participant(ps, a.peer);
            if (j == ps.size()) continue;
            const auto& fs = *h[j];
            for (std::size_t ej = 0; ej < fs.size(); ++ej) {
                const Action& b = fs[ej].act;
                if (b.peer != ps[i]) continue;
                if (a.kind == ActKind::Out && b.kind == ActKind::In && b.sort == a.sort)
                    out.push_back({{CtxLabelKind::Comm, ps[i], a.peer, a.sort, {}}, i, ei, j, ej});
                if (a.kind == ActKind::Sel && b.kind == ActKind::Bra && b.label == a.label)
                    out.push_back({{CtxLabelKind::Choice, ps[i], a.peer, {}, a.label}, i, ei, j, ej});
            }
        }
    }
    return out;
}

std::set<Barb> heads_barbs(const std::vector<std::string>& ps, const Heads& h) {
    std::set<Barb> out;
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (const auto& e : *h[i]) {
            switch (e.act.kind) {
            case ActKind::Out: out.insert({BarbKind::Out, ps[i], e.act.peer}); break;
            case ActKind::In: out.insert({BarbKind::In, ps[i], e.act.peer}); break;
            case ActKind::Sel: out.insert({BarbKind::Sel, ps[i], e.act.peer}); break;
            case ActKind::Bra: out.insert({BarbKind::Bra, ps[i], e.act.peer}); break;
            case ActKind::End: break;
            }
        }
    return out;
}

bool heads_safe(const std::vector<std::string>& ps, const Heads& h) {
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (const auto& e : *h[i]) {
            const Action& a = e.act;
            if (a.kind != ActKind::Out && a.kind != ActKind::Sel) continue;
            std::size_t j = find_participant(ps, a.peer);
            if (j == ps.size()) continue;
            bool partner = false, match = false;
            for (const auto& f : *h[j]) {
                const Action& b = f.act;
                if (b.peer != ps[i]) continue;
                if (a.kind == ActKind::Out && b.kind == ActKind::In) {
                    partner = true;
                    match = match || b.sort == a.sort;
                }
                if (a.kind == ActKind::Sel && b.kind == ActKind::Bra) {
                    partner = true;
                    match = match || b.label == a.label;
                }
            }
            if (partner && !match) return false;
        }
    return true;
}

// Head actions of a single type, with their continuations.
struct TypeHeads {
    std::vector<TypeGraph::Edge> edges;
    std::vector<LType> conts;
};

TypeHeads type_heads(LType t) {
    TypeHeads h;
    LType u = unfold(t);
    switch (u->kind) {
    case LKind::End: h.edges.push_back({Action::end(), TypeGraph::kSkip}); h.conts.push_back(nullptr); break;
    case LKind::Out:
    case LKind::In:
        h.edges.push_back({u->kind == LKind::Out ? Action::out(u->peer, u->sort) : Action::in(u->peer, u->sort), 0});
        h.conts.push_back(u->cont);
        break;
    case LKind::Sel:
    case LKind::Bra:
        for (const auto& b : u->branches) {
            h.edges.push_back({u->kind == LKind::Sel ? Action::sel(u->peer, b.label) : Action::bra(u->peer, b.label), 0});
            h.conts.push_back(b.cont);
        }
        break;
    default: throw Error("context type is not closed: " + print(t));
    }
    return h;
}

struct CtxHeads {
    std::vector<std::string> ps;
    std::vector<TypeHeads> th;
    Heads heads;
};

CtxHeads ctx_heads(const TypingContext& ctx) {
    CtxHeads c;
    for (const auto& [p, t] : ctx) {
        c.ps.push_back(p);
        c.th.push_back(type_heads(t));
    }
    for (const auto& t : c.th) c.heads.push_back(&t.edges);
    return c;
}

CtxLabel single_label(const std::string& p, const Action& a) {
    switch (a.kind) {
    case ActKind::In: return {CtxLabelKind::In, p, a.peer, a.sort, {}};
    case ActKind::Out: return {CtxLabelKind::Out, p, a.peer, a.sort, {}};
    case ActKind::Sel: return {CtxLabelKind::Sel, p, a.peer, {}, a.label};
    case ActKind::Bra: return {CtxLabelKind::Bra, p, a.peer, {}, a.label};
    case ActKind::End: break;
    }
    throw Error("end has no action");
}

}  // namespace

std::vector<std::pair<CtxLabel, TypingContext>> ctx_step(const TypingContext& ctx) {
    CtxHeads c = ctx_heads(ctx);
    std::vector<std::pair<CtxLabel, TypingContext>> out;
    for (std::size_t i = 0; i < c.ps.size(); ++i)
        for (std::size_t e = 0; e < c.th[i].edges.size(); ++e) {
            const Action& a = c.th[i].edges[e].act;
            if (a.kind == ActKind::End) continue;
            TypingContext next = ctx;
            next[i].second = c.th[i].conts[e];
            out.push_back({single_label(c.ps[i], a), std::move(next)});
        }
    for (const Sync& s : syncs(c.ps, c.heads)) {
        TypingContext next = ctx;
        next[s.i].second = c.th[s.i].conts[s.ei];
        next[s.j].second = c.th[s.j].conts[s.ej];
        out.push_back({s.label, std::move(next)});
    }
    return out;
}

std::set<Barb> barbs(const TypingContext& ctx) {
    CtxHeads c = ctx_heads(ctx);
    return heads_barbs(c.ps, c.heads);
}

std::set<Barb> observations(const CtxLabel& l) {
    if (l.kind == CtxLabelKind::Comm) return {{BarbKind::Out, l.p, l.q}, {BarbKind::In, l.q, l.p}};
    if (l.kind == CtxLabelKind::Choice) return {{BarbKind::Sel, l.p, l.q}, {BarbKind::Bra, l.q, l.p}};
    return {};
}

bool is_safe_state(const TypingContext& ctx) {
    CtxHeads c = ctx_heads(ctx);
    return heads_safe(c.ps, c.heads);
}

std::size_t ContextGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& s : succ) n += s.size();
    return n;
}

TypingContext ContextGraph::context(int state) const {
    TypingContext c;
    const auto& s = states[static_cast<std::size_t>(state)];
    for (std::size_t i = 0; i < participants.size(); ++i)
        c.emplace_back(participants[i], graphs[i].types[static_cast<std::size_t>(s[i])]);
    return c;
}

const std::vector<TypeGraph::Edge>& ContextGraph::actions(int state, std::size_t i) const {
    return graphs[i].out[static_cast<std::size_t>(states[static_cast<std::size_t>(state)][i])];
}

bool ContextGraph::all_end(int state) const {
    for (std::size_t i = 0; i < participants.size(); ++i) {
        const auto& es = actions(state, i);
        if (es.size() != 1 || es[0].act.kind != ActKind::End) return false;
    }
    return true;
}

namespace {
Heads graph_heads(const ContextGraph& g, int state) {
    Heads h;
    for (std::size_t i = 0; i < g.participants.size(); ++i) h.push_back(&g.actions(state, i));
    return h;
}
}  // namespace

std::set<Barb> ContextGraph::barbs(int state) const { return heads_barbs(participants, graph_heads(*this, state)); }

bool ContextGraph::safe_state(int state) const { return heads_safe(participants, graph_heads(*this, state)); }

ContextGraph reachable_graph(const TypingContext& ctx, std::size_t max_states) {
    ContextGraph g;
    std::vector<int> init;
    for (const auto& [p, t] : ctx) {
        if (!t->closed()) throw Error("type of " + p + " is not closed");
        g.participants.push_back(p);
        g.graphs.push_back(local_graph(t));
        init.push_back(g.graphs.back().init);
    }
    std::deque<int> queue;
    auto node = [&](std::vector<int> s) {
        auto it = g.index.find(s);
        if (it != g.index.end()) return it->second;
        if (g.states.size() >= max_states)
            throw BudgetExceeded("context graph exceeds " + std::to_string(max_states) + " states");
        int id = static_cast<int>(g.states.size());
        g.index.emplace(s, id);
        g.states.push_back(std::move(s));
        g.succ.emplace_back();
        queue.push_back(id);
        return id;
    };
    node(init);
    while (!queue.empty()) {
        int id = queue.front();
        queue.pop_front();
        Heads h = graph_heads(g, id);
        std::vector<ContextGraph::Edge> es;
        for (const Sync& s : syncs(g.participants, h)) {
            std::vector<int> next = g.states[static_cast<std::size_t>(id)];
            next[s.i] = (*h[s.i])[s.ei].to;
            next[s.j] = (*h[s.j])[s.ej].to;
            es.push_back({s.label, node(std::move(next))});
        }
        g.succ[static_cast<std::size_t>(id)] = std::move(es);
    }
    return g;
}

namespace {

// Shortest path by BFS from src to any state satisfying goal, over edges
// accepted by keep. Returns the state sequence and labels, or nothing.
struct Path {
    std::vector<int> states;
    std::vector<CtxLabel> labels;
};

std::optional<Path> bfs_path(const ContextGraph& g, int src, const std::function<bool(int)>& goal,
                             const std::function<bool(int, const ContextGraph::Edge&)>& keep) {
    std::vector<int> parent(g.states.size(), -2);
    std::vector<const ContextGraph::Edge*> via(g.states.size(), nullptr);
    std::deque<int> queue{src};
    parent[static_cast<std::size_t>(src)] = -1;
    while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        if (goal(u)) {
            Path p;
            for (int v = u; v != -1; v = parent[static_cast<std::size_t>(v)]) {
                p.states.push_back(v);
                if (via[static_cast<std::size_t>(v)]) p.labels.push_back(via[static_cast<std::size_t>(v)]->label);
            }
            std::reverse(p.states.begin(), p.states.end());
            std::reverse(p.labels.begin(), p.labels.end());
            return p;
        }
        for (const auto& e : g.succ[static_cast<std::size_t>(u)]) {
            if (!keep(u, e) || parent[static_cast<std::size_t>(e.to)] != -2) continue;
            parent[static_cast<std::size_t>(e.to)] = u;
            via[static_cast<std::size_t>(e.to)] = &e;
            queue.push_back(e.to);
        }
    }
    return std::nullopt;
}

bool any_edge(int, const ContextGraph::Edge&) { return true; }

void append(Path& a, const Path& b) {
    // b starts where a ends.
    a.states.insert(a.states.end(), b.states.begin() + 1, b.states.end());
    a.labels.insert(a.labels.end(), b.labels.begin(), b.labels.end());
}

Trace to_trace(const ContextGraph& g, const Path& p, int cycle_start = -1) {
    Trace t;
    for (int s : p.states) t.states.push_back(g.context(s));
    t.labels = p.labels;
    t.cycle_start = cycle_start;
    return t;
}

Verdict violation_search(const ContextGraph& g, Property prop, const std::function<bool(int)>& bad, const std::string& why) {
    Verdict v{prop};
    v.states = g.states.size();
    v.edges = g.edge_count();
    auto p = bfs_path(g, 0, bad, any_edge);
    v.holds = !p;
    if (p) {
        v.trace = to_trace(g, *p);
        v.reason = why;
    }
    return v;
}

}  // namespace

Verdict check_safety(const TypingContext& ctx, std::size_t max_states) {
    ContextGraph g = reachable_graph(ctx, max_states);
    return violation_search(g, Property::Safety, [&](int s) { return !g.safe_state(s); },
                            "reachable state is not safe");
}

Verdict check_deadlock_freedom(const TypingContext& ctx, std::size_t max_states) {
    ContextGraph g = reachable_graph(ctx, max_states);
    return violation_search(g, Property::DeadlockFree, [&](int s) { return g.stuck(s) && !g.all_end(s); },
                            "reachable stuck state has a participant that has not ended");
}

namespace {

// Synchronized reductions with the selected label abstracted away.
struct PairKeys {
    std::map<std::tuple<bool, std::string, std::string>, int> ids;
    int key(const CtxLabel& l) {
        auto k = std::make_tuple(l.kind == CtxLabelKind::Choice, l.p, l.q);
        return ids.emplace(k, static_cast<int>(ids.size())).first->second;
    }
};

struct LiveData {
    std::vector<std::set<int>> enabled;             // per state
    std::vector<std::vector<int>> edge_keys;        // per state, per edge
    std::vector<std::set<Barb>> barbs;              // per state
    std::vector<std::vector<std::set<Barb>>> obs;   // per state, per edge
    std::set<Barb> all_barbs;
    PairKeys keys;

    explicit LiveData(const ContextGraph& g) {
        std::size_t n = g.states.size();
        enabled.resize(n);
        edge_keys.resize(n);
        barbs.resize(n);
        obs.resize(n);
        for (std::size_t s = 0; s < n; ++s) {
            barbs[s] = g.barbs(static_cast<int>(s));
            all_barbs.insert(barbs[s].begin(), barbs[s].end());
            for (const auto& e : g.succ[s]) {
                int k = keys.key(e.label);
                edge_keys[s].push_back(k);
                enabled[s].insert(k);
                obs[s].push_back(observations(e.label));
            }
        }
    }
};

// Tarjan's algorithm without recursion over the alive states, using the kept
// edges. comp[s] = component id or -1 for dead states.
std::vector<int> sccs(const ContextGraph& g, const std::vector<char>& alive,
                      const std::function<bool(int, std::size_t)>& keep) {
    std::size_t n = g.states.size();
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on(n, 0);
    std::vector<int> stack;
    int counter = 0, comps = 0;
    struct Frame {
        int v;
        std::size_t next;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (!alive[root] || index[root] != -1) continue;
        std::vector<Frame> call{{static_cast<int>(root), 0}};
        index[root] = low[root] = counter++;
        stack.push_back(static_cast<int>(root));
        on[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            auto v = static_cast<std::size_t>(f.v);
            const auto& es = g.succ[v];
            if (f.next < es.size()) {
                std::size_t ei = f.next++;
                auto w = static_cast<std::size_t>(es[ei].to);
                if (!alive[w] || !keep(f.v, ei)) continue;
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(static_cast<int>(w));
                    on[w] = 1;
                    call.push_back({static_cast<int>(w), 0});
                } else if (on[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                for (;;) {
                    auto w = static_cast<std::size_t>(stack.back());
                    stack.pop_back();
                    on[w] = 0;
                    comp[w] = comps;
                    if (w == v) break;
                }
                ++comps;
            }
            call.pop_back();
            if (!call.empty()) {
                auto u = static_cast<std::size_t>(call.back().v);
                low[u] = std::min(low[u], low[v]);
            }
        }
    }
    return comp;
}

// States lying on a cycle of kept edges whose taken pairs cover every pair
// enabled on it. comp receives the final component ids.
std::vector<char> fair_cycle_states(const ContextGraph& g, const LiveData& d,
                                    const std::function<bool(int, std::size_t)>& keep, std::vector<int>& comp) {
    std::size_t n = g.states.size();
    std::vector<char> alive(n, 1);
    for (;;) {
        comp = sccs(g, alive, keep);
        std::map<int, std::set<int>> taken;
        std::map<int, bool> cyclic;
        for (std::size_t s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            for (std::size_t ei = 0; ei < g.succ[s].size(); ++ei) {
                auto t = static_cast<std::size_t>(g.succ[s][ei].to);
                if (alive[t] && keep(static_cast<int>(s), ei) && comp[t] == comp[s]) {
                    taken[comp[s]].insert(d.edge_keys[s][ei]);
                    cyclic[comp[s]] = true;
                }
            }
        }
        bool changed = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (!alive[s]) continue;
            const auto& tk = taken[comp[s]];
            bool covered = cyclic[comp[s]] &&
                           std::includes(tk.begin(), tk.end(), d.enabled[s].begin(), d.enabled[s].end());
            if (!covered) {
                alive[s] = 0;
                changed = true;
            }
        }
        if (!changed) return alive;
    }
}

// A closed walk from start through every kept edge inside its component.
Path component_tour(const ContextGraph& g, int start, const std::vector<char>& alive, const std::vector<int>& comp,
                    const std::function<bool(int, std::size_t)>& keep) {
    int c = comp[static_cast<std::size_t>(start)];
    auto inside = [&](int u, const ContextGraph::Edge& e) {
        auto ei = static_cast<std::size_t>(&e - g.succ[static_cast<std::size_t>(u)].data());
        return alive[static_cast<std::size_t>(e.to)] && comp[static_cast<std::size_t>(e.to)] == c && keep(u, ei);
    };
    Path tour{{start}, {}};
    for (std::size_t s = 0; s < g.states.size(); ++s) {
        if (!alive[s] || comp[s] != c) continue;
        for (std::size_t ei = 0; ei < g.succ[s].size(); ++ei) {
            const auto& e = g.succ[s][ei];
            if (!inside(static_cast<int>(s), e)) continue;
            auto to_s = bfs_path(g, tour.states.back(), [&](int v) { return v == static_cast<int>(s); }, inside);
            append(tour, *to_s);
            tour.states.push_back(e.to);
            tour.labels.push_back(e.label);
        }
    }
    auto home = bfs_path(g, tour.states.back(), [&](int v) { return v == start; }, inside);
    append(tour, *home);
    return tour;
}

Verdict live_verdict(const ContextGraph& g, bool holds) {
    Verdict v{Property::Live};
    v.holds = holds;
    v.states = g.states.size();
    v.edges = g.edge_count();
    return v;
}

Verdict liveness_scc(const ContextGraph& g) {
    LiveData d(g);
    for (const Barb& a : d.all_barbs) {
        auto keep = [&](int s, std::size_t ei) { return !d.obs[static_cast<std::size_t>(s)][ei].count(a); };
        auto keep_edge = [&](int s, const ContextGraph::Edge& e) {
            return keep(s, static_cast<std::size_t>(&e - g.succ[static_cast<std::size_t>(s)].data()));
        };
        std::vector<int> comp;
        std::vector<char> fair = fair_cycle_states(g, d, keep, comp);
        auto bad = [&](int s) { return g.stuck(s) || fair[static_cast<std::size_t>(s)]; };
        // Backward reachability to a bad state along kept edges.
        std::size_t n = g.states.size();
        std::vector<std::vector<int>> pred(n);
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t ei = 0; ei < g.succ[s].size(); ++ei)
                if (keep(static_cast<int>(s), ei)) pred[static_cast<std::size_t>(g.succ[s][ei].to)].push_back(static_cast<int>(s));
        std::vector<char> reach(n, 0);
        std::vector<int> todo;
        for (std::size_t s = 0; s < n; ++s)
            if (bad(static_cast<int>(s))) reach[s] = 1, todo.push_back(static_cast<int>(s));
        while (!todo.empty()) {
            int s = todo.back();
            todo.pop_back();
            for (int p : pred[static_cast<std::size_t>(s)])
                if (!reach[static_cast<std::size_t>(p)]) reach[static_cast<std::size_t>(p)] = 1, todo.push_back(p);
        }
        auto witness = [&](int s) { return reach[static_cast<std::size_t>(s)] && d.barbs[static_cast<std::size_t>(s)].count(a); };
        auto stem = bfs_path(g, 0, witness, any_edge);
        if (!stem) continue;
        Verdict v = live_verdict(g, false);
        Path path = *stem;
        auto tail = bfs_path(g, path.states.back(), bad, keep_edge);
        append(path, *tail);
        int end = path.states.back();
        int cycle_start = -1;
        if (!g.stuck(end)) {
            cycle_start = static_cast<int>(path.states.size()) - 1;
            append(path, component_tour(g, end, fair, comp, keep));
        }
        v.trace = to_trace(g, path, cycle_start);
        v.reason = "barb " + print(a) + " offered at step " + std::to_string(stem->states.size() - 1) +
                   " is never observed on a fair continuation";
        return v;
    }
    return live_verdict(g, true);
}

// Second backend: for each barb and each start state, searches closed walks
// over (state, taken pairs, enabled pairs) directly.
Verdict liveness_paths(const ContextGraph& g, std::uint64_t max_configs) {
    LiveData d(g);
    if (d.keys.ids.size() > 64) throw BudgetExceeded("too many synchronizing pairs for the path backend");
    std::size_t n = g.states.size();
    std::vector<std::uint64_t> en(n, 0);
    for (std::size_t s = 0; s < n; ++s)
        for (int k : d.enabled[s]) en[s] |= 1ULL << k;
    std::uint64_t work = 0;
    for (const Barb& a : d.all_barbs) {
        auto keep = [&](std::size_t s, std::size_t ei) { return !d.obs[s][ei].count(a); };
        // States reachable without observing a.
        for (std::size_t k = 0; k < n; ++k) {
            if (!d.barbs[k].count(a)) continue;
            std::vector<char> seen(n, 0);
            std::vector<std::size_t> todo{k};
            seen[k] = 1;
            bool bad = false;
            while (!todo.empty() && !bad) {
                std::size_t s = todo.back();
                todo.pop_back();
                if (g.stuck(static_cast<int>(s))) bad = true;
                for (std::size_t ei = 0; ei < g.succ[s].size(); ++ei) {
                    auto t = static_cast<std::size_t>(g.succ[s][ei].to);
                    if (keep(s, ei) && !seen[t]) seen[t] = 1, todo.push_back(t);
                }
            }
            for (std::size_t c = 0; c < n && !bad; ++c) {
                if (!seen[c]) continue;
                using Config = std::tuple<std::size_t, std::uint64_t, std::uint64_t>;
                std::set<Config> visited;
                std::vector<Config> stack{{c, 0, en[c]}};
                while (!stack.empty() && !bad) {
                    auto [s, taken, enabled] = stack.back();
                    stack.pop_back();
                    if (!visited.insert({s, taken, enabled}).second) continue;
                    if (++work > max_configs) throw BudgetExceeded("liveness path search exceeds its budget");
                    for (std::size_t ei = 0; ei < g.succ[s].size(); ++ei) {
                        if (!keep(s, ei)) continue;
                        auto t = static_cast<std::size_t>(g.succ[s][ei].to);
                        std::uint64_t tk = taken | 1ULL << d.edge_keys[s][ei];
                        std::uint64_t e = enabled | en[t];
                        if (t == c && (e & ~tk) == 0) {
                            bad = true;
                            break;
                        }
                        stack.push_back({t, tk, e});
                    }
                }
            }
            if (bad) {
                Verdict v = live_verdict(g, false);
                v.reason = "barb " + print(a) + " is never observed on a fair continuation";
                return v;
            }
        }
    }
    return live_verdict(g, true);
}

}  // namespace

Verdict check_liveness(const TypingContext& ctx, std::size_t max_states, LivenessBackend backend) {
    ContextGraph g = reachable_graph(ctx, max_states);
    return backend == LivenessBackend::Scc ? liveness_scc(g) : liveness_paths(g, 50'000'000);
}

Verdict check(const TypingContext& ctx, Property p, std::size_t max_states) {
    switch (p) {
    case Property::Safety: return check_safety(ctx, max_states);
    case Property::DeadlockFree: return check_deadlock_freedom(ctx, max_states);
    case Property::Live: return check_liveness(ctx, max_states);
    }
    throw Error("unknown property");
}

std::uint64_t counterwitness_bound(const TypingContext& ctx) {
    std::uint64_t n = 0, prod = 1;
    for (const auto& [p, t] : ctx) {
        n += size(t);
        prod *= size(t);
    }
    return (2 * n + 2) * prod;
}

namespace {

struct Brute {
    const ContextGraph& g;
    LiveData d;
    std::size_t bound;
    std::uint64_t max_paths;
    std::uint64_t paths = 0;
    std::vector<int> states;           // current path
    std::vector<std::size_t> edges;    // edge index taken from states[i]

    Brute(const ContextGraph& g, std::size_t bound, std::uint64_t max_paths)
        : g(g), d(g), bound(bound), max_paths(max_paths) {}

    std::set<Barb> obs_of(std::size_t i) const {
        return d.obs[static_cast<std::size_t>(states[i])][edges[i]];
    }
    int key_of(std::size_t i) const { return d.edge_keys[static_cast<std::size_t>(states[i])][edges[i]]; }
    const std::set<int>& enabled_at(std::size_t i) const { return d.enabled[static_cast<std::size_t>(states[i])]; }

    // Finite path states[0..n-1] with edges[0..n-2].
    bool finite_counterwitness() const {
        std::size_t n = states.size();
        // Every k: labels taken from k on equal the pairs enabled from k on.
        std::set<int> taken, enabled;
        for (std::size_t k = n; k-- > 0;) {
            if (k + 1 < n) taken.insert(key_of(k));
            enabled.insert(enabled_at(k).begin(), enabled_at(k).end());
            if (taken != enabled) return false;
        }
        return unobserved_barb(false, 0);
    }

    // Lasso: stem states[0..i-1], cycle states[i..n-2] with states[n-1] = states[i].
    bool lasso_counterwitness(std::size_t i) const {
        std::size_t n = states.size();
        std::set<int> cyc_taken, cyc_enabled;
        for (std::size_t j = i; j + 1 < n; ++j) {
            cyc_taken.insert(key_of(j));
            cyc_enabled.insert(enabled_at(j).begin(), enabled_at(j).end());
        }
        std::set<int> taken = cyc_taken, enabled = cyc_enabled;
        if (taken != enabled) return false;
        for (std::size_t k = i; k-- > 0;) {
            taken.insert(key_of(k));
            enabled.insert(enabled_at(k).begin(), enabled_at(k).end());
            if (taken != enabled) return false;
        }
        return unobserved_barb(true, i);
    }

    // Some position whose barb is never observed afterwards. For a lasso the
    // cycle edges from i on repeat forever.
    bool unobserved_barb(bool lasso, std::size_t i) const {
        std::size_t n = states.size();
        std::set<Barb> future;
        if (lasso)
            for (std::size_t j = i; j + 1 < n; ++j) {
                auto o = obs_of(j);
                future.insert(o.begin(), o.end());
            }
        for (std::size_t k = lasso ? n - 1 : n; k-- > 0;) {
            if (k + 1 < n) {
                auto o = obs_of(k);
                future.insert(o.begin(), o.end());
            }
            for (const Barb& b : d.barbs[static_cast<std::size_t>(states[k])])
                if (!future.count(b)) return true;
        }
        return false;
    }

    bool search() {
        if (++paths > max_paths) throw BudgetExceeded("brute-force liveness exceeds its path budget");
        int s = states.back();
        if (g.stuck(s)) {
            if (finite_counterwitness()) return true;
        }
        for (std::size_t i = 0; i + 1 < states.size(); ++i)
            if (states[i] == s && lasso_counterwitness(i)) return true;
        if (states.size() > bound) return false;
        for (std::size_t ei = 0; ei < g.succ[static_cast<std::size_t>(s)].size(); ++ei) {
            edges.push_back(ei);
            states.push_back(g.succ[static_cast<std::size_t>(s)][ei].to);
            bool found = search();
            states.pop_back();
            edges.pop_back();
            if (found) return true;
        }
        return false;
    }
};

}  // namespace

bool brute_force_liveness(const TypingContext& ctx, std::size_t bound, std::uint64_t max_paths) {
    ContextGraph g = reachable_graph(ctx);
    Brute b(g, bound, max_paths);
    b.states.push_back(0);
    return !b.search();
}

bool replays(const TypingContext& init, const Trace& t) {
    if (t.states.empty() || t.states[0] != init || t.labels.size() + 1 != t.states.size()) return false;
    for (std::size_t i = 0; i < t.labels.size(); ++i) {
        bool ok = false;
        for (const auto& [l, next] : ctx_step(t.states[i]))
            if (l == t.labels[i] && next == t.states[i + 1]) ok = true;
        if (!ok) return false;
    }
    if (t.cycle_start >= 0 && t.states.back() != t.states[static_cast<std::size_t>(t.cycle_start)]) return false;
    return true;
}

}  // namespace mpst
