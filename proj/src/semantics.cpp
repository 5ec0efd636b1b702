#include "mpst/semantics.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

namespace mpst {

std::string print(const Value& v) {
    switch (v.kind) {
    case SortKind::Bool: return v.truth ? "true" : "false";
    case SortKind::Nat: return std::to_string(v.number);
    case SortKind::Int: return v.number < 0 ? std::to_string(v.number) : "+" + std::to_string(v.number);
    case SortKind::Var: break;
    }
    return "?";
}

ExprP to_expr(const Value& v) {
    switch (v.kind) {
    case SortKind::Bool: return v.truth ? ex::tt() : ex::ff();
    case SortKind::Nat: return ex::nat(v.number);
    default: return ex::integer(v.number);
    }
}

namespace {

bool numeric(const Value& v) { return v.kind == SortKind::Nat || v.kind == SortKind::Int; }

std::optional<Value> add(const std::optional<Value>& a, const std::optional<Value>& b) {
    if (!a || !b || !numeric(*a) || !numeric(*b)) return std::nullopt;
    std::int64_t n = a->number + b->number;
    return a->kind == SortKind::Nat && b->kind == SortKind::Nat ? Value::nat(n) : Value::integer(n);
}

std::optional<Value> negate(const std::optional<Value>& a) {
    if (!a || !numeric(*a)) return std::nullopt;
    return Value::integer(-a->number);
}

std::optional<Value> lnot(const std::optional<Value>& a) {
    if (!a || a->kind != SortKind::Bool) return std::nullopt;
    return Value::boolean(!a->truth);
}

// Either operand being true suffices, even if the other is stuck.
std::optional<Value> lor(const std::optional<Value>& a, const std::optional<Value>& b) {
    auto is = [](const std::optional<Value>& v, bool t) { return v && v->kind == SortKind::Bool && v->truth == t; };
    if (is(a, true) || is(b, true)) return Value::boolean(true);
    if (is(a, false) && is(b, false)) return Value::boolean(false);
    return std::nullopt;
}

template <class Pick>
std::optional<Value> eval_with(const ExprP& e, const ValueEnv& env, Pick& pick) {
    switch (e->kind) {
    case EKind::True: return Value::boolean(true);
    case EKind::False: return Value::boolean(false);
    case EKind::Nat: return Value::nat(e->value);
    case EKind::Int: return Value::integer(e->value);
    case EKind::Var: {
        auto it = env.find(e->name);
        if (it == env.end()) return std::nullopt;
        return it->second;
    }
    case EKind::Or: return lor(eval_with(e->lhs, env, pick), eval_with(e->rhs, env, pick));
    case EKind::Not: return lnot(eval_with(e->lhs, env, pick));
    case EKind::Add: return add(eval_with(e->lhs, env, pick), eval_with(e->rhs, env, pick));
    case EKind::Neg: return negate(eval_with(e->lhs, env, pick));
    case EKind::NonDet: return pick() ? eval_with(e->lhs, env, pick) : eval_with(e->rhs, env, pick);
    }
    return std::nullopt;
}

using Outcomes = std::vector<std::optional<Value>>;

void insert_unique(Outcomes& out, const std::optional<Value>& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

Outcomes all_of(const ExprP& e, const ValueEnv& env) {
    auto unary = [&](auto f) {
        Outcomes out;
        for (const auto& a : all_of(e->lhs, env)) insert_unique(out, f(a));
        return out;
    };
    auto binary = [&](auto f) {
        Outcomes out, as = all_of(e->lhs, env), bs = all_of(e->rhs, env);
        for (const auto& a : as)
            for (const auto& b : bs) insert_unique(out, f(a, b));
        return out;
    };
    switch (e->kind) {
    case EKind::Or: return binary(lor);
    case EKind::Add: return binary(add);
    case EKind::Not: return unary(lnot);
    case EKind::Neg: return unary(negate);
    case EKind::NonDet: {
        Outcomes out = all_of(e->lhs, env);
        for (const auto& b : all_of(e->rhs, env)) insert_unique(out, b);
        return out;
    }
    default: {
        auto never = [] { return false; };
        return {eval_with(e, env, never)};
    }
    }
}

ExprP subst_expr(const ExprP& e, const std::string& x, const Value& v) {
    switch (e->kind) {
    case EKind::Var: return e->name == x ? to_expr(v) : e;
    case EKind::Or: return ex::lor(subst_expr(e->lhs, x, v), subst_expr(e->rhs, x, v));
    case EKind::Add: return ex::add(subst_expr(e->lhs, x, v), subst_expr(e->rhs, x, v));
    case EKind::NonDet: return ex::nondet(subst_expr(e->lhs, x, v), subst_expr(e->rhs, x, v));
    case EKind::Not: return ex::lnot(subst_expr(e->lhs, x, v));
    case EKind::Neg: return ex::neg(subst_expr(e->lhs, x, v));
    default: return e;
    }
}

}  // namespace

std::optional<Value> eval_expr(const ExprP& e, const ValueEnv& env, Rng& rng) {
    auto pick = [&] { return std::bernoulli_distribution(0.5)(rng); };
    return eval_with(e, env, pick);
}

std::vector<std::optional<Value>> eval_all(const ExprP& e, const ValueEnv& env) { return all_of(e, env); }

Proc substitute_value(const Proc& p, const std::string& x, const Value& v) {
    switch (p->kind) {
    case PKind::Inact:
    case PKind::Var: return p;
    case PKind::Send: return pr::send(p->peer, subst_expr(p->expr, x, v), substitute_value(p->cont, x, v));
    case PKind::Recv: return p->name == x ? p : pr::recv(p->peer, p->name, substitute_value(p->cont, x, v));
    case PKind::Sel: return pr::sel(p->peer, p->label, substitute_value(p->cont, x, v));
    case PKind::Bra: {
        std::vector<PBranch> bs;
        for (const auto& b : p->branches) bs.push_back({b.label, substitute_value(b.cont, x, v)});
        return pr::bra(p->peer, std::move(bs));
    }
    case PKind::Cond:
        return pr::cond(subst_expr(p->expr, x, v), substitute_value(p->cont, x, v), substitute_value(p->alt, x, v));
    case PKind::Rec: return pr::rec(p->name, substitute_value(p->cont, x, v));
    }
    return p;
}

namespace {

Proc unfold_head(Proc p) {
    while (p->kind == PKind::Rec) p = substitute(p->cont, p->name, p);
    return p;
}

std::size_t find(const Session& s, const std::string& q) {
    auto it = std::lower_bound(s.begin(), s.end(), q, [](const auto& e, const std::string& n) { return e.first < n; });
    return it != s.end() && it->first == q ? static_cast<std::size_t>(it - s.begin()) : s.size();
}

}  // namespace

bool all_inactive(const Session& s) {
    return std::all_of(s.begin(), s.end(), [](const auto& e) { return unfold_head(e.second)->kind == PKind::Inact; });
}

std::vector<SessionStep> session_step(const SessionState& m) {
    std::vector<SessionStep> out;
    if (m.error) return out;
    const Session& s = m.session;
    std::vector<Proc> heads;
    for (const auto& [p, proc] : s) heads.push_back(unfold_head(proc));
    auto with = [&](std::initializer_list<std::pair<std::size_t, Proc>> changes) {
        SessionState n{s, false};
        for (const auto& [i, proc] : changes) n.session[i].second = proc;
        return n;
    };
    SessionState error{{}, true};
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Proc& h = heads[i];
        const std::string& p = s[i].first;
        if (h->kind == PKind::Cond) {
            for (const auto& v : eval_all(h->expr)) {
                if (!v || v->kind != SortKind::Bool)
                    out.push_back({"v-err", p, error});
                else
                    out.push_back({v->truth ? "t-cond" : "f-cond", p, with({{i, v->truth ? h->cont : h->alt}})});
            }
            continue;
        }
        if (h->kind != PKind::Send && h->kind != PKind::Sel) continue;
        std::size_t j = find(s, h->peer);
        if (j == s.size() || j == i) continue;
        const Proc& g = heads[j];
        if (g->peer != p) continue;
        if (h->kind == PKind::Send && g->kind == PKind::Recv) {
            // A stuck payload blocks the communication; it is not an error.
            for (const auto& v : eval_all(h->expr))
                if (v) out.push_back({"r-comm", p, with({{i, h->cont}, {j, substitute_value(g->cont, g->name, *v)}})});
        }
        if (h->kind == PKind::Sel && g->kind == PKind::Bra) {
            auto it = std::find_if(g->branches.begin(), g->branches.end(), [&](const PBranch& b) { return b.label == h->label; });
            if (it == g->branches.end())
                out.push_back({"c-err", p, error});
            else
                out.push_back({"r-bra", p, with({{i, h->cont}, {j, it->cont}})});
        }
    }
    return out;
}

Exploration explore_session(const Session& m, unsigned depth, unsigned runs, std::uint64_t seed, std::size_t max_states) {
    Exploration r;
    struct Node {
        SessionState state;
        int parent;
        std::string rule;
    };
    std::vector<Node> nodes{{{m, false}, -1, ""}};
    std::unordered_map<std::string, int> seen{{print(m), 0}};
    std::vector<unsigned> level{0};
    auto witness = [&](int n) {
        std::vector<std::string> w;
        for (; n > 0; n = nodes[static_cast<std::size_t>(n)].parent) w.push_back(nodes[static_cast<std::size_t>(n)].rule);
        std::reverse(w.begin(), w.end());
        return w;
    };
    auto note_stuck = [&](const Session& s, std::vector<std::string> w) {
        if (r.stuck_nonterminal) return;
        r.stuck_nonterminal = true;
        r.stuck_example = s;
        if (!r.error_reached) r.witness = std::move(w);
    };
    bool truncated = false;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        SessionState here = nodes[k].state;
        unsigned lv = level[k];
        if (here.error) {
            if (!r.error_reached) {
                r.error_reached = true;
                r.witness = witness(static_cast<int>(k));
            }
            continue;
        }
        auto steps = session_step(here);
        if (steps.empty() && !all_inactive(here.session)) note_stuck(here.session, witness(static_cast<int>(k)));
        if (lv == depth) {
            truncated = truncated || !steps.empty();
            continue;
        }
        for (auto& st : steps) {
            ++r.steps;
            std::string key = st.next.error ? "<error>" : print(st.next.session);
            if (seen.count(key)) continue;
            if (nodes.size() >= max_states) throw BudgetExceeded("session exploration exceeds " + std::to_string(max_states) + " states");
            seen.emplace(key, static_cast<int>(nodes.size()));
            nodes.push_back({std::move(st.next), static_cast<int>(k), st.rule + ":" + st.actor});
            level.push_back(lv + 1);
        }
    }
    r.states = nodes.size();
    r.complete = !truncated;
    Rng rng(seed);
    for (unsigned run = 0; run < runs; ++run) {
        SessionState here{m, false};
        std::vector<std::string> trail;
        for (unsigned d = 0; d < depth; ++d) {
            auto steps = session_step(here);
            if (steps.empty()) {
                if (!all_inactive(here.session)) note_stuck(here.session, trail);
                break;
            }
            auto& st = steps[std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng)];
            ++r.steps;
            trail.push_back(st.rule + ":" + st.actor);
            here = st.next;
            if (here.error) {
                if (!r.error_reached) {
                    r.error_reached = true;
                    r.witness = trail;
                }
                break;
            }
        }
    }
    return r;
}

}  // namespace mpst
