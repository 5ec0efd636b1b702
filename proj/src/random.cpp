#include "mpst/random.hpp"

#include <algorithm>

namespace mpst {

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

// Splits total into k positive parts.
std::vector<int> split(Rng& rng, int total, int k) {
    std::vector<int> parts(static_cast<std::size_t>(k), 1);
    for (int extra = total - k; extra > 0; --extra) ++parts[static_cast<std::size_t>(uniform(rng, 0, k - 1))];
    return parts;
}

std::vector<std::string> pick_labels(Rng& rng, const std::vector<std::string>& labels, int k) {
    std::vector<std::string> ls = labels;
    std::shuffle(ls.begin(), ls.end(), rng);
    ls.resize(static_cast<std::size_t>(std::min<int>(k, static_cast<int>(ls.size()))));
    return ls;
}

struct LocalGen {
    Rng& rng;
    const LocalGenOptions& opt;

    // binders: number of enclosing recursion binders; unguarded: how many of the
    // innermost ones have no prefix since binding.
    LType go(int budget, std::uint32_t binders, std::uint32_t unguarded) {
        if (budget <= 1) {
            if (binders > unguarded && coin(rng, 0.6))
                return lt::var(static_cast<std::uint32_t>(uniform(rng, static_cast<int>(unguarded),
                                                                  static_cast<int>(binders) - 1)));
            return lt::end();
        }
        int choice = uniform(rng, 0, 9);
        if (choice <= 2 && budget >= 3 && binders < 3) return lt::rec(go(budget - 1, binders + 1, unguarded + 1));
        if (choice <= 5) {
            const std::string& peer = pick(rng, opt.peers);
            const Sort& s = pick(rng, opt.sorts);
            LType c = go(budget - 1, binders, 0);
            return coin(rng, 0.5) ? lt::out(peer, s, c) : lt::in(peer, s, c);
        }
        int maxk = std::min({opt.max_branches, budget - 1, static_cast<int>(opt.labels.size())});
        int k = uniform(rng, 1, std::max(1, maxk));
        auto labels = pick_labels(rng, opt.labels, k);
        auto parts = split(rng, budget - 1, static_cast<int>(labels.size()));
        std::vector<LBranch> bs;
        for (std::size_t i = 0; i < labels.size(); ++i) bs.push_back({labels[i], go(parts[i], binders, 0)});
        const std::string& peer = pick(rng, opt.peers);
        return coin(rng, 0.5) ? lt::sel(peer, std::move(bs)) : lt::bra(peer, std::move(bs));
    }
};

LType mutate_rec(Rng& rng, LType t, const LocalGenOptions& opt, double p) {
    bool here = coin(rng, p);
    if (here) {
        int what = uniform(rng, 0, 4);
        if (what == 0 && t->closed()) return random_local(rng, std::max<int>(1, static_cast<int>(t->size)), opt);
        if (what == 1 && t->kind == LKind::Rec) return unfold(t);
        if ((what == 2 || what == 3) && t->is_choice()) {
            std::vector<LBranch> bs = t->branches;
            if (what == 2 && bs.size() > 1) {
                bs.erase(bs.begin() + uniform(rng, 0, static_cast<int>(bs.size()) - 1));
            } else {
                for (const auto& l : opt.labels) {
                    bool used = std::any_of(bs.begin(), bs.end(), [&](const LBranch& b) { return b.label == l; });
                    if (!used) {
                        bs.push_back({l, coin(rng, 0.5) ? lt::end() : pick(rng, t->branches).cont});
                        break;
                    }
                }
            }
            return t->kind == LKind::Sel ? lt::sel(t->peer, std::move(bs)) : lt::bra(t->peer, std::move(bs));
        }
    }
    switch (t->kind) {
    case LKind::Out: return lt::out(t->peer, t->sort, mutate_rec(rng, t->cont, opt, p));
    case LKind::In: return lt::in(t->peer, t->sort, mutate_rec(rng, t->cont, opt, p));
    case LKind::Rec: return lt::rec(mutate_rec(rng, t->cont, opt, p));
    case LKind::Sel:
    case LKind::Bra: {
        std::vector<LBranch> bs;
        for (const auto& b : t->branches) bs.push_back({b.label, mutate_rec(rng, b.cont, opt, p)});
        return t->kind == LKind::Sel ? lt::sel(t->peer, std::move(bs)) : lt::bra(t->peer, std::move(bs));
    }
    default: return t;
    }
}

struct GlobalGen {
    Rng& rng;
    const GlobalGenOptions& opt;

    std::pair<std::string, std::string> roles() {
        std::string a = pick(rng, opt.roles), b;
        do b = pick(rng, opt.roles);
        while (b == a);
        return {a, b};
    }

    GType go(int budget, std::uint32_t binders, std::uint32_t unguarded) {
        if (budget <= 1) {
            if (binders > unguarded && coin(rng, 0.6))
                return gt::var(static_cast<std::uint32_t>(uniform(rng, static_cast<int>(unguarded),
                                                                  static_cast<int>(binders) - 1)));
            return gt::end();
        }
        int choice = uniform(rng, 0, 9);
        if (choice <= 1 && budget >= 3 && binders < 2) return gt::rec(go(budget - 1, binders + 1, unguarded + 1));
        auto [a, b] = roles();
        if (choice <= 5) return gt::msg(a, b, pick(rng, opt.sorts), go(budget - 1, binders, 0));
        int maxk = std::min({opt.max_branches, budget - 1, static_cast<int>(opt.labels.size())});
        int k = uniform(rng, 1, std::max(1, maxk));
        auto labels = pick_labels(rng, opt.labels, k);
        auto parts = split(rng, budget - 1, static_cast<int>(labels.size()));
        std::vector<GBranch> bs;
        // Later branches often reuse the first one so that merges have a chance.
        for (std::size_t i = 0; i < labels.size(); ++i) {
            GType c = (i > 0 && coin(rng, 0.5)) ? bs[0].cont : go(parts[i], binders, 0);
            bs.push_back({labels[i], c});
        }
        return gt::choice(a, b, std::move(bs));
    }
};

ExprP expr_rec(Rng& rng, int budget, const std::vector<std::string>& vars) {
    if (budget <= 1) {
        int c = uniform(rng, 0, vars.empty() ? 3 : 5);
        switch (c) {
        case 0: return ex::tt();
        case 1: return ex::ff();
        case 2: return ex::nat(uniform(rng, 0, 9));
        case 3: return ex::integer(uniform(rng, -9, 9));
        default: return ex::var(pick(rng, vars));
        }
    }
    int c = uniform(rng, 0, 4);
    if (c <= 1 || budget < 3) {
        ExprP a = expr_rec(rng, budget - 1, vars);
        return c == 0 ? ex::lnot(a) : ex::neg(a);
    }
    auto parts = split(rng, budget - 1, 2);
    ExprP a = expr_rec(rng, parts[0], vars), b = expr_rec(rng, parts[1], vars);
    if (c == 2) return ex::lor(a, b);
    if (c == 3) return ex::add(a, b);
    return ex::nondet(a, b);
}

struct ProcGen {
    Rng& rng;
    const LocalGenOptions& opt;
    int counter = 0;

    Proc go(int budget, std::vector<std::string>& pvars, std::size_t guarded, std::vector<std::string>& vvars) {
        if (budget <= 1) {
            if (guarded > 0 && coin(rng, 0.6))
                return pr::var(pvars[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(guarded) - 1))]);
            return pr::inact();
        }
        int c = uniform(rng, 0, 11);
        if (c <= 1 && budget >= 3 && pvars.size() < 3) {
            std::string x = "X" + std::to_string(counter++);
            pvars.push_back(x);
            Proc body = go(budget - 1, pvars, guarded, vvars);
            pvars.pop_back();
            return pr::rec(x, body);
        }
        const std::string& peer = pick(rng, opt.peers);
        if (c <= 3 && budget >= 3) {
            int eb = uniform(rng, 1, std::min(3, budget - 2));
            ExprP e = expr_rec(rng, eb, vvars);
            return pr::send(peer, e, go(budget - 1 - eb, pvars, pvars.size(), vvars));
        }
        if (c <= 5 && budget >= 3) {
            std::string x = "x" + std::to_string(counter++);
            vvars.push_back(x);
            Proc k = go(budget - 2, pvars, pvars.size(), vvars);
            vvars.pop_back();
            return pr::recv(peer, x, k);
        }
        if (c <= 7) return pr::sel(peer, pick(rng, opt.labels), go(budget - 1, pvars, pvars.size(), vvars));
        if (c <= 9 || budget < 4) {
            int maxk = std::min({opt.max_branches, budget - 1, static_cast<int>(opt.labels.size())});
            auto labels = pick_labels(rng, opt.labels, uniform(rng, 1, std::max(1, maxk)));
            auto parts = split(rng, budget - 1, static_cast<int>(labels.size()));
            std::vector<PBranch> bs;
            for (std::size_t i = 0; i < labels.size(); ++i)
                bs.push_back({labels[i], go(parts[i], pvars, pvars.size(), vvars)});
            return pr::bra(peer, std::move(bs));
        }
        int eb = 1;
        auto parts = split(rng, budget - 1 - eb, 2);
        ExprP e = coin(rng, 0.5) ? ex::nondet(ex::tt(), ex::ff()) : expr_rec(rng, eb, vvars);
        Proc a = go(parts[0], pvars, guarded, vvars);
        Proc b = go(parts[1], pvars, guarded, vvars);
        return pr::cond(e, a, b);
    }
};

}  // namespace

LType random_local(Rng& rng, int max_size, const LocalGenOptions& opt) {
    LocalGen g{rng, opt};
    return g.go(uniform(rng, 1, std::max(1, max_size)), 0, 0);
}

LType mutate_local(Rng& rng, LType t, const LocalGenOptions& opt) {
    double p = 1.0 / static_cast<double>(std::max<std::uint64_t>(1, t->size));
    return mutate_rec(rng, t, opt, p);
}

GType random_global(Rng& rng, int max_size, const GlobalGenOptions& opt) {
    GlobalGen g{rng, opt};
    return g.go(uniform(rng, 1, std::max(1, max_size)), 0, 0);
}

ExprP random_expr(Rng& rng, int max_size, const std::vector<std::string>& vars) {
    return expr_rec(rng, uniform(rng, 1, std::max(1, max_size)), vars);
}

Proc random_process(Rng& rng, int max_size, const LocalGenOptions& opt) {
    ProcGen g{rng, opt};
    std::vector<std::string> pvars, vvars;
    return normalize(g.go(uniform(rng, 1, std::max(1, max_size)), pvars, 0, vvars));
}

TypingContext random_context(Rng& rng, int participants, int max_type_size) {
    static const std::vector<std::string> names{"p", "q", "r", "s", "u"};
    TypingContext ctx;
    int n = std::min<int>(participants, static_cast<int>(names.size()));
    for (int i = 0; i < n; ++i) {
        LocalGenOptions opt;
        opt.peers.clear();
        for (int j = 0; j < n; ++j)
            if (j != i) opt.peers.push_back(names[static_cast<std::size_t>(j)]);
        if (opt.peers.empty()) opt.peers.push_back("z");
        opt.labels = {"a", "b"};
        opt.sorts = {Sort::integer(), Sort::boolean()};
        opt.max_branches = 2;
        ctx.emplace_back(names[static_cast<std::size_t>(i)], random_local(rng, max_type_size, opt));
    }
    return ctx;
}

}  // namespace mpst
