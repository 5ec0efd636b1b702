#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpst/context.hpp"
#include "mpst/random.hpp"

namespace mpst {

struct Value {
    SortKind kind = SortKind::Int;  // Bool, Nat or Int
    std::int64_t number = 0;
    bool truth = false;

    static Value boolean(bool b) { return {SortKind::Bool, 0, b}; }
    static Value nat(std::int64_t n) { return {SortKind::Nat, n, false}; }
    static Value integer(std::int64_t n) { return {SortKind::Int, n, false}; }
    bool operator==(const Value&) const = default;
};

std::string print(const Value& v);
ExprP to_expr(const Value& v);

using ValueEnv = std::map<std::string, Value>;

// One evaluation; nondeterministic choices are drawn from rng. nullopt means
// the evaluation is stuck (e.g. true + 1).
std::optional<Value> eval_expr(const ExprP& e, const ValueEnv& env, Rng& rng);
// Every possible outcome, without duplicates. A stuck evaluation appears as
// nullopt.
std::vector<std::optional<Value>> eval_all(const ExprP& e, const ValueEnv& env = {});

// Replaces free occurrences of the value variable x.
Proc substitute_value(const Proc& p, const std::string& x, const Value& v);

struct SessionState {
    Session session;
    bool error = false;
    bool operator==(const SessionState&) const = default;
};

struct SessionStep {
    std::string rule;  // r-comm, r-bra, t-cond, f-cond, v-err, c-err
    std::string actor;
    SessionState next;
};

// All one-step reductions, with recursion unfolded at the heads.
std::vector<SessionStep> session_step(const SessionState& m);
bool all_inactive(const Session& s);

struct Exploration {
    bool error_reached = false;
    bool stuck_nonterminal = false;
    bool complete = false;      // exhaustive search saw every state within the depth
    std::uint64_t states = 0;   // distinct states visited by the exhaustive search
    std::uint64_t steps = 0;    // reductions taken over all searches
    std::vector<std::string> witness;  // rules leading to the first violation
    std::optional<Session> stuck_example;
};

// Exhaustive breadth-first search to the given depth, followed by `runs`
// random walks of the same length.
Exploration explore_session(const Session& m, unsigned depth, unsigned runs, std::uint64_t seed,
                            std::size_t max_states = 1'000'000);

}  // namespace mpst
