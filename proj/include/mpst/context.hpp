#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpst/typegraph.hpp"

namespace mpst {

enum class CtxLabelKind : std::uint8_t { In, Out, Bra, Sel, Comm, Choice };

// In/Out/Bra/Sel: participant p acting towards q. Comm: p sends to q.
// Choice: p selects label towards q.
struct CtxLabel {
    CtxLabelKind kind;
    std::string p, q;
    Sort sort;
    std::string label;

    bool synchronized() const { return kind == CtxLabelKind::Comm || kind == CtxLabelKind::Choice; }
    bool operator==(const CtxLabel&) const = default;
    auto operator<=>(const CtxLabel&) const = default;
};

std::string print(const CtxLabel& l);

enum class BarbKind : std::uint8_t { Out, In, Sel, Bra };

// p ready to act with q.
struct Barb {
    BarbKind kind;
    std::string p, q;
    bool operator==(const Barb&) const = default;
    auto operator<=>(const Barb&) const = default;
};

std::string print(const Barb& b);

// Every single-participant action and every synchronized reduction of ctx.
std::vector<std::pair<CtxLabel, TypingContext>> ctx_step(const TypingContext& ctx);
std::set<Barb> barbs(const TypingContext& ctx);
std::set<Barb> observations(const CtxLabel& reduction);
bool is_safe_state(const TypingContext& ctx);

struct ContextGraph {
    struct Edge {
        CtxLabel label;
        int to;
    };

    std::vector<std::string> participants;
    std::vector<LocalGraph> graphs;        // one per participant
    std::vector<std::vector<int>> states;  // per state, a node of each graph
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<Edge>> succ;  // synchronized reductions only

    std::size_t edge_count() const;
    TypingContext context(int state) const;
    bool stuck(int state) const { return succ[static_cast<std::size_t>(state)].empty(); }
    bool all_end(int state) const;
    // Heads of participant i in the state, as single-participant actions.
    const std::vector<TypeGraph::Edge>& actions(int state, std::size_t i) const;
    std::set<Barb> barbs(int state) const;
    bool safe_state(int state) const;
};

// Breadth-first closure under synchronized reductions. Throws BudgetExceeded.
ContextGraph reachable_graph(const TypingContext& ctx, std::size_t max_states = 1'000'000);

enum class Property : std::uint8_t { Safety, DeadlockFree, Live };
std::string to_string(Property p);

// labels[i] leads from states[i] to states[i+1]. For a lasso, the last state
// equals states[cycle_start].
struct Trace {
    std::vector<TypingContext> states;
    std::vector<CtxLabel> labels;
    int cycle_start = -1;
};

struct Verdict {
    Property property;
    bool holds = false;
    std::optional<Trace> trace;
    std::string reason;
    std::size_t states = 0, edges = 0;
};

Verdict check_safety(const TypingContext& ctx, std::size_t max_states = 1'000'000);
Verdict check_deadlock_freedom(const TypingContext& ctx, std::size_t max_states = 1'000'000);

enum class LivenessBackend : std::uint8_t {
    Scc,    // fair-cycle search by SCC refinement
    Paths,  // closed-walk search over (state, taken labels, enabled labels)
};

Verdict check_liveness(const TypingContext& ctx, std::size_t max_states = 1'000'000,
                       LivenessBackend backend = LivenessBackend::Scc);
Verdict check(const TypingContext& ctx, Property p, std::size_t max_states = 1'000'000);

// The counterwitness bound (2n+2) * product of type sizes, n the total size.
std::uint64_t counterwitness_bound(const TypingContext& ctx);

// Enumerates every path of at most bound reductions, reading each maximal
// path and each lasso against the counterwitness conditions. True if none is
// a counterwitness. Throws BudgetExceeded past max_paths.
bool brute_force_liveness(const TypingContext& ctx, std::size_t bound, std::uint64_t max_paths = 20'000'000);

// Checks that each listed context follows from the previous by its label.
bool replays(const TypingContext& init, const Trace& t);

}  // namespace mpst
