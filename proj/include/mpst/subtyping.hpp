#pragma once

#include <cstdint>
#include <utility>

#include "mpst/typegraph.hpp"

namespace mpst {

struct SimStats {
    std::uint64_t nodes_visited = 0;
    std::uint64_t edges_visited = 0;
};

struct SimResult {
    bool holds = false;
    SimStats stats;
    // The inconsistent product node that refuted the check, as node ids.
    std::pair<int, int> witness{-1, -1};
};

// Searches the product of two type graphs from their initial nodes, failing
// on the first inconsistent pair.
SimResult simulate(const TypeGraph& left, const TypeGraph& right);
SimResult subtype_sim(LType t1, LType t2);
bool graph_subtype(const TypeGraph& left, const TypeGraph& right);
bool graph_equiv(const TypeGraph& a, const TypeGraph& b);
bool graph_equiv(LType a, LType b);

struct InductiveResult {
    bool holds = false;
    std::uint64_t judgements = 0;
};

// Bottom-up proof search with the assumption set; throws BudgetExceeded once
// more than cap judgements have been explored.
InductiveResult subtype_inductive(LType t1, LType t2, std::uint64_t cap = 10'000'000);

// The pair (T_k, T_{k+1}) whose inductive proof tree grows factorially in k.
std::pair<LType, LType> gen_exponential_pair(unsigned k);
// rec t. p?(int); ... ; t with n1 and n2 inputs.
std::pair<LType, LType> gen_coprime_pair(unsigned n1, unsigned n2);

}  // namespace mpst
