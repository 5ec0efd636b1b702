#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpst/random.hpp"
#include "mpst/typegraph.hpp"

namespace mpst {

// Type variables are numbered from 0 and print as xi<n>; sort variables are
// Sort::variable("a<n>").
struct Constraint {
    enum class Kind : std::uint8_t { End, Var, In, Out, Sel, Bra, SortEq };
    Kind kind = Kind::End;
    int rhs = -1;  // the type variable on the right, all but SortEq
    int lhs = -1;  // Var: the smaller variable; In/Out: the continuation
    std::string peer;
    Sort sort;                                       // In/Out payload; SortEq left side
    Sort other;                                      // SortEq right side
    std::vector<std::pair<std::string, int>> branches;  // Sel/Bra, sorted by label

    bool operator==(const Constraint&) const = default;
};

std::string print(const Constraint& c);

struct Constraints {
    int root = -1;
    std::vector<Constraint> items;
    int type_vars = 0;
    int sort_vars = 0;
    // Set by eliminate_transitive: bounds[v] lists the variables below v (v
    // included) that carry a constraint other than xi <= psi.
    std::vector<std::vector<int>> bounds;
};

// Throws Error on free process or value variables.
Constraints derive_constraints(const Proc& p);
// Removes every xi <= psi, recording for each variable the defined variables
// it stands for.
Constraints eliminate_transitive(const Constraints& c);
// Union of bounds over vars, sorted; vars itself when c has no bounds.
std::vector<int> lower_closure(const Constraints& c, const std::vector<int>& vars);

struct MinGraph {
    bool defined = false;
    TypeGraph graph;
    std::vector<std::vector<int>> nodes;  // graph node id -> type variables
    std::map<std::vector<int>, int> index;
    std::vector<std::pair<Sort, Sort>> sort_eqs;
    std::string reason;
    std::vector<int> failure_node;
};

// Expects constraints without Var items. Explores from the closure of {root}
// and of each extra root set. Throws BudgetExceeded past max_nodes.
MinGraph build_min_graph(const Constraints& c, std::uint64_t max_nodes = 1'000'000,
                         const std::vector<std::vector<int>>& extra_roots = {});

// Maps each sort variable to its class representative: the concrete sort of
// the class if it has one, else the first variable seen. nullopt on a clash.
std::optional<std::map<std::string, Sort>> solve_sorts(const std::vector<std::pair<Sort, Sort>>& eqs);

struct Inference {
    bool typable = false;
    LType type = nullptr;  // residual sort variables renamed a, b, c, ...
    std::string reason;
    Constraints constraints;
    Constraints reduced;
    MinGraph graph;
};

Inference infer_min_type(const Proc& p, std::uint64_t max_nodes = 1'000'000);

// Cycle of n branchings per divisor, composed by nondeterministic conditionals.
Proc gen_lcm_process(const std::vector<unsigned>& divisors);

// A process that can be typed by t. Selections may pick any nonempty subset of
// the offered labels through nondeterministic conditionals.
Proc realize(Rng& rng, LType t);

// Binds the sort variables of lower by walking it jointly with upper along
// subtyping successors. nullopt when a variable meets two different sorts.
std::optional<std::map<std::string, Sort>> match_sorts(LType lower, LType upper);
// lower <= upper after applying match_sorts.
bool below_up_to_sorts(LType lower, LType upper);

}  // namespace mpst
