#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mpst/syntax.hpp"

namespace mpst {

using Rng = std::mt19937_64;

struct LocalGenOptions {
    std::vector<std::string> peers{"p", "q"};
    std::vector<std::string> labels{"l1", "l2", "l3"};
    std::vector<Sort> sorts{Sort::integer(), Sort::boolean()};
    int max_branches = 3;
};

// Closed, guarded local type of size at most max_size.
LType random_local(Rng& rng, int max_size, const LocalGenOptions& opt = {});
// A type close to t: branches added or dropped, unfoldings, subterms rerolled.
LType mutate_local(Rng& rng, LType t, const LocalGenOptions& opt = {});

struct GlobalGenOptions {
    std::vector<std::string> roles{"p", "q", "r"};
    std::vector<std::string> labels{"l1", "l2", "l3"};
    std::vector<Sort> sorts{Sort::integer(), Sort::boolean()};
    int max_branches = 2;
};

GType random_global(Rng& rng, int max_size, const GlobalGenOptions& opt = {});

ExprP random_expr(Rng& rng, int max_size, const std::vector<std::string>& vars);

// Random closed process over the given peers.
Proc random_process(Rng& rng, int max_size, const LocalGenOptions& opt = {});

TypingContext random_context(Rng& rng, int participants, int max_type_size);

}  // namespace mpst
