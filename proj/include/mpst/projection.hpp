#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpst/subtyping.hpp"
#include "mpst/typegraph.hpp"

namespace mpst {

enum class MergeKind { Plain, Full };
enum class ProjKind { Plain, Full, Tirore, Subset };

std::string to_string(ProjKind k);
ProjKind proj_kind_from_string(const std::string& s);

struct Projection {
    bool defined = false;
    LType type = nullptr;
    std::string reason;     // when undefined
    std::uint64_t work = 0;  // merge steps, map operations or product nodes
};

// Syntax-tree projection following the inductive rules; merges recurse over
// both operands.
Projection project_inductive(GType g, const std::string& p, MergeKind kind);
// Full merging with branchings held in ordered maps, merging the smaller map
// into the larger one.
Projection project_full_optimized(GType g, const std::string& p);

std::optional<LType> merge_naive(LType a, LType b, MergeKind kind, std::uint64_t* work = nullptr);
std::optional<LType> merge_full_optimized(LType a, LType b, std::uint64_t* work = nullptr);

// The candidate projection that keeps the first branch at every merge.
std::optional<LType> candidate_projection(GType g, const std::string& p);
// Candidate projection checked against the global type over their product graph.
Projection project_tirore(GType g, const std::string& p);

struct SubsetProjection {
    bool defined = false;
    bool not_balanced = false;
    TypeGraph graph;
    std::vector<std::vector<GType>> nodes;  // node id -> its closure set
    std::string reason;
};

// The p-closure of a set of global types.
std::vector<GType> p_closure(const std::vector<GType>& gs, const std::string& p);
SubsetProjection project_subset(GType g, const std::string& p, bool require_balanced = true);

// Any of the four projections, read back as a local type.
Projection project(GType g, const std::string& p, ProjKind kind);

// Lower-bound families.
GType gen_plain_nlogn(unsigned m);
GType gen_fullmerge_quadratic(unsigned n);
GType gen_fullmerge_opt(unsigned k);
GType gen_tbc_quadratic(unsigned n);
GType gen_cf(const std::vector<unsigned>& ns);
// By name: plain_nlogn, fullmerge_quadratic, fullmergeopt, tbc_quadratic.
GType gen_lowerbound_family(const std::string& name, unsigned n);

struct Association {
    bool holds = false;
    std::string reason;
};

// dom(ctx) = pt(g) and every ctx(p) is a subtype of the projection onto p.
Association check_association(const TypingContext& ctx, GType g, ProjKind kind);

}  // namespace mpst
