#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpst/context.hpp"
#include "mpst/projection.hpp"
#include "mpst/random.hpp"

namespace mpst {

struct StageTime {
    std::string stage;
    std::uint64_t ns = 0;
};

// Checks each process against the projection of a global type.
struct TopDownReport {
    bool accepted = false;
    std::string failed_stage;  // participants, precondition, projection, inference, subtyping
    std::string reason;
    std::map<std::string, LType> projections;
    std::map<std::string, LType> inferred;
    std::vector<StageTime> timings;
};

TopDownReport run_topdown(const Session& m, GType g, ProjKind kind);

// Infers a minimum type for every process and checks the resulting context.
struct BottomUpReport {
    bool typable = false;
    std::string reason;
    TypingContext context;
    std::optional<Verdict> verdict;
    std::vector<StageTime> timings;
};

// Minimum types may keep sort variables (a value received and passed on).
// Each is instantiated with a ground sort; the first instantiation whose
// context satisfies the property is kept, otherwise the all-int one.
BottomUpReport run_bottomup(const Session& m, Property prop, std::size_t max_states = 1'000'000);

// The context of minimum types with sort variables still in place, prefixed
// by participant. Throws Error if some process is untypable.
TypingContext infer_context(const Session& m);

// One process per participant, each realizing that participant's type.
Session realize_session(Rng& rng, const TypingContext& ctx);

}  // namespace mpst
