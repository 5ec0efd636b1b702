#pragma once

#include <array>
#include <string>
#include <vector>

#include "mpst/context.hpp"

namespace mpst {

struct QbfLiteral {
    std::string var;
    bool negated = false;
    bool operator==(const QbfLiteral&) const = default;
};

struct QbfQuantifier {
    bool universal = false;
    std::string var;
    bool operator==(const QbfQuantifier&) const = default;
};

// Prenex QBF with a 3-CNF matrix. Every matrix variable is bound exactly once.
struct Qbf {
    std::vector<QbfQuantifier> prefix;
    std::vector<std::array<QbfLiteral, 3>> clauses;
};

// Grammar: `A x. E y. (x | ~y | y) & (...)`.
Qbf parse_qbf(const std::string& text);
std::string print(const Qbf& f);
// Throws Error if the formula is malformed.
void validate(const Qbf& f);

// Brute-force evaluation; at most 20 variables.
bool eval_qbf(const Qbf& f);

// Participants s, p1..pn, r1..r(m+1). The controller s ends in a bad state
// when the formula is false; which bad state depends on the property.
TypingContext gen_qbf_context(const Qbf& f, Property prop);
// One line per participant describing its role in the protocol.
std::string qbf_protocol_summary(const Qbf& f);

struct ReductionCheck {
    bool formula = false;
    Verdict verdict;
    bool agrees() const { return formula == verdict.holds; }
};

ReductionCheck validate_reduction(const Qbf& f, Property prop, std::size_t max_states = 1'000'000);

// Every formula with the given numbers of variables and clauses, over all
// quantifier patterns and literal choices.
std::vector<Qbf> all_qbfs(unsigned vars, unsigned clauses);

}  // namespace mpst
