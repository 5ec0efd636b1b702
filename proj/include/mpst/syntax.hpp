#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mpst {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " at offset " + std::to_string(pos)), pos(pos) {}
    std::size_t pos;
};

// Raised when a configurable work cap is hit; callers report it as inconclusive.
struct BudgetExceeded : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Sorts

enum class SortKind : std::uint8_t { Bool, Nat, Int, Var };

struct Sort {
    SortKind kind = SortKind::Int;
    std::string var;  // SortKind::Var only

    static Sort boolean() { return {SortKind::Bool, {}}; }
    static Sort nat() { return {SortKind::Nat, {}}; }
    static Sort integer() { return {SortKind::Int, {}}; }
    static Sort variable(std::string name) { return {SortKind::Var, std::move(name)}; }

    bool is_var() const { return kind == SortKind::Var; }
    bool operator==(const Sort&) const = default;
    auto operator<=>(const Sort&) const = default;
};

std::string to_string(const Sort& s);

// ---------------------------------------------------------------------------
// Local types. Nodes are interned, immutable and never freed, so two handles
// are equal iff the types are alpha-equal. Bound variables are de Bruijn
// indices; unbound variables keep their name (LKind::Free).

enum class LKind : std::uint8_t { End, Out, In, Sel, Bra, Rec, Var, Free };

struct LocalType;
using LType = const LocalType*;

struct LBranch {
    std::string label;
    LType cont;
    bool operator==(const LBranch&) const = default;
};

struct LocalType {
    LKind kind;
    std::string peer;               // Out/In/Sel/Bra; the name for Free
    Sort sort;                      // Out/In
    LType cont = nullptr;           // Out/In/Rec
    std::vector<LBranch> branches;  // Sel/Bra, sorted by label
    std::uint32_t index = 0;        // Var

    std::size_t hash = 0;
    std::uint64_t size = 0;
    std::uint32_t open = 0;  // 1 + largest escaping de Bruijn index, 0 if none
    bool has_free = false;

    bool closed() const { return open == 0 && !has_free; }
    bool is_prefix() const { return kind == LKind::Out || kind == LKind::In; }
    bool is_choice() const { return kind == LKind::Sel || kind == LKind::Bra; }
};

namespace lt {
LType end();
LType out(const std::string& peer, const Sort& s, LType cont);
LType in(const std::string& peer, const Sort& s, LType cont);
// Throws Error on an empty branch list or duplicate labels.
LType sel(const std::string& peer, std::vector<LBranch> branches);
LType bra(const std::string& peer, std::vector<LBranch> branches);
// Throws Error if body is unguarded in the new binder.
LType rec(LType body);
LType var(std::uint32_t index);
LType free(const std::string& name);
// mu name. body, turning free occurrences of name into the new binder.
LType bind(const std::string& name, LType body);
}  // namespace lt

// body[s / 0] with the usual de Bruijn adjustment.
LType instantiate(LType body, LType s);
LType unfold(LType t);
std::uint64_t size(LType t);
std::vector<LType> subformulas(LType t);
std::string print(LType t);
// Applies a function to every sort in the type.
LType map_sorts(LType t, const std::function<Sort(const Sort&)>& f);
std::set<std::string> sort_vars(LType t);
std::set<std::string> free_names(LType t);
// Replaces free names by the given closed types.
LType substitute_free(LType t, const std::map<std::string, LType>& sub);

// ---------------------------------------------------------------------------
// Global types

enum class GKind : std::uint8_t { End, Msg, Choice, Rec, Var, Free };

struct GlobalType;
using GType = const GlobalType*;

struct GBranch {
    std::string label;
    GType cont;
    bool operator==(const GBranch&) const = default;
};

struct GlobalType {
    GKind kind;
    std::string from;  // Msg/Choice; the name for Free
    std::string to;    // Msg/Choice
    Sort sort;         // Msg
    GType cont = nullptr;
    std::vector<GBranch> branches;
    std::uint32_t index = 0;

    std::size_t hash = 0;
    std::uint64_t size = 0;
    std::uint32_t open = 0;
    bool has_free = false;
    std::set<std::string> parts;  // pt(G)

    bool closed() const { return open == 0 && !has_free; }
    bool involves(const std::string& p) const {
        return (kind == GKind::Msg || kind == GKind::Choice) && (from == p || to == p);
    }
};

namespace gt {
GType end();
// Throws Error if from == to.
GType msg(const std::string& from, const std::string& to, const Sort& s, GType cont);
GType choice(const std::string& from, const std::string& to, std::vector<GBranch> branches);
GType rec(GType body);
GType var(std::uint32_t index);
GType free(const std::string& name);
GType bind(const std::string& name, GType body);
}  // namespace gt

GType instantiate(GType body, GType s);
GType unfold(GType g);
std::uint64_t size(GType g);
std::vector<GType> subformulas(GType g);
const std::set<std::string>& participants(GType g);
std::string print(GType g);

// ---------------------------------------------------------------------------
// Expressions and processes. These are plain trees.

enum class EKind : std::uint8_t { True, False, Nat, Int, Var, Or, Not, Add, NonDet, Neg };

struct Expr;
using ExprP = std::shared_ptr<const Expr>;

struct Expr {
    EKind kind;
    std::int64_t value = 0;  // Nat/Int
    std::string name;        // Var
    ExprP lhs, rhs;          // rhs unused for unary
};

namespace ex {
ExprP tt();
ExprP ff();
ExprP nat(std::int64_t v);
ExprP integer(std::int64_t v);
ExprP var(const std::string& x);
ExprP lor(ExprP a, ExprP b);
ExprP lnot(ExprP a);
ExprP add(ExprP a, ExprP b);
ExprP nondet(ExprP a, ExprP b);
ExprP neg(ExprP a);
}  // namespace ex

std::uint64_t size(const ExprP& e);
std::string print(const ExprP& e);
bool equal(const ExprP& a, const ExprP& b);

enum class PKind : std::uint8_t { Inact, Send, Recv, Sel, Bra, Cond, Rec, Var };

struct Process;
using Proc = std::shared_ptr<const Process>;

struct PBranch {
    std::string label;
    Proc cont;
};

struct Process {
    PKind kind;
    std::string peer;              // Send/Recv/Sel/Bra
    std::string name;              // Recv: bound value variable; Rec/Var: process variable
    std::string label;             // Sel
    ExprP expr;                    // Send/Cond
    Proc cont;                     // Send/Recv/Sel/Rec body/Cond then
    Proc alt;                      // Cond else
    std::vector<PBranch> branches; // Bra, sorted by label
};

namespace pr {
Proc inact();
Proc send(const std::string& peer, ExprP e, Proc cont);
Proc recv(const std::string& peer, const std::string& x, Proc cont);
Proc sel(const std::string& peer, const std::string& label, Proc cont);
Proc bra(const std::string& peer, std::vector<PBranch> branches);
Proc cond(ExprP e, Proc then_p, Proc else_p);
Proc rec(const std::string& x, Proc body);
Proc var(const std::string& x);
}  // namespace pr

std::uint64_t size(const Proc& p);
std::string print(const Proc& p);
// Structural equality up to renaming of process and value binders.
bool alpha_equal(const Proc& a, const Proc& b);
// Renames process binders to X, X1, X2, ... in preorder; rejects free variables
// and unguarded recursion.
Proc normalize(const Proc& p);
// Substitutes the closed process s for the free process variable x.
Proc substitute(const Proc& p, const std::string& x, const Proc& s);
bool is_closed(const Proc& p);

using Session = std::vector<std::pair<std::string, Proc>>;          // sorted by participant
using TypingContext = std::vector<std::pair<std::string, LType>>;  // sorted by participant

std::uint64_t size(const Session& s);
std::string print(const Session& s);
std::string print(const TypingContext& c);

// ---------------------------------------------------------------------------
// Surface syntax

LType parse_local(const std::string& text);
GType parse_global(const std::string& text);
ExprP parse_expr(const std::string& text);
Proc parse_process(const std::string& text);
Session parse_session(const std::string& text);
TypingContext parse_context(const std::string& text);

}  // namespace mpst
