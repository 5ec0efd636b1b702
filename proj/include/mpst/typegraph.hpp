#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "mpst/syntax.hpp"

namespace mpst {

enum class ActKind : std::uint8_t { In, Out, Sel, Bra, End };

struct Action {
    ActKind kind = ActKind::End;
    std::string peer;
    Sort sort;          // In/Out
    std::string label;  // Sel/Bra

    static Action in(std::string p, Sort s) { return {ActKind::In, std::move(p), std::move(s), {}}; }
    static Action out(std::string p, Sort s) { return {ActKind::Out, std::move(p), std::move(s), {}}; }
    static Action sel(std::string p, std::string l) { return {ActKind::Sel, std::move(p), {}, std::move(l)}; }
    static Action bra(std::string p, std::string l) { return {ActKind::Bra, std::move(p), {}, std::move(l)}; }
    static Action end() { return {}; }

    bool operator==(const Action&) const = default;
    auto operator<=>(const Action&) const = default;
};

std::string print(const Action& a);

// A finite labelled graph of local-type shape. Node ids are 0..size-1; the
// Skip sink is kSkip and is not counted as a node.
struct TypeGraph {
    static constexpr int kSkip = -1;

    struct Edge {
        Action act;
        int to;
    };

    int init = 0;
    std::vector<std::vector<Edge>> out;
    std::vector<std::string> labels;  // optional, for DOT

    int add_node(std::string label = {});
    std::size_t node_count() const { return out.size(); }
    std::size_t edge_count() const;
    // Throws Error unless every node has out-edges of one shape: a single end
    // edge to Skip, a single input or output, or selections (or branchings)
    // towards one peer with distinct labels.
    void validate() const;
    // Drops nodes unreachable from init, renumbering the rest in BFS order.
    TypeGraph trimmed() const;
};

struct LocalGraph : TypeGraph {
    std::vector<LType> types;  // node id -> the subformula it stands for
    std::unordered_map<LType, int> index;
};

// Nodes are the types reached from t (t itself and continuations of
// unfoldings); end nodes step to Skip.
LocalGraph local_graph(LType t);
// Reads a graph back as a closed local type, introducing a binder for each
// node that is the target of a back edge.
LType graph_to_type(const TypeGraph& g);

struct GlobalGraph {
    std::vector<GType> nodes;  // nodes[0] is the root
    std::unordered_map<GType, int> index;
    std::vector<std::vector<int>> succ;
    std::vector<GType> heads;  // unfold(nodes[i])
};

GlobalGraph global_graph(GType g);
bool is_balanced(GType g);
// The participant and node witnessing imbalance, if any.
struct Imbalance {
    std::string participant;
    GType node = nullptr;
};
std::optional<Imbalance> find_imbalance(GType g);

std::string to_dot(const TypeGraph& g, const std::string& name = "G");
std::string to_dot(const GlobalGraph& g, const std::string& name = "G");

}  // namespace mpst
