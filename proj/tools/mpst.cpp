// Command-line frontend: parsing, subtyping, projection, inference, property
// checking, the QBF gadget, both pipelines and the benchmark families.
//
// Exit codes: 0 holds/accepted, 1 violated/rejected, 2 input error, 3 budget
// exhausted.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "mpst/hardness.hpp"
#include "mpst/inference.hpp"
#include "mpst/pipeline.hpp"
#include "mpst/semantics.hpp"

using nlohmann::json;
using namespace mpst;

namespace {

constexpr int kHolds = 0, kViolated = 1, kInputError = 2, kBudget = 3;

struct Globals {
    bool json = false;
    std::uint64_t budget = 1'000'000;
    std::uint64_t seed = 1;
};

struct InputError : Error {
    using Error::Error;
};

// A path names a file; "-" reads stdin; anything else is taken as inline text.
std::string read_input(const std::string& arg) {
    if (arg == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(arg);
    if (!in) return arg;
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const Globals& g, const json& j, const std::string& text) {
    if (g.json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

json trace_json(const Trace& t) {
    json steps = json::array();
    for (std::size_t i = 0; i < t.states.size(); ++i) {
        json s{{"context", print(t.states[i])}};
        if (i < t.labels.size()) s["label"] = print(t.labels[i]);
        steps.push_back(s);
    }
    json j{{"steps", steps}};
    if (t.cycle_start >= 0) j["cycle_start"] = t.cycle_start;
    return j;
}

std::string trace_text(const Trace& t) {
    std::string out;
    for (std::size_t i = 0; i < t.states.size(); ++i) {
        if (static_cast<int>(i) == t.cycle_start) out += "  -- cycle starts here --\n";
        out += "  " + print(t.states[i]) + "\n";
        if (i < t.labels.size()) out += "    --" + print(t.labels[i]) + "-->\n";
    }
    return out;
}

json verdict_json(const Verdict& v, bool with_trace) {
    json j{{"property", to_string(v.property)},
           {"holds", v.holds},
           {"stats", {{"states", v.states}, {"edges", v.edges}}}};
    if (!v.reason.empty()) j["reason"] = v.reason;
    if (with_trace && v.trace) j["trace"] = trace_json(*v.trace);
    return j;
}

Property parse_property(const std::string& s) {
    if (s == "safety") return Property::Safety;
    if (s == "df") return Property::DeadlockFree;
    if (s == "live") return Property::Live;
    throw InputError("unknown property '" + s + "' (safety, df, live)");
}

std::string context_dot(const ContextGraph& g, const std::optional<Trace>& trace) {
    std::set<int> on_trace;
    if (trace)
        for (const auto& c : trace->states) {
            std::vector<int> key;
            for (std::size_t i = 0; i < c.size(); ++i) {
                auto it = g.graphs[i].index.find(c[i].second);
                key.push_back(it == g.graphs[i].index.end() ? -1 : it->second);
            }
            auto it = g.index.find(key);
            if (it != g.index.end()) on_trace.insert(it->second);
        }
    std::string out = "digraph contexts {\n  node [shape=box, fontname=monospace];\n";
    for (std::size_t s = 0; s < g.states.size(); ++s) {
        int id = static_cast<int>(s);
        std::string label = print(g.context(id));
        std::string esc;
        for (char c : label) esc += c == '"' ? std::string("\\\"") : std::string(1, c);
        std::string style;
        if (!g.safe_state(id))
            style = ", color=red";
        else if (g.stuck(id) && !g.all_end(id))
            style = ", color=orange";
        if (on_trace.count(id)) style += ", style=bold, penwidth=2";
        out += "  n" + std::to_string(s) + " [label=\"" + esc + "\"" + style + "];\n";
    }
    for (std::size_t s = 0; s < g.states.size(); ++s)
        for (const auto& e : g.succ[s])
            out += "  n" + std::to_string(s) + " -> n" + std::to_string(e.to) + " [label=\"" + print(e.label) + "\"];\n";
    return out + "}\n";
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << text;
}

// --- subcommands ----------------------------------------------------------

int cmd_parse(const Globals& g, const std::string& input, const std::string& as) {
    std::string text = read_input(input);
    std::string kind = as;
    if (kind == "auto") {
        if (text.find("::") != std::string::npos)
            kind = "session";
        else if (text.find("->") != std::string::npos)
            kind = "global";
        else if (text.find(':') != std::string::npos && text.find('{') > text.find(':'))
            kind = "context";
        else if (text.find('<') != std::string::npos || text.find("(+)") != std::string::npos ||
                 text.find("if ") != std::string::npos || text.find_first_not_of(" \t\n0") == std::string::npos)
            kind = "process";
        else
            kind = "local";
    }
    json j{{"kind", kind}};
    std::string printed;
    if (kind == "local") {
        LType t = parse_local(text);
        printed = print(t);
        j["size"] = size(t);
        j["closed"] = t->closed();
    } else if (kind == "global") {
        GType t = parse_global(text);
        printed = print(t);
        j["size"] = size(t);
        j["participants"] = participants(t);
        j["balanced"] = t->closed() ? json(is_balanced(t)) : json(nullptr);
    } else if (kind == "process") {
        Proc p = parse_process(text);
        printed = print(p);
        j["size"] = size(p);
    } else if (kind == "session") {
        Session s = parse_session(text);
        printed = print(s);
        j["size"] = size(s);
    } else if (kind == "context") {
        TypingContext c = parse_context(text);
        printed = print(c);
    } else {
        throw InputError("unknown input kind '" + kind + "'");
    }
    j["printed"] = printed;
    emit(g, j, printed + "\n");
    return kHolds;
}

int cmd_subtype(const Globals& g, const std::string& a, const std::string& b, const std::string& algo) {
    LType t1 = parse_local(read_input(a)), t2 = parse_local(read_input(b));
    if (!t1->closed() || !t2->closed()) throw InputError("subtyping needs closed types");
    json j{{"left", print(t1)}, {"right", print(t2)}, {"algorithm", algo}};
    bool holds;
    if (algo == "sim") {
        SimResult r = subtype_sim(t1, t2);
        holds = r.holds;
        j["stats"] = {{"nodes", r.stats.nodes_visited}, {"edges", r.stats.edges_visited}};
    } else if (algo == "inductive") {
        InductiveResult r = subtype_inductive(t1, t2, g.budget);
        holds = r.holds;
        j["stats"] = {{"judgements", r.judgements}};
    } else {
        throw InputError("unknown algorithm '" + algo + "' (sim, inductive)");
    }
    j["holds"] = holds;
    emit(g, j, std::string(holds ? "holds" : "does not hold") + ": " + print(t1) + " <= " + print(t2) + "\n");
    return holds ? kHolds : kViolated;
}

int cmd_project(const Globals& g, const std::string& input, const std::string& onto, const std::string& kind_s) {
    GType gt = parse_global(read_input(input));
    if (!gt->closed()) throw InputError("projection needs a closed global type");
    ProjKind kind = proj_kind_from_string(kind_s);
    std::vector<std::string> roles;
    if (onto.empty())
        roles.assign(participants(gt).begin(), participants(gt).end());
    else
        roles.push_back(onto);
    json j{{"global", print(gt)}, {"kind", to_string(kind)}, {"projections", json::object()}};
    std::string text;
    bool all = true;
    for (const auto& p : roles) {
        Projection pj = project(gt, p, kind);
        all = all && pj.defined;
        json e{{"defined", pj.defined}, {"work", pj.work}};
        if (pj.defined) {
            e["type"] = print(pj.type);
            text += p + ": " + print(pj.type) + "\n";
        } else {
            e["reason"] = pj.reason;
            text += p + ": undefined (" + pj.reason + ")\n";
        }
        j["projections"][p] = e;
    }
    emit(g, j, text);
    return all ? kHolds : kViolated;
}

int cmd_infer(const Globals& g, const std::string& input, bool show_constraints) {
    Proc p = parse_process(read_input(input));
    Inference inf = infer_min_type(p, g.budget);
    json j{{"process", print(p)}, {"typable", inf.typable}, {"constraints", inf.constraints.items.size()}};
    std::string text;
    if (inf.typable) {
        j["type"] = print(inf.type);
        j["graph_nodes"] = inf.graph.graph.node_count();
        text = print(inf.type) + "\n";
    } else {
        j["reason"] = inf.reason;
        text = "untypable: " + inf.reason + "\n";
    }
    if (show_constraints) {
        json cs = json::array();
        for (const auto& c : inf.constraints.items) {
            cs.push_back(print(c));
            text += "  " + print(c) + "\n";
        }
        j["constraint_list"] = cs;
    }
    emit(g, j, text);
    return inf.typable ? kHolds : kViolated;
}

int cmd_check_context(const Globals& g, const std::string& input, const std::string& prop_s, bool oracle, bool trace,
                      const std::string& dot) {
    TypingContext ctx = parse_context(read_input(input));
    Property prop = parse_property(prop_s);
    Verdict v = check(ctx, prop, g.budget);
    json j = verdict_json(v, trace);
    std::string text = to_string(prop) + (v.holds ? " holds" : " violated") + " (" + std::to_string(v.states) +
                       " states, " + std::to_string(v.edges) + " edges)\n";
    if (!v.reason.empty()) text += v.reason + "\n";
    if (trace && v.trace) text += trace_text(*v.trace);
    if (oracle) {
        if (prop != Property::Live) throw InputError("--oracle is available for --prop live");
        auto bound = static_cast<std::size_t>(std::min<std::uint64_t>(counterwitness_bound(ctx), 16));
        bool brute = brute_force_liveness(ctx, bound, 50'000'000);
        bool paths = check_liveness(ctx, g.budget, LivenessBackend::Paths).holds;
        j["oracle"] = {{"bound", bound}, {"brute_force", brute}, {"paths_backend", paths}};
        text += "oracle (bound " + std::to_string(bound) + "): brute force " + (brute ? "live" : "not live") +
                ", path backend " + (paths ? "live" : "not live") + "\n";
    }
    if (!dot.empty()) write_file(dot, context_dot(reachable_graph(ctx, g.budget), v.trace));
    emit(g, j, text);
    return v.holds ? kHolds : kViolated;
}

int cmd_check_session(const Globals& g, const std::string& input, unsigned depth, unsigned runs) {
    Session m = parse_session(read_input(input));
    Exploration e = explore_session(m, depth, runs, g.seed, g.budget);
    json j{{"error_reached", e.error_reached},
           {"stuck_nonterminal", e.stuck_nonterminal},
           {"complete", e.complete},
           {"states", e.states},
           {"steps", e.steps},
           {"witness", e.witness}};
    if (e.stuck_example) j["stuck_example"] = print(*e.stuck_example);
    std::string text = std::string("error reached: ") + (e.error_reached ? "yes" : "no") +
                       "\nstuck before termination: " + (e.stuck_nonterminal ? "yes" : "no") +
                       "\nstates: " + std::to_string(e.states) + (e.complete ? " (complete)" : " (depth-bounded)") + "\n";
    if (!e.witness.empty()) {
        text += "witness:";
        for (const auto& w : e.witness) text += " " + w;
        text += "\n";
    }
    emit(g, j, text);
    return e.error_reached || e.stuck_nonterminal ? kViolated : kHolds;
}

int cmd_gen_qbf(const Globals& g, const std::string& formula, const std::string& prop_s, bool validate_it) {
    Qbf f = parse_qbf(formula);
    Property prop = parse_property(prop_s);
    TypingContext ctx = gen_qbf_context(f, prop);
    json j{{"formula", print(f)}, {"property", to_string(prop)}, {"context", print(ctx)},
           {"summary", qbf_protocol_summary(f)}};
    std::string text = print(ctx) + "\n";
    int code = kHolds;
    if (validate_it) {
        ReductionCheck r = validate_reduction(f, prop, g.budget);
        j["validation"] = {{"formula_true", r.formula}, {"property_holds", r.verdict.holds}, {"agrees", r.agrees()},
                           {"states", r.verdict.states}};
        text += std::string("formula ") + (r.formula ? "true" : "false") + ", " + to_string(prop) + " " +
                (r.verdict.holds ? "holds" : "fails") + (r.agrees() ? " (agree)" : " (DISAGREE)") + "\n";
        code = r.agrees() ? kHolds : kViolated;
    }
    emit(g, j, text);
    return code;
}

json timings_json(const std::vector<StageTime>& ts) {
    json j = json::object();
    for (const auto& t : ts) j[t.stage] = t.ns;
    return j;
}

int cmd_topdown(const Globals& g, const std::string& session, const std::string& global, const std::string& kind_s) {
    Session m = parse_session(read_input(session));
    GType gt = parse_global(read_input(global));
    if (!gt->closed()) throw InputError("top-down checking needs a closed global type");
    TopDownReport r = run_topdown(m, gt, proj_kind_from_string(kind_s));
    json j{{"accepted", r.accepted}, {"timings_ns", timings_json(r.timings)}};
    if (!r.accepted) j["failed_stage"] = r.failed_stage, j["reason"] = r.reason;
    for (const auto& [p, t] : r.projections) j["projections"][p] = print(t);
    for (const auto& [p, t] : r.inferred) j["inferred"][p] = print(t);
    emit(g, j, r.accepted ? "accepted\n" : "rejected at " + r.failed_stage + ": " + r.reason + "\n");
    return r.accepted ? kHolds : kViolated;
}

int cmd_bottomup(const Globals& g, const std::string& session, const std::string& prop_s) {
    Session m = parse_session(read_input(session));
    BottomUpReport r = run_bottomup(m, parse_property(prop_s), g.budget);
    json j{{"typable", r.typable}, {"timings_ns", timings_json(r.timings)}};
    if (!r.typable) {
        j["reason"] = r.reason;
        emit(g, j, "untypable: " + r.reason + "\n");
        return kViolated;
    }
    j["context"] = print(r.context);
    j["verdict"] = verdict_json(*r.verdict, true);
    std::string text = print(r.context) + "\n" + to_string(r.verdict->property) + (r.verdict->holds ? " holds\n" : " violated\n");
    emit(g, j, text);
    return r.verdict->holds ? kHolds : kViolated;
}

int cmd_graph(const Globals&, const std::string& input, const std::string& as) {
    std::string text = read_input(input);
    if (as == "local")
        std::cout << to_dot(local_graph(parse_local(text)), "local");
    else if (as == "global")
        std::cout << to_dot(global_graph(parse_global(text)), "global");
    else if (as == "context")
        std::cout << context_dot(reachable_graph(parse_context(text)), std::nullopt);
    else
        throw InputError("unknown graph kind '" + as + "' (local, global, context)");
    return kHolds;
}

// --- benchmark families -----------------------------------------------------

struct BenchPoint {
    std::uint64_t size = 0;
    std::uint64_t work = 0;
    std::string outcome;
};

using Params = std::vector<unsigned>;

struct Family {
    std::string name;
    std::vector<Params> defaults;
    std::function<BenchPoint(const Params&, std::uint64_t budget)> run;
};

unsigned at(const Params& p, std::size_t i) {
    if (i >= p.size()) throw InputError("benchmark point needs " + std::to_string(i + 1) + " parameters");
    return p[i];
}

BenchPoint projection_point(GType g, const std::string& p, const std::function<Projection(GType)>& f) {
    Projection r = f(g);
    (void)p;
    return {size(g), r.work, r.defined ? "defined" : "undefined"};
}

Qbf qbf_chain(unsigned n) {
    // Alternating prefix; clause i links x_i, ~x_{i+1} and x_1.
    Qbf f;
    for (unsigned i = 0; i < n; ++i) f.prefix.push_back({i % 2 == 0, "x" + std::to_string(i + 1)});
    for (unsigned i = 0; i < std::max(1u, n - 1); ++i) {
        std::string a = "x" + std::to_string(i + 1), b = "x" + std::to_string(std::min(i + 2, n));
        f.clauses.push_back({QbfLiteral{a, false}, QbfLiteral{b, true}, QbfLiteral{"x1", false}});
    }
    return f;
}

const std::vector<Family>& families() {
    static const std::vector<Family> fs = {
        {"coprime", {{3, 4}, {5, 7}, {8, 9}, {4, 6}, {11, 13}, {16, 17}},
         [](const Params& p, std::uint64_t) {
             auto [a, b] = gen_coprime_pair(at(p, 0), at(p, 1));
             SimResult r = subtype_sim(a, b);
             return BenchPoint{size(a) + size(b), r.stats.nodes_visited, r.holds ? "holds" : "fails"};
         }},
        {"inductive-blowup", {{2}, {3}, {4}, {5}},
         [](const Params& p, std::uint64_t budget) {
             auto [a, b] = gen_exponential_pair(at(p, 0));
             InductiveResult r = subtype_inductive(a, b, budget);
             return BenchPoint{size(a) + size(b), r.judgements, r.holds ? "holds" : "fails"};
         }},
        {"simulation-on-blowup", {{2}, {5}, {10}, {20}},
         [](const Params& p, std::uint64_t) {
             auto [a, b] = gen_exponential_pair(at(p, 0));
             SimResult r = subtype_sim(a, b);
             return BenchPoint{size(a) + size(b), r.stats.nodes_visited, r.holds ? "holds" : "fails"};
         }},
        {"plain-nlogn", {{2}, {4}, {8}, {12}, {16}},
         [](const Params& p, std::uint64_t) {
             return projection_point(gen_plain_nlogn(at(p, 0)), "r",
                                     [](GType g) { return project_inductive(g, "r", MergeKind::Plain); });
         }},
        {"fullmerge-quadratic", {{4}, {8}, {16}, {32}, {64}},
         [](const Params& p, std::uint64_t) {
             return projection_point(gen_fullmerge_quadratic(at(p, 0)), "p",
                                     [](GType g) { return project_inductive(g, "p", MergeKind::Full); });
         }},
        {"fullmerge-opt", {{2}, {4}, {6}, {8}, {10}},
         [](const Params& p, std::uint64_t) {
             return projection_point(gen_fullmerge_opt(at(p, 0)), "r", [](GType g) { return project_full_optimized(g, "r"); });
         }},
        {"tbc-quadratic", {{2}, {4}, {8}, {16}, {32}},
         [](const Params& p, std::uint64_t) {
             return projection_point(gen_tbc_quadratic(at(p, 0)), "p", [](GType g) { return project_tirore(g, "p"); });
         }},
        {"cf", {{2, 3}, {2, 3, 5}, {2, 3, 5, 7}},
         [](const Params& p, std::uint64_t) {
             GType g = gen_cf(p);
             SubsetProjection s = project_subset(g, "q");
             return BenchPoint{size(g), s.nodes.size(), s.defined ? "defined" : "undefined"};
         }},
        {"lcm", {{2}, {2, 3}, {2, 3, 5}, {2, 3, 5, 7}},
         [](const Params& p, std::uint64_t budget) {
             Proc proc = gen_lcm_process(p);
             Inference inf = infer_min_type(proc, budget);
             return BenchPoint{size(proc), inf.graph.graph.node_count(), inf.typable ? "typable" : "untypable"};
         }},
        {"qbf", {{1}, {2}, {3}, {4}},
         [](const Params& p, std::uint64_t budget) {
             Qbf f = qbf_chain(at(p, 0));
             TypingContext ctx = gen_qbf_context(f, Property::Safety);
             std::uint64_t sz = 0;
             for (const auto& [r, t] : ctx) sz += size(t);
             Verdict v = check(ctx, Property::Safety, budget);
             return BenchPoint{sz, v.states, v.holds == eval_qbf(f) ? "agrees" : "disagrees"};
         }},
    };
    return fs;
}

Params parse_params(const std::string& s) {
    Params p;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            long v = std::stol(item, &used);
            if (used != item.size() || v < 0) throw std::invalid_argument(item);
            p.push_back(static_cast<unsigned>(v));
        } catch (const std::exception&) {
            throw InputError("bad benchmark parameter '" + item + "'");
        }
    }
    if (p.empty()) throw InputError("empty benchmark parameter");
    return p;
}

int cmd_bench(const Globals& g, const std::string& family, const std::vector<std::string>& params, const std::string& out,
              bool list) {
    if (list) {
        for (const auto& f : families()) std::cout << f.name << "\n";
        return kHolds;
    }
    const Family* fam = nullptr;
    for (const auto& f : families())
        if (f.name == family) fam = &f;
    if (!fam) throw InputError("unknown benchmark family '" + family + "' (see bench --list)");
    std::vector<Params> points;
    for (const auto& s : params) points.push_back(parse_params(s));
    if (points.empty()) points = fam->defaults;
    std::ostringstream csv;
    csv << "family,n,size,time_ns,work,outcome\n";
    json rows = json::array();
    for (const auto& p : points) {
        std::string n;
        for (std::size_t i = 0; i < p.size(); ++i) n += (i ? "x" : "") + std::to_string(p[i]);
        BenchPoint r;
        auto start = std::chrono::steady_clock::now();
        try {
            r = fam->run(p, g.budget);
        } catch (const BudgetExceeded&) {
            r.outcome = "timeout";
        }
        auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
        csv << fam->name << "," << n << "," << r.size << "," << ns << "," << r.work << "," << r.outcome << "\n";
        rows.push_back({{"family", fam->name}, {"n", n}, {"size", r.size}, {"time_ns", ns}, {"work", r.work}, {"outcome", r.outcome}});
    }
    if (!out.empty()) write_file(out, csv.str());
    emit(g, rows, out.empty() ? csv.str() : "wrote " + std::to_string(points.size()) + " rows to " + out + "\n");
    return kHolds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiparty session type toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_flag("--json", g.json, "Emit JSON");
    app.add_option("--budget", g.budget, "Work cap: states, judgements or graph nodes");
    app.add_option("--seed", g.seed, "Seed for randomized steps");

    std::function<int()> action;
    std::string file, file2, as = "auto", algo = "sim", onto, kind = "full", prop = "safety", dot, formula, family, out;
    bool constraints = false, oracle = false, trace = false, validate_it = false, list = false;
    unsigned depth = 12, runs = 20;
    std::vector<std::string> params;

    auto* parse = app.add_subcommand("parse", "Parse and pretty-print a type, process, session or context");
    parse->add_option("input", file, "File, '-' or inline text")->required();
    parse->add_option("--as", as, "local, global, process, session, context or auto");
    parse->callback([&] { action = [&] { return cmd_parse(g, file, as); }; });

    auto* sub = app.add_subcommand("subtype", "Decide T1 <= T2");
    sub->add_option("left", file, "Subtype")->required();
    sub->add_option("right", file2, "Supertype")->required();
    sub->add_option("--algo", algo, "sim or inductive");
    sub->callback([&] { action = [&] { return cmd_subtype(g, file, file2, algo); }; });

    auto* proj = app.add_subcommand("project", "Project a global type");
    proj->add_option("global", file, "Global type")->required();
    proj->add_option("--onto", onto, "Single participant (default: all)");
    proj->add_option("--kind", kind, "plain, full, tbc or subset");
    proj->callback([&] { action = [&] { return cmd_project(g, file, onto, kind); }; });

    auto* inf = app.add_subcommand("infer", "Infer the minimum type of a process");
    inf->add_option("process", file, "Process")->required();
    inf->add_flag("--constraints", constraints, "List the generated constraints");
    inf->callback([&] { action = [&] { return cmd_infer(g, file, constraints); }; });

    auto* cc = app.add_subcommand("check-context", "Check safety, deadlock-freedom or liveness of a typing context");
    cc->add_option("context", file, "Typing context")->required();
    cc->add_option("--prop", prop, "safety, df or live");
    cc->add_flag("--oracle", oracle, "Cross-check liveness by path enumeration");
    cc->add_flag("--trace", trace, "Print the counterexample");
    cc->add_option("--dot", dot, "Write the reachable graph as DOT");
    cc->callback([&] { action = [&] { return cmd_check_context(g, file, prop, oracle, trace, dot); }; });

    auto* cs = app.add_subcommand("check-session", "Explore a session for errors and deadlocks");
    cs->add_option("session", file, "Session")->required();
    cs->add_option("--depth", depth, "Exploration depth");
    cs->add_option("--runs", runs, "Random walks after the exhaustive search");
    cs->callback([&] { action = [&] { return cmd_check_session(g, file, depth, runs); }; });

    auto* gen = app.add_subcommand("gen", "Generate instances");
    gen->require_subcommand(1);
    auto* qbf = gen->add_subcommand("qbf", "Typing context encoding a QBF");
    qbf->add_option("--formula", formula, "e.g. \"A x. E y. (x | ~y | y)\"")->required();
    qbf->add_option("--prop", prop, "safety, df or live");
    qbf->add_flag("--validate", validate_it, "Compare the property with the formula's truth");
    qbf->callback([&] { action = [&] { return cmd_gen_qbf(g, formula, prop, validate_it); }; });

    auto* td = app.add_subcommand("topdown", "Check a session against a global type");
    td->add_option("session", file, "Session")->required();
    td->add_option("global", file2, "Global type")->required();
    td->add_option("--kind", kind, "plain, full, tbc or subset");
    td->callback([&] { action = [&] { return cmd_topdown(g, file, file2, kind); }; });

    auto* bu = app.add_subcommand("bottomup", "Infer a context for a session and check it");
    bu->add_option("session", file, "Session")->required();
    bu->add_option("--prop", prop, "safety, df or live");
    bu->callback([&] { action = [&] { return cmd_bottomup(g, file, prop); }; });

    auto* bench = app.add_subcommand("bench", "Run a worst-case family and emit CSV");
    bench->add_option("--family", family, "Family name");
    bench->add_option("--param", params, "Comma-separated parameters of one point (repeatable)");
    bench->add_option("--out", out, "CSV output path");
    bench->add_flag("--list", list, "List the families");
    bench->callback([&] { action = [&] { return cmd_bench(g, family, params, out, list); }; });

    auto* graph = app.add_subcommand("graph", "Print a type graph or context graph as DOT");
    graph->add_option("input", file, "Input")->required();
    graph->add_option("--as", as, "local, global or context");
    graph->callback([&] { action = [&] { return cmd_graph(g, file, as == "auto" ? "local" : as); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kHolds : kInputError;
    }
    try {
        return action();
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kBudget;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
}
