#include <gtest/gtest.h>

#include <json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

namespace {

struct CliRun {
    int code;
    std::string out;
};

std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

CliRun cli(const std::vector<std::string>& args) {
    std::string cmd = MPST_CLI_PATH;
    for (const auto& a : args) cmd += " " + quote(a);
    cmd += " 2>&1";
    FILE* f = popen(cmd.c_str(), "r");
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = std::fread(buf.data(), 1, buf.size(), f)) out.append(buf.data(), n);
    int status = pclose(f);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

nlohmann::json cli_json(const std::vector<std::string>& args, int want_code) {
    std::vector<std::string> a{"--json"};
    a.insert(a.end(), args.begin(), args.end());
    CliRun r = cli(a);
    EXPECT_EQ(r.code, want_code) << r.out;
    return nlohmann::json::parse(r.out);
}

const char* kD7 = "q: rec t. p?(int); t, p: rec t. q!(int); t, r: s?(bool); end, s: r!(int); end";

TEST(Cli, Parse) {
    auto j = cli_json({"parse", "rec x. p!(int); x"}, 0);
    EXPECT_EQ(j["kind"], "local");
    EXPECT_EQ(j["printed"], "rec t. p!(int); t");
    EXPECT_EQ(cli_json({"parse", "p->q(int); end"}, 0)["kind"], "global");
    EXPECT_EQ(cli_json({"parse", "p :: q!<1>; 0 | q :: p?(x); 0"}, 0)["kind"], "session");
    EXPECT_EQ(cli_json({"parse", kD7}, 0)["kind"], "context");
    EXPECT_EQ(cli({"parse", "p!("}).code, 2);
}

TEST(Cli, SubtypeExitCodes) {
    EXPECT_EQ(cli({"subtype", "p+{a: end}", "p+{a: end, b: end}"}).code, 0);
    EXPECT_EQ(cli({"subtype", "p+{a: end, b: end}", "p+{a: end}"}).code, 1);
    auto j = cli_json({"subtype", "--algo", "inductive", "p&{a: end, b: end}", "p&{a: end}"}, 0);
    EXPECT_GT(j["stats"]["judgements"].get<int>(), 0);
}

TEST(Cli, BudgetExitCode) {
    EXPECT_EQ(cli({"--budget", "1", "check-context", "p: q!(int); end, q: p?(int); end", "--prop", "live"}).code, 3);
}

TEST(Cli, ProjectInferCheck) {
    auto p = cli_json({"project", "rec t. q->r{l1: r->p{l1: t}, l2: r->p{l2: end}}", "--kind", "plain"}, 1);
    EXPECT_FALSE(p["projections"]["p"]["defined"]);
    auto i = cli_json({"infer", "rec X. p?(x); p!<x>; X"}, 0);
    EXPECT_EQ(i["type"], "rec t. p?('a); p!('a); t");
    auto c = cli_json({"check-context", kD7, "--prop", "live", "--trace", "--oracle"}, 1);
    EXPECT_FALSE(c["holds"]);
    EXPECT_FALSE(c["oracle"]["brute_force"]);
    EXPECT_EQ(c["trace"]["cycle_start"], 0);
    EXPECT_EQ(cli_json({"check-context", kD7, "--prop", "df"}, 0)["holds"], true);
}

TEST(Cli, DotOutput) {
    std::string path = testing::TempDir() + "mpst_cli_dot.dot";
    EXPECT_EQ(cli({"check-context", "q: p?(int); end", "--prop", "df", "--dot", path}).code, 1);
    std::ifstream in(path);
    std::string dot((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_NE(dot.find("color=orange"), std::string::npos);
    EXPECT_NE(cli({"graph", "rec t. p!(int); t", "--as", "local"}).out.find("digraph"), std::string::npos);
}

TEST(Cli, SessionsAndPipelines) {
    auto e = cli_json({"check-session", "p :: q(+)l; 0 | q :: p&{m: 0}"}, 1);
    EXPECT_TRUE(e["error_reached"]);
    auto td = cli_json({"topdown", "q :: r(+)l1; 0 | r :: q&{l1: p(+)l1; 0} | p :: r&{l1: 0}", "q->r{l1: r->p{l1: end}}"}, 0);
    EXPECT_TRUE(td["accepted"]);
    auto bu = cli_json({"bottomup", "p :: q!<1>; 0 | q :: p?(x); 0", "--prop", "live"}, 0);
    EXPECT_TRUE(bu["verdict"]["holds"]);
    EXPECT_EQ(cli({"bottomup", "p :: q(+)l; if false then q!<+1>; 0 else q?(x); 0", "--prop", "safety"}).code, 1);
}

TEST(Cli, QbfAndBench) {
    auto q = cli_json({"gen", "qbf", "--formula", "A x. (x | x | x)", "--prop", "df", "--validate"}, 0);
    EXPECT_FALSE(q["validation"]["formula_true"]);
    EXPECT_TRUE(q["validation"]["agrees"]);
    CliRun b = cli({"bench", "--family", "coprime", "--param", "3,4", "--param", "4,6"});
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(b.out.substr(0, b.out.find('\n')), "family,n,size,time_ns,work,outcome");
    EXPECT_NE(b.out.find("coprime,3x4,"), std::string::npos);
    EXPECT_EQ(cli({"bench", "--family", "nope"}).code, 2);
    CliRun t = cli({"--budget", "10", "bench", "--family", "inductive-blowup", "--param", "5"});
    EXPECT_NE(t.out.find(",timeout"), std::string::npos) << t.out;
}

}  // namespace
