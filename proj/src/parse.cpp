#include <algorithm>
#include <cctype>
#include <string_view>

#include "mpst/syntax.hpp"

namespace mpst {

namespace {

enum class Tok { Ident, Number, Sym, Eof };

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

const char* const kSymbols[] = {"(+)", "->", "::", "\\/", "!", "?", "(", ")", ";", "+", "&",
                                "{",   "}",  ":",  ",",   ".", "<", ">", "-", "|"};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') ++i;
            continue;
        }
        if (std::isalpha(c)) {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Tok::Number, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        bool matched = false;
        for (const char* sym : kSymbols) {
            std::string_view sv(sym);
            if (s.compare(i, sv.size(), sv) == 0) {
                out.push_back({Tok::Sym, std::string(sv), i});
                i += sv.size();
                matched = true;
                break;
            }
        }
        if (!matched) throw ParseError(std::string("unexpected character '") + s[i] + "'", i);
    }
    out.push_back({Tok::Eof, "", s.size()});
    return out;
}

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(lex(text)) {}

    LType local() {
        const Token& t = peek();
        if (is_kw("end")) {
            next();
            return lt::end();
        }
        if (is_kw("rec")) {
            next();
            std::string name = ident("type variable");
            expect(".");
            lstack_.push_back(name);
            LType body = local();
            lstack_.pop_back();
            return guard(t.pos, [&] { return lt::rec(body); });
        }
        std::string id = ident("participant or type variable");
        if (is_sym("!") || is_sym("?")) {
            bool out = next().text == "!";
            expect("(");
            Sort s = sort();
            expect(")");
            expect(";");
            LType cont = local();
            return out ? lt::out(id, s, cont) : lt::in(id, s, cont);
        }
        if (is_sym("+") || is_sym("&")) {
            bool sel = next().text == "+";
            expect("{");
            std::vector<LBranch> bs;
            do {
                std::string label = ident("label");
                expect(":");
                bs.push_back({label, local()});
            } while (accept(","));
            expect("}");
            return guard(t.pos, [&] { return sel ? lt::sel(id, bs) : lt::bra(id, bs); });
        }
        for (std::size_t k = lstack_.size(); k-- > 0;)
            if (lstack_[k] == id) return lt::var(static_cast<std::uint32_t>(lstack_.size() - 1 - k));
        return lt::free(id);
    }

    GType global() {
        const Token& t = peek();
        if (is_kw("end")) {
            next();
            return gt::end();
        }
        if (is_kw("rec")) {
            next();
            std::string name = ident("type variable");
            expect(".");
            gstack_.push_back(name);
            GType body = global();
            gstack_.pop_back();
            return guard(t.pos, [&] { return gt::rec(body); });
        }
        std::string id = ident("participant or type variable");
        if (accept("->")) {
            std::string to = ident("participant");
            if (accept("(")) {
                Sort s = sort();
                expect(")");
                expect(";");
                GType cont = global();
                return guard(t.pos, [&] { return gt::msg(id, to, s, cont); });
            }
            expect("{");
            std::vector<GBranch> bs;
            do {
                std::string label = ident("label");
                expect(":");
                bs.push_back({label, global()});
            } while (accept(","));
            expect("}");
            return guard(t.pos, [&] { return gt::choice(id, to, bs); });
        }
        for (std::size_t k = gstack_.size(); k-- > 0;)
            if (gstack_[k] == id) return gt::var(static_cast<std::uint32_t>(gstack_.size() - 1 - k));
        return gt::free(id);
    }

    ExprP expr() {
        ExprP e = or_expr();
        while (accept("(+)")) e = ex::nondet(e, or_expr());
        return e;
    }

    Proc process() {
        const Token& t = peek();
        if (t.kind == Tok::Number && t.text == "0") {
            next();
            return pr::inact();
        }
        if (accept("(")) {
            Proc p = process();
            expect(")");
            return p;
        }
        if (is_kw("if")) {
            next();
            ExprP e = expr();
            expect_kw("then");
            Proc a = process();
            expect_kw("else");
            Proc b = process();
            return pr::cond(e, a, b);
        }
        if (is_kw("rec")) {
            next();
            std::string name = ident("process variable");
            expect(".");
            return pr::rec(name, process());
        }
        std::string id = ident("participant or process variable");
        if (accept("!")) {
            expect("<");
            ExprP e = expr();
            expect(">");
            expect(";");
            return pr::send(id, e, process());
        }
        if (accept("?")) {
            expect("(");
            std::string x = ident("value variable");
            expect(")");
            expect(";");
            return pr::recv(id, x, process());
        }
        if (accept("(+)")) {
            std::string l = ident("label");
            expect(";");
            return pr::sel(id, l, process());
        }
        if (accept("&")) {
            expect("{");
            std::vector<PBranch> bs;
            do {
                std::string label = ident("label");
                expect(":");
                bs.push_back({label, process()});
            } while (accept(","));
            expect("}");
            return guard(t.pos, [&] { return pr::bra(id, bs); });
        }
        return pr::var(id);
    }

    Proc closed_process(std::size_t pos) {
        Proc p = process();
        return guard(pos, [&] { return normalize(p); });
    }

    Session session() {
        Session s;
        do {
            std::size_t pos = peek().pos;
            std::string role = ident("participant");
            expect("::");
            s.emplace_back(role, closed_process(pos));
        } while (accept("|"));
        return sorted_unique(std::move(s), "session");
    }

    TypingContext context() {
        TypingContext c;
        do {
            std::string role = ident("participant");
            expect(":");
            std::size_t pos = peek().pos;
            LType t = local();
            if (!t->closed()) throw ParseError("open type for participant " + role, pos);
            c.emplace_back(role, t);
        } while (accept(","));
        return sorted_unique(std::move(c), "context");
    }

    void finish() {
        if (peek().kind != Tok::Eof) throw ParseError("trailing input '" + peek().text + "'", peek().pos);
    }

    std::size_t pos() const { return peek().pos; }

private:
    template <class V>
    V sorted_unique(V v, const char* what) {
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i].first == v[i - 1].first)
                throw ParseError(std::string("duplicate participant ") + v[i].first + " in " + what, 0);
        return v;
    }

    template <class F>
    auto guard(std::size_t pos, F&& f) -> decltype(f()) {
        try {
            return f();
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), pos);
        }
    }

    ExprP or_expr() {
        ExprP e = add_expr();
        while (accept("\\/")) e = ex::lor(e, add_expr());
        return e;
    }

    ExprP add_expr() {
        ExprP e = unary();
        while (accept("+")) e = ex::add(e, unary());
        return e;
    }

    ExprP unary() {
        if (accept("!")) return ex::lnot(unary());
        if (is_kw("neg")) {
            next();
            return ex::neg(unary());
        }
        const Token& t = peek();
        if (accept("(")) {
            ExprP e = expr();
            expect(")");
            return e;
        }
        if (accept("-")) return ex::integer(-number());
        if (accept("+")) return ex::integer(number());
        if (t.kind == Tok::Number) return ex::nat(number());
        if (is_kw("true")) {
            next();
            return ex::tt();
        }
        if (is_kw("false")) {
            next();
            return ex::ff();
        }
        return ex::var(ident("expression"));
    }

    std::int64_t number() {
        const Token& t = next();
        if (t.kind != Tok::Number) throw ParseError("expected number", t.pos);
        try {
            return std::stoll(t.text);
        } catch (const std::exception&) {
            throw ParseError("number out of range", t.pos);
        }
    }

    Sort sort() {
        const Token& t = next();
        if (t.kind == Tok::Ident) {
            if (t.text == "bool") return Sort::boolean();
            if (t.text == "nat") return Sort::nat();
            if (t.text == "int") return Sort::integer();
        }
        throw ParseError("expected sort (bool, nat, int)", t.pos);
    }

    std::string ident(const char* what) {
        const Token& t = next();
        if (t.kind != Tok::Ident) throw ParseError(std::string("expected ") + what, t.pos);
        return t.text;
    }

    const Token& peek() const { return toks_[i_]; }
    const Token& next() {
        const Token& t = toks_[i_];
        if (i_ + 1 < toks_.size()) ++i_;
        return t;
    }
    bool is_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }
    bool is_kw(const char* s) const { return peek().kind == Tok::Ident && peek().text == s; }
    bool accept(const char* s) {
        if (!is_sym(s)) return false;
        next();
        return true;
    }
    void expect(const char* s) {
        if (!accept(s)) throw ParseError(std::string("expected '") + s + "'", peek().pos);
    }
    void expect_kw(const char* s) {
        if (!is_kw(s)) throw ParseError(std::string("expected '") + s + "'", peek().pos);
        next();
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
    std::vector<std::string> lstack_, gstack_;
};

}  // namespace

LType parse_local(const std::string& text) {
    Parser p(text);
    LType t = p.local();
    p.finish();
    return t;
}

GType parse_global(const std::string& text) {
    Parser p(text);
    GType g = p.global();
    p.finish();
    return g;
}

ExprP parse_expr(const std::string& text) {
    Parser p(text);
    ExprP e = p.expr();
    p.finish();
    return e;
}

Proc parse_process(const std::string& text) {
    Parser p(text);
    Proc q = p.closed_process(0);
    p.finish();
    return q;
}

Session parse_session(const std::string& text) {
    Parser p(text);
    Session s = p.session();
    p.finish();
    return s;
}

TypingContext parse_context(const std::string& text) {
    Parser p(text);
    TypingContext c = p.context();
    p.finish();
    return c;
}

}  // namespace mpst
