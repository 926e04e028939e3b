#include "gbpi/frontend.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace gbpi {

SyntaxError::SyntaxError(const std::string& msg, int l, int c)
    : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + msg), line(l), column(c) {}

namespace {

enum class Tok { Num, Ident, Punct, End };

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

const std::set<std::string, std::less<>> kKeywords = {"sample", "fun",   "fix", "if",      "then", "else",
                                                      "let",    "in",    "score", "observe", "from"};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        int l = line, cl = col;
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            out.push_back({Tok::Num, std::string(src.substr(i, j - i)), l, cl});
            advance(j - i);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, cl});
            advance(j - i);
            continue;
        }
        static const char* two[] = {"->", "<=", "(+"};
        bool matched = false;
        for (const char* p : two) {
            if (src.substr(i, 2) == p) {
                out.push_back({Tok::Punct, p, l, cl});
                advance(2);
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (std::string_view("(),:;+-*=").find(c) != std::string_view::npos) {
            out.push_back({Tok::Punct, std::string(1, c), l, cl});
            advance(1);
            continue;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", l, cl);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    TermPtr program() {
        TypeEnv env;
        TermPtr t = seq(env);
        if (peek().kind != Tok::End) fail(describe(peek()));
        return t;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& msg, const Token* at = nullptr) const {
        const Token& t = at ? *at : peek();
        throw SyntaxError(msg, t.line, t.col);
    }

    static std::string describe(const Token& t) {
        return t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'";
    }

    bool is_punct(const char* p, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
    }
    bool is_kw(const char* k) const { return peek().kind == Tok::Ident && peek().text == k; }

    void expect_punct(const char* p) {
        if (!is_punct(p)) fail(std::string("expected '") + p + "'");
        next();
    }
    void expect_kw(const char* k) {
        if (!is_kw(k)) fail(std::string("expected '") + k + "'");
        next();
    }

    std::string ident() {
        if (peek().kind != Tok::Ident || kKeywords.count(peek().text)) fail("expected identifier");
        return next().text;
    }

    Rational number() {
        bool negative = false;
        if (is_punct("-")) {
            next();
            negative = true;
        }
        if (peek().kind != Tok::Num) fail("expected number");
        Token t = next();
        Rational q;
        try {
            q = parse_decimal(t.text);
        } catch (const std::exception&) {
            fail("malformed number '" + t.text + "'", &t);
        }
        return negative ? Rational(-q) : q;
    }

    // The codomain of a fix header is followed by "->", so arrows there need parentheses.
    TypePtr type_atom() {
        TypePtr t;
        if (is_punct("(")) {
            next();
            t = type();
            expect_punct(")");
        } else if (peek().kind == Tok::Ident && peek().text == "R") {
            next();
            t = SimpleType::real();
        } else {
            fail("expected a type");
        }
        return t;
    }

    TypePtr type() {
        TypePtr t = type_atom();
        if (is_punct("->")) {
            next();
            return SimpleType::fn(t, type());
        }
        return t;
    }

    TypePtr type_of(const TypeEnv& env, const TermPtr& t, const Token& at) {
        try {
            return typecheck_simple(env, t);
        } catch (const TypeError& e) {
            fail(e.what(), &at);
        }
    }

    TermPtr sequence_of(const TypeEnv& env, TermPtr first, const Token& at, TermPtr rest_fn(Parser&, const TypeEnv&)) {
        TypePtr ty = type_of(env, first, at);
        TypeEnv inner = env;
        inner.erase("_");
        TermPtr rest = rest_fn(*this, inner);
        return mk_app(mk_lambda("_", ty, rest), first);
    }

    TermPtr seq(const TypeEnv& env) {
        Token start = peek();
        TermPtr first = choice(env);
        if (!is_punct(";")) return first;
        next();
        return sequence_of(env, first, start, [](Parser& p, const TypeEnv& e) { return p.seq(e); });
    }

    TermPtr choice(const TypeEnv& env) {
        TermPtr left = sum(env);
        if (!is_punct("(+")) return left;
        next();
        Rational p = number();
        expect_punct(")");
        TermPtr right = choice(env);
        return mk_if(mk_prim("sub", {mk_sample(), mk_num(p)}), left, right);
    }

    TermPtr sum(const TypeEnv& env) {
        TermPtr t = prod(env);
        while (is_punct("+") || is_punct("-")) {
            bool plus = next().text == "+";
            TermPtr r = prod(env);
            t = mk_prim(plus ? "add" : "sub", {t, r});
        }
        return t;
    }

    TermPtr prod(const TypeEnv& env) {
        TermPtr t = unary(env);
        while (is_punct("*")) {
            next();
            t = mk_prim("mul", {t, unary(env)});
        }
        return t;
    }

    TermPtr unary(const TypeEnv& env) {
        if (is_punct("-")) {
            next();
            TermPtr t = unary(env);
            if (t->is_lit() && t->lit->is_point()) return mk_num(Rational(-t->lit->lo().value()));
            return mk_prim("neg", {t});
        }
        return app(env);
    }

    bool starts_atom() const {
        const Token& t = peek();
        if (t.kind == Tok::Num) return true;
        if (t.kind == Tok::Ident) {
            static const std::set<std::string, std::less<>> stop = {"then", "else", "in", "from"};
            return !stop.count(t.text);
        }
        return is_punct("(");
    }

    TermPtr app(const TypeEnv& env) {
        TermPtr t = atom(env);
        while (starts_atom()) t = mk_app(t, atom(env));
        return t;
    }

    TermPtr prim_call(const TypeEnv& env, const Token& name_tok) {
        std::string name = name_tok.text;
        PrimPtr prim;
        if (is_family(name)) {
            expect_punct("(");
            std::vector<Rational> params{number()};
            while (is_punct(",")) {
                next();
                params.push_back(number());
            }
            expect_punct(")");
            try {
                prim = registry_family(name, params);
            } catch (const UnknownPrimitive& e) {
                fail(e.what(), &name_tok);
            }
        } else {
            try {
                prim = registry_lookup(name);
            } catch (const UnknownPrimitive& e) {
                fail(e.what(), &name_tok);
            }
        }
        expect_punct("(");
        std::vector<TermPtr> args{seq(env)};
        while (is_punct(",")) {
            next();
            args.push_back(seq(env));
        }
        expect_punct(")");
        if (static_cast<int>(args.size()) != prim->arity)
            fail(prim->name + " expects " + std::to_string(prim->arity) + " argument(s)", &name_tok);
        return mk_prim(prim, std::move(args));
    }

    TermPtr atom(const TypeEnv& env) {
        Token t = peek();
        if (t.kind == Tok::Num) {
            return mk_num(number());
        }
        if (is_punct("(")) {
            next();
            TermPtr e = seq(env);
            expect_punct(")");
            return e;
        }
        if (t.kind != Tok::Ident) fail(describe(t));
        const std::string& w = t.text;
        if (w == "sample") {
            next();
            return mk_sample();
        }
        if (w == "score") {
            next();
            expect_punct("(");
            TermPtr e = seq(env);
            expect_punct(")");
            return mk_score(e);
        }
        if (w == "fun") {
            next();
            expect_punct("(");
            std::string x = ident();
            expect_punct(":");
            TypePtr ty = type();
            expect_punct(")");
            expect_punct("->");
            TypeEnv inner = env;
            inner[x] = ty;
            return mk_lambda(x, ty, seq(inner));
        }
        if (w == "fix") {
            next();
            std::string self = ident();
            expect_punct("(");
            std::string x = ident();
            expect_punct(":");
            TypePtr dom = type();
            expect_punct(")");
            expect_punct(":");
            TypePtr cod = type_atom();
            expect_punct("->");
            TypePtr fn = SimpleType::fn(dom, cod);
            TypeEnv inner = env;
            inner[self] = fn;
            inner[x] = dom;
            return mk_fix(self, x, fn, seq(inner));
        }
        if (w == "if") {
            next();
            TermPtr g = sum(env);
            expect_punct("<=");
            TermPtr rhs = sum(env);
            if (!(rhs->is_lit() && rhs->lit->is_point() && rhs->lit->lo().is_zero())) g = mk_prim("sub", {g, rhs});
            expect_kw("then");
            TermPtr a = seq(env);
            expect_kw("else");
            TermPtr b = seq(env);
            return mk_if(g, a, b);
        }
        if (w == "let") {
            next();
            Token name_tok = peek();
            std::string x = ident();
            TypePtr annotated;
            if (is_punct(":")) {
                next();
                annotated = type();
            }
            expect_punct("=");
            Token rhs_tok = peek();
            TermPtr m = seq(env);
            TypePtr ty = type_of(env, m, rhs_tok);
            if (annotated && !same_type(*annotated, *ty))
                fail("let-binding '" + x + "' annotated " + annotated->str() + " but has type " + ty->str(), &name_tok);
            expect_kw("in");
            TypeEnv inner = env;
            inner[x] = ty;
            return mk_app(mk_lambda(x, ty, seq(inner)), m);
        }
        if (w == "observe") {
            next();
            TermPtr e = sum(env);
            expect_kw("from");
            Token dist = peek();
            std::string d = ident();
            std::string family;
            if (d == "normal" || d == "Normal") family = "pdf_normal";
            else if (d == "uniform" || d == "Uniform") family = "pdf_uniform";
            else fail("unknown distribution '" + d + "'", &dist);
            expect_punct("(");
            std::vector<Rational> params{number()};
            while (is_punct(",")) {
                next();
                params.push_back(number());
            }
            expect_punct(")");
            PrimPtr prim;
            try {
                prim = registry_family(family, params);
            } catch (const UnknownPrimitive& ex) {
                fail(ex.what(), &dist);
            }
            return mk_score(mk_prim(prim, {e}));
        }
        if (kKeywords.count(w)) fail("unexpected '" + w + "'");
        next();
        if (env.count(w) && w != "_") return mk_var(w);
        if (is_primitive_name(w) && is_punct("(")) return prim_call(env, t);
        if (is_primitive_name(w)) fail("primitive '" + w + "' must be applied", &t);
        fail("unbound identifier '" + w + "'", &t);
    }
};

}  // namespace

TermPtr parse_program(std::string_view source) {
    Parser p(lex(source));
    TermPtr t = p.program();
    typecheck_simple(t);
    return t;
}

TermPtr parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_program(ss.str());
}

TypePtr typecheck_simple(const TermPtr& term) { return typecheck_simple(TypeEnv{}, term); }

TypePtr typecheck_simple(const TypeEnv& env, const TermPtr& t) {
    auto expect_real = [&](const TermPtr& sub, const char* what) {
        TypePtr ty = typecheck_simple(env, sub);
        if (ty->arrow) throw TypeError(std::string(what) + " expects R, got " + ty->str());
    };
    switch (t->kind) {
        case TermKind::Var: {
            auto it = env.find(t->name);
            if (it == env.end()) throw TypeError("unbound variable '" + t->name + "'");
            return it->second;
        }
        case TermKind::Lit:
        case TermKind::Sample:
        case TermKind::SampleVar: return SimpleType::real();
        case TermKind::Lambda: {
            TypeEnv inner = env;
            inner[t->name] = t->type;
            return SimpleType::fn(t->type, typecheck_simple(inner, t->kids[0]));
        }
        case TermKind::Fix: {
            if (!t->type->arrow) throw TypeError("fixpoint '" + t->name + "' needs a function type");
            TypeEnv inner = env;
            inner[t->name] = t->type;
            inner[t->param] = t->type->dom;
            TypePtr body = typecheck_simple(inner, t->kids[0]);
            if (!same_type(*body, *t->type->cod))
                throw TypeError("fixpoint '" + t->name + "' body has type " + body->str() + ", declared " +
                                t->type->cod->str());
            return t->type;
        }
        case TermKind::App: {
            TypePtr f = typecheck_simple(env, t->kids[0]);
            if (!f->arrow) throw TypeError("applying a term of type R");
            TypePtr a = typecheck_simple(env, t->kids[1]);
            if (!same_type(*f->dom, *a)) throw TypeError("argument has type " + a->str() + ", expected " + f->dom->str());
            return f->cod;
        }
        case TermKind::If: {
            expect_real(t->kids[0], "conditional guard");
            TypePtr a = typecheck_simple(env, t->kids[1]);
            TypePtr b = typecheck_simple(env, t->kids[2]);
            if (!same_type(*a, *b)) throw TypeError("branches have types " + a->str() + " and " + b->str());
            return a;
        }
        case TermKind::Prim:
            if (static_cast<int>(t->kids.size()) != t->prim->arity) throw TypeError("arity mismatch for " + t->prim->name);
            for (const auto& k : t->kids) expect_real(k, t->prim->name.c_str());
            return SimpleType::real();
        case TermKind::Score: expect_real(t->kids[0], "score"); return SimpleType::real();
    }
    throw TypeError("unknown term");
}

}  // namespace gbpi
