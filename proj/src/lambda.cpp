#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "qlr/error.hpp"
#include "qlr/lambda.hpp"
#include "qlr/report.hpp"

namespace qlr {

// ---------------------------------------------------------------- types

TypeP real_type() {
    static const TypeP r = std::make_shared<SimpleType>();
    return r;
}

TypeP prod_type(TypeP a, TypeP b) {
    return std::make_shared<SimpleType>(SimpleType{SimpleType::Kind::Prod, std::move(a), std::move(b)});
}

TypeP arrow_type(TypeP a, TypeP b) {
    return std::make_shared<SimpleType>(SimpleType{SimpleType::Kind::Arrow, std::move(a), std::move(b)});
}

bool type_equal(const TypeP& a, const TypeP& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    if (a->kind == SimpleType::Kind::Real) return true;
    return type_equal(a->left, b->left) && type_equal(a->right, b->right);
}

std::string to_string(const TypeP& t) {
    using K = SimpleType::Kind;
    switch (t->kind) {
    case K::Real:
        return "Real";
    case K::Prod: {
        auto l = to_string(t->left), r = to_string(t->right);
        if (t->left->kind != K::Real) l = "(" + l + ")";
        if (t->right->kind == K::Arrow) r = "(" + r + ")";
        return l + " * " + r;
    }
    case K::Arrow: {
        auto l = to_string(t->left);
        if (t->left->kind == K::Arrow) l = "(" + l + ")";
        return l + " -> " + to_string(t->right);
    }
    }
    return {};
}

TypeP first_order_type(std::size_t arity) {
    TypeP t = real_type();
    for (std::size_t i = 0; i < arity; ++i) t = arrow_type(real_type(), t);
    return t;
}

std::optional<std::size_t> first_order_arity(const TypeP& t) {
    std::size_t n = 0;
    const SimpleType* p = t.get();
    while (p->kind == SimpleType::Kind::Arrow) {
        if (p->left->kind != SimpleType::Kind::Real) return std::nullopt;
        ++n;
        p = p->right.get();
    }
    if (p->kind != SimpleType::Kind::Real) return std::nullopt;
    return n;
}

// ---------------------------------------------------------------- terms

namespace {

TermP node(Term t) { return std::make_shared<const Term>(std::move(t)); }

} // namespace

TermP mk_var(std::string name, Span s) {
    Term t;
    t.kind = Term::Kind::Var;
    t.name = std::move(name);
    t.span = s;
    return node(std::move(t));
}

TermP mk_lam(std::string name, TypeP ty, TermP body, Span s) {
    Term t;
    t.kind = Term::Kind::Lam;
    t.name = std::move(name);
    t.annot = std::move(ty);
    t.a = std::move(body);
    t.span = s;
    return node(std::move(t));
}

TermP mk_app(TermP f, TermP x, Span s) {
    Term t;
    t.kind = Term::Kind::App;
    t.a = std::move(f);
    t.b = std::move(x);
    t.span = s;
    return node(std::move(t));
}

TermP mk_pair(TermP a, TermP b, Span s) {
    Term t;
    t.kind = Term::Kind::Pair;
    t.a = std::move(a);
    t.b = std::move(b);
    t.span = s;
    return node(std::move(t));
}

TermP mk_proj(int index, TermP x, Span s) {
    Term t;
    t.kind = Term::Kind::Proj;
    t.index = index;
    t.a = std::move(x);
    t.span = s;
    return node(std::move(t));
}

TermP mk_const(double v, Span s) {
    Term t;
    t.kind = Term::Kind::Const;
    t.value = v;
    t.span = s;
    return node(std::move(t));
}

TermP mk_prim(PrimP p, Span s) {
    Term t;
    t.kind = Term::Kind::Prim;
    t.prim = std::move(p);
    t.span = s;
    return node(std::move(t));
}

TermP mk_hole(Span s) {
    Term t;
    t.kind = Term::Kind::Hole;
    t.span = s;
    return node(std::move(t));
}

TermP mk_apps(TermP f, const std::vector<TermP>& args) {
    for (const auto& a : args) f = mk_app(f, a, f->span);
    return f;
}

// ---------------------------------------------------------------- lexer / parser

namespace {

enum class Tok { Ident, Number, Lambda, Colon, Dot, LParen, RParen, Comma, LBrack, RBrack, Hole, Arrow, Star, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0;
    Span span;
};

std::vector<Token> lex(const std::string& src) {
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
    auto peek = [&](std::size_t k) { return i + k < src.size() ? src[i + k] : '\0'; };
    while (i < src.size()) {
        char c = src[i];
        Span sp{line, col};
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '-' && peek(1) == '-') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (c == '-' && peek(1) == '>') {
            out.push_back({Tok::Arrow, "->", 0, sp});
            advance(2);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            std::size_t j = i + (c == '-' ? 1 : 0);
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                }
            }
            std::string text = src.substr(i, j - i);
            double v = 0;
            auto res = std::from_chars(text.data(), text.data() + text.size(), v);
            if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
                throw SyntaxError("malformed number '" + text + "'", sp.line, sp.col);
            out.push_back({Tok::Number, text, v, sp});
            advance(j - i);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            out.push_back({Tok::Ident, src.substr(i, j - i), 0, sp});
            advance(j - i);
            continue;
        }
        if (src.compare(i, 2, "\xCE\xBB") == 0) { // UTF-8 lambda
            out.push_back({Tok::Lambda, "\\", 0, sp});
            i += 2;
            ++col;
            continue;
        }
        Tok k;
        switch (c) {
        case '\\': k = Tok::Lambda; break;
        case ':': k = Tok::Colon; break;
        case '.': k = Tok::Dot; break;
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case ',': k = Tok::Comma; break;
        case '*': k = Tok::Star; break;
        case ']': k = Tok::RBrack; break;
        case '[':
            if (peek(1) == ']') {
                out.push_back({Tok::Hole, "[]", 0, sp});
                advance(2);
                continue;
            }
            k = Tok::LBrack;
            break;
        default:
            throw SyntaxError(std::string("unexpected character '") + c + "'", sp.line, sp.col);
        }
        out.push_back({k, std::string(1, c), 0, sp});
        advance(1);
    }
    out.push_back({Tok::End, "end of input", 0, {line, col}});
    return out;
}

class Parser {
  public:
    explicit Parser(const std::string& src) : toks_(lex(src)) {}

    TermP whole_term() {
        auto t = term();
        expect(Tok::End, "end of input");
        return t;
    }

    TypeP whole_type() {
        auto t = type();
        expect(Tok::End, "end of input");
        return t;
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<std::string> scope_;

    const Token& cur() const { return toks_[pos_]; }
    bool at(Tok k) const { return cur().kind == k; }
    bool at_word(const char* w) const { return at(Tok::Ident) && cur().text == w; }

    [[noreturn]] void fail(const std::string& what) const {
        throw SyntaxError(what + ", found '" + cur().text + "'", cur().span.line, cur().span.col);
    }

    Token expect(Tok k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what);
        return toks_[pos_++];
    }

    TypeP type() {
        auto l = prod_t();
        if (at(Tok::Arrow)) {
            ++pos_;
            return arrow_type(l, type());
        }
        return l;
    }

    TypeP prod_t() {
        auto l = atom_t();
        if (at(Tok::Star)) {
            ++pos_;
            return prod_type(l, prod_t());
        }
        return l;
    }

    TypeP atom_t() {
        if (at_word("Real")) {
            ++pos_;
            return real_type();
        }
        if (at(Tok::LParen)) {
            ++pos_;
            auto t = type();
            expect(Tok::RParen, "')'");
            return t;
        }
        fail("expected a type");
    }

    bool starts_atom() const {
        switch (cur().kind) {
        case Tok::Ident:
        case Tok::Number:
        case Tok::LParen:
        case Tok::Hole:
        case Tok::Lambda:
            return true;
        default:
            return false;
        }
    }

    TermP term() {
        if (at(Tok::Lambda)) return lambda();
        auto t = unary();
        while (starts_atom()) {
            Span s = t->span;
            if (at(Tok::Lambda)) {
                t = mk_app(t, lambda(), s);
                break;
            }
            t = mk_app(t, unary(), s);
        }
        return t;
    }

    TermP lambda() {
        Span s = cur().span;
        ++pos_;
        auto name = expect(Tok::Ident, "a binder name").text;
        if (name == "Real" || name == "fst" || name == "snd") fail("reserved word used as binder");
        expect(Tok::Colon, "':'");
        auto ty = type();
        expect(Tok::Dot, "'.'");
        scope_.push_back(name);
        auto body = term();
        scope_.pop_back();
        return mk_lam(name, ty, body, s);
    }

    TermP unary() {
        if (at_word("fst") || at_word("snd")) {
            Span s = cur().span;
            int idx = cur().text == "fst" ? 1 : 2;
            ++pos_;
            return mk_proj(idx, unary(), s);
        }
        return atom();
    }

    TermP atom() {
        Span s = cur().span;
        switch (cur().kind) {
        case Tok::Number: {
            double v = cur().number;
            ++pos_;
            return mk_const(v, s);
        }
        case Tok::Hole:
            ++pos_;
            return mk_hole(s);
        case Tok::LParen: {
            ++pos_;
            auto a = term();
            if (at(Tok::Comma)) {
                ++pos_;
                auto b = term();
                expect(Tok::RParen, "')'");
                return mk_pair(a, b, s);
            }
            expect(Tok::RParen, "')'");
            return a;
        }
        case Tok::Ident: {
            std::string name = cur().text;
            if (name == "Real") fail("expected a term");
            ++pos_;
            bool bound = std::find(scope_.rbegin(), scope_.rend(), name) != scope_.rend();
            if (bound || !is_primitive_name(name)) return mk_var(name, s);
            std::vector<double> params;
            if (at(Tok::LBrack)) {
                ++pos_;
                params.push_back(expect(Tok::Number, "a number").number);
                while (at(Tok::Comma)) {
                    ++pos_;
                    params.push_back(expect(Tok::Number, "a number").number);
                }
                expect(Tok::RBrack, "']'");
            }
            try {
                return mk_prim(lookup_primitive(name, params), s);
            } catch (const StructuralError& e) {
                throw SyntaxError(e.what(), s.line, s.col);
            }
        }
        default:
            fail("expected a term");
        }
    }
};

} // namespace

TermP parse_term(const std::string& src) { return Parser(src).whole_term(); }

TypeP parse_type(const std::string& src) { return Parser(src).whole_type(); }

TermP parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_term(ss.str());
}

// ---------------------------------------------------------------- printing

namespace {

void print(std::string& out, const TermP& t, int ctx); // 0 top, 1 app head, 2 argument

void print(std::string& out, const TermP& t, int ctx) {
    using K = Term::Kind;
    switch (t->kind) {
    case K::Var:
        out += t->name;
        return;
    case K::Const:
        out += fmt_real(t->value);
        return;
    case K::Prim:
        out += t->prim->display();
        return;
    case K::Hole:
        out += "[]";
        return;
    case K::Pair:
        out += "(";
        print(out, t->a, 0);
        out += ", ";
        print(out, t->b, 0);
        out += ")";
        return;
    case K::Lam:
        if (ctx) out += "(";
        out += "\\" + t->name + ":" + to_string(t->annot) + ". ";
        print(out, t->a, 0);
        if (ctx) out += ")";
        return;
    case K::Proj:
        if (ctx == 2) out += "(";
        out += t->index == 1 ? "fst " : "snd ";
        print(out, t->a, 2);
        if (ctx == 2) out += ")";
        return;
    case K::App:
        if (ctx == 2) out += "(";
        print(out, t->a, 1);
        out += " ";
        print(out, t->b, 2);
        if (ctx == 2) out += ")";
        return;
    }
}

} // namespace

std::string to_string(const TermP& t) {
    std::string out;
    print(out, t, 0);
    return out;
}

// ---------------------------------------------------------------- typing

TypeP typecheck(const TermP& t, const TypeEnv& env, const TypeP& hole_type) {
    using K = Term::Kind;
    auto err = [&](const std::string& what) -> TypeError { return TypeError(what, t->span.line, t->span.col); };
    switch (t->kind) {
    case K::Var:
        for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->first == t->name) return it->second;
        throw err("unbound variable " + t->name);
    case K::Const:
        return real_type();
    case K::Prim:
        return first_order_type(t->prim->arity);
    case K::Hole:
        if (!hole_type) throw err("hole outside a context");
        return hole_type;
    case K::Lam: {
        TypeEnv inner = env;
        inner.emplace_back(t->name, t->annot);
        return arrow_type(t->annot, typecheck(t->a, inner, hole_type));
    }
    case K::App: {
        auto f = typecheck(t->a, env, hole_type);
        auto x = typecheck(t->b, env, hole_type);
        if (f->kind != SimpleType::Kind::Arrow)
            throw err("cannot apply a term of type " + to_string(f));
        if (!type_equal(f->left, x))
            throw err("argument has type " + to_string(x) + " but " + to_string(f->left) + " is expected");
        return f->right;
    }
    case K::Pair:
        return prod_type(typecheck(t->a, env, hole_type), typecheck(t->b, env, hole_type));
    case K::Proj: {
        auto p = typecheck(t->a, env, hole_type);
        if (p->kind != SimpleType::Kind::Prod)
            throw err(std::string(t->index == 1 ? "fst" : "snd") + " of non-pair type " + to_string(p));
        return t->index == 1 ? p->left : p->right;
    }
    }
    throw err("malformed term");
}

// ---------------------------------------------------------------- syntax utilities

namespace {

void collect_free(const TermP& t, std::vector<std::string>& bound, std::vector<std::string>& out) {
    using K = Term::Kind;
    switch (t->kind) {
    case K::Var:
        if (std::find(bound.begin(), bound.end(), t->name) == bound.end() &&
            std::find(out.begin(), out.end(), t->name) == out.end())
            out.push_back(t->name);
        return;
    case K::Lam:
        bound.push_back(t->name);
        collect_free(t->a, bound, out);
        bound.pop_back();
        return;
    case K::App:
    case K::Pair:
        collect_free(t->a, bound, out);
        collect_free(t->b, bound, out);
        return;
    case K::Proj:
        collect_free(t->a, bound, out);
        return;
    default:
        return;
    }
}

bool occurs_free(const TermP& t, const std::string& x) {
    auto fv = free_vars(t);
    return std::find(fv.begin(), fv.end(), x) != fv.end();
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    std::string stem = base;
    while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
    if (stem.empty()) stem = "v";
    for (int k = 1;; ++k) {
        auto n = stem + std::to_string(k);
        if (!avoid.count(n)) return n;
    }
}

bool alpha_rec(const TermP& a, const TermP& b, std::vector<std::string>& ea, std::vector<std::string>& eb) {
    using K = Term::Kind;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case K::Var: {
        auto ia = std::find(ea.rbegin(), ea.rend(), a->name);
        auto ib = std::find(eb.rbegin(), eb.rend(), b->name);
        bool fa = ia == ea.rend(), fb = ib == eb.rend();
        if (fa || fb) return fa && fb && a->name == b->name;
        return (ia - ea.rbegin()) == (ib - eb.rbegin());
    }
    case K::Const:
        return a->value == b->value;
    case K::Prim:
        return a->prim->display() == b->prim->display();
    case K::Hole:
        return true;
    case K::Lam: {
        if (!type_equal(a->annot, b->annot)) return false;
        ea.push_back(a->name);
        eb.push_back(b->name);
        bool ok = alpha_rec(a->a, b->a, ea, eb);
        ea.pop_back();
        eb.pop_back();
        return ok;
    }
    case K::App:
    case K::Pair:
        return alpha_rec(a->a, b->a, ea, eb) && alpha_rec(a->b, b->b, ea, eb);
    case K::Proj:
        return a->index == b->index && alpha_rec(a->a, b->a, ea, eb);
    }
    return false;
}

TermP rebuild(const TermP& t, TermP a, TermP b) {
    Term c = *t;
    c.a = std::move(a);
    c.b = std::move(b);
    return node(std::move(c));
}

} // namespace

std::vector<std::string> free_vars(const TermP& t) {
    std::vector<std::string> bound, out;
    collect_free(t, bound, out);
    return out;
}

bool alpha_equal(const TermP& a, const TermP& b) {
    std::vector<std::string> ea, eb;
    return alpha_rec(a, b, ea, eb);
}

bool contains_hole(const TermP& t) {
    if (t->kind == Term::Kind::Hole) return true;
    return (t->a && contains_hole(t->a)) || (t->b && contains_hole(t->b));
}

std::size_t term_size(const TermP& t) {
    return 1 + (t->a ? term_size(t->a) : 0) + (t->b ? term_size(t->b) : 0);
}

TermP substitute(const TermP& t, const std::string& x, const TermP& s) {
    using K = Term::Kind;
    switch (t->kind) {
    case K::Var:
        return t->name == x ? s : t;
    case K::Lam: {
        if (t->name == x || !occurs_free(t->a, x)) return t;
        if (!occurs_free(s, t->name)) return rebuild(t, substitute(t->a, x, s), nullptr);
        std::set<std::string> avoid{x};
        for (auto& v : free_vars(s)) avoid.insert(v);
        for (auto& v : free_vars(t->a)) avoid.insert(v);
        auto y = fresh_name(t->name, avoid);
        auto body = substitute(t->a, t->name, mk_var(y, t->span));
        Term c = *t;
        c.name = y;
        c.a = substitute(body, x, s);
        return node(std::move(c));
    }
    case K::App:
    case K::Pair:
        return rebuild(t, substitute(t->a, x, s), substitute(t->b, x, s));
    case K::Proj:
        return rebuild(t, substitute(t->a, x, s), nullptr);
    default:
        return t;
    }
}

// ---------------------------------------------------------------- reduction

namespace {

std::optional<TermP> root_step(const TermP& t, StepKind* kind) {
    using K = Term::Kind;
    if (t->kind == K::App && t->a->kind == K::Lam) {
        if (kind) *kind = StepKind::Beta;
        return substitute(t->a->a, t->a->name, t->b);
    }
    if (t->kind == K::Proj && t->a->kind == K::Pair) {
        if (kind) *kind = StepKind::Projection;
        return t->index == 1 ? t->a->a : t->a->b;
    }
    if (t->kind == K::App) {
        std::vector<double> args;
        const Term* p = t.get();
        while (p->kind == K::App) {
            if (p->b->kind != K::Const) return std::nullopt;
            args.push_back(p->b->value);
            p = p->a.get();
        }
        if (p->kind == K::Prim && args.size() == p->prim->arity) {
            std::reverse(args.begin(), args.end());
            if (kind) *kind = StepKind::Delta;
            return mk_const(p->prim->eval(args), t->span);
        }
    }
    return std::nullopt;
}

std::optional<TermP> child_step(const TermP& t, Strategy s, StepKind* kind) {
    using K = Term::Kind;
    switch (t->kind) {
    case K::Lam:
        if (auto b = beta_step(t->a, s, kind)) return rebuild(t, *b, nullptr);
        return std::nullopt;
    case K::Proj:
        if (auto b = beta_step(t->a, s, kind)) return rebuild(t, *b, nullptr);
        return std::nullopt;
    case K::App:
    case K::Pair:
        if (auto a = beta_step(t->a, s, kind)) return rebuild(t, *a, t->b);
        if (auto b = beta_step(t->b, s, kind)) return rebuild(t, t->a, *b);
        return std::nullopt;
    default:
        return std::nullopt;
    }
}

} // namespace

std::optional<TermP> beta_step(const TermP& t, Strategy s, StepKind* kind) {
    if (s == Strategy::NormalOrder) {
        if (auto r = root_step(t, kind)) return r;
        return child_step(t, s, kind);
    }
    if (auto r = child_step(t, s, kind)) return r;
    return root_step(t, kind);
}

Normalized normalize(const TermP& t, Strategy s, std::size_t max_steps) {
    Normalized n{t, 0};
    StepKind kind{};
    while (auto next = beta_step(n.term, s, &kind)) {
        n.term = *next;
        if (kind == StepKind::Beta) ++n.beta_steps;
        if (++n.steps > max_steps)
            throw DomainError("normalization exceeded " + std::to_string(max_steps) + " steps");
    }
    return n;
}

TermP plug_context(const TermP& ctx, const TermP& t) {
    if (ctx->kind == Term::Kind::Hole) return t;
    if (!contains_hole(ctx)) return ctx;
    return rebuild(ctx, ctx->a ? plug_context(ctx->a, t) : nullptr, ctx->b ? plug_context(ctx->b, t) : nullptr);
}

} // namespace qlr
