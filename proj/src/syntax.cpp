#include "fairscheme/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace fairscheme {

namespace {

std::string format_error(const std::string& msg, SourcePos pos) {
    if (pos.line <= 0) {
        return msg;
    }
    return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + msg;
}

}  // namespace

CompileError::CompileError(const std::string& msg, SourcePos pos)
    : std::runtime_error(format_error(msg, pos)), pos_(pos), message_(msg) {}

// ------------------------------
// AST constructors
// ------------------------------

Pattern Pattern::var(std::string name, SourcePos pos) {
    Pattern p;
    p.kind = Kind::Var;
    p.name = std::move(name);
    p.pos = pos;
    return p;
}

Pattern Pattern::wildcard(SourcePos pos) {
    Pattern p;
    p.kind = Kind::Wildcard;
    p.pos = pos;
    return p;
}

Pattern Pattern::integer(std::int64_t v, SourcePos pos) {
    Pattern p;
    p.kind = Kind::Int;
    p.value = v;
    p.pos = pos;
    return p;
}

Pattern Pattern::cons(std::string name, std::vector<Pattern> args, SourcePos pos) {
    Pattern p;
    p.kind = Kind::Cons;
    p.name = std::move(name);
    p.args = std::move(args);
    p.pos = pos;
    return p;
}

Expr Expr::var(std::string name, SourcePos pos) {
    Expr e;
    e.kind = Kind::Var;
    e.name = std::move(name);
    e.pos = pos;
    return e;
}

Expr Expr::integer(std::int64_t v, SourcePos pos) {
    Expr e;
    e.kind = Kind::Int;
    e.value = v;
    e.pos = pos;
    return e;
}

Expr Expr::apply(std::string symbol, std::vector<Expr> args, SourcePos pos) {
    Expr e;
    e.kind = Kind::Apply;
    e.name = std::move(symbol);
    e.args = std::move(args);
    e.pos = pos;
    return e;
}

Expr Expr::apply_expr(Expr head, std::vector<Expr> args, SourcePos pos) {
    Expr e;
    e.kind = Kind::Apply;
    e.args.reserve(args.size() + 1);
    e.args.push_back(std::move(head));
    for (auto& a : args) {
        e.args.push_back(std::move(a));
    }
    e.pos = pos;
    return e;
}

Expr Expr::choice(Expr left, Expr right, SourcePos pos) {
    Expr e;
    e.kind = Kind::Choice;
    e.args.push_back(std::move(left));
    e.args.push_back(std::move(right));
    e.pos = pos;
    return e;
}

Expr Expr::failed(SourcePos pos) {
    Expr e;
    e.kind = Kind::Failed;
    e.pos = pos;
    return e;
}

std::vector<Expr>::const_iterator Expr::arg_begin() const {
    return has_symbol_head() ? args.begin() : args.begin() + 1;
}

std::size_t Expr::arg_count() const {
    return has_symbol_head() ? args.size() : args.size() - 1;
}

const FunctionDef* SurfaceProgram::find_function(std::string_view name) const {
    for (const auto& f : functions) {
        if (f.name == name) {
            return &f;
        }
    }
    return nullptr;
}

std::optional<std::pair<std::size_t, std::size_t>> SurfaceProgram::find_constructor(std::string_view name) const {
    for (std::size_t t = 0; t < data_decls.size(); ++t) {
        const auto& cs = data_decls[t].constructors;
        for (std::size_t c = 0; c < cs.size(); ++c) {
            if (cs[c].name == name) {
                return std::make_pair(t, c);
            }
        }
    }
    return std::nullopt;
}

bool is_primitive_name(std::string_view name) {
    return name == "+" || name == "-" || name == "*" || name == "==" || name == "<=" || name == names::Apply;
}

std::size_t primitive_arity(std::string_view name) {
    return is_primitive_name(name) ? 2 : 0;
}

// ------------------------------
// lexer
// ------------------------------

namespace {

enum class Tok {
    Ident,
    ConId,
    Int,
    Op,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
    Bar,
    Semi,
    Underscore,
    KwData,
    KwWhere,
    KwFailed,
    End,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::uint64_t magnitude = 0;  // Int
    SourcePos pos;
};

bool is_op_char(char c) {
    switch (c) {
        case '+': case '-': case '*': case '=': case '<': case '>': case ':':
        case '?': case '!': case '&': case '|': case '.': case '$': case '/':
        case '^': case '~': case '@': case '#': case '%':
            return true;
        default:
            return false;
    }
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

bool is_known_operator(std::string_view op) {
    return op == "?" || op == "==" || op == "<=" || op == ":" || op == "++" || op == "+" || op == "-" ||
           op == "*";
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    int col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
            while (i < src.size() && src[i] != '\n') {
                advance(1);
            }
            continue;
        }
        Token t;
        t.pos = {line, col};
        std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::uint64_t v = 0;
            constexpr std::uint64_t limit = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) + 1;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) {
                std::uint64_t d = static_cast<std::uint64_t>(src[i] - '0');
                if (v > (limit - d) / 10) {
                    throw CompileError("integer literal out of range", t.pos);
                }
                v = v * 10 + d;
                advance(1);
            }
            if (i < src.size() && is_ident_char(src[i])) {
                throw CompileError("malformed integer literal", t.pos);
            }
            t.kind = Tok::Int;
            t.magnitude = v;
            t.text = std::string(src.substr(start, i - start));
        } else if (std::islower(static_cast<unsigned char>(c)) || c == '_') {
            while (i < src.size() && is_ident_char(src[i])) {
                advance(1);
            }
            t.text = std::string(src.substr(start, i - start));
            if (t.text == "_") {
                t.kind = Tok::Underscore;
            } else if (t.text == "data") {
                t.kind = Tok::KwData;
            } else if (t.text == "where") {
                t.kind = Tok::KwWhere;
            } else if (t.text == "failed") {
                t.kind = Tok::KwFailed;
            } else {
                t.kind = Tok::Ident;
            }
        } else if (std::isupper(static_cast<unsigned char>(c))) {
            while (i < src.size() && is_ident_char(src[i])) {
                advance(1);
            }
            t.kind = Tok::ConId;
            t.text = std::string(src.substr(start, i - start));
        } else if (is_op_char(c)) {
            while (i < src.size() && is_op_char(src[i])) {
                advance(1);
            }
            t.text = std::string(src.substr(start, i - start));
            if (t.text == "=") {
                t.kind = Tok::Equals;
            } else if (t.text == "|") {
                t.kind = Tok::Bar;
            } else if (is_known_operator(t.text)) {
                t.kind = Tok::Op;
            } else {
                throw CompileError("unknown operator '" + t.text + "'", t.pos);
            }
        } else {
            switch (c) {
                case '(': t.kind = Tok::LParen; break;
                case ')': t.kind = Tok::RParen; break;
                case '[': t.kind = Tok::LBracket; break;
                case ']': t.kind = Tok::RBracket; break;
                case ',': t.kind = Tok::Comma; break;
                case ';': t.kind = Tok::Semi; break;
                default: {
                    std::string shown = std::isprint(static_cast<unsigned char>(c))
                                            ? std::string(1, c)
                                            : "\\x" + std::to_string(static_cast<unsigned char>(c));
                    throw CompileError("unexpected character '" + shown + "'", t.pos);
                }
            }
            t.text = std::string(1, c);
            advance(1);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.pos = {line, col};
    out.push_back(end);
    return out;
}

// Maps a surface operator to the symbol it denotes.
std::string operator_symbol(std::string_view op) {
    if (op == ":") {
        return std::string(names::Cons);
    }
    return std::string(op);
}

// ------------------------------
// parser
// ------------------------------

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    SurfaceProgram parse() {
        SurfaceProgram prog;
        std::set<std::string> closed;  // functions whose rule group has ended
        std::string current;
        while (peek().kind != Tok::End) {
            const Token& t = peek();
            if (t.pos.column != 1) {
                fail("declaration must start in column 1", t);
            }
            if (t.kind == Tok::KwData) {
                if (!current.empty()) {
                    closed.insert(current);
                    current.clear();
                }
                prog.data_decls.push_back(parse_data());
                continue;
            }
            Rule r = parse_rule();
            if (r.name != current) {
                if (!current.empty()) {
                    closed.insert(current);
                }
                if (closed.count(r.name) != 0) {
                    throw CompileError("rules of '" + r.name + "' must be contiguous", r.pos);
                }
                current = r.name;
                FunctionDef f;
                f.name = r.name;
                prog.functions.push_back(std::move(f));
            }
            prog.functions.back().rules.push_back(std::move(r));
        }
        return prog;
    }

private:
    static constexpr int kMaxDepth = 400;

    std::vector<Token> toks_;
    std::size_t at_ = 0;
    int depth_ = 0;

    struct DepthGuard {
        Parser& p;
        explicit DepthGuard(Parser& parser) : p(parser) {
            if (++p.depth_ > kMaxDepth) {
                p.fail("expression nested too deeply", p.peek());
            }
        }
        ~DepthGuard() { --p.depth_; }
    };

    const Token& peek(std::size_t k = 0) const {
        std::size_t idx = std::min(at_ + k, toks_.size() - 1);
        return toks_[idx];
    }
    const Token& next() {
        const Token& t = toks_[at_];
        if (at_ + 1 < toks_.size()) {
            ++at_;
        }
        return t;
    }
    [[noreturn]] void fail(const std::string& msg, const Token& t) const {
        std::string near = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw CompileError(msg + " near " + near, t.pos);
    }
    const Token& expect(Tok kind, const char* what) {
        if (peek().kind != kind) {
            fail(std::string("expected ") + what, peek());
        }
        return next();
    }
    // A token in column 1 starts the next declaration.
    bool at_decl_boundary() const { return peek().kind == Tok::End || peek().pos.column == 1; }
    bool is_op(std::string_view op, std::size_t k = 0) const {
        return peek(k).kind == Tok::Op && peek(k).text == op;
    }

    DataDecl parse_data() {
        DataDecl d;
        d.pos = next().pos;
        if (peek().kind != Tok::ConId || at_decl_boundary()) {
            fail("expected type name", peek());
        }
        d.type_name = next().text;
        while (peek().kind == Tok::Ident && !at_decl_boundary()) {
            next();  // type parameters are ignored
        }
        expect(Tok::Equals, "'='");
        while (true) {
            if (peek().kind != Tok::ConId || at_decl_boundary()) {
                fail("expected constructor name", peek());
            }
            ConstructorDecl c;
            c.name = next().text;
            while (!at_decl_boundary()) {
                Tok k = peek().kind;
                if (k == Tok::ConId || k == Tok::Ident) {
                    next();
                } else if (k == Tok::LParen || k == Tok::LBracket) {
                    skip_balanced();
                } else {
                    break;
                }
                ++c.arity;
            }
            d.constructors.push_back(std::move(c));
            if (peek().kind == Tok::Bar && !at_decl_boundary()) {
                next();
                continue;
            }
            break;
        }
        if (!at_decl_boundary()) {
            fail("unexpected token in data declaration", peek());
        }
        return d;
    }

    void skip_balanced() {
        int level = 0;
        do {
            Tok k = peek().kind;
            if (k == Tok::End) {
                fail("unbalanced brackets in data declaration", peek());
            }
            if (k == Tok::LParen || k == Tok::LBracket) {
                ++level;
            } else if (k == Tok::RParen || k == Tok::RBracket) {
                --level;
            }
            next();
        } while (level > 0);
    }

    Rule parse_rule() {
        Rule r;
        const Token& head = peek();
        r.pos = head.pos;
        if (head.kind == Tok::Ident) {
            r.name = next().text;
        } else if (head.kind == Tok::LParen && peek(1).kind == Tok::Op && peek(2).kind == Tok::RParen) {
            next();
            r.name = operator_symbol(next().text);
            next();
        } else {
            fail("expected a rule or data declaration", head);
        }
        while (peek().kind != Tok::Equals) {
            if (at_decl_boundary()) {
                fail("expected '=' in rule for '" + r.name + "'", peek());
            }
            r.patterns.push_back(parse_apat());
        }
        next();
        if (at_decl_boundary()) {
            fail("expected expression", peek());
        }
        r.body = parse_expr();
        if (peek().kind == Tok::KwWhere && !at_decl_boundary()) {
            next();
            while (!at_decl_boundary()) {
                if (peek().kind == Tok::Semi) {
                    next();
                    continue;
                }
                if (peek().kind != Tok::Ident || peek(1).kind != Tok::Equals) {
                    fail("expected 'name = expression' in where clause", peek());
                }
                WhereBinding b;
                b.var = next().text;
                next();
                if (at_decl_boundary()) {
                    fail("expected expression", peek());
                }
                b.expr = parse_expr();
                r.where.push_back(std::move(b));
            }
        }
        while (peek().kind == Tok::Semi && !at_decl_boundary()) {
            next();
        }
        if (!at_decl_boundary()) {
            fail("unexpected token", peek());
        }
        return r;
    }

    std::int64_t negated(const Token& t) {
        return t.magnitude == static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()) + 1
                   ? std::numeric_limits<std::int64_t>::min()
                   : -static_cast<std::int64_t>(t.magnitude);
    }
    std::int64_t positive(const Token& t) {
        if (t.magnitude > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
            throw CompileError("integer literal out of range", t.pos);
        }
        return static_cast<std::int64_t>(t.magnitude);
    }

    // ---- patterns ----

    Pattern parse_apat() {
        DepthGuard guard(*this);
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Ident:
                next();
                return Pattern::var(t.text, t.pos);
            case Tok::Underscore:
                next();
                return Pattern::wildcard(t.pos);
            case Tok::Int: {
                next();
                return Pattern::integer(positive(t), t.pos);
            }
            case Tok::ConId:
                next();
                return Pattern::cons(t.text, {}, t.pos);
            case Tok::LBracket: {
                next();
                std::vector<Pattern> elems;
                if (peek().kind != Tok::RBracket) {
                    elems.push_back(parse_pat());
                    while (peek().kind == Tok::Comma) {
                        next();
                        elems.push_back(parse_pat());
                    }
                }
                expect(Tok::RBracket, "']'");
                Pattern list = Pattern::cons(std::string(names::Nil), {}, t.pos);
                for (auto it = elems.rbegin(); it != elems.rend(); ++it) {
                    list = Pattern::cons(std::string(names::Cons), {std::move(*it), std::move(list)}, t.pos);
                }
                return list;
            }
            case Tok::LParen: {
                next();
                if (is_op("-") && peek(1).kind == Tok::Int && peek(2).kind == Tok::RParen) {
                    next();
                    const Token& n = next();
                    next();
                    return Pattern::integer(negated(n), t.pos);
                }
                Pattern p = parse_pat();
                if (peek().kind == Tok::Comma) {
                    next();
                    Pattern q = parse_pat();
                    expect(Tok::RParen, "')'");
                    return Pattern::cons(std::string(names::Pair), {std::move(p), std::move(q)}, t.pos);
                }
                expect(Tok::RParen, "')'");
                return p;
            }
            default:
                fail("expected a pattern", t);
        }
    }

    // pat := ConId apat* [':' pat] | apat [':' pat]
    Pattern parse_pat() {
        DepthGuard guard(*this);
        Pattern head;
        if (peek().kind == Tok::ConId) {
            const Token& c = next();
            std::vector<Pattern> args;
            while (starts_apat()) {
                args.push_back(parse_apat());
            }
            head = Pattern::cons(c.text, std::move(args), c.pos);
        } else {
            head = parse_apat();
        }
        if (is_op(":")) {
            SourcePos pos = next().pos;
            Pattern tail = parse_pat();
            return Pattern::cons(std::string(names::Cons), {std::move(head), std::move(tail)}, pos);
        }
        return head;
    }

    bool starts_apat() const {
        switch (peek().kind) {
            case Tok::Ident: case Tok::Underscore: case Tok::Int: case Tok::ConId:
            case Tok::LBracket: case Tok::LParen:
                return true;
            default:
                return false;
        }
    }

    // ---- expressions ----

    // Binary operators are only consumed when an operand follows, which
    // leaves "(e op)" for the section parser.
    bool binary_op_ahead(std::string_view op) const {
        return is_op(op) && !at_decl_boundary() && peek(1).kind != Tok::RParen;
    }

    Expr parse_expr() {
        DepthGuard guard(*this);
        Expr left = parse_cmp();
        if (binary_op_ahead("?")) {
            SourcePos pos = next().pos;
            Expr right = parse_expr();
            return Expr::choice(std::move(left), std::move(right), pos);
        }
        return left;
    }

    Expr parse_cmp() {
        Expr left = parse_cons();
        if (binary_op_ahead("==") || binary_op_ahead("<=")) {
            const Token& op = next();
            Expr right = parse_cons();
            if (binary_op_ahead("==") || binary_op_ahead("<=")) {
                fail("comparison operators are non-associative", peek());
            }
            return Expr::apply(op.text, {std::move(left), std::move(right)}, op.pos);
        }
        return left;
    }

    Expr parse_cons() {
        DepthGuard guard(*this);
        Expr left = parse_additive();
        if (binary_op_ahead(":") || binary_op_ahead("++")) {
            const Token& op = next();
            Expr right = parse_cons();
            return Expr::apply(operator_symbol(op.text), {std::move(left), std::move(right)}, op.pos);
        }
        return left;
    }

    Expr parse_additive() {
        Expr left = parse_mult();
        while (binary_op_ahead("+") || binary_op_ahead("-")) {
            const Token& op = next();
            Expr right = parse_mult();
            left = Expr::apply(op.text, {std::move(left), std::move(right)}, op.pos);
        }
        return left;
    }

    Expr parse_mult() {
        Expr left = parse_app();
        while (binary_op_ahead("*")) {
            const Token& op = next();
            Expr right = parse_app();
            left = Expr::apply(op.text, {std::move(left), std::move(right)}, op.pos);
        }
        return left;
    }

    bool starts_atom() const {
        if (at_decl_boundary()) {
            return false;
        }
        switch (peek().kind) {
            case Tok::Ident:
                // `name =` begins the next where binding
                return peek(1).kind != Tok::Equals;
            case Tok::ConId: case Tok::Int: case Tok::KwFailed: case Tok::LParen: case Tok::LBracket:
                return true;
            default:
                return false;
        }
    }

    Expr parse_app() {
        if (!starts_atom()) {
            fail("expected expression", peek());
        }
        Expr head = parse_atom();
        std::vector<Expr> args;
        while (starts_atom()) {
            args.push_back(parse_atom());
        }
        if (args.empty()) {
            return head;
        }
        return apply_to(std::move(head), std::move(args));
    }

    // Application is curried: (f x) y is f x y.
    static Expr apply_to(Expr head, std::vector<Expr> args) {
        if (head.kind == Expr::Kind::Apply) {
            for (auto& a : args) {
                head.args.push_back(std::move(a));
            }
            return head;
        }
        SourcePos pos = head.pos;
        return Expr::apply_expr(std::move(head), std::move(args), pos);
    }

    Expr parse_atom() {
        DepthGuard guard(*this);
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Ident:
                next();
                return Expr::var(t.text, t.pos);
            case Tok::ConId:
                next();
                return Expr::apply(t.text, {}, t.pos);
            case Tok::Int:
                next();
                return Expr::integer(positive(t), t.pos);
            case Tok::KwFailed:
                next();
                return Expr::failed(t.pos);
            case Tok::LBracket: {
                next();
                std::vector<Expr> elems;
                if (peek().kind != Tok::RBracket) {
                    elems.push_back(parse_expr());
                    while (peek().kind == Tok::Comma) {
                        next();
                        elems.push_back(parse_expr());
                    }
                }
                expect(Tok::RBracket, "']'");
                Expr list = Expr::apply(std::string(names::Nil), {}, t.pos);
                for (auto it = elems.rbegin(); it != elems.rend(); ++it) {
                    list = Expr::apply(std::string(names::Cons), {std::move(*it), std::move(list)}, t.pos);
                }
                return list;
            }
            case Tok::LParen: {
                next();
                if (peek().kind == Tok::Op && peek(1).kind == Tok::RParen) {
                    const Token& op = next();
                    next();
                    if (op.text == "?") {
                        fail("'?' cannot be used as a function", op);
                    }
                    return Expr::apply(operator_symbol(op.text), {}, t.pos);
                }
                if (is_op("-") && peek(1).kind == Tok::Int && peek(2).kind == Tok::RParen) {
                    next();
                    const Token& n = next();
                    next();
                    return Expr::integer(negated(n), t.pos);
                }
                Expr inner = parse_expr();
                if (peek().kind == Tok::Op && peek(1).kind == Tok::RParen) {
                    const Token& op = next();
                    next();
                    if (op.text == "?") {
                        fail("'?' cannot be sectioned", op);
                    }
                    return Expr::apply(operator_symbol(op.text), {std::move(inner)}, t.pos);
                }
                if (peek().kind == Tok::Comma) {
                    next();
                    Expr second = parse_expr();
                    expect(Tok::RParen, "')'");
                    return Expr::apply(std::string(names::Pair), {std::move(inner), std::move(second)}, t.pos);
                }
                expect(Tok::RParen, "')'");
                return inner;
            }
            default:
                fail("expected expression", t);
        }
    }
};

// ------------------------------
// checking and name resolution
// ------------------------------

struct CoreType {
    std::string_view type;
    std::vector<std::pair<std::string_view, std::size_t>> constructors;
};

const std::vector<CoreType>& core_types() {
    static const std::vector<CoreType> types = {
        {names::Bool, {{names::False, 0}, {names::True, 0}}},
        {names::List, {{names::Nil, 0}, {names::Cons, 2}}},
        {names::PairType, {{names::Pair, 2}}},
    };
    return types;
}

class Checker {
public:
    explicit Checker(SurfaceProgram& prog) : prog_(prog) {}

    void run() {
        index_constructors();
        for (const auto& f : prog_.functions) {
            if (functions_.count(f.name) != 0) {
                throw CompileError("duplicate definition of '" + f.name + "'", f.rules.front().pos);
            }
            if (constructors_.count(f.name) != 0) {
                throw CompileError("'" + f.name + "' is both a constructor and a function", f.rules.front().pos);
            }
            if (is_primitive_name(f.name)) {
                throw CompileError("cannot redefine built-in '" + f.name + "'", f.rules.front().pos);
            }
            functions_[f.name] = f.arity();
        }
        for (auto& f : prog_.functions) {
            for (auto& r : f.rules) {
                if (r.patterns.size() != f.arity()) {
                    throw CompileError("rules of '" + f.name + "' have different numbers of arguments", r.pos);
                }
                check_rule(r);
                r = desugar_where(r);
            }
        }
        auto goal = functions_.find(prog_.goal);
        if (goal == functions_.end()) {
            throw CompileError("goal function '" + prog_.goal + "' is not defined");
        }
        if (goal->second != 0) {
            throw CompileError("goal function '" + prog_.goal + "' must take no arguments");
        }
    }

private:
    SurfaceProgram& prog_;
    std::unordered_map<std::string, std::size_t> constructors_;
    std::unordered_map<std::string, std::size_t> functions_;

    void index_constructors() {
        std::unordered_set<std::string> types;
        for (const auto& d : prog_.data_decls) {
            if (!types.insert(d.type_name).second) {
                throw CompileError("duplicate data type '" + d.type_name + "'", d.pos);
            }
            for (const auto& c : d.constructors) {
                if (!constructors_.emplace(c.name, c.arity).second) {
                    throw CompileError("constructor '" + c.name + "' declared more than once", d.pos);
                }
            }
        }
    }

    void check_pattern(const Pattern& p, std::unordered_set<std::string>& vars) {
        switch (p.kind) {
            case Pattern::Kind::Var:
                if (!vars.insert(p.name).second) {
                    throw CompileError("nonlinear pattern: variable '" + p.name + "' occurs more than once", p.pos);
                }
                break;
            case Pattern::Kind::Cons: {
                auto it = constructors_.find(p.name);
                if (it == constructors_.end()) {
                    throw CompileError("unknown constructor '" + p.name + "'", p.pos);
                }
                if (it->second != p.args.size()) {
                    throw CompileError("constructor '" + p.name + "' expects " + std::to_string(it->second) +
                                           " arguments in pattern, got " + std::to_string(p.args.size()),
                                       p.pos);
                }
                for (const auto& a : p.args) {
                    check_pattern(a, vars);
                }
                break;
            }
            default:
                break;
        }
    }

    void check_rule(Rule& r) {
        std::unordered_set<std::string> locals;
        for (const auto& p : r.patterns) {
            check_pattern(p, locals);
        }
        for (const auto& b : r.where) {
            if (locals.count(b.var) != 0) {
                throw CompileError("where binding '" + b.var + "' shadows another variable", r.pos);
            }
            locals.insert(b.var);
        }
        resolve(r.body, locals);
        for (auto& b : r.where) {
            resolve(b.expr, locals);
        }
    }

    void resolve(Expr& e, const std::unordered_set<std::string>& locals) {
        switch (e.kind) {
            case Expr::Kind::Var:
                if (locals.count(e.name) != 0) {
                    return;
                }
                if (functions_.count(e.name) != 0 || is_primitive_name(e.name)) {
                    e = Expr::apply(e.name, {}, e.pos);
                    return;
                }
                throw CompileError("unbound variable '" + e.name + "'", e.pos);
            case Expr::Kind::Apply:
                if (!e.has_symbol_head()) {
                    Expr& head = e.args.front();
                    if (head.kind == Expr::Kind::Var && locals.count(head.name) == 0) {
                        // f x where f is global: the head becomes the symbol
                        std::string sym = head.name;
                        if (functions_.count(sym) == 0 && !is_primitive_name(sym)) {
                            throw CompileError("unbound variable '" + sym + "'", head.pos);
                        }
                        e.args.erase(e.args.begin());
                        e.name = sym;
                    }
                }
                if (e.has_symbol_head()) {
                    auto c = constructors_.find(e.name);
                    if (c != constructors_.end()) {
                        if (e.args.size() > c->second) {
                            throw CompileError("constructor '" + e.name + "' applied to too many arguments", e.pos);
                        }
                    } else if (functions_.count(e.name) == 0 && !is_primitive_name(e.name)) {
                        bool con_like = !e.name.empty() && std::isupper(static_cast<unsigned char>(e.name[0]));
                        throw CompileError(std::string(con_like ? "unknown constructor '" : "undefined function '") +
                                               e.name + "'",
                                           e.pos);
                    }
                }
                for (auto& a : e.args) {
                    resolve(a, locals);
                }
                return;
            case Expr::Kind::Choice:
                resolve(e.args[0], locals);
                resolve(e.args[1], locals);
                return;
            default:
                return;
        }
    }
};

void collect_vars(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == Expr::Kind::Var) {
        out.push_back(e.name);
        return;
    }
    for (const auto& a : e.args) {
        collect_vars(a, out);
    }
}

void collect_pattern_vars(const Pattern& p, std::unordered_set<std::string>& out) {
    if (p.kind == Pattern::Kind::Var) {
        out.insert(p.name);
    }
    for (const auto& a : p.args) {
        collect_pattern_vars(a, out);
    }
}

}  // namespace

Rule desugar_where(const Rule& rule) {
    std::unordered_set<std::string> pattern_vars;
    for (const auto& p : rule.patterns) {
        collect_pattern_vars(p, pattern_vars);
    }
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < rule.where.size(); ++i) {
        const auto& b = rule.where[i];
        if (!index.emplace(b.var, i).second) {
            throw CompileError("where binding '" + b.var + "' defined twice", rule.pos);
        }
        if (pattern_vars.count(b.var) != 0) {
            throw CompileError("where binding '" + b.var + "' shadows a pattern variable", rule.pos);
        }
    }
    auto deps_of = [&](const Expr& e) {
        std::vector<std::string> vars;
        collect_vars(e, vars);
        std::vector<std::size_t> deps;
        for (const auto& v : vars) {
            auto it = index.find(v);
            if (it != index.end()) {
                deps.push_back(it->second);
            } else if (pattern_vars.count(v) == 0) {
                throw CompileError("unbound variable '" + v + "'", e.pos);
            }
        }
        return deps;
    };
    std::vector<std::vector<std::size_t>> deps(rule.where.size());
    for (std::size_t i = 0; i < rule.where.size(); ++i) {
        deps[i] = deps_of(rule.where[i].expr);
    }
    // Depth-first topological order over the bindings the body needs.
    enum class Mark { None, Active, Done };
    std::vector<Mark> mark(rule.where.size(), Mark::None);
    std::vector<std::size_t> order;
    std::function<void(std::size_t)> visit = [&](std::size_t i) {
        if (mark[i] == Mark::Done) {
            return;
        }
        if (mark[i] == Mark::Active) {
            throw CompileError("recursive where binding '" + rule.where[i].var + "'", rule.pos);
        }
        mark[i] = Mark::Active;
        for (std::size_t d : deps[i]) {
            visit(d);
        }
        mark[i] = Mark::Done;
        order.push_back(i);
    };
    // Cycles are rejected even among unused bindings.
    for (std::size_t i = 0; i < rule.where.size(); ++i) {
        std::vector<Mark> saved = mark;
        std::vector<std::size_t> saved_order = order;
        visit(i);
        mark = std::move(saved);
        order = std::move(saved_order);
    }
    for (std::size_t d : deps_of(rule.body)) {
        visit(d);
    }
    Rule out;
    out.name = rule.name;
    out.patterns = rule.patterns;
    out.body = rule.body;
    out.pos = rule.pos;
    for (std::size_t i : order) {
        out.where.push_back(rule.where[i]);
    }
    return out;
}

SurfaceProgram parse_source(std::string_view source) {
    Parser parser(lex(source));
    return parser.parse();
}

SurfaceProgram parse_program(std::string_view source, const ParseOptions& options) {
    SurfaceProgram user = parse_source(source);
    SurfaceProgram prog;
    prog.goal = options.goal;
    if (!options.prelude.empty()) {
        SurfaceProgram prelude;
        try {
            prelude = parse_source(options.prelude);
        } catch (const CompileError& e) {
            throw CompileError("in prelude: " + std::string(e.what()));
        }
        prog.prelude_merged = true;
        prog.data_decls = std::move(prelude.data_decls);
        std::unordered_set<std::string> overridden;
        for (const auto& f : user.functions) {
            overridden.insert(f.name);
        }
        for (auto& f : prelude.functions) {
            if (overridden.count(f.name) == 0) {
                f.from_prelude = true;
                prog.functions.push_back(std::move(f));
            }
        }
    }
    const std::size_t prelude_types = prog.data_decls.size();
    for (auto& d : user.data_decls) {
        // A user declaration identical to a prelude one is accepted and merged.
        auto same = std::find_if(prog.data_decls.begin(), prog.data_decls.begin() + static_cast<std::ptrdiff_t>(prelude_types),
                                 [&](const DataDecl& p) {
                                     if (p.type_name != d.type_name || p.constructors.size() != d.constructors.size()) {
                                         return false;
                                     }
                                     for (std::size_t i = 0; i < p.constructors.size(); ++i) {
                                         if (p.constructors[i].name != d.constructors[i].name ||
                                             p.constructors[i].arity != d.constructors[i].arity) {
                                             return false;
                                         }
                                     }
                                     return true;
                                 });
        if (same == prog.data_decls.begin() + static_cast<std::ptrdiff_t>(prelude_types)) {
            prog.data_decls.push_back(std::move(d));
        }
    }
    for (auto& f : user.functions) {
        prog.functions.push_back(std::move(f));
    }
    // Core types are declared implicitly unless the source declares them.
    std::vector<DataDecl> implicit;
    for (const auto& core : core_types()) {
        auto found = std::find_if(prog.data_decls.begin(), prog.data_decls.end(),
                                  [&](const DataDecl& d) { return d.type_name == core.type; });
        if (found == prog.data_decls.end()) {
            DataDecl d;
            d.type_name = std::string(core.type);
            for (auto [name, arity] : core.constructors) {
                d.constructors.push_back({std::string(name), arity});
            }
            implicit.push_back(std::move(d));
            continue;
        }
        bool same = found->constructors.size() == core.constructors.size();
        for (std::size_t i = 0; same && i < core.constructors.size(); ++i) {
            same = found->constructors[i].name == core.constructors[i].first &&
                   found->constructors[i].arity == core.constructors[i].second;
        }
        if (!same) {
            throw CompileError("built-in type '" + std::string(core.type) + "' redeclared with different constructors",
                               found->pos);
        }
    }
    prog.data_decls.insert(prog.data_decls.begin(), implicit.begin(), implicit.end());
    Checker(prog).run();
    return prog;
}

// ------------------------------
// printing
// ------------------------------

namespace {

enum Prec { PChoice = 0, PCmp = 1, PCons = 2, PAdd = 3, PMul = 4, PApp = 5, PAtom = 6 };

bool is_infix_symbol(std::string_view s) {
    return s == "==" || s == "<=" || s == "++" || s == "+" || s == "-" || s == "*" || s == names::Cons;
}

std::string op_text(std::string_view sym) {
    return sym == names::Cons ? ":" : std::string(sym);
}

void print_expr_to(std::ostream& os, const Expr& e, int ctx);

bool list_literal(const Expr& e, std::vector<const Expr*>& elems) {
    const Expr* cur = &e;
    while (cur->kind == Expr::Kind::Apply && cur->name == names::Cons && cur->args.size() == 2) {
        elems.push_back(&cur->args[0]);
        cur = &cur->args[1];
    }
    return cur->kind == Expr::Kind::Apply && cur->name == names::Nil && cur->args.empty();
}

void print_expr_to(std::ostream& os, const Expr& e, int ctx) {
    auto open = [&](int level) {
        if (ctx > level) {
            os << '(';
        }
    };
    auto close = [&](int level) {
        if (ctx > level) {
            os << ')';
        }
    };
    switch (e.kind) {
        case Expr::Kind::Var:
            os << e.name;
            return;
        case Expr::Kind::Int:
            if (e.value < 0) {
                os << "(-" << (0 - static_cast<std::uint64_t>(e.value)) << ")";
            } else {
                os << e.value;
            }
            return;
        case Expr::Kind::Failed:
            os << "failed";
            return;
        case Expr::Kind::Choice:
            open(PChoice);
            print_expr_to(os, e.args[0], PCmp);
            os << " ? ";
            print_expr_to(os, e.args[1], PChoice);
            close(PChoice);
            return;
        case Expr::Kind::Apply:
            break;
    }
    if (!e.has_symbol_head()) {
        open(PApp);
        print_expr_to(os, e.args[0], PAtom);
        for (std::size_t i = 1; i < e.args.size(); ++i) {
            os << ' ';
            print_expr_to(os, e.args[i], PAtom);
        }
        close(PApp);
        return;
    }
    const std::string& s = e.name;
    const auto n = e.args.size();
    if (s == names::Nil && n == 0) {
        os << "[]";
        return;
    }
    if (s == names::Cons && n == 2) {
        std::vector<const Expr*> elems;
        if (list_literal(e, elems)) {
            os << '[';
            for (std::size_t i = 0; i < elems.size(); ++i) {
                if (i > 0) {
                    os << ',';
                }
                print_expr_to(os, *elems[i], PChoice);
            }
            os << ']';
            return;
        }
    }
    if (s == names::Pair && n == 2) {
        os << '(';
        print_expr_to(os, e.args[0], PChoice);
        os << ',';
        print_expr_to(os, e.args[1], PChoice);
        os << ')';
        return;
    }
    if (is_infix_symbol(s)) {
        if (n == 2) {
            int level = PCmp;
            int left = PCons;
            int right = PCons;
            if (s == names::Cons || s == "++") {
                level = PCons;
                left = PAdd;
                right = PCons;
            } else if (s == "+" || s == "-") {
                level = PAdd;
                left = PAdd;
                right = PMul;
            } else if (s == "*") {
                level = PMul;
                left = PMul;
                right = PApp;
            }
            open(level);
            print_expr_to(os, e.args[0], left);
            os << ' ' << op_text(s) << ' ';
            print_expr_to(os, e.args[1], right);
            close(level);
            return;
        }
        if (n == 0) {
            os << '(' << op_text(s) << ')';
            return;
        }
        if (n == 1) {
            os << '(';
            print_expr_to(os, e.args[0], PChoice);
            os << ' ' << op_text(s) << ')';
            return;
        }
        open(PApp);
        os << '(' << op_text(s) << ')';
        for (const auto& a : e.args) {
            os << ' ';
            print_expr_to(os, a, PAtom);
        }
        close(PApp);
        return;
    }
    if (n == 0) {
        os << s;
        return;
    }
    open(PApp);
    os << s;
    for (const auto& a : e.args) {
        os << ' ';
        print_expr_to(os, a, PAtom);
    }
    close(PApp);
}

void print_pattern_to(std::ostream& os, const Pattern& p, bool nested) {
    switch (p.kind) {
        case Pattern::Kind::Var:
            os << p.name;
            return;
        case Pattern::Kind::Wildcard:
            os << '_';
            return;
        case Pattern::Kind::Int:
            if (p.value < 0) {
                os << "(-" << (0 - static_cast<std::uint64_t>(p.value)) << ")";
            } else {
                os << p.value;
            }
            return;
        case Pattern::Kind::Cons:
            break;
    }
    if (p.name == names::Nil && p.args.empty()) {
        os << "[]";
        return;
    }
    if (p.name == names::Cons && p.args.size() == 2) {
        std::vector<const Pattern*> elems;
        const Pattern* cur = &p;
        while (cur->kind == Pattern::Kind::Cons && cur->name == names::Cons && cur->args.size() == 2) {
            elems.push_back(&cur->args[0]);
            cur = &cur->args[1];
        }
        if (cur->kind == Pattern::Kind::Cons && cur->name == names::Nil) {
            os << '[';
            for (std::size_t i = 0; i < elems.size(); ++i) {
                if (i > 0) {
                    os << ',';
                }
                print_pattern_to(os, *elems[i], false);
            }
            os << ']';
            return;
        }
        os << '(';
        print_pattern_to(os, p.args[0], true);
        os << " : ";
        print_pattern_to(os, p.args[1], false);
        os << ')';
        return;
    }
    if (p.name == names::Pair && p.args.size() == 2) {
        os << '(';
        print_pattern_to(os, p.args[0], false);
        os << ',';
        print_pattern_to(os, p.args[1], false);
        os << ')';
        return;
    }
    if (p.args.empty()) {
        os << p.name;
        return;
    }
    (void)nested;
    os << '(' << p.name;
    for (const auto& a : p.args) {
        os << ' ';
        print_pattern_to(os, a, true);
    }
    os << ')';
}

}  // namespace

std::string print_expr(const Expr& e) {
    std::ostringstream os;
    print_expr_to(os, e, PChoice);
    return os.str();
}

std::string print_pattern(const Pattern& p) {
    std::ostringstream os;
    print_pattern_to(os, p, false);
    return os.str();
}

std::string print_program(const SurfaceProgram& program) {
    std::ostringstream os;
    for (const auto& d : program.data_decls) {
        os << "data " << d.type_name << " =";
        for (std::size_t i = 0; i < d.constructors.size(); ++i) {
            os << (i == 0 ? " " : " | ") << d.constructors[i].name;
            for (std::size_t k = 0; k < d.constructors[i].arity; ++k) {
                os << " a" << k;
            }
        }
        os << '\n';
    }
    for (const auto& f : program.functions) {
        bool op = !f.name.empty() && !std::isalpha(static_cast<unsigned char>(f.name[0]));
        for (const auto& r : f.rules) {
            if (op) {
                os << '(' << f.name << ')';
            } else {
                os << f.name;
            }
            for (const auto& p : r.patterns) {
                os << ' ';
                print_pattern_to(os, p, true);
            }
            os << " = " << print_expr(r.body);
            for (std::size_t i = 0; i < r.where.size(); ++i) {
                os << (i == 0 ? " where " : "; ") << r.where[i].var << " = " << print_expr(r.where[i].expr);
            }
            os << '\n';
        }
    }
    return os.str();
}

bool same_structure(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.name != b.name || a.value != b.value || a.args.size() != b.args.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!same_structure(a.args[i], b.args[i])) {
            return false;
        }
    }
    return true;
}

bool same_structure(const Pattern& a, const Pattern& b) {
    if (a.kind != b.kind || a.name != b.name || a.value != b.value || a.args.size() != b.args.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!same_structure(a.args[i], b.args[i])) {
            return false;
        }
    }
    return true;
}

bool same_structure(const SurfaceProgram& a, const SurfaceProgram& b) {
    if (a.goal != b.goal || a.data_decls.size() != b.data_decls.size() || a.functions.size() != b.functions.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.data_decls.size(); ++i) {
        const auto& x = a.data_decls[i];
        const auto& y = b.data_decls[i];
        if (x.type_name != y.type_name || x.constructors.size() != y.constructors.size()) {
            return false;
        }
        for (std::size_t k = 0; k < x.constructors.size(); ++k) {
            if (x.constructors[k].name != y.constructors[k].name || x.constructors[k].arity != y.constructors[k].arity) {
                return false;
            }
        }
    }
    for (std::size_t i = 0; i < a.functions.size(); ++i) {
        const auto& f = a.functions[i];
        const auto& g = b.functions[i];
        if (f.name != g.name || f.rules.size() != g.rules.size()) {
            return false;
        }
        for (std::size_t r = 0; r < f.rules.size(); ++r) {
            const auto& x = f.rules[r];
            const auto& y = g.rules[r];
            if (x.patterns.size() != y.patterns.size() || x.where.size() != y.where.size() ||
                !same_structure(x.body, y.body)) {
                return false;
            }
            for (std::size_t k = 0; k < x.patterns.size(); ++k) {
                if (!same_structure(x.patterns[k], y.patterns[k])) {
                    return false;
                }
            }
            for (std::size_t k = 0; k < x.where.size(); ++k) {
                if (x.where[k].var != y.where[k].var || !same_structure(x.where[k].expr, y.where[k].expr)) {
                    return false;
                }
            }
        }
    }
    return true;
}

}  // namespace fairscheme
