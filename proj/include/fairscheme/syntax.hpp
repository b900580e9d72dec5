#ifndef FAIRSCHEME_SYNTAX_HPP
#define FAIRSCHEME_SYNTAX_HPP

// MiniCurry surface syntax: lexer, parser, desugaring and checking.
//
// A program is a sequence of top-level declarations, each starting in
// column 1.  Continuation lines must be indented.  `--` starts a line
// comment.
//
//   data List = Nil | Cons a (List a)
//   zip [] _ = []
//   zip (_:_) [] = []
//   zip (x:xs) (y:ys) = (x,y) : zip xs ys
//   main = xor x x where x = T ? F
//
// Operator precedence, loosest first:
//   ?  (right)   ==, <=  (none)   :, ++  (right)   +, -  (left)   *  (left)

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairscheme {

struct SourcePos {
    int line = 0;
    int column = 0;
};

// Any error detected before evaluation starts.  Positioned errors carry
// the line/column of the offending token; line 0 means "no position".
class CompileError : public std::runtime_error {
public:
    CompileError(const std::string& msg, SourcePos pos = {});
    SourcePos pos() const { return pos_; }
    const std::string& message() const { return message_; }

private:
    SourcePos pos_;
    std::string message_;
};

// Built-in names that the desugarer targets.
namespace names {
inline constexpr std::string_view Nil = "Nil";
inline constexpr std::string_view Cons = "Cons";
inline constexpr std::string_view Pair = "Pair";
inline constexpr std::string_view False = "False";
inline constexpr std::string_view True = "True";
inline constexpr std::string_view List = "List";
inline constexpr std::string_view PairType = "Pair";
inline constexpr std::string_view Bool = "Bool";
inline constexpr std::string_view Apply = "apply";
}  // namespace names

struct Pattern {
    enum class Kind { Var, Wildcard, Int, Cons };

    Kind kind = Kind::Wildcard;
    std::string name;  // variable or constructor name
    std::int64_t value = 0;
    std::vector<Pattern> args;
    SourcePos pos;

    static Pattern var(std::string name, SourcePos pos = {});
    static Pattern wildcard(SourcePos pos = {});
    static Pattern integer(std::int64_t v, SourcePos pos = {});
    static Pattern cons(std::string name, std::vector<Pattern> args, SourcePos pos = {});

    bool is_variable() const { return kind == Kind::Var || kind == Kind::Wildcard; }
};

struct Expr {
    enum class Kind { Var, Int, Apply, Choice, Failed };

    Kind kind = Kind::Failed;
    // Var: variable name.  Apply: the head symbol; empty when the head is
    // an arbitrary expression, which is then stored as args.front().
    std::string name;
    std::int64_t value = 0;
    std::vector<Expr> args;  // Choice: {left, right}
    SourcePos pos;

    static Expr var(std::string name, SourcePos pos = {});
    static Expr integer(std::int64_t v, SourcePos pos = {});
    static Expr apply(std::string symbol, std::vector<Expr> args, SourcePos pos = {});
    static Expr apply_expr(Expr head, std::vector<Expr> args, SourcePos pos = {});
    static Expr choice(Expr left, Expr right, SourcePos pos = {});
    static Expr failed(SourcePos pos = {});

    bool has_symbol_head() const { return kind == Kind::Apply && !name.empty(); }
    const Expr& head_expr() const { return args.front(); }
    // Arguments of an Apply, skipping an expression head.
    std::vector<Expr>::const_iterator arg_begin() const;
    std::size_t arg_count() const;
    const Expr& arg(std::size_t i) const { return *(arg_begin() + static_cast<std::ptrdiff_t>(i)); }
};

struct WhereBinding {
    std::string var;
    Expr expr;
};

struct Rule {
    std::string name;
    std::vector<Pattern> patterns;
    Expr body;
    std::vector<WhereBinding> where;
    SourcePos pos;
};

struct ConstructorDecl {
    std::string name;
    std::size_t arity = 0;
};

struct DataDecl {
    std::string type_name;
    std::vector<ConstructorDecl> constructors;
    SourcePos pos;
};

struct FunctionDef {
    std::string name;
    std::vector<Rule> rules;
    bool from_prelude = false;

    std::size_t arity() const { return rules.front().patterns.size(); }
};

struct SurfaceProgram {
    std::vector<DataDecl> data_decls;
    std::vector<FunctionDef> functions;
    std::string goal = "main";
    bool prelude_merged = false;

    const FunctionDef* find_function(std::string_view name) const;
    // (type index, constructor index) of a constructor, if declared.
    std::optional<std::pair<std::size_t, std::size_t>> find_constructor(std::string_view name) const;
};

// Raw parse of one source text: no name resolution and no checking.
SurfaceProgram parse_source(std::string_view source);

struct ParseOptions {
    // Prelude text merged ahead of the user program; empty means none.
    std::string prelude;
    std::string goal = "main";
};

// Parses, merges the prelude, adds the core types (Bool, List, Pair) when
// absent, resolves names, checks, and desugars where bindings.
SurfaceProgram parse_program(std::string_view source, const ParseOptions& options = {});

// Checks where bindings of one rule, drops unused ones, and orders the rest
// so every binding only refers to bindings before it.
Rule desugar_where(const Rule& rule);

// Canonical source text for a program; parse_source(print_program(p))
// reproduces p up to source positions.
std::string print_program(const SurfaceProgram& program);
std::string print_expr(const Expr& e);
std::string print_pattern(const Pattern& p);

// Structural equality ignoring source positions.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const Pattern& a, const Pattern& b);
bool same_structure(const SurfaceProgram& a, const SurfaceProgram& b);

// Names of built-in functions implemented by the runtime.
bool is_primitive_name(std::string_view name);
std::size_t primitive_arity(std::string_view name);

}  // namespace fairscheme

#endif  // FAIRSCHEME_SYNTAX_HPP
