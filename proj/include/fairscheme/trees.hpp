#ifndef FAIRSCHEME_TREES_HPP
#define FAIRSCHEME_TREES_HPP

// Compilation of checked surface programs into the executable IR: one
// info entry per symbol, a definitional tree per function, and the
// tag-indexed case tables the engine dispatches through.

#include "fairscheme/syntax.hpp"

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fairscheme {

struct Tag {
    std::uint32_t value = 0;
    friend auto operator<=>(const Tag&, const Tag&) = default;
};

// Reserved tags.  Constructors of a type with N constructors use
// kFirstConstructorTag .. kFirstConstructorTag + N - 1 in declaration order.
inline constexpr Tag kFunctionTag{0};
inline constexpr Tag kChoiceTag{1};
inline constexpr Tag kFailureTag{2};
inline constexpr std::uint32_t kFirstConstructorTag = 3;

enum class SymbolKind { Function, Constructor, Choice, Failure, Int, Partial };

enum class PrimOp { None, Add, Sub, Mul, Eq, Le, Apply };

// Child indices from the argument tuple of the function being matched.
// Printed 1-based: {0, 1} is "@1.2".
using Path = std::vector<std::uint32_t>;

std::string format_path(const Path& p);

struct InfoEntry;

struct TypeInfo {
    std::string name;
    std::size_t index = 0;
    std::vector<const InfoEntry*> constructors;
};

// One step of pattern matching on the way to an Or node.
struct MatchStep {
    Path position;
    bool is_int = false;
    std::size_t type_index = 0;
    std::size_t case_index = 0;
    std::int64_t literal = 0;
};

struct DefTree {
    enum class Kind { Branch, IntBranch, Leaf, Or, Exempt };

    Kind kind = Kind::Exempt;
    Path position;                       // Branch, IntBranch
    std::size_t type_index = 0;          // Branch: index into data_decls
    std::vector<DefTree> children;       // Branch: per constructor; IntBranch: per literal; Or: {left, right}
    std::vector<std::int64_t> literals;  // IntBranch
    std::size_t rule = 0;                // Leaf: index into the function's rules
    std::vector<std::pair<std::string, Path>> bindings;  // Leaf: pattern variable positions
    std::vector<MatchStep> context;      // Or: matches taken from the root
    // Or: per alternative, the auxiliary function standing in for a
    // Branch alternative (filled in by compile_program).
    std::vector<const InfoEntry*> aux;

    static DefTree exempt() { return DefTree{}; }
};

// Builds the definitional tree for one function.  Rule groups that are
// all-variable at every remaining position are combined with Or nodes in
// textual order.  Throws CompileError when the rules are not inductively
// sequential after that combination.
DefTree build_def_tree(const SurfaceProgram& program, const FunctionDef& function);

// ---- lowered form ----

struct Target {
    enum class Kind : std::uint8_t { Eval, PullTab, Fail, Table, Leaf, Or, Exempt, IntDispatch };
    Kind kind = Kind::Exempt;
    std::uint32_t index = 0;
};

struct CaseTable {
    Path position;
    const TypeInfo* type = nullptr;  // the Int pseudo type for integer tables
    // Dense, indexed by tag: function, choice, failure, then one entry per
    // constructor.  Integer tables have a single IntDispatch entry at 3.
    std::vector<Target> entries;
    std::vector<std::pair<std::int64_t, Target>> int_cases;  // sorted by literal
};

// Right-hand side template.  Ops are in dependency order; operands refer to
// earlier ops.  Each op builds at most one node per instantiation, so an
// op referenced twice is shared.
struct TemplateOp {
    enum class Code : std::uint8_t { Path, Int, Build, Choice, Fail };
    Code code = Code::Fail;
    const InfoEntry* info = nullptr;  // Build
    std::int64_t value = 0;           // Int
    Path path;                        // Path: matched subterm of the redex
    std::vector<std::uint32_t> operands;
};

struct Template {
    std::vector<TemplateOp> ops;
    std::uint32_t root = 0;
};

struct LeafCode {
    std::size_t rule = 0;
    Template rhs;
};

struct OrAlternative {
    enum class Kind : std::uint8_t { Leaf, Or, Aux };
    Kind kind = Kind::Leaf;
    std::uint32_t index = 0;          // Leaf, Or
    const InfoEntry* aux = nullptr;   // Aux: function re-matching the prefix then the subtree
};

struct OrCode {
    OrAlternative left;
    OrAlternative right;
};

struct CompiledFunction {
    Target entry;
    std::vector<CaseTable> tables;
    std::vector<LeafCode> leaves;
    std::vector<OrCode> ors;
};

// Static per-symbol record referenced by every node.
struct InfoEntry {
    std::string name;
    std::size_t arity = 0;
    Tag tag;
    SymbolKind kind = SymbolKind::Function;
    std::size_t id = 0;

    // Constructor, and the Int/Partial pseudo constructors.
    const TypeInfo* type = nullptr;
    std::size_t constructor_index = 0;

    // Partial application of `partial_target` holding `arity` arguments.
    const InfoEntry* partial_target = nullptr;
    std::size_t missing = 0;
    const InfoEntry* partial_next = nullptr;  // the entry after one more argument, if missing > 1

    // Function
    PrimOp prim = PrimOp::None;
    const FunctionDef* source = nullptr;
    DefTree tree;
    CompiledFunction code;
    bool auxiliary = false;

    bool is_function() const { return kind == SymbolKind::Function; }
};

class IRProgram {
public:
    IRProgram() = default;
    IRProgram(IRProgram&&) noexcept = default;
    IRProgram& operator=(IRProgram&&) noexcept = default;
    IRProgram(const IRProgram&) = delete;
    IRProgram& operator=(const IRProgram&) = delete;

    const InfoEntry& choice() const { return *choice_; }
    const InfoEntry& failure() const { return *failure_; }
    const InfoEntry& integer() const { return *integer_; }
    const InfoEntry& goal() const { return *goal_; }
    const InfoEntry& bool_constructor(bool v) const { return v ? *true_ : *false_; }
    const InfoEntry* find(std::string_view name) const;
    // Partial application entry for `target` holding `held` arguments.
    const InfoEntry* partial(const InfoEntry& target, std::size_t held) const;

    const std::vector<std::unique_ptr<InfoEntry>>& symbols() const { return symbols_; }
    const std::vector<std::unique_ptr<TypeInfo>>& types() const { return types_; }
    const SurfaceProgram& source() const { return *source_; }
    bool prelude_merged() const { return source_->prelude_merged; }

private:
    friend class ProgramCompiler;

    std::shared_ptr<const SurfaceProgram> source_;
    std::vector<std::unique_ptr<InfoEntry>> symbols_;
    std::vector<std::unique_ptr<TypeInfo>> types_;
    std::unordered_map<std::string, const InfoEntry*> by_name_;
    const InfoEntry* choice_ = nullptr;
    const InfoEntry* failure_ = nullptr;
    const InfoEntry* integer_ = nullptr;
    const InfoEntry* goal_ = nullptr;
    const InfoEntry* false_ = nullptr;
    const InfoEntry* true_ = nullptr;
};

// Assigns tags and info entries to every symbol, builds definitional trees
// and lowers them into case tables.  Recompiling the same program yields
// the same tags.
IRProgram compile_program(SurfaceProgram program);

// Lowers one tree against an already-populated symbol table.
CompiledFunction compile_branch_tables(const IRProgram& ir, const InfoEntry& function, const DefTree& tree);

// Text dumps used by `mcy compile`.  Prelude functions are listed only
// when asked for; the symbol table is always complete.
std::string dump_dtree(const IRProgram& ir, bool include_prelude = false);
std::string dump_icurry(const IRProgram& ir, bool include_prelude = false);

}  // namespace fairscheme

#endif  // FAIRSCHEME_TREES_HPP
