#include "fairscheme/trees.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace fairscheme {

std::string format_path(const Path& p) {
    std::string out = "@";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i > 0) {
            out += '.';
        }
        out += std::to_string(p[i] + 1);
    }
    return out;
}

// ------------------------------
// definitional trees
// ------------------------------

namespace {

struct Row {
    std::size_t rule = 0;
    std::map<Path, const Pattern*> open;  // non-variable patterns not yet matched
    std::vector<std::pair<std::string, Path>> bindings;
};

// Outermost first, then leftmost.
bool outer_left_less(const Path& a, const Path& b) {
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    return a < b;
}

void place(Row& row, const Pattern& p, Path at) {
    switch (p.kind) {
        case Pattern::Kind::Var:
            row.bindings.emplace_back(p.name, std::move(at));
            break;
        case Pattern::Kind::Wildcard:
            break;
        default:
            row.open.emplace(std::move(at), &p);
            break;
    }
}

class TreeBuilder {
public:
    TreeBuilder(const SurfaceProgram& program, const FunctionDef& function)
        : program_(program), function_(function) {}

    DefTree build() {
        std::vector<Row> rows;
        for (std::size_t r = 0; r < function_.rules.size(); ++r) {
            Row row;
            row.rule = r;
            const auto& pats = function_.rules[r].patterns;
            for (std::size_t i = 0; i < pats.size(); ++i) {
                place(row, pats[i], Path{static_cast<std::uint32_t>(i)});
            }
            rows.push_back(std::move(row));
        }
        return build(std::move(rows), {});
    }

private:
    const SurfaceProgram& program_;
    const FunctionDef& function_;

    [[noreturn]] void not_sequential(const std::string& why) const {
        throw CompileError("function '" + function_.name + "' is not inductively sequential: " + why,
                           function_.rules.front().pos);
    }

    DefTree build(std::vector<Row> rows, const std::vector<MatchStep>& context) {
        if (rows.empty()) {
            return DefTree::exempt();
        }
        // Positions demanded by every remaining rule.
        std::vector<Path> demanded;
        for (const auto& [path, pat] : rows.front().open) {
            bool all = std::all_of(rows.begin() + 1, rows.end(),
                                   [&](const Row& r) { return r.open.count(path) != 0; });
            if (all) {
                demanded.push_back(path);
            }
        }
        if (!demanded.empty()) {
            std::sort(demanded.begin(), demanded.end(), outer_left_less);
            return branch(std::move(rows), demanded.front(), context);
        }
        if (rows.size() == 1) {
            DefTree leaf;
            leaf.kind = DefTree::Kind::Leaf;
            leaf.rule = rows.front().rule;
            leaf.bindings = rows.front().bindings;
            return leaf;
        }
        // Split into segments: each all-variable rule alone, runs of other
        // rules together.  The segments are alternatives of an Or.
        std::vector<std::vector<Row>> segments;
        bool last_open = false;
        for (auto& row : rows) {
            bool is_open = !row.open.empty();
            if (is_open && last_open) {
                segments.back().push_back(std::move(row));
            } else {
                segments.emplace_back();
                segments.back().push_back(std::move(row));
            }
            last_open = is_open;
        }
        if (segments.size() == 1) {
            not_sequential("rules " + std::to_string(segments.front().front().rule + 1) + " and " +
                           std::to_string(segments.front().back().rule + 1) +
                           " have no common demanded position");
        }
        return or_chain(segments, 0, context);
    }

    DefTree or_chain(std::vector<std::vector<Row>>& segments, std::size_t from, const std::vector<MatchStep>& context) {
        if (from + 1 == segments.size()) {
            return build(std::move(segments[from]), context);
        }
        DefTree node;
        node.kind = DefTree::Kind::Or;
        node.context = context;
        node.children.push_back(build(std::move(segments[from]), context));
        node.children.push_back(or_chain(segments, from + 1, context));
        return node;
    }

    DefTree branch(std::vector<Row> rows, const Path& at, const std::vector<MatchStep>& context) {
        const Pattern* first = rows.front().open.at(at);
        const bool is_int = first->kind == Pattern::Kind::Int;
        std::size_t type_index = 0;
        if (!is_int) {
            type_index = program_.find_constructor(first->name)->first;
        }
        for (const auto& row : rows) {
            const Pattern* p = row.open.at(at);
            bool ok = is_int ? p->kind == Pattern::Kind::Int
                             : p->kind == Pattern::Kind::Cons && program_.find_constructor(p->name)->first == type_index;
            if (!ok) {
                throw CompileError("function '" + function_.name + "': incompatible patterns at position " +
                                       format_path(at),
                                   p->pos);
            }
        }
        DefTree node;
        node.position = at;
        if (is_int) {
            node.kind = DefTree::Kind::IntBranch;
            std::vector<std::int64_t> literals;
            for (const auto& row : rows) {
                literals.push_back(row.open.at(at)->value);
            }
            std::sort(literals.begin(), literals.end());
            literals.erase(std::unique(literals.begin(), literals.end()), literals.end());
            for (std::int64_t lit : literals) {
                std::vector<Row> sub;
                for (const auto& row : rows) {
                    if (row.open.at(at)->value == lit) {
                        Row r = row;
                        r.open.erase(at);
                        sub.push_back(std::move(r));
                    }
                }
                auto ctx = context;
                MatchStep step;
                step.position = at;
                step.is_int = true;
                step.literal = lit;
                ctx.push_back(step);
                node.literals.push_back(lit);
                node.children.push_back(build(std::move(sub), ctx));
            }
            return node;
        }
        node.kind = DefTree::Kind::Branch;
        node.type_index = type_index;
        const auto& decl = program_.data_decls[type_index];
        for (std::size_t c = 0; c < decl.constructors.size(); ++c) {
            std::vector<Row> sub;
            for (const auto& row : rows) {
                const Pattern* p = row.open.at(at);
                if (p->name != decl.constructors[c].name) {
                    continue;
                }
                Row r = row;
                r.open.erase(at);
                for (std::size_t k = 0; k < p->args.size(); ++k) {
                    Path child = at;
                    child.push_back(static_cast<std::uint32_t>(k));
                    place(r, p->args[k], std::move(child));
                }
                sub.push_back(std::move(r));
            }
            auto ctx = context;
            MatchStep step;
            step.position = at;
            step.type_index = type_index;
            step.case_index = c;
            ctx.push_back(step);
            node.children.push_back(build(std::move(sub), ctx));
        }
        return node;
    }
};

}  // namespace

DefTree build_def_tree(const SurfaceProgram& program, const FunctionDef& function) {
    return TreeBuilder(program, function).build();
}

// ------------------------------
// symbol table and lowering
// ------------------------------

const InfoEntry* IRProgram::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    return it == by_name_.end() ? nullptr : it->second;
}

namespace {

std::string partial_name(const InfoEntry& target, std::size_t held) {
    return target.name + "@" + std::to_string(held);
}

class TemplateCompiler {
public:
    TemplateCompiler(const IRProgram& ir, const Rule& rule, const std::vector<std::pair<std::string, Path>>& bindings)
        : ir_(ir), rule_(rule) {
        for (const auto& [var, path] : bindings) {
            pattern_vars_.emplace(var, path);
        }
    }

    Template compile() {
        for (const auto& b : rule_.where) {
            env_[b.var] = compile(b.expr);
        }
        tpl_.root = compile(rule_.body);
        return std::move(tpl_);
    }

private:
    const IRProgram& ir_;
    const Rule& rule_;
    std::map<std::string, Path> pattern_vars_;
    std::map<std::string, std::uint32_t> env_;
    Template tpl_;

    std::uint32_t push(TemplateOp op) {
        tpl_.ops.push_back(std::move(op));
        return static_cast<std::uint32_t>(tpl_.ops.size() - 1);
    }

    std::uint32_t build(const InfoEntry* info, std::vector<std::uint32_t> operands) {
        TemplateOp op;
        op.code = TemplateOp::Code::Build;
        op.info = info;
        op.operands = std::move(operands);
        return push(std::move(op));
    }

    std::uint32_t apply_chain(std::uint32_t head, const std::vector<std::uint32_t>& args, std::size_t from) {
        const InfoEntry* apply = ir_.find(names::Apply);
        for (std::size_t i = from; i < args.size(); ++i) {
            head = build(apply, {head, args[i]});
        }
        return head;
    }

    std::uint32_t compile(const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::Var: {
                if (auto it = env_.find(e.name); it != env_.end()) {
                    return it->second;
                }
                auto p = pattern_vars_.find(e.name);
                if (p == pattern_vars_.end()) {
                    throw CompileError("unbound variable '" + e.name + "'", e.pos);
                }
                TemplateOp op;
                op.code = TemplateOp::Code::Path;
                op.path = p->second;
                std::uint32_t idx = push(std::move(op));
                env_[e.name] = idx;
                return idx;
            }
            case Expr::Kind::Int: {
                TemplateOp op;
                op.code = TemplateOp::Code::Int;
                op.value = e.value;
                return push(std::move(op));
            }
            case Expr::Kind::Failed: {
                TemplateOp op;
                op.code = TemplateOp::Code::Fail;
                return push(std::move(op));
            }
            case Expr::Kind::Choice: {
                std::uint32_t l = compile(e.args[0]);
                std::uint32_t r = compile(e.args[1]);
                TemplateOp op;
                op.code = TemplateOp::Code::Choice;
                op.operands = {l, r};
                return push(std::move(op));
            }
            case Expr::Kind::Apply:
                break;
        }
        std::vector<std::uint32_t> args;
        for (auto it = e.arg_begin(); it != e.args.end(); ++it) {
            args.push_back(compile(*it));
        }
        if (!e.has_symbol_head()) {
            std::uint32_t head = compile(e.head_expr());
            return apply_chain(head, args, 0);
        }
        const InfoEntry* info = ir_.find(e.name);
        if (info == nullptr) {
            throw CompileError("undefined symbol '" + e.name + "'", e.pos);
        }
        const std::size_t n = args.size();
        if (n == info->arity) {
            return build(info, std::move(args));
        }
        if (n < info->arity) {
            return build(ir_.partial(*info, n), std::move(args));
        }
        std::vector<std::uint32_t> saturated(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(info->arity));
        std::uint32_t head = build(info, std::move(saturated));
        return apply_chain(head, args, info->arity);
    }
};

class Lowering {
public:
    Lowering(const IRProgram& ir, const InfoEntry& function) : ir_(ir), function_(function) {}

    CompiledFunction run(const DefTree& tree) {
        code_.entry = lower(tree);
        return std::move(code_);
    }

private:
    const IRProgram& ir_;
    const InfoEntry& function_;
    CompiledFunction code_;

    Target lower(const DefTree& t) {
        switch (t.kind) {
            case DefTree::Kind::Exempt:
                return Target{Target::Kind::Exempt, 0};
            case DefTree::Kind::Leaf: {
                const Rule& rule = function_.source->rules.at(t.rule);
                LeafCode leaf;
                leaf.rule = t.rule;
                leaf.rhs = TemplateCompiler(ir_, rule, t.bindings).compile();
                code_.leaves.push_back(std::move(leaf));
                return Target{Target::Kind::Leaf, static_cast<std::uint32_t>(code_.leaves.size() - 1)};
            }
            case DefTree::Kind::Or: {
                OrCode oc;
                oc.left = alternative(t, 0);
                oc.right = alternative(t, 1);
                code_.ors.push_back(oc);
                return Target{Target::Kind::Or, static_cast<std::uint32_t>(code_.ors.size() - 1)};
            }
            case DefTree::Kind::Branch: {
                CaseTable table;
                table.position = t.position;
                table.type = ir_.types().at(t.type_index).get();
                table.entries = {{Target::Kind::Eval, 0}, {Target::Kind::PullTab, 0}, {Target::Kind::Fail, 0}};
                for (const auto& child : t.children) {
                    table.entries.push_back(lower(child));
                }
                code_.tables.push_back(std::move(table));
                return Target{Target::Kind::Table, static_cast<std::uint32_t>(code_.tables.size() - 1)};
            }
            case DefTree::Kind::IntBranch: {
                CaseTable table;
                table.position = t.position;
                table.type = ir_.integer().type;
                table.entries = {{Target::Kind::Eval, 0},
                                 {Target::Kind::PullTab, 0},
                                 {Target::Kind::Fail, 0},
                                 {Target::Kind::IntDispatch, 0}};
                for (std::size_t i = 0; i < t.children.size(); ++i) {
                    table.int_cases.emplace_back(t.literals[i], lower(t.children[i]));
                }
                code_.tables.push_back(std::move(table));
                return Target{Target::Kind::Table, static_cast<std::uint32_t>(code_.tables.size() - 1)};
            }
        }
        return Target{};
    }

    OrAlternative alternative(const DefTree& or_node, std::size_t which) {
        const DefTree& alt = or_node.children[which];
        OrAlternative out;
        if (alt.kind == DefTree::Kind::Leaf) {
            out.kind = OrAlternative::Kind::Leaf;
            out.index = lower(alt).index;
        } else if (alt.kind == DefTree::Kind::Or) {
            out.kind = OrAlternative::Kind::Or;
            out.index = lower(alt).index;
        } else {
            out.kind = OrAlternative::Kind::Aux;
            out.aux = or_node.aux.at(which);
        }
        return out;
    }
};

}  // namespace

CompiledFunction compile_branch_tables(const IRProgram& ir, const InfoEntry& function, const DefTree& tree) {
    return Lowering(ir, function).run(tree);
}

const InfoEntry* IRProgram::partial(const InfoEntry& target, std::size_t held) const {
    return find(partial_name(target, held));
}

class ProgramCompiler {
public:
    explicit ProgramCompiler(SurfaceProgram program) {
        ir_.source_ = std::make_shared<const SurfaceProgram>(std::move(program));
    }

    IRProgram run() {
        const SurfaceProgram& src = *ir_.source_;
        ir_.choice_ = add("?", 2, kChoiceTag, SymbolKind::Choice);
        ir_.failure_ = add("failed", 0, kFailureTag, SymbolKind::Failure);

        InfoEntry* integer = add("Int", 0, Tag{kFirstConstructorTag}, SymbolKind::Int);
        ir_.integer_ = integer;

        // Data types come first so that types()[i] matches data_decls[i].
        for (const auto& d : src.data_decls) {
            TypeInfo* t = add_type(d.type_name);
            for (std::size_t c = 0; c < d.constructors.size(); ++c) {
                InfoEntry* e = add(d.constructors[c].name, d.constructors[c].arity,
                                   Tag{kFirstConstructorTag + static_cast<std::uint32_t>(c)}, SymbolKind::Constructor);
                e->type = t;
                e->constructor_index = c;
                t->constructors.push_back(e);
            }
        }
        int_type_ = add_type("Int");
        int_type_->constructors.push_back(integer);
        integer->type = int_type_;
        partial_type_ = add_type("Partial");

        ir_.false_ = ir_.find(names::False);
        ir_.true_ = ir_.find(names::True);

        const std::pair<const char*, PrimOp> prims[] = {
            {"+", PrimOp::Add}, {"-", PrimOp::Sub}, {"*", PrimOp::Mul},
            {"==", PrimOp::Eq}, {"<=", PrimOp::Le}, {"apply", PrimOp::Apply},
        };
        for (auto [name, op] : prims) {
            InfoEntry* e = add(name, 2, kFunctionTag, SymbolKind::Function);
            e->prim = op;
        }

        std::vector<InfoEntry*> worklist;
        for (const auto& f : src.functions) {
            InfoEntry* e = add(f.name, f.arity(), kFunctionTag, SymbolKind::Function);
            e->source = &f;
            e->tree = build_def_tree(src, f);
            worklist.push_back(e);
        }
        for (std::size_t i = 0; i < worklist.size(); ++i) {
            attach_aux(*worklist[i], worklist[i]->tree, worklist);
        }
        for (const auto& f : src.functions) {
            for (const auto& r : f.rules) {
                scan_partials(r.body);
                for (const auto& b : r.where) {
                    scan_partials(b.expr);
                }
            }
        }
        for (InfoEntry* f : worklist) {
            f->code = compile_branch_tables(ir_, *f, f->tree);
        }
        ir_.goal_ = ir_.find(src.goal);
        if (ir_.goal_ == nullptr || !ir_.goal_->is_function() || ir_.goal_->arity != 0) {
            throw CompileError("goal '" + src.goal + "' must be a function without arguments");
        }
        return std::move(ir_);
    }

private:
    IRProgram ir_;
    TypeInfo* int_type_ = nullptr;
    TypeInfo* partial_type_ = nullptr;
    std::map<std::string, int> aux_counter_;

    InfoEntry* add(std::string name, std::size_t arity, Tag tag, SymbolKind kind) {
        auto e = std::make_unique<InfoEntry>();
        e->name = std::move(name);
        e->arity = arity;
        e->tag = tag;
        e->kind = kind;
        e->id = ir_.symbols_.size();
        InfoEntry* raw = e.get();
        ir_.by_name_[raw->name] = raw;
        ir_.symbols_.push_back(std::move(e));
        return raw;
    }

    TypeInfo* add_type(std::string name) {
        auto t = std::make_unique<TypeInfo>();
        t->name = std::move(name);
        t->index = ir_.types_.size();
        TypeInfo* raw = t.get();
        ir_.types_.push_back(std::move(t));
        return raw;
    }

    static DefTree specialize(const std::vector<MatchStep>& context, DefTree subtree, const SurfaceProgram& src) {
        DefTree t = std::move(subtree);
        for (auto it = context.rbegin(); it != context.rend(); ++it) {
            DefTree wrap;
            wrap.position = it->position;
            if (it->is_int) {
                wrap.kind = DefTree::Kind::IntBranch;
                wrap.literals.push_back(it->literal);
                wrap.children.push_back(std::move(t));
            } else {
                wrap.kind = DefTree::Kind::Branch;
                wrap.type_index = it->type_index;
                const std::size_t n = src.data_decls[it->type_index].constructors.size();
                wrap.children.resize(n);
                wrap.children[it->case_index] = std::move(t);
            }
            t = std::move(wrap);
        }
        return t;
    }

    void attach_aux(InfoEntry& owner, DefTree& t, std::vector<InfoEntry*>& worklist) {
        switch (t.kind) {
            case DefTree::Kind::Branch:
            case DefTree::Kind::IntBranch:
                for (auto& c : t.children) {
                    attach_aux(owner, c, worklist);
                }
                return;
            case DefTree::Kind::Or:
                t.aux.assign(2, nullptr);
                for (std::size_t k = 0; k < 2; ++k) {
                    DefTree& alt = t.children[k];
                    if (alt.kind == DefTree::Kind::Or) {
                        attach_aux(owner, alt, worklist);
                    } else if (alt.kind == DefTree::Kind::Branch || alt.kind == DefTree::Kind::IntBranch) {
                        std::string base = owner.auxiliary ? owner.name.substr(0, owner.name.find('#')) : owner.name;
                        std::string name = base + "#" + std::to_string(++aux_counter_[base]);
                        InfoEntry* aux = add(name, owner.arity, kFunctionTag, SymbolKind::Function);
                        aux->source = owner.source;
                        aux->auxiliary = true;
                        aux->tree = specialize(t.context, alt, *ir_.source_);
                        t.aux[k] = aux;
                        worklist.push_back(aux);
                    }
                }
                return;
            default:
                return;
        }
    }

    void ensure_partials(const InfoEntry& target, std::size_t held) {
        InfoEntry* next = nullptr;
        for (std::size_t h = target.arity; h-- > held;) {
            std::string name = partial_name(target, h);
            InfoEntry* e = const_cast<InfoEntry*>(ir_.find(name));
            if (e == nullptr) {
                e = add(name, h, Tag{kFirstConstructorTag}, SymbolKind::Partial);
                e->type = partial_type_;
                e->partial_target = &target;
                e->missing = target.arity - h;
                e->partial_next = next;
            }
            next = e;
        }
    }

    void scan_partials(const Expr& e) {
        if (e.kind == Expr::Kind::Apply && e.has_symbol_head()) {
            const InfoEntry* info = ir_.find(e.name);
            if (info != nullptr && e.args.size() < info->arity) {
                ensure_partials(*info, e.args.size());
            }
        }
        for (const auto& a : e.args) {
            scan_partials(a);
        }
    }
};

IRProgram compile_program(SurfaceProgram program) {
    return ProgramCompiler(std::move(program)).run();
}

// ------------------------------
// dumps
// ------------------------------

namespace {

const char* kind_name(SymbolKind k) {
    switch (k) {
        case SymbolKind::Function: return "function";
        case SymbolKind::Constructor: return "constructor";
        case SymbolKind::Choice: return "choice";
        case SymbolKind::Failure: return "failure";
        case SymbolKind::Int: return "int";
        case SymbolKind::Partial: return "partial";
    }
    return "?";
}

bool listed(const InfoEntry& e, bool include_prelude) {
    if (!e.is_function() || e.prim != PrimOp::None) {
        return false;
    }
    const FunctionDef* f = e.source;
    return include_prelude || f == nullptr || !f->from_prelude;
}

std::string leaf_text(const InfoEntry& fn, std::size_t rule) {
    const Rule& r = fn.source->rules.at(rule);
    std::string s = print_expr(r.body);
    for (std::size_t i = 0; i < r.where.size(); ++i) {
        s += (i == 0 ? " where " : "; ") + r.where[i].var + " = " + print_expr(r.where[i].expr);
    }
    return s;
}

void dump_tree(std::ostream& os, const IRProgram& ir, const InfoEntry& fn, const DefTree& t, int indent,
               const std::string& label) {
    std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    os << pad << label;
    switch (t.kind) {
        case DefTree::Kind::Exempt:
            os << "exempt\n";
            return;
        case DefTree::Kind::Leaf:
            os << "leaf " << leaf_text(fn, t.rule) << "\n";
            return;
        case DefTree::Kind::Or:
            os << "or {\n";
            for (std::size_t k = 0; k < t.children.size(); ++k) {
                const InfoEntry* aux = k < t.aux.size() ? t.aux[k] : nullptr;
                if (aux != nullptr) {
                    os << pad << "  call " << aux->name << "\n";
                } else {
                    dump_tree(os, ir, fn, t.children[k], indent + 1, "");
                }
            }
            os << pad << "}\n";
            return;
        case DefTree::Kind::Branch: {
            const TypeInfo& type = *ir.types().at(t.type_index);
            os << "branch " << format_path(t.position) << " " << type.name << " {\n";
            for (std::size_t c = 0; c < t.children.size(); ++c) {
                dump_tree(os, ir, fn, t.children[c], indent + 1, type.constructors[c]->name + " -> ");
            }
            os << pad << "}\n";
            return;
        }
        case DefTree::Kind::IntBranch:
            os << "branch " << format_path(t.position) << " Int {\n";
            for (std::size_t c = 0; c < t.children.size(); ++c) {
                dump_tree(os, ir, fn, t.children[c], indent + 1, std::to_string(t.literals[c]) + " -> ");
            }
            os << pad << "  _ -> exempt\n";
            os << pad << "}\n";
            return;
    }
}

std::string target_text(const Target& t) {
    switch (t.kind) {
        case Target::Kind::Eval: return "eval";
        case Target::Kind::PullTab: return "pulltab";
        case Target::Kind::Fail: return "fail";
        case Target::Kind::Exempt: return "exempt";
        case Target::Kind::IntDispatch: return "int";
        case Target::Kind::Table: return "table#" + std::to_string(t.index);
        case Target::Kind::Leaf: return "leaf#" + std::to_string(t.index);
        case Target::Kind::Or: return "or#" + std::to_string(t.index);
    }
    return "?";
}

std::string alt_text(const OrAlternative& a) {
    switch (a.kind) {
        case OrAlternative::Kind::Leaf: return "leaf#" + std::to_string(a.index);
        case OrAlternative::Kind::Or: return "or#" + std::to_string(a.index);
        case OrAlternative::Kind::Aux: return "call " + a.aux->name;
    }
    return "?";
}

}  // namespace

std::string dump_dtree(const IRProgram& ir, bool include_prelude) {
    std::ostringstream os;
    for (const auto& e : ir.symbols()) {
        if (!listed(*e, include_prelude)) {
            continue;
        }
        os << "function " << e->name << "/" << e->arity << (e->auxiliary ? " (auxiliary)" : "") << "\n";
        dump_tree(os, ir, *e, e->tree, 1, "");
    }
    return os.str();
}

std::string dump_icurry(const IRProgram& ir, bool include_prelude) {
    std::ostringstream os;
    os << "reserved tags: function=" << kFunctionTag.value << " choice=" << kChoiceTag.value
       << " failure=" << kFailureTag.value << "\n";
    os << "symbols:\n";
    for (const auto& e : ir.symbols()) {
        os << "  " << e->name << " arity=" << e->arity << " tag=" << e->tag.value << " kind=" << kind_name(e->kind);
        if (e->kind == SymbolKind::Constructor) {
            os << " type=" << e->type->name << " index=" << e->constructor_index;
        } else if (e->kind == SymbolKind::Partial) {
            os << " target=" << e->partial_target->name << " missing=" << e->missing;
        } else if (e->is_function() && e->prim != PrimOp::None) {
            os << " builtin";
        }
        os << "\n";
    }
    os << "functions:\n";
    for (const auto& e : ir.symbols()) {
        if (!listed(*e, include_prelude)) {
            continue;
        }
        const CompiledFunction& code = e->code;
        os << "  " << e->name << "/" << e->arity << " entry=" << target_text(code.entry) << "\n";
        for (std::size_t i = 0; i < code.tables.size(); ++i) {
            const CaseTable& t = code.tables[i];
            os << "    table#" << i << " " << format_path(t.position) << " " << t.type->name << " ["
               << t.entries.size() << "]:";
            for (std::size_t k = 0; k < t.entries.size(); ++k) {
                os << " " << k << ":" << target_text(t.entries[k]);
            }
            for (const auto& [lit, target] : t.int_cases) {
                os << " " << lit << "=>" << target_text(target);
            }
            os << "\n";
        }
        for (std::size_t i = 0; i < code.leaves.size(); ++i) {
            os << "    leaf#" << i << " rule " << code.leaves[i].rule + 1 << ": " << leaf_text(*e, code.leaves[i].rule)
               << "\n";
        }
        for (std::size_t i = 0; i < code.ors.size(); ++i) {
            os << "    or#" << i << ": " << alt_text(code.ors[i].left) << " ? " << alt_text(code.ors[i].right) << "\n";
        }
    }
    return os.str();
}

}  // namespace fairscheme
