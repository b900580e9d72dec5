#include "fairscheme/engine.hpp"

#include "fairscheme/builtins.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <vector>

namespace fairscheme {

std::optional<Fingerprint::Side> Fingerprint::lookup(std::uint64_t id) const {
    for (const Cell* c = head_.get(); c != nullptr; c = c->next.get()) {
        if (c->id == id) {
            return c->side;
        }
    }
    return std::nullopt;
}

Fingerprint Fingerprint::with(std::uint64_t id, Side side) const {
    if (lookup(id)) {
        std::fprintf(stderr, "fatal: choice %llu decided twice\n", static_cast<unsigned long long>(id));
        std::abort();
    }
    Fingerprint out;
    out.head_ = std::make_shared<const Cell>(Cell{id, side, head_});
    out.size_ = size_ + 1;
    return out;
}

const char* action_name(Action::Kind k) {
    switch (k) {
        case Action::Kind::Rewrite: return "rewrite";
        case Action::Kind::Or: return "or";
        case Action::Kind::Primitive: return "prim";
        case Action::Kind::PullTab: return "pulltab";
        case Action::Kind::FailAt: return "fail";
        case Action::Kind::Drop: return "drop";
        case Action::Kind::EmitReady: return "emit";
    }
    return "?";
}

NodeRef follow_path(NodeRef from, const Path& p) {
    for (std::uint32_t i : p) {
        from = from->succ(i);
    }
    return from;
}

std::uint64_t default_aux(const InfoEntry& info) {
    return info.kind == SymbolKind::Partial ? info.missing : 0;
}

Engine::Engine(const IRProgram& ir, Graph& graph) : ir_(ir), graph_(graph) {}

NodeRef Engine::make_goal() {
    return graph_.make(ir_.goal(), {});
}

namespace {

// Outcome of looking at a demanded successor.
enum class Probe { Ready, Descend, Act };

// Alternative of a decided choice.
NodeRef decided_alternative(NodeRef c, Fingerprint::Side side) {
    return c->succ(side == Fingerprint::Side::Left ? 0 : 1);
}

// Follows decided choices from `n`; returns the first node that is not a
// decided choice.
NodeRef through_decided(NodeRef n, const Fingerprint& fp) {
    while (n->is_choice()) {
        auto side = fp.lookup(n->choice_id());
        if (!side) {
            break;
        }
        n = decided_alternative(n, *side);
    }
    return n;
}

// Demanded successor `index` of `parent` while matching function node
// `owner`.  Ready: `out` is head normal and may be matched.  Descend: `out`
// is a function node to evaluate first.  Act: `act` is the action.
Probe probe(NodeRef parent, std::uint32_t index, NodeRef owner, const Fingerprint& fp, NodeRef& out, Action& act) {
    NodeRef d = parent->succ(index);
    switch (d->kind()) {
        case SymbolKind::Function:
            out = d;
            return Probe::Descend;
        case SymbolKind::Choice: {
            NodeRef a = through_decided(d, fp);
            if (a != d && a->is_function()) {
                out = a;
                return Probe::Descend;
            }
            act.kind = Action::Kind::PullTab;
            act.at = parent;
            act.index = index;
            return Probe::Act;
        }
        case SymbolKind::Failure:
            act.kind = Action::Kind::FailAt;
            act.at = owner;
            return Probe::Act;
        default:
            out = d;
            return Probe::Ready;
    }
}

Action fail_at(NodeRef n) {
    Action a;
    a.kind = Action::Kind::FailAt;
    a.at = n;
    return a;
}

}  // namespace

Action Engine::eval_function(NodeRef fn, const Fingerprint& fp) const {
restart:
    const InfoEntry& info = fn->info();
    if (info.prim != PrimOp::None) {
        const std::size_t strict = prim_strict_count(info.prim);
        for (std::uint32_t i = 0; i < strict; ++i) {
            NodeRef d = nullptr;
            Action act;
            switch (probe(fn, i, fn, fp, d, act)) {
                case Probe::Descend:
                    fn = d;
                    goto restart;
                case Probe::Act:
                    return act;
                case Probe::Ready:
                    break;
            }
        }
        Action a;
        a.kind = Action::Kind::Primitive;
        a.at = fn;
        return a;
    }
    const CompiledFunction& code = info.code;
    Target target = code.entry;
    for (;;) {
        switch (target.kind) {
            case Target::Kind::Table: {
                const CaseTable& table = code.tables[target.index];
                NodeRef parent = fn;
                const std::size_t depth = table.position.size();
                for (std::size_t k = 0; k + 1 < depth; ++k) {
                    parent = parent->succ(table.position[k]);
                }
                NodeRef d = nullptr;
                Action act;
                switch (probe(parent, table.position.back(), fn, fp, d, act)) {
                    case Probe::Descend:
                        fn = d;
                        goto restart;
                    case Probe::Act:
                        return act;
                    case Probe::Ready:
                        break;
                }
                if (d->info().type != table.type) {
                    return fail_at(fn);
                }
                if (d->kind() == SymbolKind::Int) {
                    const std::int64_t v = d->int_value();
                    auto it = std::lower_bound(table.int_cases.begin(), table.int_cases.end(), v,
                                               [](const auto& c, std::int64_t x) { return c.first < x; });
                    if (it == table.int_cases.end() || it->first != v) {
                        return fail_at(fn);
                    }
                    target = it->second;
                } else {
                    target = table.entries[d->tag().value];
                }
                break;
            }
            case Target::Kind::Leaf: {
                const LeafCode& leaf = code.leaves[target.index];
                const TemplateOp& root = leaf.rhs.ops[leaf.rhs.root];
                if (root.code == TemplateOp::Code::Path) {
                    NodeRef bound = follow_path(fn, root.path);
                    if (bound->is_function()) {
                        fn = bound;
                        goto restart;
                    }
                }
                Action a;
                a.kind = Action::Kind::Rewrite;
                a.at = fn;
                a.leaf = &leaf;
                return a;
            }
            case Target::Kind::Or: {
                Action a;
                a.kind = Action::Kind::Or;
                a.at = fn;
                a.alternatives = &code.ors[target.index];
                return a;
            }
            default:
                return fail_at(fn);
        }
    }
}

Action Engine::find_action(NodeRef root, const Fingerprint& fp) const {
    if (root->is_function()) {
        return eval_function(root, fp);
    }
    // Normal-form driving: children left to right, depth first.
    std::vector<std::pair<NodeRef, std::uint32_t>> stack;
    if (root->arity() > 0) {
        stack.emplace_back(root, 0);
    }
    while (!stack.empty()) {
        auto& [n, i] = stack.back();
        if (i == n->arity()) {
            stack.pop_back();
            continue;
        }
        NodeRef parent = n;
        const std::uint32_t index = i++;
        NodeRef c = parent->succ(index);
        if (c->is_choice()) {
            NodeRef a = through_decided(c, fp);
            if (a == c || a->is_choice()) {
                Action act;
                act.kind = Action::Kind::PullTab;
                act.at = parent;
                act.index = index;
                return act;
            }
            c = a;
        }
        switch (c->kind()) {
            case SymbolKind::Function:
                return eval_function(c, fp);
            case SymbolKind::Failure: {
                Action act;
                act.kind = Action::Kind::Drop;
                act.at = parent;
                act.index = index;
                return act;
            }
            default:
                if (c->arity() > 0) {
                    stack.emplace_back(c, 0);
                }
                break;
        }
    }
    Action done;
    done.kind = Action::Kind::EmitReady;
    done.at = root;
    return done;
}

NodeRef Engine::build_template(const Template& t, NodeRef redex, NodeRef target) {
    // Subterm paths are resolved before the redex is overwritten.
    std::vector<NodeRef> built(t.ops.size(), nullptr);
    for (std::size_t i = 0; i < t.ops.size(); ++i) {
        const TemplateOp& op = t.ops[i];
        const bool is_root = i == t.root && target != nullptr;
        if (op.code == TemplateOp::Code::Path) {
            built[i] = follow_path(redex, op.path);
            continue;
        }
        if (is_root) {
            continue;
        }
        switch (op.code) {
            case TemplateOp::Code::Int:
                built[i] = graph_.make_int(ir_.integer(), op.value);
                break;
            case TemplateOp::Code::Fail:
                built[i] = graph_.make(ir_.failure(), {});
                break;
            case TemplateOp::Code::Choice:
                built[i] = graph_.make(ir_.choice(), {built[op.operands[0]], built[op.operands[1]]}, fresh_choice_id());
                break;
            case TemplateOp::Code::Build: {
                std::vector<NodeRef> succ;
                succ.reserve(op.operands.size());
                for (std::uint32_t o : op.operands) {
                    succ.push_back(built[o]);
                }
                built[i] = graph_.make(*op.info, succ, default_aux(*op.info));
                break;
            }
            default:
                break;
        }
    }
    if (target == nullptr) {
        return built[t.root];
    }
    const TemplateOp& op = t.ops[t.root];
    switch (op.code) {
        case TemplateOp::Code::Path:
            graph_.overwrite_copy(target, built[t.root]);
            break;
        case TemplateOp::Code::Int:
            graph_.overwrite(target, ir_.integer(), {}, static_cast<std::uint64_t>(op.value));
            break;
        case TemplateOp::Code::Fail:
            graph_.overwrite(target, ir_.failure(), {});
            break;
        case TemplateOp::Code::Choice:
            graph_.overwrite(target, ir_.choice(), {built[op.operands[0]], built[op.operands[1]]}, fresh_choice_id());
            break;
        case TemplateOp::Code::Build: {
            std::vector<NodeRef> succ;
            succ.reserve(op.operands.size());
            for (std::uint32_t o : op.operands) {
                succ.push_back(built[o]);
            }
            graph_.overwrite(target, *op.info, succ, default_aux(*op.info));
            break;
        }
    }
    return target;
}

NodeRef Engine::instantiate_leaf(const LeafCode& leaf, NodeRef redex) {
    return build_template(leaf.rhs, redex, nullptr);
}

NodeRef Engine::build_alternative(const OrAlternative& alt, const InfoEntry& owner, NodeRef redex) {
    switch (alt.kind) {
        case OrAlternative::Kind::Leaf:
            return build_template(owner.code.leaves[alt.index].rhs, redex, nullptr);
        case OrAlternative::Kind::Or:
            return build_or(owner.code.ors[alt.index], owner, redex, nullptr);
        case OrAlternative::Kind::Aux: {
            std::vector<NodeRef> args(redex->arity());
            for (std::size_t i = 0; i < args.size(); ++i) {
                args[i] = redex->succ(i);
            }
            return graph_.make(*alt.aux, args);
        }
    }
    return nullptr;
}

NodeRef Engine::build_or(const OrCode& code, const InfoEntry& owner, NodeRef redex, NodeRef target) {
    NodeRef left = build_alternative(code.left, owner, redex);
    NodeRef right = build_alternative(code.right, owner, redex);
    if (target == nullptr) {
        return graph_.make(ir_.choice(), {left, right}, fresh_choice_id());
    }
    graph_.overwrite(target, ir_.choice(), {left, right}, fresh_choice_id());
    return target;
}

StepOutcome Engine::apply_action(const Action& action, NodeRef root) {
    if (action.kind == Action::Kind::Drop) {
        return StepOutcome::RootFailed;
    }
    if (action.kind == Action::Kind::EmitReady) {
        return StepOutcome::ValueReady;
    }
    ++stats_.steps;
    if (trace_ != nullptr) {
        *trace_ << "STEP " << stats_.steps << ": " << action_name(action.kind) << " at #" << action.at->serial() << " ("
                << node_symbol(*action.at) << ")\n";
    }
    switch (action.kind) {
        case Action::Kind::Rewrite:
            ++stats_.rewrites;
            build_template(action.leaf->rhs, action.at, action.at);
            break;
        case Action::Kind::Or:
            ++stats_.rewrites;
            build_or(*action.alternatives, action.at->info(), action.at, action.at);
            break;
        case Action::Kind::Primitive:
            ++stats_.rewrites;
            step_primitive(graph_, ir_, action.at);
            break;
        case Action::Kind::PullTab: {
            ++stats_.pulltabs;
            NodeRef parent = action.at;
            NodeRef c = parent->succ(action.index);
            NodeRef left = graph_.clone_with_child(parent, action.index, c->succ(0));
            NodeRef right = graph_.clone_with_child(parent, action.index, c->succ(1));
            graph_.overwrite(parent, ir_.choice(), {left, right}, c->choice_id());
            if (trace_ != nullptr) {
                *trace_ << "  " << dump_node(*parent) << "\n  " << dump_node(*left) << "\n  " << dump_node(*right)
                        << "\n";
            }
            break;
        }
        case Action::Kind::FailAt:
            ++stats_.failures;
            graph_.overwrite(action.at, ir_.failure(), {});
            break;
        default:
            break;
    }
    if (trace_ != nullptr && action.kind != Action::Kind::PullTab) {
        *trace_ << "  " << dump_node(*action.at) << "\n";
    }
    if (root->is_choice()) {
        return StepOutcome::RootNowChoice;
    }
    if (root->is_failure()) {
        return StepOutcome::RootFailed;
    }
    return StepOutcome::Stepped;
}

}  // namespace fairscheme
