#include "fairscheme/builtins.hpp"

#include <vector>

namespace fairscheme {

std::int64_t prim_arith(PrimOp op, std::int64_t a, std::int64_t b) {
    auto ua = static_cast<std::uint64_t>(a);
    auto ub = static_cast<std::uint64_t>(b);
    switch (op) {
        case PrimOp::Add: return static_cast<std::int64_t>(ua + ub);
        case PrimOp::Sub: return static_cast<std::int64_t>(ua - ub);
        case PrimOp::Mul: return static_cast<std::int64_t>(ua * ub);
        default: return 0;
    }
}

bool prim_compare(PrimOp op, std::int64_t a, std::int64_t b) {
    return op == PrimOp::Eq ? a == b : a <= b;
}

std::size_t prim_strict_count(PrimOp op) {
    switch (op) {
        case PrimOp::None: return 0;
        case PrimOp::Apply: return 1;
        default: return 2;
    }
}

void step_primitive(Graph& graph, const IRProgram& ir, NodeRef redex) {
    const PrimOp op = redex->info().prim;
    if (op == PrimOp::Apply) {
        apply_partial(graph, ir, redex, redex->succ(0), redex->succ(1));
        return;
    }
    NodeRef a = redex->succ(0);
    NodeRef b = redex->succ(1);
    if (a->kind() != SymbolKind::Int || b->kind() != SymbolKind::Int) {
        graph.overwrite(redex, ir.failure(), {});
        return;
    }
    switch (op) {
        case PrimOp::Add:
        case PrimOp::Sub:
        case PrimOp::Mul:
            graph.overwrite(redex, ir.integer(), {},
                            static_cast<std::uint64_t>(prim_arith(op, a->int_value(), b->int_value())));
            return;
        default:
            graph.overwrite(redex, ir.bool_constructor(prim_compare(op, a->int_value(), b->int_value())), {});
            return;
    }
}

void apply_partial(Graph& graph, const IRProgram& ir, NodeRef redex, NodeRef f, NodeRef x) {
    if (f->kind() != SymbolKind::Partial) {
        graph.overwrite(redex, ir.failure(), {});
        return;
    }
    const InfoEntry& p = f->info();
    std::vector<NodeRef> args;
    args.reserve(p.arity + 1);
    for (std::size_t i = 0; i < p.arity; ++i) {
        args.push_back(f->succ(i));
    }
    args.push_back(x);
    if (p.missing == 1) {
        graph.overwrite(redex, *p.partial_target, args);
    } else {
        graph.overwrite(redex, *p.partial_next, args, p.missing - 1);
    }
}

}  // namespace fairscheme
