#ifndef FAIRSCHEME_BUILTINS_HPP
#define FAIRSCHEME_BUILTINS_HPP

// Primitive operations: 64-bit integer arithmetic and comparison, and
// eval/apply style application of partial applications.
//
//   +, -, *   strict in both arguments, wrap around on overflow
//   ==, <=    strict in both arguments, result False or True
//   apply     strict in the function argument, which must be a partial
//             application; anything else is a failure

#include "fairscheme/graph.hpp"

#include <cstdint>

namespace fairscheme {

std::int64_t prim_arith(PrimOp op, std::int64_t a, std::int64_t b);
bool prim_compare(PrimOp op, std::int64_t a, std::int64_t b);

// Argument positions a primitive demands.
std::size_t prim_strict_count(PrimOp op);

// Rewrites `redex`, a primitive call whose demanded arguments are head
// normal, to its result.  Ill-typed arguments give a failure.
void step_primitive(Graph& graph, const IRProgram& ir, NodeRef redex);

// Overwrites `redex` with the application of partial `f` to `x`: a new
// partial when more arguments are missing, the saturated call otherwise.
// Fails when `f` is not a partial application.
void apply_partial(Graph& graph, const IRProgram& ir, NodeRef redex, NodeRef f, NodeRef x);

}  // namespace fairscheme

#endif  // FAIRSCHEME_BUILTINS_HPP
