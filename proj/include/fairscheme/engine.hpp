#ifndef FAIRSCHEME_ENGINE_HPP
#define FAIRSCHEME_ENGINE_HPP

// Single-step evaluation.  find_action walks from a computation's root
// through the compiled case tables to the one place where work is needed;
// apply_action performs that work as one atomic graph update.
//
// Mutations never depend on a computation's decisions.  A decided choice
// may be looked through to reach a function node that needs evaluating,
// or a constructor whose children still need normalizing, but any match
// that would depend on the decision pulls the choice up instead.  Choice
// nodes themselves are never overwritten.

#include "fairscheme/graph.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>

namespace fairscheme {

// Decisions of one computation: choice id -> left/right.  Persistent, so a
// fork shares its parent's decisions instead of copying them.
class Fingerprint {
public:
    enum class Side : std::uint8_t { Left, Right };

    std::optional<Side> lookup(std::uint64_t id) const;
    // Aborts if `id` is already bound.
    Fingerprint with(std::uint64_t id, Side side) const;
    std::size_t size() const { return size_; }

private:
    struct Cell {
        std::uint64_t id;
        Side side;
        std::shared_ptr<const Cell> next;
    };
    std::shared_ptr<const Cell> head_;
    std::size_t size_ = 0;
};

struct Action {
    enum class Kind : std::uint8_t {
        Rewrite,    // apply a rule's right-hand side at `at`
        Or,         // replace `at` by a fresh choice between overlapping rules
        Primitive,  // builtin call at `at` with demanded arguments head normal
        PullTab,    // lift the choice at child `index` of `at` above `at`
        FailAt,     // replace `at` by failure
        Drop,       // the computation's value needs a failed subterm
        EmitReady,  // the root is in normal form
    };

    Kind kind = Kind::EmitReady;
    NodeRef at = nullptr;
    std::uint32_t index = 0;
    const LeafCode* leaf = nullptr;
    const OrCode* alternatives = nullptr;
};

const char* action_name(Action::Kind k);

enum class StepOutcome { Stepped, RootNowChoice, RootFailed, ValueReady };

struct EngineStats {
    std::uint64_t steps = 0;
    std::uint64_t rewrites = 0;
    std::uint64_t pulltabs = 0;
    std::uint64_t failures = 0;
};

class Engine {
public:
    Engine(const IRProgram& ir, Graph& graph);

    const IRProgram& program() const { return ir_; }
    Graph& graph() { return graph_; }

    NodeRef make_goal();
    std::uint64_t fresh_choice_id() { return next_choice_id_++; }

    // `root` must not be a choice or a failure.
    Action find_action(NodeRef root, const Fingerprint& fp) const;
    StepOutcome apply_action(const Action& action, NodeRef root);

    // Builds a rule's right-hand side for the redex `redex` as fresh nodes,
    // sharing the redex's matched subterms.  A projection returns the bound
    // subterm itself.
    NodeRef instantiate_leaf(const LeafCode& leaf, NodeRef redex);

    const EngineStats& stats() const { return stats_; }
    // Trace lines are written here when set.
    void set_trace(std::ostream* os) { trace_ = os; }
    std::ostream* trace() const { return trace_; }

private:
    const IRProgram& ir_;
    Graph& graph_;
    std::uint64_t next_choice_id_ = 0;
    EngineStats stats_;
    std::ostream* trace_ = nullptr;

    Action eval_function(NodeRef fn, const Fingerprint& fp) const;
    NodeRef build_template(const Template& t, NodeRef redex, NodeRef target);
    NodeRef build_alternative(const OrAlternative& alt, const InfoEntry& owner, NodeRef redex);
    NodeRef build_or(const OrCode& code, const InfoEntry& owner, NodeRef redex, NodeRef target);
};

// Follows `p` from `from` through successors.
NodeRef follow_path(NodeRef from, const Path& p);

// Payload for a fresh node of `info` (missing count for partials).
std::uint64_t default_aux(const InfoEntry& info);

}  // namespace fairscheme

#endif  // FAIRSCHEME_ENGINE_HPP
