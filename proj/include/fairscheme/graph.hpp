#ifndef FAIRSCHEME_GRAPH_HPP
#define FAIRSCHEME_GRAPH_HPP

// Runtime graph store.  Every node is one fixed-size record holding a
// pointer to its symbol's info entry, a 64-bit payload (choice id, integer
// value, or missing-argument count of a partial application), a serial
// number for dumps, and its successors.  Up to kInline successors are
// stored in the record; wider nodes keep them in one overflow block.
//
// Nodes live in an arena owned by the Graph and are released all at once
// when it is destroyed.  A NodeRef is a plain pointer and stays valid for
// the Graph's lifetime.

#include "fairscheme/trees.hpp"

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fairscheme {

class Node;
using NodeRef = Node*;

class Node {
public:
    static constexpr std::size_t kInline = 3;

    const InfoEntry& info() const { return *info_; }
    Tag tag() const { return info_->tag; }
    SymbolKind kind() const { return info_->kind; }
    std::size_t arity() const { return info_->arity; }
    std::uint64_t serial() const { return serial_; }

    NodeRef succ(std::size_t i) const { return slots()[i]; }
    void set_succ(std::size_t i, NodeRef n) { slots()[i] = n; }
    std::uint64_t aux() const { return aux_; }
    std::uint64_t choice_id() const { return aux_; }
    std::int64_t int_value() const { return static_cast<std::int64_t>(aux_); }

    bool is_function() const { return info_->kind == SymbolKind::Function; }
    bool is_choice() const { return info_->kind == SymbolKind::Choice; }
    bool is_failure() const { return info_->kind == SymbolKind::Failure; }

private:
    friend class Graph;

    NodeRef* slots() const {
        return arity() <= kInline ? const_cast<NodeRef*>(slots_.inline_) : slots_.overflow;
    }

    const InfoEntry* info_ = nullptr;
    std::uint64_t aux_ = 0;
    std::uint64_t serial_ = 0;
    union Slots {
        NodeRef inline_[kInline];
        NodeRef* overflow;
    } slots_{};
};

inline constexpr std::size_t kNodeRecordSize = 48;
static_assert(sizeof(Node) == kNodeRecordSize, "node records must have one uniform size");

// Runtime check of the record size; the CLI and tests call it at startup.
void check_node_layout();

class Graph {
public:
    Graph();
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;
    ~Graph();

    // Fresh node.  Aborts when the successor count differs from the arity.
    NodeRef make(const InfoEntry& info, std::span<const NodeRef> succ, std::uint64_t aux = 0);
    NodeRef make(const InfoEntry& info, std::initializer_list<NodeRef> succ, std::uint64_t aux = 0) {
        return make(info, std::span<const NodeRef>(succ.begin(), succ.size()), aux);
    }
    NodeRef make_int(const InfoEntry& int_info, std::int64_t v) {
        return make(int_info, {}, static_cast<std::uint64_t>(v));
    }

    // Replaces the content of `target` in place; its identity and serial
    // are kept, so every holder of the reference sees the new content.
    void overwrite(NodeRef target, const InfoEntry& info, std::span<const NodeRef> succ, std::uint64_t aux = 0);
    void overwrite(NodeRef target, const InfoEntry& info, std::initializer_list<NodeRef> succ,
                   std::uint64_t aux = 0) {
        overwrite(target, info, std::span<const NodeRef>(succ.begin(), succ.size()), aux);
    }
    // Shallow copy of `source`'s record (successors shared) into `target`.
    void overwrite_copy(NodeRef target, NodeRef source);

    // Fresh node equal to `source` except successor `index`, which becomes
    // `child`.  Payload, including a choice id, is copied.
    NodeRef clone_with_child(NodeRef source, std::size_t index, NodeRef child);

    std::uint64_t allocated_nodes() const { return next_serial_ - 1; }
    std::uint64_t overflow_slots() const { return overflow_slots_; }
    std::uint64_t reused_overflow_blocks() const { return reused_blocks_; }

private:
    static constexpr std::size_t kChunkNodes = 1 << 14;
    static constexpr std::size_t kSlotChunk = 1 << 14;
    static constexpr std::size_t kFreeListMaxArity = 16;
    static constexpr std::size_t kFreeListLimit = 1 << 12;

    std::vector<std::unique_ptr<Node[]>> chunks_;
    std::size_t chunk_used_ = kChunkNodes;
    std::vector<std::unique_ptr<NodeRef[]>> slot_chunks_;
    std::size_t slot_used_ = kSlotChunk;
    std::vector<std::unique_ptr<NodeRef[]>> big_blocks_;
    std::vector<std::vector<NodeRef*>> free_blocks_;
    std::uint64_t next_serial_ = 1;
    std::uint64_t overflow_slots_ = 0;
    std::uint64_t reused_blocks_ = 0;

    Node* allocate();
    NodeRef* allocate_block(std::size_t n);
    void release_block(NodeRef* block, std::size_t n);
    void fill(Node* n, const InfoEntry& info, std::span<const NodeRef> succ, std::uint64_t aux, bool fresh);
};

// Name shown for a node in dumps: the integer value for integers, the
// symbol name otherwise.
std::string node_symbol(const Node& n);

// One-line dump: `#<serial>:<symbol>(<child serials>)`, with `[cid=<id>]`
// appended for choices.
std::string dump_node(const Node& n);

// Dumps every node reachable from `root`, each once, in depth-first order.
std::string dump_graph(NodeRef root);

}  // namespace fairscheme

#endif  // FAIRSCHEME_GRAPH_HPP
