#include "fairscheme/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <unordered_set>

namespace fairscheme {

void check_node_layout() {
    if (sizeof(Node) != kNodeRecordSize) {
        std::fprintf(stderr, "fatal: node record is %zu bytes, expected %zu\n", sizeof(Node), kNodeRecordSize);
        std::abort();
    }
}

Graph::Graph() : free_blocks_(kFreeListMaxArity + 1) {}

Graph::~Graph() = default;

Node* Graph::allocate() {
    if (chunk_used_ == kChunkNodes) {
        chunks_.push_back(std::make_unique<Node[]>(kChunkNodes));
        chunk_used_ = 0;
    }
    Node* n = &chunks_.back()[chunk_used_++];
    n->serial_ = next_serial_++;
    return n;
}

NodeRef* Graph::allocate_block(std::size_t n) {
    if (n <= kFreeListMaxArity && !free_blocks_[n].empty()) {
        NodeRef* b = free_blocks_[n].back();
        free_blocks_[n].pop_back();
        ++reused_blocks_;
        return b;
    }
    if (n > kSlotChunk) {
        big_blocks_.push_back(std::make_unique<NodeRef[]>(n));
        overflow_slots_ += n;
        return big_blocks_.back().get();
    }
    if (kSlotChunk - slot_used_ < n) {
        slot_chunks_.push_back(std::make_unique<NodeRef[]>(kSlotChunk));
        slot_used_ = 0;
    }
    NodeRef* b = &slot_chunks_.back()[slot_used_];
    slot_used_ += n;
    overflow_slots_ += n;
    return b;
}

void Graph::release_block(NodeRef* block, std::size_t n) {
    if (n <= kFreeListMaxArity && free_blocks_[n].size() < kFreeListLimit) {
        free_blocks_[n].push_back(block);
    }
}

void Graph::fill(Node* n, const InfoEntry& info, std::span<const NodeRef> succ, std::uint64_t aux, bool fresh) {
    if (succ.size() != info.arity) {
        std::fprintf(stderr, "fatal: node '%s' needs %zu successors, got %zu\n", info.name.c_str(), info.arity,
                     succ.size());
        std::abort();
    }
    // The new successors may be read from the node being replaced.
    NodeRef local[Node::kInline];
    std::vector<NodeRef> wide;
    std::span<const NodeRef> src;
    if (succ.size() <= Node::kInline) {
        std::copy(succ.begin(), succ.end(), local);
        src = std::span<const NodeRef>(local, succ.size());
    } else {
        wide.assign(succ.begin(), succ.end());
        src = wide;
    }
    NodeRef* old_block = nullptr;
    std::size_t old_arity = 0;
    if (!fresh && n->info_ != nullptr && n->info_->arity > Node::kInline) {
        old_block = n->slots_.overflow;
        old_arity = n->info_->arity;
    }
    n->info_ = &info;
    n->aux_ = aux;
    if (src.size() <= Node::kInline) {
        std::copy(src.begin(), src.end(), n->slots_.inline_);
        if (old_block != nullptr) {
            release_block(old_block, old_arity);
        }
    } else {
        NodeRef* block = old_block != nullptr && old_arity == src.size() ? old_block : allocate_block(src.size());
        if (old_block != nullptr && block != old_block) {
            release_block(old_block, old_arity);
        }
        std::copy(src.begin(), src.end(), block);
        n->slots_.overflow = block;
    }
}

NodeRef Graph::make(const InfoEntry& info, std::span<const NodeRef> succ, std::uint64_t aux) {
    Node* n = allocate();
    fill(n, info, succ, aux, true);
    return n;
}

void Graph::overwrite(NodeRef target, const InfoEntry& info, std::span<const NodeRef> succ, std::uint64_t aux) {
    fill(target, info, succ, aux, false);
}

void Graph::overwrite_copy(NodeRef target, NodeRef source) {
    if (target == source) {
        return;
    }
    const std::size_t k = source->arity();
    std::vector<NodeRef> succ(k);
    for (std::size_t i = 0; i < k; ++i) {
        succ[i] = source->succ(i);
    }
    fill(target, source->info(), succ, source->aux(), false);
}

NodeRef Graph::clone_with_child(NodeRef source, std::size_t index, NodeRef child) {
    const std::size_t k = source->arity();
    if (index >= k) {
        std::fprintf(stderr, "fatal: clone of '%s' at child %zu, arity %zu\n", source->info().name.c_str(), index, k);
        std::abort();
    }
    NodeRef local[Node::kInline];
    std::vector<NodeRef> wide;
    NodeRef* buf = local;
    if (k > Node::kInline) {
        wide.resize(k);
        buf = wide.data();
    }
    for (std::size_t i = 0; i < k; ++i) {
        buf[i] = i == index ? child : source->succ(i);
    }
    return make(source->info(), std::span<const NodeRef>(buf, k), source->aux());
}

std::string node_symbol(const Node& n) {
    if (n.kind() == SymbolKind::Int) {
        return std::to_string(n.int_value());
    }
    return n.info().name;
}

std::string dump_node(const Node& n) {
    std::string out = "#" + std::to_string(n.serial()) + ":" + node_symbol(n) + "(";
    for (std::size_t i = 0; i < n.arity(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += '#' + std::to_string(n.succ(i)->serial());
    }
    out += ')';
    if (n.is_choice()) {
        out += "[cid=" + std::to_string(n.choice_id()) + "]";
    }
    return out;
}

std::string dump_graph(NodeRef root) {
    std::string out;
    std::unordered_set<const Node*> seen;
    std::vector<NodeRef> stack{root};
    while (!stack.empty()) {
        NodeRef n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) {
            continue;
        }
        out += dump_node(*n);
        out += '\n';
        for (std::size_t i = n->arity(); i-- > 0;) {
            stack.push_back(n->succ(i));
        }
    }
    return out;
}

}  // namespace fairscheme
