#include "fairscheme/scheduler.hpp"

#include <cctype>

namespace fairscheme {

const char* run_status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Exhausted: return "exhausted";
        case RunStatus::MaxValues: return "max-values";
        case RunStatus::OutOfFuel: return "incomplete(fuel)";
        case RunStatus::Timeout: return "timeout";
    }
    return "?";
}

WorkQueue::WorkQueue(Engine& engine, RunOptions options) : engine_(engine), options_(std::move(options)) {
    if (options_.quantum == 0) {
        options_.quantum = 1;
    }
}

void WorkQueue::enqueue(Computation c) {
    c.budget = options_.quantum;
    queue_.push_back(std::move(c));
    ++stats_.enqueued;
    note_queue();
}

void WorkQueue::note_queue() {
    if (queue_.size() > stats_.peak_queue) {
        stats_.peak_queue = queue_.size();
    }
}

void WorkQueue::push_goal(NodeRef goal) {
    Computation c;
    c.root = goal;
    enqueue(std::move(c));
}

void WorkQueue::fork(Computation c) {
    NodeRef choice = c.root;
    const std::uint64_t id = choice->choice_id();
    ++stats_.forks;
    if (auto* t = engine_.trace()) {
        *t << "FORK cid=" << id << " at #" << choice->serial() << "\n";
    }
    Computation left{choice->succ(0), c.fp.with(id, Fingerprint::Side::Left), 0};
    Computation right{choice->succ(1), c.fp.with(id, Fingerprint::Side::Right), 0};
    enqueue(std::move(left));
    enqueue(std::move(right));
}

RunStatus WorkQueue::run(const ValueSink& sink) {
    const auto start = std::chrono::steady_clock::now();
    RunStatus status = RunStatus::Exhausted;
    std::uint64_t polls = 0;
    while (!queue_.empty()) {
        if (options_.max_values != 0 && stats_.values >= options_.max_values) {
            status = RunStatus::MaxValues;
            break;
        }
        if (options_.max_total_steps != 0 && engine_.stats().steps >= options_.max_total_steps) {
            status = RunStatus::OutOfFuel;
            break;
        }
        if (options_.deadline && (++polls & 0xfff) == 0 && std::chrono::steady_clock::now() > *options_.deadline) {
            status = RunStatus::Timeout;
            break;
        }
        Computation& c = queue_.front();
        NodeRef root = c.root;
        if (root->is_failure()) {
            queue_.pop_front();
            ++stats_.dropped;
            continue;
        }
        if (root->is_choice()) {
            if (auto side = c.fp.lookup(root->choice_id())) {
                c.root = root->succ(*side == Fingerprint::Side::Left ? 0 : 1);
                continue;
            }
            Computation head = std::move(c);
            queue_.pop_front();
            ++stats_.dropped;
            fork(std::move(head));
            continue;
        }
        const Action action = engine_.find_action(root, c.fp);
        if (action.kind == Action::Kind::EmitReady) {
            std::string v = emit_value(root, c.fp);
            if (auto* t = engine_.trace()) {
                *t << "VALUE " << v << "\n";
            }
            ++stats_.values;
            queue_.pop_front();
            ++stats_.dropped;
            if (sink) {
                sink(v);
            }
            continue;
        }
        if (action.kind == Action::Kind::Drop) {
            queue_.pop_front();
            ++stats_.dropped;
            continue;
        }
        engine_.apply_action(action, root);
        if (--c.budget == 0) {
            Computation moved = std::move(c);
            queue_.pop_front();
            moved.budget = options_.quantum;
            queue_.push_back(std::move(moved));
            ++stats_.rotations;
        }
    }
    const EngineStats& es = engine_.stats();
    stats_.steps = es.steps;
    stats_.pulltabs = es.pulltabs;
    stats_.peak_live_nodes = engine_.graph().allocated_nodes();
    stats_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return status;
}

RunResult run_program(const IRProgram& ir, const RunOptions& options, const ValueSink& sink) {
    Graph graph;
    Engine engine(ir, graph);
    engine.set_trace(options.trace);
    WorkQueue queue(engine, options);
    queue.push_goal(engine.make_goal());
    RunResult result;
    result.status = queue.run([&](const std::string& v) {
        result.values.push_back(v);
        if (sink) {
            sink(v);
        }
    });
    result.stats = queue.stats();
    return result;
}

// ------------------------------
// value printing
// ------------------------------

namespace {

bool is_operator_name(const std::string& name) {
    return !name.empty() && !std::isalnum(static_cast<unsigned char>(name[0])) && name[0] != '_';
}

class ValuePrinter {
public:
    explicit ValuePrinter(const Fingerprint& fp) : fp_(fp) {}

    std::string print(NodeRef n, bool as_arg) {
        n = resolve(n);
        const InfoEntry& info = n->info();
        switch (info.kind) {
            case SymbolKind::Int: {
                std::string s = std::to_string(n->int_value());
                return as_arg && n->int_value() < 0 ? "(" + s + ")" : s;
            }
            case SymbolKind::Failure:
                return "failed";
            case SymbolKind::Choice:
                return "(" + print(n->succ(0), false) + " ? " + print(n->succ(1), false) + ")";
            case SymbolKind::Function:
                return "<unevaluated " + info.name + ">";
            case SymbolKind::Partial:
                return application(info.partial_target->name, n, as_arg);
            case SymbolKind::Constructor:
                break;
        }
        if (info.name == names::Cons) {
            std::vector<NodeRef> elems;
            NodeRef cur = n;
            while (cur->info().name == names::Cons) {
                elems.push_back(cur->succ(0));
                cur = resolve(cur->succ(1));
            }
            if (cur->info().name == names::Nil) {
                std::string s = "[";
                for (std::size_t i = 0; i < elems.size(); ++i) {
                    s += (i > 0 ? "," : "") + print(elems[i], false);
                }
                return s + "]";
            }
        }
        if (info.name == names::Nil) {
            return "[]";
        }
        if (info.name == names::Pair) {
            return "(" + print(n->succ(0), false) + "," + print(n->succ(1), false) + ")";
        }
        return application(info.name, n, as_arg);
    }

private:
    const Fingerprint& fp_;

    NodeRef resolve(NodeRef n) const {
        while (n->is_choice()) {
            auto side = fp_.lookup(n->choice_id());
            if (!side) {
                break;
            }
            n = n->succ(*side == Fingerprint::Side::Left ? 0 : 1);
        }
        return n;
    }

    std::string application(const std::string& name, NodeRef n, bool as_arg) {
        std::string head = is_operator_name(name) ? "(" + name + ")" : name;
        if (n->arity() == 0) {
            return head;
        }
        std::string s = head;
        for (std::size_t i = 0; i < n->arity(); ++i) {
            s += " " + print(n->succ(i), true);
        }
        return as_arg ? "(" + s + ")" : s;
    }
};

}  // namespace

std::string emit_value(NodeRef root, const Fingerprint& fp) {
    return ValuePrinter(fp).print(root, false);
}

}  // namespace fairscheme
