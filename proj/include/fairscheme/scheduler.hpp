#ifndef FAIRSCHEME_SCHEDULER_HPP
#define FAIRSCHEME_SCHEDULER_HPP

// The fair work queue.  Each computation is a root plus its decisions.
// The head computation runs for at most one quantum of engine actions and
// is then rotated to the back, so a divergent alternative cannot starve
// the others.  A root choice forks the computation into its two
// alternatives, left first; a root choice whose id is already decided is
// replaced by the decided alternative.

#include "fairscheme/engine.hpp"

#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fairscheme {

struct Computation {
    NodeRef root = nullptr;
    Fingerprint fp;
    std::uint64_t budget = 0;
};

struct RunOptions {
    std::uint64_t max_values = 0;       // 0: all values
    std::uint64_t quantum = 500;        // at least 1
    std::uint64_t max_total_steps = 0;  // 0: unlimited
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::ostream* trace = nullptr;
};

enum class RunStatus { Exhausted, MaxValues, OutOfFuel, Timeout };

const char* run_status_name(RunStatus s);

struct RunStats {
    std::uint64_t steps = 0;
    std::uint64_t pulltabs = 0;
    std::uint64_t forks = 0;
    std::uint64_t rotations = 0;
    std::uint64_t peak_queue = 0;
    std::uint64_t peak_live_nodes = 0;
    std::uint64_t values = 0;
    std::uint64_t enqueued = 0;
    std::uint64_t dropped = 0;
    double seconds = 0;
};

struct RunResult {
    RunStatus status = RunStatus::Exhausted;
    std::vector<std::string> values;
    RunStats stats;
};

// Each emitted value is passed to the sink as soon as it is found.
using ValueSink = std::function<void(const std::string&)>;

class WorkQueue {
public:
    WorkQueue(Engine& engine, RunOptions options);

    void push_goal(NodeRef goal);
    RunStatus run(const ValueSink& sink);

    const RunStats& stats() const { return stats_; }
    std::size_t size() const { return queue_.size(); }

    // Replaces the head computation, whose root is an undecided choice,
    // by its two alternatives at the back of the queue.
    void fork(Computation c);

private:
    Engine& engine_;
    RunOptions options_;
    std::deque<Computation> queue_;
    RunStats stats_;

    void enqueue(Computation c);
    void note_queue();
};

// Compiles nothing; runs an already compiled program from its goal.
RunResult run_program(const IRProgram& ir, const RunOptions& options, const ValueSink& sink = {});

// Canonical text of a normal form: lists as [a,b], pairs as (a,b),
// constructor arguments parenthesized only when needed.  Decided choices
// are read through using `fp`.
std::string emit_value(NodeRef root, const Fingerprint& fp = {});

}  // namespace fairscheme

#endif  // FAIRSCHEME_SCHEDULER_HPP
