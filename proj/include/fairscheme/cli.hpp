#ifndef FAIRSCHEME_CLI_HPP
#define FAIRSCHEME_CLI_HPP

// Subcommands of the `mcy` tool, callable without a process boundary.
// Each returns the process exit code: 0 success, 1 compile or input
// error, 2 evaluation stopped by the step limit.

#include "fairscheme/syntax.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fairscheme {

// Prelude source: the file named by MCY_PRELUDE if set, else the shipped one.
std::string prelude_text();
std::string read_file(const std::string& path);
SurfaceProgram load_program(const std::string& source, bool no_prelude);

struct RunCommand {
    std::string file;
    std::uint64_t max_values = 0;
    std::uint64_t quantum = 500;
    std::uint64_t fuel = 0;
    bool trace = false;
    bool stats = false;
    bool dedup = false;
    bool no_prelude = false;
};

struct CompileCommand {
    std::string file;
    bool dump_dtree = false;
    bool dump_icurry = false;
    bool all = false;  // include prelude functions
    bool no_prelude = false;
};

struct OracleCommand {
    std::string file;
    std::uint64_t fuel = 2'000'000;
    bool no_prelude = false;
};

struct BenchCommand {
    std::vector<std::string> inputs;  // .mcy files or directories of them
    std::string sizes;                // "4..9" or "4,6,8"; empty: each file's header
    std::uint64_t repetitions = 1;
    double timeout_seconds = 60;
    std::uint64_t quantum = 500;
};

int cmd_run(const RunCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_compile(const CompileCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_oracle(const OracleCommand& cmd, std::ostream& out, std::ostream& err);
// CSV rows on `out`; exponential fits on `err`.
int cmd_bench(const BenchCommand& cmd, std::ostream& out, std::ostream& err);

// "4..9" or "4,6,8".  Throws std::invalid_argument on bad input.
std::vector<std::int64_t> parse_sizes(const std::string& text);

// Sizes from a `-- sizes: ...` line in the program text, if any.
std::optional<std::string> sizes_header(const std::string& source);

// Least-squares fit of y = a * exp(b * x) on log y.
struct ExpFit {
    double a = 0;
    double b = 0;
    double r2 = 0;
};
ExpFit fit_exponential(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace fairscheme

#endif  // FAIRSCHEME_CLI_HPP
