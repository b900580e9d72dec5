// mcy: run, compile, check and benchmark MiniCurry programs.

#include "fairscheme/cli.hpp"
#include "fairscheme/graph.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    fairscheme::check_node_layout();

    CLI::App app{"mcy - fair functional-logic evaluation of MiniCurry programs"};
    app.require_subcommand(1);

    fairscheme::RunCommand run;
    auto* run_cmd = app.add_subcommand("run", "evaluate main and print its values as they are found");
    run_cmd->add_option("file", run.file, "program file")->required();
    run_cmd->add_option("-n,--max-values", run.max_values, "stop after this many values (0: all)");
    run_cmd->add_option("-q,--quantum", run.quantum, "steps before a computation is rotated")
        ->check(CLI::PositiveNumber);
    run_cmd->add_option("--fuel", run.fuel, "stop after this many steps (0: unlimited)");
    run_cmd->add_flag("--trace", run.trace, "print every step");
    run_cmd->add_flag("--stats", run.stats, "print counters when done");
    run_cmd->add_flag("--dedup", run.dedup, "print each distinct value once");
    run_cmd->add_flag("--no-prelude", run.no_prelude, "do not load the prelude");

    fairscheme::CompileCommand compile;
    auto* compile_cmd = app.add_subcommand("compile", "check a program and dump its compiled form");
    compile_cmd->add_option("file", compile.file, "program file")->required();
    compile_cmd->add_flag("--dump-dtree", compile.dump_dtree, "print definitional trees");
    compile_cmd->add_flag("--dump-icurry", compile.dump_icurry, "print the symbol table and case tables");
    compile_cmd->add_flag("--all", compile.all, "include prelude functions in dumps");
    compile_cmd->add_flag("--no-prelude", compile.no_prelude, "do not load the prelude");

    fairscheme::OracleCommand oracle;
    auto* oracle_cmd = app.add_subcommand("oracle", "print the sorted values found by the reference interpreter");
    oracle_cmd->add_option("file", oracle.file, "program file")->required();
    oracle_cmd->add_option("--fuel", oracle.fuel, "evaluation steps allowed per decision path");
    oracle_cmd->add_flag("--no-prelude", oracle.no_prelude, "do not load the prelude");

    fairscheme::BenchCommand bench;
    auto* bench_cmd = app.add_subcommand("bench", "time programs over a range of sizes, CSV on stdout");
    bench_cmd->add_option("inputs", bench.inputs, "program files or directories")->required();
    bench_cmd->add_option("--sizes", bench.sizes, "sizes, e.g. 4..9 or 4,6,8 (default: file header)");
    bench_cmd->add_option("-r,--repetitions", bench.repetitions, "runs per size")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--timeout", bench.timeout_seconds, "seconds allowed per run");
    bench_cmd->add_option("-q,--quantum", bench.quantum, "steps before a computation is rotated")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (*run_cmd) {
        return fairscheme::cmd_run(run, std::cout, std::cerr);
    }
    if (*compile_cmd) {
        return fairscheme::cmd_compile(compile, std::cout, std::cerr);
    }
    if (*oracle_cmd) {
        return fairscheme::cmd_oracle(oracle, std::cout, std::cerr);
    }
    return fairscheme::cmd_bench(bench, std::cout, std::cerr);
}
