#include "fairscheme/cli.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace fairscheme;

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;

    TempDir() {
        path = fs::temp_directory_path() / ("fairscheme-cli-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    std::string write(const std::string& name, const std::string& text) const {
        const fs::path p = path / name;
        std::ofstream(p) << text;
        return p.string();
    }
};

struct Output {
    int code = 0;
    std::string out;
    std::string err;
};

template <typename Cmd, typename Fn>
Output invoke(Fn fn, const Cmd& cmd) {
    std::ostringstream out, err;
    Output o;
    o.code = fn(cmd, out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

Output run(const std::string& file, std::uint64_t max_values = 0, std::uint64_t quantum = 500) {
    RunCommand cmd;
    cmd.file = file;
    cmd.max_values = max_values;
    cmd.quantum = quantum;
    return invoke(cmd_run, cmd);
}

// Runs the mcy binary through the shell; returns its exit status.
int shell(const std::string& args, const std::string& out_file) {
    const int status = std::system((std::string(MCY_BINARY) + " " + args + " > " + out_file + " 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("run prints values and exits 0") {
    TempDir dir;
    Output o = run(dir.write("zip.mcy", "main = zip [1,2] [3,4,5]\n"));
    CHECK(o.code == 0);
    CHECK(o.out == "[(1,3),(2,4)]\n");
    CHECK(o.err.empty());
}

TEST_CASE("run -n 1 on the loop program") {
    TempDir dir;
    const std::string f = dir.write("loop.mcy", "loop = loop\nmain = loop ? (1 ? loop)\n");
    for (std::uint64_t q : {1, 10, 500}) {
        Output o = run(f, 1, q);
        CHECK(o.code == 0);
        CHECK(o.out == "1\n");
    }
}

TEST_CASE("compile errors exit 1 with a position") {
    TempDir dir;
    const std::string f = dir.write("bad.mcy", "main = (1 +\n");
    Output o = run(f);
    CHECK(o.code == 1);
    CHECK(o.out.empty());
    CHECK(o.err.rfind(f + ":2:1: ", 0) == 0);
    Output missing = run((dir.path / "nope.mcy").string());
    CHECK(missing.code == 1);
    CHECK(missing.err.find("cannot read") != std::string::npos);
}

TEST_CASE("the fuel limit exits 2") {
    TempDir dir;
    RunCommand cmd;
    cmd.file = dir.write("loop.mcy", "loop = loop\nmain = loop ? 1\n");
    cmd.fuel = 5000;
    Output o = invoke(cmd_run, cmd);
    CHECK(o.code == 2);
    CHECK(o.out == "1\n");
    CHECK(o.err.find("incomplete(fuel)") != std::string::npos);
}

TEST_CASE("failure alone is not an error") {
    TempDir dir;
    Output a = run(dir.write("h.mcy", "main = head []\n"));
    CHECK(a.code == 0);
    CHECK(a.out.empty());
    Output b = run(dir.write("hh.mcy", "main = head (head [])\n"));
    CHECK(b.code == 0);
    CHECK(b.out.empty());
}

TEST_CASE("stats and dedup") {
    TempDir dir;
    RunCommand cmd;
    cmd.file = dir.write("x.mcy", "main = xor x x where x = True ? False\n");
    cmd.stats = true;
    cmd.dedup = true;
    Output o = invoke(cmd_run, cmd);
    CHECK(o.code == 0);
    std::istringstream lines(o.out);
    std::vector<std::string> keys;
    std::string line;
    while (std::getline(lines, line)) {
        keys.push_back(line.substr(0, line.find('=')));
    }
    CHECK(keys == std::vector<std::string>{"False", "steps", "pulltabs", "forks", "rotations", "peak_queue",
                                           "peak_live_nodes", "values", "seconds"});
    // Counters describe the search; dedup only filters printing.
    CHECK(o.out.find("values=2\n") != std::string::npos);
}

TEST_CASE("trace output") {
    TempDir dir;
    RunCommand cmd;
    cmd.file = dir.write("c.mcy", "main = 1 ? 2\n");
    cmd.trace = true;
    Output o = invoke(cmd_run, cmd);
    CHECK(o.out ==
          "STEP 1: rewrite at #1 (main)\n"
          "  #1:?(#2,#3)[cid=0]\n"
          "FORK cid=0 at #1\n"
          "VALUE 1\n"
          "1\n"
          "VALUE 2\n"
          "2\n");
}

TEST_CASE("compile dumps list tags") {
    TempDir dir;
    CompileCommand cmd;
    cmd.file = dir.write("l.mcy", "main = [1]\n");
    cmd.dump_icurry = true;
    Output o = invoke(cmd_compile, cmd);
    CHECK(o.code == 0);
    CHECK(o.out.find("reserved tags: function=0 choice=1 failure=2\n") != std::string::npos);
    CHECK(o.out.find("  Nil arity=0 tag=3 kind=constructor type=List index=0\n") != std::string::npos);
    CHECK(o.out.find("  Cons arity=2 tag=4 kind=constructor type=List index=1\n") != std::string::npos);
    cmd.dump_icurry = false;
    cmd.dump_dtree = true;
    CHECK(invoke(cmd_compile, cmd).out == "function main/0\n  leaf [1]\n");
    cmd.file = dir.write("p.mcy", "data B = T | F\npor T _ = T\npor _ T = T\nmain = por T F\n");
    Output bad = invoke(cmd_compile, cmd);
    CHECK(bad.code == 1);
    CHECK(bad.err.find("inductively sequential") != std::string::npos);
}

TEST_CASE("oracle prints the sorted multiset") {
    TempDir dir;
    OracleCommand cmd;
    cmd.file = dir.write("c.mcy", "main = 2 ? 1 ? 2\n");
    Output o = invoke(cmd_oracle, cmd);
    CHECK(o.code == 0);
    CHECK(o.out == "1\n2\n2\n");
    cmd.file = dir.write("loop.mcy", "loop = loop\nmain = loop\n");
    cmd.fuel = 1000;
    Output l = invoke(cmd_oracle, cmd);
    CHECK(l.code == 2);
    CHECK(l.err.find("fuel") != std::string::npos);
}

TEST_CASE("size lists") {
    CHECK(parse_sizes("4..7") == std::vector<std::int64_t>{4, 5, 6, 7});
    CHECK(parse_sizes("1000,2000") == std::vector<std::int64_t>{1000, 2000});
    CHECK(parse_sizes("3") == std::vector<std::int64_t>{3});
    CHECK_THROWS_AS(parse_sizes("x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_sizes("5..4"), std::invalid_argument);
    CHECK(sizes_header("-- a benchmark\n-- sizes: 4..9\nmain = 1\n") == std::optional<std::string>("4..9"));
    CHECK(sizes_header("-- sizes: 1, 2, 3\n") == std::optional<std::string>("1,2,3"));
    CHECK_FALSE(sizes_header("main = 1\n"));
}

TEST_CASE("exponential fit") {
    std::vector<double> xs, ys;
    for (int n = 1; n <= 6; ++n) {
        xs.push_back(n);
        ys.push_back(3.0 * std::exp(0.5 * n));
    }
    ExpFit f = fit_exponential(xs, ys);
    CHECK(f.a == doctest::Approx(3.0));
    CHECK(f.b == doctest::Approx(0.5));
    CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("bench CSV") {
    TempDir dir;
    dir.write("Count.mcy", "-- sizes: 2..4\nmain = length (perm (upTo benchSize))\n");
    BenchCommand cmd;
    cmd.inputs = {dir.path.string()};
    cmd.repetitions = 2;
    Output o = invoke(cmd_bench, cmd);
    CHECK(o.code == 0);
    std::istringstream lines(o.out);
    std::string line;
    std::vector<std::string> rows;
    while (std::getline(lines, line)) {
        rows.push_back(line);
    }
    REQUIRE(rows.size() == 7);
    CHECK(rows[0] == "program,size,run,seconds,steps,values");
    CHECK(rows[1].rfind("Count,2,1,", 0) == 0);
    CHECK(rows[2].rfind("Count,2,2,", 0) == 0);
    CHECK(rows[6].rfind("Count,4,2,", 0) == 0);
    // Step counts are deterministic and grow with size; 2!, 3!, 4! values.
    auto field = [](const std::string& row, int k) {
        std::istringstream ss(row);
        std::string f;
        for (int i = 0; i <= k; ++i) {
            std::getline(ss, f, ',');
        }
        return f;
    };
    CHECK(field(rows[1], 4) == field(rows[2], 4));
    CHECK(std::stoll(field(rows[3], 4)) > std::stoll(field(rows[1], 4)));
    CHECK(field(rows[1], 5) == "2");
    CHECK(field(rows[5], 5) == "24");
    CHECK(o.err.find("fit Count steps:") != std::string::npos);
}

TEST_CASE("bench records timeouts") {
    TempDir dir;
    BenchCommand cmd;
    cmd.inputs = {dir.write("Loop.mcy", "loop = loop\nmain = loop\n")};
    cmd.sizes = "1";
    cmd.timeout_seconds = 0.05;
    Output o = invoke(cmd_bench, cmd);
    CHECK(o.code == 0);
    CHECK(o.out.find("Loop,1,1,timeout,") != std::string::npos);
}

TEST_CASE("MCY_PRELUDE replaces the prelude") {
    TempDir dir;
    const std::string prelude = dir.write("p.mcy", "answer = 42\n");
    const std::string f = dir.write("a.mcy", "main = answer\n");
    ::setenv("MCY_PRELUDE", prelude.c_str(), 1);
    Output o = run(f);
    ::unsetenv("MCY_PRELUDE");
    CHECK(o.out == "42\n");
    CHECK(run(f).code == 1);
}

TEST_CASE("the mcy executable") {
    TempDir dir;
    const std::string out = (dir.path / "out.txt").string();
    const std::string loop = dir.write("loop.mcy", "loop = loop\nmain = loop ? (1 ? loop)\n");
    CHECK(shell("run " + loop + " -n 1 -q 1", out) == 0);
    CHECK(read_file(out) == "1\n");
    CHECK(shell("run " + dir.write("bad.mcy", "main = )\n"), out) == 1);
    CHECK(shell("run " + loop + " --fuel 1000", out) == 2);
    CHECK(shell("compile --dump-icurry " + loop, out) == 0);
    CHECK(read_file(out).find("Cons arity=2 tag=4") != std::string::npos);
    CHECK(shell("oracle " + dir.write("c.mcy", "main = 1 ? 0\n"), out) == 0);
    CHECK(read_file(out) == "0\n1\n");
    CHECK(shell("frobnicate", out) != 0);
}
