// Acceptance checks: one PASS/FAIL line per criterion.  Exits non-zero when
// any criterion fails.

#include "fairscheme/cli.hpp"
#include "fairscheme/graph.hpp"
#include "fairscheme/oracle.hpp"
#include "fairscheme/scheduler.hpp"

#define DOCTEST_CONFIG_DISABLE
#include "support.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

using namespace fairscheme;

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Process {
    int code = -1;
    std::string out;
};

// Runs a shell command, capturing stdout; stderr is discarded.
Process shell(const std::string& command) {
    Process p;
    FILE* pipe = ::popen((command + " 2>/dev/null").c_str(), "r");
    if (pipe == nullptr) {
        return p;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
        p.out.append(buf.data(), n);
    }
    const int status = ::pclose(pipe);
    p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return p;
}

std::string mcy(const std::string& args) {
    return std::string(MCY_BINARY) + " " + args;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        out.push_back(line);
    }
    return out;
}

struct Scratch {
    fs::path dir = fs::temp_directory_path() / ("fairscheme-acceptance-" + std::to_string(::getpid()));
    Scratch() { fs::create_directories(dir); }
    ~Scratch() { fs::remove_all(dir); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name) << text;
        return (dir / name).string();
    }
};

std::vector<fs::path> corpus_files() {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(FAIRSCHEME_SOURCE_DIR "/corpus")) {
        if (e.is_regular_file() && e.path().extension() == ".mcy") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

Verdict completeness(const Scratch& s) {
    const std::string f = s.write("loop.mcy", "loop = loop\nmain = loop ? (1 ? loop)\n");
    std::ostringstream detail;
    bool ok = true;
    for (int q : {1, 10, 500}) {
        const auto start = Clock::now();
        Process p = shell(mcy("run -n 1 -q " + std::to_string(q) + " " + f));
        const double t = since(start);
        const bool good = p.code == 0 && p.out == "1\n" && t < 1.0;
        ok = ok && good;
        detail << "q=" << q << (good ? " ok " : " bad ") << "(" << t << " s) ";
    }
    return {ok, detail.str()};
}

Verdict consistency() {
    const std::string file = FAIRSCHEME_SOURCE_DIR "/corpus/xor_shared.mcy";
    bool ok = true;
    std::ostringstream detail;
    for (int q : {1, 500}) {
        Process p = shell(mcy("run -q " + std::to_string(q) + " " + file));
        const bool good = p.code == 0 && p.out == "F\nF\n";
        ok = ok && good;
        detail << "xor q=" << q << (good ? " {F,F}; " : " wrong; ");
    }
    test::ProgramGenerator gen(20261015);
    int agree = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::string src = gen.next();
        const auto expected = test::oracle_values(src);
        if (test::engine_values(src, 1) == expected && test::engine_values(src, 500) == expected) {
            ++agree;
        }
    }
    ok = ok && agree == 1000;
    detail << "random programs agreeing with the oracle: " << agree << "/1000";
    return {ok, detail.str()};
}

Verdict pull_tab_shape() {
    IRProgram ir = test::compile_source("data AB = A | B\nmain = zip (a ? b) c where a = [A]; b = [B]; c = [A, B]\n");
    Graph g;
    Engine engine(ir, g);
    NodeRef root = engine.make_goal();
    engine.apply_action(engine.find_action(root, {}), root);
    if (root->info().name != "zip" || !root->succ(0)->is_choice()) {
        return {false, "goal did not reduce to zip (a ? b) c"};
    }
    NodeRef choice = root->succ(0);
    NodeRef c = root->succ(1);
    Action a = engine.find_action(root, {});
    if (a.kind != Action::Kind::PullTab) {
        return {false, std::string("expected a pull-tab, got ") + action_name(a.kind)};
    }
    engine.apply_action(a, root);
    const bool ok = root->is_choice() && root->choice_id() == choice->choice_id() &&
                    root->succ(0)->info().name == "zip" && root->succ(1)->info().name == "zip" &&
                    root->succ(0)->succ(0) == choice->succ(0) && root->succ(1)->succ(0) == choice->succ(1) &&
                    root->succ(0)->succ(1) == c && root->succ(1)->succ(1) == c;
    return {ok, "root " + dump_node(*root) + ", alternatives " + dump_node(*root->succ(0)) + " " +
                    dump_node(*root->succ(1)) + ", shared argument " + dump_node(*c)};
}

Verdict tags(const Scratch& s) {
    Process p = shell(mcy("compile --dump-icurry " + s.write("list.mcy", "main = [1, 2]\n")));
    const auto ls = lines(p.out);
    auto has = [&](const std::string& l) { return std::find(ls.begin(), ls.end(), l) != ls.end(); };
    const bool ok = p.code == 0 && has("reserved tags: function=0 choice=1 failure=2") &&
                    has("  Nil arity=0 tag=3 kind=constructor type=List index=0") &&
                    has("  Cons arity=2 tag=4 kind=constructor type=List index=1");
    return {ok, "function=0 choice=1 failure=2 Nil=3 Cons=4 " + std::string(ok ? "found" : "missing")};
}

Verdict failure_semantics(const Scratch& s) {
    Process a = shell(mcy("run " + s.write("h1.mcy", "main = head []\n")));
    Process b = shell(mcy("run " + s.write("h2.mcy", "main = head (head [])\n")));
    const bool ok = a.code == 0 && a.out.empty() && b.code == 0 && b.out.empty();
    return {ok, "head []: exit " + std::to_string(a.code) + ", " + std::to_string(lines(a.out).size()) +
                    " values; head (head []): exit " + std::to_string(b.code) + ", " +
                    std::to_string(lines(b.out).size()) + " values"};
}

Verdict oracle_equivalence() {
    const auto start = Clock::now();
    const auto files = corpus_files();
    int agree = 0;
    std::string mismatches;
    for (const auto& f : files) {
        const std::string src = read_file(f.string());
        const auto expected = test::oracle_values(src);
        if (test::engine_values(src) == expected) {
            ++agree;
        } else {
            mismatches += " " + f.filename().string();
        }
    }
    const double t = since(start);
    const bool ok = files.size() >= 12 && agree == static_cast<int>(files.size()) && t < 60;
    std::ostringstream d;
    d << agree << "/" << files.size() << " corpus programs agree in " << t << " s" << mismatches;
    return {ok, d.str()};
}

Verdict permsort() {
    const std::string src = read_file(FAIRSCHEME_SOURCE_DIR "/corpus/bench/PermSort.mcy");
    std::vector<double> ns, steps;
    bool ok = true;
    double last_seconds = 0;
    std::ostringstream d;
    for (int n = 4; n <= 9; ++n) {
        RunResult r = test::run_source(src + "\nbenchSize = " + std::to_string(n) + "\n");
        std::string sorted = "[";
        for (int k = 1; k <= n; ++k) {
            sorted += (k > 1 ? "," : "") + std::to_string(k);
        }
        sorted += "]";
        ok = ok && r.values == std::vector<std::string>{sorted};
        ns.push_back(n);
        steps.push_back(static_cast<double>(r.stats.steps));
        last_seconds = r.stats.seconds;
        d << "n=" << n << ":" << r.stats.steps << " ";
    }
    bool superlinear = true;
    for (std::size_t i = 1; i < steps.size(); ++i) {
        superlinear = superlinear && steps[i] / ns[i] > steps[i - 1] / ns[i - 1];
    }
    ExpFit fit = fit_exponential(ns, steps);
    ok = ok && superlinear && fit.r2 >= 0.99 && last_seconds < 10;
    d << "steps; r2=" << fit.r2 << "; n=9 in " << last_seconds << " s";
    return {ok, d.str()};
}

Verdict determinism() {
    int same = 0;
    const auto files = corpus_files();
    std::string differing;
    auto strip = [](const std::string& out) {
        std::string kept;
        for (const auto& l : lines(out)) {
            if (l.rfind("seconds=", 0) != 0) {
                kept += l + "\n";
            }
        }
        return kept;
    };
    for (const auto& f : files) {
        const std::string cmd = mcy("run --stats " + f.string());
        Process a = shell(cmd);
        Process b = shell(cmd);
        if (a.code == b.code && strip(a.out) == strip(b.out) && a.out.find("steps=") != std::string::npos) {
            ++same;
        } else {
            differing += " " + f.filename().string();
        }
    }
    return {same == static_cast<int>(files.size()),
            std::to_string(same) + "/" + std::to_string(files.size()) + " corpus programs byte-identical with --stats" +
                differing};
}

Verdict memory() {
    bool layout = sizeof(Node) == kNodeRecordSize && kNodeRecordSize == 48;
    check_node_layout();
    const std::string valgrind = VALGRIND_EXECUTABLE;
    if (valgrind.empty() || valgrind.find("NOTFOUND") != std::string::npos) {
        return {false, "valgrind not found"};
    }
    Process p = shell(valgrind + " --error-exitcode=99 --leak-check=full --errors-for-leak-kinds=definite " +
                      STRESS_BINARY);
    const bool ok = layout && p.code == 0 && p.out.find("graph stress: ok") != std::string::npos;
    std::string summary = lines(p.out).empty() ? "" : lines(p.out).front();
    return {ok, "node record " + std::to_string(sizeof(Node)) + " bytes; stress under valgrind exit " +
                    std::to_string(p.code) + " (" + summary + ")"};
}

}  // namespace

int main() {
    Scratch scratch;
    const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
        {1, [&] { return completeness(scratch); }},
        {2, consistency},
        {3, pull_tab_shape},
        {4, [&] { return tags(scratch); }},
        {5, [&] { return failure_semantics(scratch); }},
        {6, oracle_equivalence},
        {7, permsort},
        {8, determinism},
        {9, memory},
    };
    int failed = 0;
    for (const auto& [n, check] : criteria) {
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
