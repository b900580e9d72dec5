#include "fairscheme/cli.hpp"

#include "fairscheme/oracle.hpp"
#include "fairscheme/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

#ifndef FAIRSCHEME_DEFAULT_PRELUDE
#define FAIRSCHEME_DEFAULT_PRELUDE "prelude/prelude.mcy"
#endif

namespace fairscheme {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string prelude_text() {
    const char* env = std::getenv("MCY_PRELUDE");
    return read_file(env != nullptr && *env != '\0' ? env : FAIRSCHEME_DEFAULT_PRELUDE);
}

SurfaceProgram load_program(const std::string& source, bool no_prelude) {
    ParseOptions opts;
    if (!no_prelude) {
        opts.prelude = prelude_text();
    }
    return parse_program(source, opts);
}

namespace {

// Loads and compiles, reporting errors.  Empty on failure.
std::optional<IRProgram> compile_file(const std::string& file, bool no_prelude, std::ostream& err) {
    try {
        return compile_program(load_program(read_file(file), no_prelude));
    } catch (const CompileError& e) {
        err << file << ":" << e.what() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
    }
    return std::nullopt;
}

void print_stats(std::ostream& out, const RunStats& s) {
    out << "steps=" << s.steps << "\n"
        << "pulltabs=" << s.pulltabs << "\n"
        << "forks=" << s.forks << "\n"
        << "rotations=" << s.rotations << "\n"
        << "peak_queue=" << s.peak_queue << "\n"
        << "peak_live_nodes=" << s.peak_live_nodes << "\n"
        << "values=" << s.values << "\n"
        << "seconds=" << std::fixed << std::setprecision(6) << s.seconds << std::defaultfloat << "\n";
}

}  // namespace

int cmd_run(const RunCommand& cmd, std::ostream& out, std::ostream& err) {
    auto ir = compile_file(cmd.file, cmd.no_prelude, err);
    if (!ir) {
        return 1;
    }
    RunOptions opts;
    opts.max_values = cmd.max_values;
    opts.quantum = std::max<std::uint64_t>(cmd.quantum, 1);
    opts.max_total_steps = cmd.fuel;
    opts.trace = cmd.trace ? &out : nullptr;
    std::set<std::string> seen;
    RunResult r = run_program(*ir, opts, [&](const std::string& v) {
        if (cmd.dedup && !seen.insert(v).second) {
            return;
        }
        out << v << std::endl;
    });
    if (cmd.stats) {
        print_stats(out, r.stats);
    }
    if (r.status == RunStatus::OutOfFuel) {
        err << "stopped: " << run_status_name(r.status) << " after " << r.stats.steps << " steps\n";
        return 2;
    }
    return 0;
}

int cmd_compile(const CompileCommand& cmd, std::ostream& out, std::ostream& err) {
    auto ir = compile_file(cmd.file, cmd.no_prelude, err);
    if (!ir) {
        return 1;
    }
    if (cmd.dump_dtree) {
        out << dump_dtree(*ir, cmd.all);
    }
    if (cmd.dump_icurry) {
        out << dump_icurry(*ir, cmd.all);
    }
    return 0;
}

int cmd_oracle(const OracleCommand& cmd, std::ostream& out, std::ostream& err) {
    SurfaceProgram program;
    try {
        program = load_program(read_file(cmd.file), cmd.no_prelude);
    } catch (const CompileError& e) {
        err << cmd.file << ":" << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    OracleOptions opts;
    opts.fuel_per_run = cmd.fuel;
    try {
        for (const auto& v : enumerate(program, opts).values) {
            out << v << "\n";
        }
    } catch (const OracleError& e) {
        err << e.what() << "\n";
        return 2;
    }
    return 0;
}

std::vector<std::int64_t> parse_sizes(const std::string& text) {
    std::vector<std::int64_t> out;
    auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            std::int64_t lo = std::stoll(text.substr(0, dots));
            std::int64_t hi = std::stoll(text.substr(dots + 2));
            for (std::int64_t n = lo; n <= hi; ++n) {
                out.push_back(n);
            }
        } else {
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                out.push_back(std::stoll(item));
            }
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("bad size list '" + text + "'");
    }
    if (out.empty()) {
        throw std::invalid_argument("empty size list '" + text + "'");
    }
    return out;
}

std::optional<std::string> sizes_header(const std::string& source) {
    static const std::regex header(R"(^--\s*sizes:\s*([-0-9.,\s]+?)\s*$)");
    std::istringstream in(source);
    std::string line;
    while (std::getline(in, line)) {
        std::smatch m;
        if (std::regex_match(line, m, header)) {
            std::string s = m[1];
            s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
            return s;
        }
    }
    return std::nullopt;
}

ExpFit fit_exponential(const std::vector<double>& xs, const std::vector<double>& ys) {
    ExpFit fit;
    const std::size_t n = std::min(xs.size(), ys.size());
    if (n < 2) {
        return fit;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        ly[i] = std::log(ys[i]);
        sx += xs[i];
        sy += ly[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ly[i];
    }
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    if (denom == 0) {
        return fit;
    }
    fit.b = (dn * sxy - sx * sy) / denom;
    const double ln_a = (sy - fit.b * sx) / dn;
    fit.a = std::exp(ln_a);
    const double mean = sy / dn;
    double ss_tot = 0, ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = ln_a + fit.b * xs[i];
        ss_res += (ly[i] - pred) * (ly[i] - pred);
        ss_tot += (ly[i] - mean) * (ly[i] - mean);
    }
    fit.r2 = ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

int cmd_bench(const BenchCommand& cmd, std::ostream& out, std::ostream& err) {
    std::vector<fs::path> files;
    for (const auto& input : cmd.inputs) {
        fs::path p(input);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p)) {
                if (e.is_regular_file() && e.path().extension() == ".mcy") {
                    found.push_back(e.path());
                }
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(p);
        }
    }
    if (files.empty()) {
        err << "error: no benchmark programs given\n";
        return 1;
    }
    std::string prelude;
    try {
        prelude = prelude_text();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    out << "program,size,run,seconds,steps,values\n";
    for (const auto& file : files) {
        const std::string name = file.stem().string();
        std::string source;
        std::vector<std::int64_t> sizes;
        try {
            source = read_file(file.string());
            auto header = sizes_header(source);
            sizes = parse_sizes(!cmd.sizes.empty() ? cmd.sizes : header.value_or("1"));
        } catch (const std::exception& e) {
            err << "error: " << file.string() << ": " << e.what() << "\n";
            return 1;
        }
        std::vector<double> fit_x, fit_steps, fit_seconds;
        for (std::int64_t size : sizes) {
            std::optional<IRProgram> ir;
            try {
                ParseOptions po;
                po.prelude = prelude;
                ir = compile_program(parse_program(source + "\nbenchSize = " +
                                                       (size < 0 ? "(" + std::to_string(size) + ")" : std::to_string(size)) +
                                                       "\n",
                                                   po));
            } catch (const CompileError& e) {
                err << file.string() << ":" << e.what() << "\n";
                return 1;
            }
            double total_seconds = 0;
            std::uint64_t steps = 0;
            bool timed_out = false;
            for (std::uint64_t rep = 1; rep <= cmd.repetitions; ++rep) {
                RunOptions opts;
                opts.quantum = cmd.quantum;
                opts.deadline = std::chrono::steady_clock::now() +
                                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                    std::chrono::duration<double>(cmd.timeout_seconds));
                RunResult r = run_program(*ir, opts);
                out << name << "," << size << "," << rep << ",";
                if (r.status == RunStatus::Timeout) {
                    out << "timeout";
                    timed_out = true;
                } else {
                    out << std::fixed << std::setprecision(6) << r.stats.seconds << std::defaultfloat;
                    total_seconds += r.stats.seconds;
                }
                out << "," << r.stats.steps << "," << r.stats.values << std::endl;
                steps = r.stats.steps;
            }
            if (!timed_out && steps > 0) {
                fit_x.push_back(static_cast<double>(size));
                fit_steps.push_back(static_cast<double>(steps));
                fit_seconds.push_back(std::max(total_seconds / static_cast<double>(cmd.repetitions), 1e-9));
            }
        }
        if (fit_x.size() >= 3) {
            ExpFit fs_steps = fit_exponential(fit_x, fit_steps);
            ExpFit fs_secs = fit_exponential(fit_x, fit_seconds);
            err << "fit " << name << " steps: " << fs_steps.a << " * exp(" << fs_steps.b << " * n), r2=" << fs_steps.r2
                << "\n";
            err << "fit " << name << " seconds: " << fs_secs.a << " * exp(" << fs_secs.b << " * n), r2=" << fs_secs.r2
                << "\n";
        }
    }
    return 0;
}

}  // namespace fairscheme
