#ifndef FAIRSCHEME_TESTS_SUPPORT_HPP
#define FAIRSCHEME_TESTS_SUPPORT_HPP

#include "fairscheme/cli.hpp"
#include "fairscheme/oracle.hpp"
#include "fairscheme/scheduler.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fairscheme::test {

inline IRProgram compile_source(const std::string& source, bool no_prelude = false) {
    return compile_program(load_program(source, no_prelude));
}

inline RunResult run_source(const std::string& source, RunOptions opts = {}, bool no_prelude = false) {
    IRProgram ir = compile_source(source, no_prelude);
    return run_program(ir, opts);
}

inline std::vector<std::string> sorted(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
}

inline std::vector<std::string> engine_values(const std::string& source, std::uint64_t quantum = 500,
                                              bool no_prelude = false) {
    RunOptions opts;
    opts.quantum = quantum;
    return sorted(run_source(source, opts, no_prelude).values);
}

inline std::vector<std::string> oracle_values(const std::string& source, bool no_prelude = false) {
    return enumerate(load_program(source, no_prelude)).values;
}

// Random programs built around where-bound choices that are used more than
// once, plus overlapping rules, partial functions and failures.  Most
// expressions are well typed so that most programs have values.  All
// terminate.
class ProgramGenerator {
public:
    explicit ProgramGenerator(std::uint64_t seed) : rng_(seed) {}

    std::string next() {
        std::string src =
            "data TF = T | F\n"
            "neg T = F\n"
            "neg F = T\n"
            "same T T = T\n"
            "same T F = F\n"
            "same F T = F\n"
            "same F F = T\n"
            "pick x _ = x\n"
            "pick _ y = y\n"
            "sel T x _ = x\n"
            "sel F _ y = y\n"
            "firstOf (x:_) = x\n"
            "small 0 = T\n"
            "small 1 = T\n";
        const int bindings = uniform(1, 3);
        types_.clear();
        std::string where;
        for (int i = 0; i < bindings; ++i) {
            const Type t = uniform(0, 2) == 0 ? Type::Int : Type::Bool;
            where += std::string(i == 0 ? " where " : "; ") + "x" + std::to_string(i) + " = " + expr(2, t);
            types_.push_back(t);
        }
        std::string body = "(" + expr(3, Type::Bool) + ", " + expr(1, Type::Int) + ")";
        return src + "main = " + body + where + "\n";
    }

private:
    enum class Type { Bool, Int };

    std::mt19937_64 rng_;
    std::vector<Type> types_;

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    std::string var(Type t) {
        std::vector<int> fit;
        for (std::size_t i = 0; i < types_.size(); ++i) {
            if (types_[i] == t) {
                fit.push_back(static_cast<int>(i));
            }
        }
        if (fit.empty()) {
            return "";
        }
        return "x" + std::to_string(fit[static_cast<std::size_t>(uniform(0, static_cast<int>(fit.size()) - 1))]);
    }

    std::string leaf(Type t) {
        const int k = uniform(0, 9);
        if (k < 4) {
            std::string v = var(t);
            if (!v.empty()) {
                return v;
            }
        }
        if (k == 9) {
            return uniform(0, 2) == 0 ? "failed" : (t == Type::Int ? "(0 ? 1)" : "(T ? F)");
        }
        if (t == Type::Int) {
            return std::to_string(uniform(0, 2));
        }
        return uniform(0, 1) == 0 ? "T" : "F";
    }

    std::string expr(int depth, Type t) {
        if (depth == 0) {
            return leaf(t);
        }
        auto sub = [&](Type u) { return expr(depth - 1, u); };
        const Type b = Type::Bool;
        const Type i = Type::Int;
        switch (uniform(0, 12)) {
            case 0:
            case 1:
                return "(" + sub(t) + " ? " + sub(t) + ")";
            case 2:
                return t == i ? "(" + sub(i) + " + " + sub(i) + ")" : "(" + sub(i) + " <= " + sub(i) + ")";
            case 3:
                return t == i ? "(" + sub(i) + " * " + sub(i) + ")" : "(neg " + sub(b) + ")";
            case 4:
                return t == i ? "(length [" + sub(b) + ", " + sub(i) + "])" : "(same " + sub(b) + " " + sub(b) + ")";
            case 5:
                return "(pick " + sub(t) + " " + sub(t) + ")";
            case 6:
                return "(sel " + sub(b) + " " + sub(t) + " " + sub(t) + ")";
            case 7:
                return "(fst (" + sub(t) + ", " + sub(uniform(0, 1) == 0 ? b : i) + "))";
            case 8:
                return "(firstOf [" + sub(t) + ", " + sub(t) + "])";
            case 9:
                return t == b ? "(small " + sub(i) + ")" : "(snd (" + sub(b) + ", " + sub(i) + "))";
            case 10:
                return "(head (tail [" + sub(t) + ", " + sub(t) + "]))";
            case 11:
                // Occasionally ill typed: fails at run time.
                return uniform(0, 3) == 0 ? "(neg " + sub(i) + ")" : leaf(t);
            default:
                return leaf(t);
        }
    }
};

}  // namespace fairscheme::test

namespace doctest {

template <>
struct StringMaker<std::vector<std::string>> {
    static String convert(const std::vector<std::string>& v) {
        std::string s = "{";
        for (std::size_t i = 0; i < v.size(); ++i) {
            s += (i == 0 ? "" : ", ") + v[i];
        }
        return (s + "}").c_str();
    }
};

}  // namespace doctest

#endif  // FAIRSCHEME_TESTS_SUPPORT_HPP
