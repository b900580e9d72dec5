#include "fairscheme/oracle.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <unordered_map>

namespace fairscheme {

namespace {

struct Value;
struct Env;

struct Thunk {
    const Expr* expr = nullptr;
    const Env* env = nullptr;
    Value* value = nullptr;
};

struct Value {
    enum class Kind { Con, Int, Partial };
    Kind kind = Kind::Int;
    std::string_view name;  // constructor, or the target of a partial
    std::int64_t number = 0;
    std::vector<Thunk*> args;
    std::size_t arity = 0;  // Partial: arity of the target
};

struct Env {
    std::unordered_map<std::string_view, Thunk*> vars;
};

// Abandons the current run: the path has no value.
struct PathFailed {};

struct OutOfFuel {};

struct Point {
    std::uint32_t chosen = 0;
    std::deque<std::uint32_t> rest;
    bool is_rule = false;
    bool revisited = false;  // an earlier candidate was already explored
};

enum class Callee { Constructor, Function, Primitive };

class Interpreter {
public:
    Interpreter(const SurfaceProgram& program, const OracleOptions& options) : program_(program), options_(options) {
        for (const auto& d : program.data_decls) {
            for (const auto& c : d.constructors) {
                constructors_[c.name] = c.arity;
            }
        }
        for (const auto& f : program.functions) {
            functions_[f.name] = &f;
        }
    }

    OracleResult run_all() {
        OracleResult result;
        const FunctionDef* goal = functions_.at(program_.goal);
        for (;;) {
            if (result.runs >= options_.max_runs) {
                throw OracleError("oracle: more than " + std::to_string(options_.max_runs) + " runs");
            }
            ++result.runs;
            reset_run();
            try {
                Value* v = call(*goal, {});
                normalize(v);
                result.values.push_back(show(v, false));
            } catch (const PathFailed&) {
            } catch (const OutOfFuel&) {
                throw OracleError("oracle: fuel exhausted after " + std::to_string(options_.fuel_per_run) +
                                  " steps on decision path " + describe_path());
            }
            if (!backtrack()) {
                break;
            }
        }
        std::sort(result.values.begin(), result.values.end());
        return result;
    }

private:
    const SurfaceProgram& program_;
    const OracleOptions& options_;
    std::unordered_map<std::string_view, std::size_t> constructors_;
    std::unordered_map<std::string_view, const FunctionDef*> functions_;

    std::vector<Point> trail_;
    std::size_t cursor_ = 0;
    // Points before the cursor whose decision is not forced by the path
    // before them, in trail order.  A point is forced only when its first
    // visit leaves a single candidate; once backtracked into, later points
    // were explored under its other candidates and it stays open.
    std::vector<std::size_t> open_;
    std::uint64_t fuel_ = 0;
    std::deque<Thunk> thunks_;
    std::deque<Value> values_;
    std::deque<Env> envs_;

    void reset_run() {
        cursor_ = 0;
        open_.clear();
        fuel_ = 0;
        thunks_.clear();
        values_.clear();
        envs_.clear();
    }

    bool backtrack() {
        trail_.resize(cursor_);
        while (!trail_.empty() && trail_.back().rest.empty()) {
            trail_.pop_back();
        }
        if (trail_.empty()) {
            return false;
        }
        Point& p = trail_.back();
        p.chosen = p.rest.front();
        p.rest.pop_front();
        p.revisited = true;
        return true;
    }

    std::string describe_path() const {
        std::string s = "[";
        for (std::size_t i = 0; i < cursor_ && i < trail_.size(); ++i) {
            if (i > 0) {
                s += ' ';
            }
            const Point& p = trail_[i];
            s += p.is_rule ? "rule" + std::to_string(p.chosen + 1) : (p.chosen == 0 ? "L" : "R");
        }
        return s + "]";
    }

    // Next decision: replayed from the trail, or a new point whose first
    // candidate is taken.
    std::uint32_t choose(std::uint32_t count, bool is_rule) {
        open_.push_back(cursor_);
        if (cursor_ < trail_.size()) {
            return trail_[cursor_++].chosen;
        }
        Point p;
        p.is_rule = is_rule;
        p.chosen = 0;
        for (std::uint32_t i = 1; i < count; ++i) {
            p.rest.push_back(i);
        }
        trail_.push_back(std::move(p));
        ++cursor_;
        return 0;
    }

    void tick() {
        if (++fuel_ > options_.fuel_per_run) {
            throw OutOfFuel{};
        }
    }

    Thunk* thunk(const Expr& e, const Env& env) {
        if (e.kind == Expr::Kind::Var) {
            return env.vars.at(e.name);
        }
        thunks_.push_back(Thunk{&e, &env, nullptr});
        return &thunks_.back();
    }

    Value* make(Value v) {
        values_.push_back(std::move(v));
        return &values_.back();
    }

    Value* integer(std::int64_t n) {
        Value v;
        v.kind = Value::Kind::Int;
        v.number = n;
        return make(std::move(v));
    }

    Value* constructor(std::string_view name, std::vector<Thunk*> args) {
        Value v;
        v.kind = Value::Kind::Con;
        v.name = name;
        v.args = std::move(args);
        return make(std::move(v));
    }

    Value* force(Thunk* t) {
        if (t->value == nullptr) {
            t->value = eval(*t->expr, *t->env);
        }
        return t->value;
    }

    Callee callee_kind(std::string_view name, std::size_t& arity) const {
        if (auto c = constructors_.find(name); c != constructors_.end()) {
            arity = c->second;
            return Callee::Constructor;
        }
        if (auto f = functions_.find(name); f != functions_.end()) {
            arity = f->second->arity();
            return Callee::Function;
        }
        arity = 2;
        return Callee::Primitive;
    }

    Value* eval(const Expr& e, const Env& env) {
        tick();
        switch (e.kind) {
            case Expr::Kind::Var:
                return force(env.vars.at(e.name));
            case Expr::Kind::Int:
                return integer(e.value);
            case Expr::Kind::Failed:
                throw PathFailed{};
            case Expr::Kind::Choice:
                return eval(e.args[choose(2, false)], env);
            case Expr::Kind::Apply:
                break;
        }
        std::vector<Thunk*> args;
        for (auto it = e.arg_begin(); it != e.args.end(); ++it) {
            args.push_back(thunk(*it, env));
        }
        if (!e.has_symbol_head()) {
            Value* f = eval(e.head_expr(), env);
            for (Thunk* a : args) {
                f = apply(f, a);
            }
            return f;
        }
        return saturate(e.name, std::move(args));
    }

    // Application of a named symbol to any number of arguments.
    Value* saturate(std::string_view name, std::vector<Thunk*> args) {
        std::size_t arity = 0;
        const Callee kind = callee_kind(name, arity);
        if (args.size() < arity) {
            Value v;
            v.kind = Value::Kind::Partial;
            v.name = name;
            v.arity = arity;
            v.args = std::move(args);
            return make(std::move(v));
        }
        std::vector<Thunk*> extra(args.begin() + static_cast<std::ptrdiff_t>(arity), args.end());
        args.resize(arity);
        Value* result = nullptr;
        switch (kind) {
            case Callee::Constructor:
                result = constructor(name, std::move(args));
                break;
            case Callee::Function:
                result = call(*functions_.at(name), args);
                break;
            case Callee::Primitive:
                result = primitive(name, args);
                break;
        }
        for (Thunk* a : extra) {
            result = apply(result, a);
        }
        return result;
    }

    Value* apply(Value* f, Thunk* x) {
        if (f->kind != Value::Kind::Partial) {
            throw PathFailed{};
        }
        std::vector<Thunk*> args = f->args;
        args.push_back(x);
        return saturate(f->name, std::move(args));
    }

    Value* primitive(std::string_view name, const std::vector<Thunk*>& args) {
        tick();
        if (name == names::Apply) {
            return apply(force(args[0]), args[1]);
        }
        Value* a = force(args[0]);
        Value* b = force(args[1]);
        if (a->kind != Value::Kind::Int || b->kind != Value::Kind::Int) {
            throw PathFailed{};
        }
        const auto x = static_cast<std::uint64_t>(a->number);
        const auto y = static_cast<std::uint64_t>(b->number);
        if (name == "+") {
            return integer(static_cast<std::int64_t>(x + y));
        }
        if (name == "-") {
            return integer(static_cast<std::int64_t>(x - y));
        }
        if (name == "*") {
            return integer(static_cast<std::int64_t>(x * y));
        }
        bool r = name == "==" ? a->number == b->number : a->number <= b->number;
        return constructor(r ? names::True : names::False, {});
    }

    bool match(const Pattern& p, Thunk* t, Env& env) {
        switch (p.kind) {
            case Pattern::Kind::Var:
                env.vars[p.name] = t;
                return true;
            case Pattern::Kind::Wildcard:
                return true;
            case Pattern::Kind::Int: {
                Value* v = force(t);
                return v->kind == Value::Kind::Int && v->number == p.value;
            }
            case Pattern::Kind::Cons: {
                Value* v = force(t);
                if (v->kind != Value::Kind::Con || v->name != p.name) {
                    return false;
                }
                for (std::size_t i = 0; i < p.args.size(); ++i) {
                    if (!match(p.args[i], v->args[i], env)) {
                        return false;
                    }
                }
                return true;
            }
        }
        return false;
    }

    // False only when `p` certainly fails against `t` as already evaluated.
    static bool may_match(const Pattern& p, const Thunk* t) {
        if (p.is_variable() || t->value == nullptr) {
            return true;
        }
        const Value* v = t->value;
        if (p.kind == Pattern::Kind::Int) {
            return v->kind == Value::Kind::Int && v->number == p.value;
        }
        if (v->kind != Value::Kind::Con || v->name != p.name) {
            return false;
        }
        for (std::size_t i = 0; i < p.args.size(); ++i) {
            if (!may_match(p.args[i], v->args[i])) {
                return false;
            }
        }
        return true;
    }

    static bool rule_may_match(const Rule& r, const std::vector<Thunk*>& args) {
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (!may_match(r.patterns[i], args[i])) {
                return false;
            }
        }
        return true;
    }

    Value* call(const FunctionDef& f, const std::vector<Thunk*>& args) {
        tick();
        const auto k = static_cast<std::uint32_t>(f.rules.size());
        const std::size_t point = cursor_;
        std::uint32_t r = k == 1 ? 0 : choose(k, true);
        for (;;) {
            envs_.emplace_back();
            Env& env = envs_.back();
            const Rule& rule = f.rules[r];
            bool ok = true;
            for (std::size_t i = 0; ok && i < args.size(); ++i) {
                ok = match(rule.patterns[i], args[i], env);
            }
            // With no open decision since the rule point, what was evaluated
            // is fixed by the path so far: a mismatch now is a mismatch in
            // every run through this point.
            const bool deterministic = k > 1 && open_.back() == point;
            if (ok) {
                if (deterministic) {
                    auto& rest = trail_[point].rest;
                    rest.erase(std::remove_if(rest.begin(), rest.end(),
                                              [&](std::uint32_t s) { return !rule_may_match(f.rules[s], args); }),
                               rest.end());
                    if (rest.empty() && !trail_[point].revisited) {
                        open_.pop_back();
                    }
                }
                for (const auto& b : rule.where) {
                    env.vars[b.var] = thunk(b.expr, env);
                }
                return eval(rule.body, env);
            }
            if (!deterministic || trail_[point].rest.empty()) {
                throw PathFailed{};
            }
            r = trail_[point].rest.front();
            trail_[point].rest.pop_front();
            trail_[point].chosen = r;
        }
    }

    void normalize(Value* v) {
        if (v->kind == Value::Kind::Int) {
            return;
        }
        for (Thunk* a : v->args) {
            normalize(force(a));
        }
    }

    static bool operator_name(std::string_view n) {
        return !n.empty() && !std::isalnum(static_cast<unsigned char>(n[0])) && n[0] != '_';
    }

    std::string show(const Value* v, bool nested) const {
        if (v->kind == Value::Kind::Int) {
            std::string s = std::to_string(v->number);
            return nested && v->number < 0 ? "(" + s + ")" : s;
        }
        if (v->kind == Value::Kind::Con) {
            if (v->name == names::Nil) {
                return "[]";
            }
            if (v->name == names::Pair) {
                return "(" + show(v->args[0]->value, false) + "," + show(v->args[1]->value, false) + ")";
            }
            if (v->name == names::Cons) {
                std::vector<const Value*> items;
                const Value* cur = v;
                while (cur->kind == Value::Kind::Con && cur->name == names::Cons) {
                    items.push_back(cur->args[0]->value);
                    cur = cur->args[1]->value;
                }
                if (cur->kind == Value::Kind::Con && cur->name == names::Nil) {
                    std::string s = "[";
                    for (std::size_t i = 0; i < items.size(); ++i) {
                        if (i > 0) {
                            s += ",";
                        }
                        s += show(items[i], false);
                    }
                    return s + "]";
                }
            }
        }
        std::string s = operator_name(v->name) ? "(" + std::string(v->name) + ")" : std::string(v->name);
        if (v->args.empty()) {
            return s;
        }
        for (const Thunk* a : v->args) {
            s += " " + show(a->value, true);
        }
        return nested ? "(" + s + ")" : s;
    }
};

}  // namespace

OracleResult enumerate(const SurfaceProgram& program, const OracleOptions& options) {
    if (program.find_function(program.goal) == nullptr) {
        throw OracleError("oracle: goal '" + program.goal + "' is not defined");
    }
    return Interpreter(program, options).run_all();
}

}  // namespace fairscheme
