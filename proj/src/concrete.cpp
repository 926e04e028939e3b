#include "gbpi/concrete.hpp"

#include <cmath>
#include <deque>
#include <limits>

#include "gbpi/parallel.hpp"

namespace gbpi {

namespace {

const Rational& lit_value(const TermPtr& t) { return t->lit->lo().value(); }

bool is_concrete_value(const TermPtr& t) {
    return t->kind == TermKind::Lit || t->kind == TermKind::Lambda || t->kind == TermKind::Fix;
}

// Reduces the leftmost-innermost CbV redex of t, updating trace position and weight.
std::optional<TermPtr> reduce(const TermPtr& t, Config& c) {
    auto descend = [&](std::size_t i) -> std::optional<TermPtr> {
        auto k = reduce(t->kids[i], c);
        if (!k) return std::nullopt;
        return with_kid(t, i, *k);
    };
    switch (t->kind) {
        case TermKind::App: {
            if (!is_concrete_value(t->kids[0])) return descend(0);
            if (!is_concrete_value(t->kids[1])) return descend(1);
            const TermPtr& f = t->kids[0];
            const TermPtr& v = t->kids[1];
            if (f->kind == TermKind::Lambda) return subst(f->kids[0], f->name, v);
            if (f->kind == TermKind::Fix) return subst(subst(f->kids[0], f->param, v), f->name, f);
            return std::nullopt;
        }
        case TermKind::If: {
            const TermPtr& g = t->kids[0];
            if (!is_concrete_value(g)) return descend(0);
            if (g->kind != TermKind::Lit) return std::nullopt;
            return sgn(lit_value(g)) <= 0 ? t->kids[1] : t->kids[2];
        }
        case TermKind::Prim: {
            for (std::size_t i = 0; i < t->kids.size(); ++i)
                if (!is_concrete_value(t->kids[i])) return descend(i);
            std::vector<Rational> args;
            for (const auto& k : t->kids) {
                if (k->kind != TermKind::Lit) return std::nullopt;
                args.push_back(lit_value(k));
            }
            return mk_num(t->prim->eval_exact(args));
        }
        case TermKind::Sample:
            if (c.head >= c.trace.size()) return std::nullopt;
            return mk_num(c.trace[c.head++]);
        case TermKind::Score: {
            const TermPtr& a = t->kids[0];
            if (!is_concrete_value(a)) return descend(0);
            if (a->kind != TermKind::Lit || sgn(lit_value(a)) < 0) return std::nullopt;
            c.weight *= lit_value(a);
            return a;
        }
        default: return std::nullopt;
    }
}

// Environment machine shared by the exact and the floating-point interpreters.
template <class Num>
class Machine {
public:
    explicit Machine(const TermPtr& p) { root_ = compile(p, {}); }

    struct Outcome {
        RunStatus status;
        Num value{};
        Num weight{};
        std::size_t steps = 0;
    };

    template <class Draw>
    Outcome run(Draw&& draw, std::size_t budget) const;

private:
    struct Code {
        TermKind kind;
        int var = 0;
        Num lit{};
        const PrimDescriptor* prim = nullptr;
        std::vector<const Code*> kids;
    };

    struct Closure;
    struct Env;
    using EnvPtr = std::shared_ptr<const Env>;
    struct Value {
        Num num{};
        std::shared_ptr<const Closure> clo;
    };
    struct Env {
        Value v;
        EnvPtr next;
    };
    struct Closure {
        const Code* fn;
        EnvPtr env;
    };

    enum class FrameKind { AppFn, AppArg, IfGuard, PrimArg, Score };
    struct Frame {
        FrameKind kind;
        const Code* code;
        EnvPtr env;
        Value fn;
        int idx = 0;
        Num args[2]{};
    };

    std::deque<Code> pool_;
    const Code* root_;

    const Code* compile(const TermPtr& t, std::vector<std::string> scope) {
        Code c;
        c.kind = t->kind;
        switch (t->kind) {
            case TermKind::Var: {
                int depth = 0;
                for (auto it = scope.rbegin(); it != scope.rend(); ++it, ++depth)
                    if (*it == t->name) break;
                c.var = depth;
                break;
            }
            case TermKind::Lit:
                if constexpr (std::is_same_v<Num, double>) c.lit = to_double_nearest(t->lit->lo().value());
                else c.lit = t->lit->lo().value();
                break;
            case TermKind::Lambda: {
                auto inner = scope;
                inner.push_back(t->name);
                c.kids.push_back(compile(t->kids[0], std::move(inner)));
                break;
            }
            case TermKind::Fix: {
                auto inner = scope;
                inner.push_back(t->name);
                inner.push_back(t->param);
                c.kids.push_back(compile(t->kids[0], std::move(inner)));
                break;
            }
            default:
                c.prim = t->prim.get();
                for (const auto& k : t->kids) c.kids.push_back(compile(k, scope));
        }
        pool_.push_back(std::move(c));
        return &pool_.back();
    }

    static Num eval_prim(const PrimDescriptor* p, const Num* args) {
        if constexpr (std::is_same_v<Num, double>) return p->eval_double(std::span<const double>(args, p->arity));
        else return p->eval_exact(std::span<const Rational>(args, p->arity));
    }
};

template <class Num>
template <class Draw>
typename Machine<Num>::Outcome Machine<Num>::run(Draw&& draw, std::size_t budget) const {
    std::vector<Frame> stack;
    Num weight = Num(1);
    const Code* code = root_;
    EnvPtr env;
    Value val;
    bool returning = false;
    std::size_t steps = 0;
    auto fail = [&](RunStatus s) {
        Outcome o;
        o.status = s;
        o.steps = steps;
        return o;
    };
    for (;;) {
        if (++steps > budget) return fail(RunStatus::BudgetExceeded);
        if (!returning) {
            switch (code->kind) {
                case TermKind::Var: {
                    const Env* e = env.get();
                    for (int i = 0; i < code->var; ++i) e = e->next.get();
                    val = e->v;
                    returning = true;
                    break;
                }
                case TermKind::Lit:
                    val = Value{code->lit, nullptr};
                    returning = true;
                    break;
                case TermKind::Lambda:
                case TermKind::Fix:
                    val = Value{Num(0), std::make_shared<const Closure>(Closure{code, env})};
                    returning = true;
                    break;
                case TermKind::App:
                    stack.push_back(Frame{FrameKind::AppFn, code, env, {}});
                    code = code->kids[0];
                    break;
                case TermKind::If:
                    stack.push_back(Frame{FrameKind::IfGuard, code, env, {}});
                    code = code->kids[0];
                    break;
                case TermKind::Prim:
                    stack.push_back(Frame{FrameKind::PrimArg, code, env, {}});
                    code = code->kids[0];
                    break;
                case TermKind::Score:
                    stack.push_back(Frame{FrameKind::Score, code, env, {}});
                    code = code->kids[0];
                    break;
                case TermKind::Sample: {
                    std::optional<Num> r = draw();
                    if (!r) return fail(RunStatus::TraceMismatch);
                    val = Value{std::move(*r), nullptr};
                    returning = true;
                    break;
                }
                default: return fail(RunStatus::Stuck);
            }
            continue;
        }
        if (stack.empty()) {
            Outcome o;
            o.status = RunStatus::Terminated;
            o.value = val.num;
            o.weight = weight;
            o.steps = steps;
            return o;
        }
        Frame& f = stack.back();
        switch (f.kind) {
            case FrameKind::AppFn:
                f.kind = FrameKind::AppArg;
                f.fn = std::move(val);
                code = f.code->kids[1];
                env = f.env;
                returning = false;
                break;
            case FrameKind::AppArg: {
                auto clo = std::move(f.fn.clo);
                stack.pop_back();
                if (!clo) return fail(RunStatus::Stuck);
                auto bound = std::make_shared<const Env>(Env{std::move(val), clo->env});
                if (clo->fn->kind == TermKind::Fix) {
                    auto self = std::make_shared<const Env>(Env{Value{Num(0), clo}, clo->env});
                    bound = std::make_shared<const Env>(Env{bound->v, self});
                }
                code = clo->fn->kids[0];
                env = std::move(bound);
                returning = false;
                break;
            }
            case FrameKind::IfGuard: {
                const Code* c = f.code;
                env = std::move(f.env);
                stack.pop_back();
                code = val.num <= 0 ? c->kids[1] : c->kids[2];
                returning = false;
                break;
            }
            case FrameKind::PrimArg: {
                f.args[f.idx++] = std::move(val.num);
                if (f.idx < f.code->prim->arity) {
                    code = f.code->kids[f.idx];
                    env = f.env;
                    returning = false;
                } else {
                    Num r = eval_prim(f.code->prim, f.args);
                    stack.pop_back();
                    val = Value{std::move(r), nullptr};
                }
                break;
            }
            case FrameKind::Score:
                stack.pop_back();
                if (val.num < 0) return fail(RunStatus::Stuck);
                weight *= val.num;
                break;
        }
    }
}

RunResult to_result(const Machine<Rational>::Outcome& o) {
    RunResult r;
    r.status = o.status;
    r.steps = o.steps;
    if (o.status == RunStatus::Terminated) {
        r.value = o.value;
        r.weight = o.weight;
    }
    return r;
}

}  // namespace

std::optional<Config> step(const Config& c) {
    Config next = c;
    auto t = reduce(c.term, next);
    if (!t) return std::nullopt;
    next.term = std::move(*t);
    return next;
}

RunResult run_by_steps(const TermPtr& p, const std::vector<Rational>& s, std::size_t budget) {
    Config c{p, s, 0, Rational(1)};
    RunResult r;
    for (std::size_t i = 0;; ++i) {
        if (is_concrete_value(c.term)) {
            r.steps = i;
            if (c.term->kind != TermKind::Lit) {
                r.status = RunStatus::Stuck;
                return r;
            }
            if (c.head != c.trace.size()) {
                r.status = RunStatus::TraceMismatch;
                return r;
            }
            r.status = RunStatus::Terminated;
            r.value = lit_value(c.term);
            r.weight = c.weight;
            return r;
        }
        if (i >= budget) {
            r.status = RunStatus::BudgetExceeded;
            r.steps = i;
            return r;
        }
        auto n = step(c);
        if (!n) {
            // stuck only for want of a trace entry means the trace is too short
            Config probe = c;
            probe.trace.push_back(Rational(0));
            r.status = step(probe) ? RunStatus::TraceMismatch : RunStatus::Stuck;
            r.steps = i;
            return r;
        }
        c = std::move(*n);
    }
}

RunResult run_on_trace(const TermPtr& p, const std::vector<Rational>& s, std::size_t budget) {
    Machine<Rational> m(p);
    std::size_t head = 0;
    auto out = m.run([&]() -> std::optional<Rational> {
        if (head >= s.size()) return std::nullopt;
        return s[head++];
    }, budget);
    RunResult r = to_result(out);
    if (r.status == RunStatus::Terminated && head != s.size()) r.status = RunStatus::TraceMismatch;
    return r;
}

RunResult run_lazy(const TermPtr& p, const std::function<Rational()>& draw, std::vector<Rational>& drawn,
                   std::size_t budget) {
    Machine<Rational> m(p);
    auto out = m.run([&]() -> std::optional<Rational> {
        drawn.push_back(draw());
        return drawn.back();
    }, budget);
    return to_result(out);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<WeightedSample> importance_sample(const TermPtr& p, std::uint64_t seed, std::size_t n, std::size_t budget) {
    constexpr std::size_t kChunk = 4096;
    Machine<double> m(p);
    std::vector<WeightedSample> out(n);
    std::size_t chunks = (n + kChunk - 1) / kChunk;
    parallel_for(chunks, [&](std::size_t c) {
        UniformStream rng(mix_seed(seed, c));
        std::size_t end = std::min(n, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            auto o = m.run([&]() -> std::optional<double> { return rng.next(); }, budget);
            if (o.status == RunStatus::Terminated) out[i] = {o.value, o.weight, false};
            else out[i] = {std::numeric_limits<double>::quiet_NaN(), 0.0, o.status == RunStatus::BudgetExceeded};
        }
    });
    return out;
}

Estimate estimate_from_samples(const std::vector<WeightedSample>& samples, const Interval& U) {
    double lo = U.lo().down(), hi = U.hi().up();
    double sum = 0, sumsq = 0;
    std::size_t truncated = 0;
    for (const auto& s : samples) {
        if (s.truncated) ++truncated;
        double x = (s.weight > 0 && s.value >= lo && s.value <= hi) ? s.weight : 0.0;
        sum += x;
        sumsq += x * x;
    }
    double n = static_cast<double>(samples.size());
    if (samples.empty()) return {0, 0, 0};
    double mean = sum / n;
    double var = std::max(0.0, sumsq / n - mean * mean);
    double se = samples.size() > 1 ? std::sqrt(var * n / (n - 1) / n) : 0.0;
    return {mean, se, truncated};
}

Estimate estimate_measure(const TermPtr& p, const Interval& U, std::size_t n, std::uint64_t seed, std::size_t budget) {
    return estimate_from_samples(importance_sample(p, seed, n, budget), U);
}

}  // namespace gbpi
