#include "gbpi/interval_types.hpp"

#include <deque>
#include <sstream>
#include <stdexcept>

namespace gbpi {

std::string WeightlessType::str() const {
    if (!arrow) return to_string(base);
    std::string d = dom->str();
    if (dom->arrow) d = "(" + d + ")";
    return d + " -> " + cod->str();
}

std::string WeightedType::str() const { return "<" + value->str() + ", " + to_string(weight) + ">"; }

std::string TypeConstraint::str() const {
    std::ostringstream os;
    os << "v" << target;
    switch (kind) {
        case ConstraintKind::Const: os << " = " << value; break;
        case ConstraintKind::Sub: os << " >= v" << source; break;
        case ConstraintKind::Fun: {
            os << " = ";
            if (op == FunOp::Prim) os << prim->name;
            else if (op == FunOp::Product) os << "prod";
            else os << "meet_nonneg";
            os << "(";
            for (std::size_t i = 0; i < args.size(); ++i) os << (i ? ", " : "") << "v" << args[i];
            os << ")";
        }
    }
    return os.str();
}

namespace {

class Generator {
public:
    ConstraintSystem sys;

    int fresh() { return sys.var_count++; }

    SymTypePtr fresh_type(const TypePtr& a) {
        auto k = std::make_shared<SymType>();
        if (!a->arrow) {
            k->var = fresh();
        } else {
            k->dom = fresh_type(a->dom);
            auto cod = std::make_shared<SymWeighted>();
            cod->type = fresh_type(a->cod);
            cod->weight = fresh();
            k->cod = cod;
        }
        return k;
    }

    SymTypePtr fresh_like(const SymTypePtr& k) {
        auto r = std::make_shared<SymType>();
        if (!k->arrow()) {
            r->var = fresh();
        } else {
            r->dom = fresh_like(k->dom);
            auto cod = std::make_shared<SymWeighted>();
            cod->type = fresh_like(k->cod->type);
            cod->weight = fresh();
            r->cod = cod;
        }
        return r;
    }

    void constant(int v, Interval i) {
        TypeConstraint c{ConstraintKind::Const, v};
        c.value = std::move(i);
        sys.constraints.push_back(std::move(c));
    }

    void sub_var(int a, int b) {
        TypeConstraint c{ConstraintKind::Sub, b};
        c.source = a;
        sys.constraints.push_back(std::move(c));
    }

    void fun(int target, FunOp op, std::vector<int> args, PrimPtr prim = nullptr) {
        TypeConstraint c{ConstraintKind::Fun, target};
        c.op = op;
        c.args = std::move(args);
        c.prim = std::move(prim);
        sys.constraints.push_back(std::move(c));
    }

    // a ⊑ b, decomposed to interval variables.
    void subtype(const SymTypePtr& a, const SymTypePtr& b) {
        if (a->arrow() != b->arrow()) throw std::logic_error("subtype between different simple types");
        if (!a->arrow()) {
            sub_var(a->var, b->var);
            return;
        }
        subtype(b->dom, a->dom);
        subtype(a->cod->type, b->cod->type);
        sub_var(a->cod->weight, b->cod->weight);
    }

    SymWeightedPtr weighted(SymTypePtr k, int w) {
        auto r = std::make_shared<SymWeighted>();
        r->type = std::move(k);
        r->weight = w;
        return r;
    }

    SymTypePtr base(int v) {
        auto k = std::make_shared<SymType>();
        k->var = v;
        return k;
    }

    SymWeightedPtr gen(const SymEnv& env, const TermPtr& t) {
        switch (t->kind) {
            case TermKind::Var: {
                auto it = env.find(t->name);
                if (it == env.end()) throw std::logic_error("unbound variable " + t->name);
                int w = fresh();
                constant(w, Interval::one());
                return weighted(it->second, w);
            }
            case TermKind::Lit: {
                int v = fresh(), w = fresh();
                constant(v, *t->lit);
                constant(w, Interval::one());
                return weighted(base(v), w);
            }
            case TermKind::SampleVar:
            case TermKind::Sample: {
                int v = fresh(), w = fresh();
                constant(v, Interval::unit());
                constant(w, Interval::one());
                return weighted(base(v), w);
            }
            case TermKind::Lambda: {
                SymTypePtr k = fresh_type(t->type);
                int w = fresh();
                SymEnv inner = env;
                inner[t->name] = k;
                auto body = gen(inner, t->kids[0]);
                constant(w, Interval::one());
                auto arrow = std::make_shared<SymType>();
                arrow->dom = k;
                arrow->cod = body;
                return weighted(arrow, w);
            }
            case TermKind::Fix: {
                std::size_t slot = sys.fix_types.size();
                sys.fix_types.push_back(nullptr);
                sys.fix_terms.push_back(t);
                SymTypePtr k = fresh_type(t->type->dom);
                SymTypePtr k1 = fresh_type(t->type->cod);
                int w = fresh(), w1 = fresh();
                auto self = std::make_shared<SymType>();
                self->dom = k;
                self->cod = weighted(k1, w1);
                SymEnv inner = env;
                inner[t->name] = self;
                inner[t->param] = k;
                auto body = gen(inner, t->kids[0]);
                constant(w, Interval::one());
                subtype(body->type, k1);
                sub_var(body->weight, w1);
                auto arrow = std::make_shared<SymType>();
                arrow->dom = k;
                arrow->cod = body;
                auto r = weighted(arrow, w);
                sys.fix_types[slot] = r;
                return r;
            }
            case TermKind::App: {
                auto f = gen(env, t->kids[0]);
                auto a = gen(env, t->kids[1]);
                if (!f->type->arrow()) throw std::logic_error("application of a non-function");
                subtype(a->type, f->type->dom);
                int w = fresh();
                fun(w, FunOp::Product, {f->weight, f->type->cod->weight, a->weight});
                return weighted(f->type->cod->type, w);
            }
            case TermKind::If: {
                auto g = gen(env, t->kids[0]);
                auto n = gen(env, t->kids[1]);
                auto p = gen(env, t->kids[2]);
                SymTypePtr k = fresh_like(n->type);
                int w = fresh(), w1 = fresh();
                subtype(n->type, k);
                subtype(p->type, k);
                fun(w, FunOp::Product, {g->weight, w1});
                sub_var(n->weight, w1);
                sub_var(p->weight, w1);
                return weighted(k, w);
            }
            case TermKind::Prim: {
                std::vector<int> vals, ws;
                for (const auto& k : t->kids) {
                    auto a = gen(env, k);
                    vals.push_back(a->type->var);
                    ws.push_back(a->weight);
                }
                int v = fresh(), w = fresh();
                fun(v, FunOp::Prim, std::move(vals), t->prim);
                fun(w, FunOp::Product, std::move(ws));
                return weighted(base(v), w);
            }
            case TermKind::Score: {
                auto a = gen(env, t->kids[0]);
                int v = fresh(), w = fresh();
                fun(v, FunOp::MeetNonneg, {a->type->var});
                fun(w, FunOp::Product, {v, a->weight});
                return weighted(base(v), w);
            }
        }
        throw std::logic_error("unreachable term kind");
    }
};

LatticeInterval evaluate(const TypeConstraint& c, const Assignment& a) {
    switch (c.kind) {
        case ConstraintKind::Const: return c.value;
        case ConstraintKind::Sub: return a[c.source];
        case ConstraintKind::Fun: break;
    }
    std::vector<Interval> args;
    args.reserve(c.args.size());
    for (int v : c.args) {
        if (!a[v]) return std::nullopt;
        args.push_back(*a[v]);
    }
    switch (c.op) {
        case FunOp::Prim: return lift_eval(*c.prim, args);
        case FunOp::MeetNonneg: return meet(args[0], Interval::nonneg());
        case FunOp::Product: {
            Interval r = Interval::one();
            for (const auto& i : args) r = mul(r, i);
            return r;
        }
    }
    return std::nullopt;
}

// Widening that stops at 0 before jumping to infinity, so nonnegative weights stay nonnegative.
LatticeInterval widen_at_zero(const LatticeInterval& a, const LatticeInterval& b) {
    if (!a || !b) return widen(a, b);
    ExtReal lo = a->lo(), hi = a->hi();
    if (b->lo() < lo) lo = b->lo() >= ExtReal(0) ? ExtReal(0) : ExtReal::neg_inf();
    if (b->hi() > hi) hi = b->hi() <= ExtReal(0) ? ExtReal(0) : ExtReal::pos_inf();
    return Interval(lo, hi);
}

}  // namespace

ConstraintSystem generate_constraints(const SymEnv& env, const TermPtr& t) {
    Generator g;
    g.sys.type = g.gen(env, t);
    return std::move(g.sys);
}

ConstraintSystem generate_constraints(const TermPtr& t) { return generate_constraints(SymEnv{}, t); }

Assignment solve(const std::vector<TypeConstraint>& cs, int var_count, const SolveOptions& opt, SolveStats* stats) {
    Assignment a(static_cast<std::size_t>(var_count));
    std::vector<int> updates(static_cast<std::size_t>(var_count), 0);
    std::vector<std::vector<std::size_t>> readers(static_cast<std::size_t>(var_count));
    for (std::size_t i = 0; i < cs.size(); ++i) {
        if (cs[i].kind == ConstraintKind::Sub) readers[cs[i].source].push_back(i);
        for (int v : cs[i].args) readers[v].push_back(i);
    }
    std::deque<std::size_t> work;
    std::vector<char> queued(cs.size(), 1);
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (cs[i].kind == ConstraintKind::Const) work.push_back(i);
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (cs[i].kind != ConstraintKind::Const) work.push_back(i);
    SolveStats local;
    while (!work.empty()) {
        std::size_t i = work.front();
        work.pop_front();
        queued[i] = 0;
        ++local.evaluations;
        const TypeConstraint& c = cs[i];
        LatticeInterval v = evaluate(c, a);
        LatticeInterval& cur = a[c.target];
        if (leq(v, cur)) continue;
        LatticeInterval next = join(cur, v);
        if (++updates[c.target] > opt.widening_delay) next = widen_at_zero(cur, next);
        // a runaway chain is cut off at top, which is always a solution
        if (++local.updates > opt.max_updates) next = Interval::whole();
        cur = next;
        for (std::size_t r : readers[c.target])
            if (!queued[r]) {
                queued[r] = 1;
                work.push_back(r);
            }
    }
    if (stats) *stats = local;
    return a;
}

int first_violation(const std::vector<TypeConstraint>& cs, const Assignment& a) {
    for (std::size_t i = 0; i < cs.size(); ++i)
        if (!leq(evaluate(cs[i], a), a[cs[i].target])) return static_cast<int>(i);
    return -1;
}

WeightlessTypePtr concretize(const SymTypePtr& k, const Assignment& a) {
    auto r = std::make_shared<WeightlessType>();
    if (!k->arrow()) {
        r->base = a[k->var];
    } else {
        r->arrow = true;
        r->dom = concretize(k->dom, a);
        r->cod = concretize(k->cod, a);
    }
    return r;
}

WeightedTypePtr concretize(const SymWeightedPtr& k, const Assignment& a) {
    auto r = std::make_shared<WeightedType>();
    r->value = concretize(k->type, a);
    r->weight = a[k->weight];
    return r;
}

WeightedTypePtr infer_type(const TermPtr& t, const SolveOptions& opt) { return infer_types_with_fixpoints(t, opt).program; }

TypeReport infer_types_with_fixpoints(const TermPtr& t, const SolveOptions& opt) {
    auto sys = generate_constraints(t);
    auto a = solve(sys.constraints, sys.var_count, opt);
    TypeReport r;
    r.program = concretize(sys.type, a);
    for (std::size_t i = 0; i < sys.fix_types.size(); ++i)
        r.fixpoints.emplace_back(sys.fix_terms[i], concretize(sys.fix_types[i], a));
    return r;
}

}  // namespace gbpi
