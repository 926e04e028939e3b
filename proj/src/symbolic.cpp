#include "gbpi/symbolic.hpp"

#include <sstream>

namespace gbpi {

namespace {

const char* rel_str(Rel r) {
    switch (r) {
        case Rel::Le: return "<=";
        case Rel::Lt: return "<";
        case Rel::Gt: return ">";
        case Rel::Ge: return ">=";
    }
    return "?";
}

bool point_lit(const TermPtr& t) { return t->kind == TermKind::Lit && t->lit->is_point() && t->lit->lo().finite(); }

// Guard constraints "X - c ⋈ 0" are stored as "X ⋈ c".
SymConstraint make_constraint(const TermPtr& v, Rel rel) {
    if (v->kind == TermKind::Prim && v->kids.size() == 2 && point_lit(v->kids[1]) && !point_lit(v->kids[0])) {
        if (v->prim->kind == PrimKind::Sub) return {v->kids[0], rel, v->kids[1]->lit->lo().value()};
        if (v->prim->kind == PrimKind::Add) return {v->kids[0], rel, -v->kids[1]->lit->lo().value()};
    }
    return {v, rel, Rational(0)};
}

bool sym_value(const TermPtr& t) { return t->value; }

struct SymRedex {
    SymStepStatus status = SymStepStatus::Ok;
    struct Succ {
        TermPtr term;
        std::vector<SymConstraint> delta;
        std::vector<TermPtr> xi;
        bool fresh_sample = false;
    };
    std::vector<Succ> next;
};

SymRedex sreduce(const TermPtr& t, int n) {
    auto descend = [&](std::size_t i) {
        SymRedex r = sreduce(t->kids[i], n);
        for (auto& s : r.next) s.term = with_kid(t, i, s.term);
        return r;
    };
    auto single = [](TermPtr term) {
        SymRedex r;
        r.next.push_back({std::move(term), {}, {}, false});
        return r;
    };
    auto status = [](SymStepStatus s) {
        SymRedex r;
        r.status = s;
        return r;
    };
    if (t->value) return status(SymStepStatus::Value);
    switch (t->kind) {
        case TermKind::App: {
            if (!sym_value(t->kids[0])) return descend(0);
            if (!sym_value(t->kids[1])) return descend(1);
            const TermPtr& f = t->kids[0];
            const TermPtr& v = t->kids[1];
            if (f->kind == TermKind::Lambda) return single(subst(f->kids[0], f->name, v));
            if (f->kind == TermKind::Fix) return single(subst(subst(f->kids[0], f->param, v), f->name, f));
            return status(SymStepStatus::Stuck);
        }
        case TermKind::If: {
            const TermPtr& g = t->kids[0];
            if (!sym_value(g)) return descend(0);
            if (!g->ground()) return status(SymStepStatus::Stuck);
            if (g->kind == TermKind::Lit) {
                if (g->lit->hi() <= ExtReal(0)) return single(t->kids[1]);
                if (g->lit->lo() > ExtReal(0)) return single(t->kids[2]);
            }
            SymRedex r;
            r.next.push_back({t->kids[1], {make_constraint(g, Rel::Le)}, {}, false});
            r.next.push_back({t->kids[2], {make_constraint(g, Rel::Gt)}, {}, false});
            return r;
        }
        case TermKind::Prim: {
            for (std::size_t i = 0; i < t->kids.size(); ++i)
                if (!sym_value(t->kids[i])) return descend(i);
            std::vector<Interval> args;
            for (const auto& k : t->kids) {
                if (k->kind != TermKind::Lit) return status(SymStepStatus::Stuck);
                args.push_back(*k->lit);
            }
            return single(mk_lit(lift_eval(*t->prim, args)));
        }
        case TermKind::Sample: {
            SymRedex r = single(mk_svar(n + 1));
            r.next[0].fresh_sample = true;
            return r;
        }
        case TermKind::Score: {
            const TermPtr& a = t->kids[0];
            if (!sym_value(a)) return descend(0);
            if (!a->ground()) return status(SymStepStatus::Stuck);
            SymRedex r = single(a);
            if (a->kind == TermKind::Lit) {
                const Interval& i = *a->lit;
                if (i.hi() < ExtReal(0)) return status(SymStepStatus::Dead);
                if (i.lo() < ExtReal(0)) r.next[0].delta.push_back({a, Rel::Ge, Rational(0)});
                if (i != Interval::one()) r.next[0].xi.push_back(a);
                return r;
            }
            r.next[0].delta.push_back({a, Rel::Ge, Rational(0)});
            r.next[0].xi.push_back(a);
            return r;
        }
        default: return status(SymStepStatus::Stuck);
    }
}

TermPtr value_of(const WeightlessTypePtr& t) {
    if (!t->arrow) return mk_lit(t->base.value_or(Interval::whole()));
    TermPtr body = value_of(t->cod->value);
    Interval w = t->cod->weight.value_or(Interval::nonneg());
    body = mk_app(mk_lambda("_", SimpleType::real(), body), mk_score(mk_lit(w)));
    return body;
}

std::size_t count_fix(const TermPtr& t) {
    if (!t->has_fix) return 0;
    std::size_t c = t->kind == TermKind::Fix ? 1 : 0;
    for (const auto& k : t->kids) c += count_fix(k);
    return c;
}

TermPtr replace_fix(const TermPtr& t, const ConstraintSystem& sys, const Assignment& a, std::size_t& next) {
    if (!t->has_fix) return t;
    if (t->kind == TermKind::Fix) {
        std::size_t idx = next;
        next += count_fix(t);
        auto ty = concretize(sys.fix_types[idx], a);
        // λ_. score(w); value, where the fixpoint's own type is dom -> <value, w>
        TermPtr body = value_of(ty->value->cod->value);
        Interval w = ty->value->cod->weight.value_or(Interval::nonneg());
        body = mk_app(mk_lambda("_", SimpleType::real(), body), mk_score(mk_lit(w)));
        return mk_lambda("_", t->type->dom, body);
    }
    TermPtr out = t;
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        TermPtr k = replace_fix(t->kids[i], sys, a, next);
        if (k != t->kids[i]) out = with_kid(out, i, k);
    }
    return out;
}

}  // namespace

std::string SymConstraint::str() const {
    return pretty(value) + " " + rel_str(rel) + " " + to_decimal_string(threshold);
}

std::string SymPath::str() const {
    std::ostringstream os;
    os << "value " << pretty(value) << " | n " << n << " | delta {";
    for (std::size_t i = 0; i < delta.size(); ++i) os << (i ? ", " : "") << delta[i].str();
    os << "} | xi {";
    for (std::size_t i = 0; i < xi.size(); ++i) os << (i ? ", " : "") << pretty(xi[i]);
    os << "}";
    return os.str();
}

SymStepResult sym_step(SymConfig c) {
    SymRedex r = sreduce(c.term, c.n);
    SymStepResult out{r.status, {}};
    for (std::size_t i = 0; i < r.next.size(); ++i) {
        auto& s = r.next[i];
        SymConfig nc = (i + 1 == r.next.size()) ? std::move(c) : c;
        nc.term = std::move(s.term);
        if (s.fresh_sample) ++nc.n;
        for (auto& d : s.delta) nc.delta.push_back(std::move(d));
        for (auto& x : s.xi) nc.xi.push_back(std::move(x));
        out.next.push_back(std::move(nc));
    }
    return out;
}

Interval eval_symbolic(const TermPtr& v, const std::vector<Interval>& box) {
    switch (v->kind) {
        case TermKind::Lit: return *v->lit;
        case TermKind::SampleVar: return box.at(static_cast<std::size_t>(v->index - 1));
        case TermKind::Prim: {
            std::vector<Interval> args;
            args.reserve(v->kids.size());
            for (const auto& k : v->kids) args.push_back(eval_symbolic(k, box));
            return lift_eval(*v->prim, args);
        }
        default: throw std::logic_error("eval_symbolic on a non-ground term");
    }
}

Rational eval_concrete(const TermPtr& v, const std::vector<Rational>& point) {
    switch (v->kind) {
        case TermKind::Lit:
            if (!v->lit->is_point() || !v->lit->lo().finite()) throw std::logic_error("eval_concrete on an interval literal");
            return v->lit->lo().value();
        case TermKind::SampleVar: return point.at(static_cast<std::size_t>(v->index - 1));
        case TermKind::Prim: {
            std::vector<Rational> args;
            for (const auto& k : v->kids) args.push_back(eval_concrete(k, point));
            return v->prim->eval_exact(args);
        }
        default: throw std::logic_error("eval_concrete on a non-ground term");
    }
}

Truth decide(const SymConstraint& c, const std::vector<Interval>& box) {
    Interval i = eval_symbolic(c.value, box);
    ExtReal r(c.threshold);
    switch (c.rel) {
        case Rel::Le:
            if (i.hi() <= r) return Truth::True;
            if (i.lo() > r) return Truth::False;
            break;
        case Rel::Lt:
            if (i.hi() < r) return Truth::True;
            if (i.lo() >= r) return Truth::False;
            break;
        case Rel::Gt:
            if (i.lo() > r) return Truth::True;
            if (i.hi() <= r) return Truth::False;
            break;
        case Rel::Ge:
            if (i.lo() >= r) return Truth::True;
            if (i.hi() < r) return Truth::False;
            break;
    }
    return Truth::Unknown;
}

bool holds(const SymConstraint& c, const std::vector<Rational>& point) {
    Rational v = eval_concrete(c.value, point);
    switch (c.rel) {
        case Rel::Le: return v <= c.threshold;
        case Rel::Lt: return v < c.threshold;
        case Rel::Gt: return v > c.threshold;
        case Rel::Ge: return v >= c.threshold;
    }
    return false;
}

TermPtr approx_fix_term(const TermPtr& t) {
    if (!t->has_fix) return t;
    auto sys = generate_constraints(t);
    auto a = solve(sys.constraints, sys.var_count);
    std::size_t next = 0;
    return replace_fix(t, sys, a, next);
}

SymConfig approx_fix(const SymConfig& c) {
    SymConfig r = c;
    r.term = approx_fix_term(c.term);
    return r;
}

bool simplify_path(SymPath& path) {
    std::vector<Interval> box(static_cast<std::size_t>(path.n), Interval::unit());
    std::vector<SymConstraint> kept;
    for (auto& c : path.delta) {
        Truth t = decide(c, box);
        if (t == Truth::False) return false;
        if (t == Truth::Unknown) kept.push_back(std::move(c));
    }
    path.delta = std::move(kept);
    return true;
}

ExploreResult explore(const TermPtr& p, const ExploreOptions& opt) {
    ExploreResult out;
    std::vector<std::pair<SymConfig, std::size_t>> work;
    work.push_back({SymConfig{p, 0, {}, {}}, 0});
    while (!work.empty()) {
        auto [c, depth] = std::move(work.back());
        work.pop_back();
        if (c.term->value) {
            if (!c.term->ground()) continue;
            SymPath path{c.term, c.n, std::move(c.delta), std::move(c.xi)};
            if (opt.simplify && !simplify_path(path)) {
                ++out.dropped;
                continue;
            }
            if (out.paths.size() >= opt.max_paths)
                throw ResourceCap("symbolic execution exceeded " + std::to_string(opt.max_paths) + " paths");
            out.paths.push_back(std::move(path));
            continue;
        }
        if (c.term->has_fix && depth > opt.depth) {
            out.approximated = true;
            c = approx_fix(c);
        }
        SymStepResult r = sym_step(std::move(c));
        if (r.status != SymStepStatus::Ok) continue;
        for (auto it = r.next.rbegin(); it != r.next.rend(); ++it) work.push_back({std::move(*it), depth + 1});
    }
    return out;
}

}  // namespace gbpi
