#include "gbpi/interval_semantics.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "gbpi/interval_types.hpp"

namespace gbpi {

Rational trace_volume(const IntervalTrace& t) {
    Rational v(1);
    for (const auto& i : t) v *= i.hi().value() - i.lo().value();
    return v;
}

std::string trace_str(const IntervalTrace& t) {
    std::ostringstream os;
    os << "<";
    for (std::size_t i = 0; i < t.size(); ++i) os << (i ? ", " : "") << t[i];
    os << ">";
    return os.str();
}

namespace {

bool ivalue(const TermPtr& t) {
    return t->kind == TermKind::Lit || t->kind == TermKind::Lambda || t->kind == TermKind::Fix;
}

struct Redex {
    IStepStatus status = IStepStatus::Ok;
    std::vector<std::pair<TermPtr, Interval>> next;  // successor term, weight factor
    bool consumed = false;
};

const Interval kZeroOne = Interval::unit();

Redex ireduce(const TermPtr& t, const IConfig& c, const IntervalTrace& trace) {
    auto descend = [&](std::size_t i) {
        Redex r = ireduce(t->kids[i], c, trace);
        for (auto& n : r.next) n.first = with_kid(t, i, n.first);
        return r;
    };
    auto single = [](TermPtr n, Interval w = Interval::one()) {
        Redex r;
        r.next.emplace_back(std::move(n), std::move(w));
        return r;
    };
    auto status = [](IStepStatus s) {
        Redex r;
        r.status = s;
        return r;
    };
    switch (t->kind) {
        case TermKind::App: {
            if (!ivalue(t->kids[0])) return descend(0);
            if (!ivalue(t->kids[1])) return descend(1);
            const TermPtr& f = t->kids[0];
            const TermPtr& v = t->kids[1];
            if (f->kind == TermKind::Lambda) return single(subst(f->kids[0], f->name, v));
            if (f->kind == TermKind::Fix) return single(subst(subst(f->kids[0], f->param, v), f->name, f));
            return status(IStepStatus::Stuck);
        }
        case TermKind::If: {
            const TermPtr& g = t->kids[0];
            if (!ivalue(g)) return descend(0);
            if (g->kind != TermKind::Lit) return status(IStepStatus::Stuck);
            const Interval& i = *g->lit;
            if (i.hi() <= ExtReal(0)) return single(t->kids[1]);
            if (i.lo() > ExtReal(0)) return single(t->kids[2]);
            Redex r;
            r.next.emplace_back(t->kids[1], kZeroOne);
            r.next.emplace_back(t->kids[2], kZeroOne);
            return r;
        }
        case TermKind::Prim: {
            for (std::size_t i = 0; i < t->kids.size(); ++i)
                if (!ivalue(t->kids[i])) return descend(i);
            std::vector<Interval> args;
            for (const auto& k : t->kids) {
                if (k->kind != TermKind::Lit) return status(IStepStatus::Stuck);
                args.push_back(*k->lit);
            }
            return single(mk_lit(lift_eval(*t->prim, args)));
        }
        case TermKind::Sample: {
            if (c.head >= trace.size()) return status(IStepStatus::NeedSample);
            Redex r = single(mk_lit(trace[c.head]));
            r.consumed = true;
            return r;
        }
        case TermKind::Score: {
            const TermPtr& a = t->kids[0];
            if (!ivalue(a)) return descend(0);
            if (a->kind != TermKind::Lit) return status(IStepStatus::Stuck);
            auto m = meet(*a->lit, Interval::nonneg());
            if (!m) return status(IStepStatus::Dead);
            TermPtr lit = *m == *a->lit ? a : mk_lit(*m);
            return single(lit, *m);
        }
        case TermKind::Lit:
        case TermKind::Lambda:
        case TermKind::Fix: return status(IStepStatus::Value);
        default: return status(IStepStatus::Stuck);
    }
}

}  // namespace

IStepResult istep(const IConfig& c, const IntervalTrace& t) {
    Redex r = ireduce(c.term, c, t);
    IStepResult out{r.status, {}};
    for (auto& [term, w] : r.next)
        out.next.push_back(IConfig{std::move(term), c.head + (r.consumed ? 1 : 0), mul(c.weight, w)});
    return out;
}

IRunOutcome irun(const TermPtr& p, const IntervalTrace& t, std::size_t budget) {
    IRunOutcome out;
    const IOutcome fallback{Interval::whole(), Interval::nonneg()};
    std::vector<IConfig> stack{IConfig{p, 0, Interval::one()}};
    bool defaulted = false;
    while (!stack.empty()) {
        IConfig c = std::move(stack.back());
        stack.pop_back();
        if (out.steps >= budget) {
            defaulted = true;
            continue;
        }
        ++out.steps;
        IStepResult r = istep(c, t);
        switch (r.status) {
            case IStepStatus::Ok:
                for (auto it = r.next.rbegin(); it != r.next.rend(); ++it) stack.push_back(std::move(*it));
                break;
            case IStepStatus::Value:
                if (c.term->kind != TermKind::Lit || c.head != t.size()) {
                    defaulted = true;
                } else {
                    out.results.push_back({*c.term->lit, c.weight});
                }
                break;
            case IStepStatus::NeedSample: {
                out.exhausted = true;
                out.flagged = true;
                auto ty = infer_type(c.term);
                if (ty->value->arrow) {
                    defaulted = true;
                    break;
                }
                // bottom means no terminating continuation exists
                if (!ty->value->base || !ty->weight) break;
                ExtReal hi = c.weight.hi() * ty->weight->hi();
                out.results.push_back({*ty->value->base, Interval(ExtReal(0), hi)});
                break;
            }
            case IStepStatus::Dead:
            case IStepStatus::Stuck: defaulted = true; break;
        }
    }
    if (defaulted) {
        out.flagged = true;
        out.results.push_back(fallback);
    }
    return out;
}

IncompatibleTraces::IncompatibleTraces(std::size_t a, std::size_t b, const std::string& msg)
    : std::invalid_argument(msg), first(a), second(b) {}

bool compatible(const IntervalTrace& a, const IntervalTrace& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i].hi() <= b[i].lo() || b[i].hi() <= a[i].lo()) return true;
    return false;
}

void check_compatible(const std::vector<IntervalTrace>& ts) {
    for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = i + 1; j < ts.size(); ++j)
            if (!compatible(ts[i], ts[j]))
                throw IncompatibleTraces(i, j,
                                         "interval traces " + std::to_string(i) + " " + trace_str(ts[i]) + " and " +
                                             std::to_string(j) + " " + trace_str(ts[j]) + " are not compatible");
}

namespace {

bool certify(const std::vector<const IntervalTrace*>& ts, std::size_t depth) {
    std::set<Rational> cuts{Rational(0), Rational(1)};
    for (const auto* t : ts) {
        if (t->size() == depth) return true;
        const Interval& i = (*t)[depth];
        if (!i.bounded()) return false;
        cuts.insert(i.lo().value());
        cuts.insert(i.hi().value());
    }
    if (ts.empty()) return false;
    std::vector<Rational> pts;
    for (const auto& c : cuts)
        if (c >= 0 && c <= 1) pts.push_back(c);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        std::vector<const IntervalTrace*> tails;
        for (const auto* t : ts) {
            const Interval& i = (*t)[depth];
            if (i.lo() <= ExtReal(pts[k]) && ExtReal(pts[k + 1]) <= i.hi()) tails.push_back(t);
        }
        if (!certify(tails, depth + 1)) return false;
    }
    return true;
}

}  // namespace

bool certify_exhaustive(const std::vector<IntervalTrace>& ts) {
    std::vector<const IntervalTrace*> ptrs;
    for (const auto& t : ts) ptrs.push_back(&t);
    return certify(ptrs, 0);
}

TraceBounds trace_bounds(const TermPtr& p, const std::vector<IntervalTrace>& ts, const Interval& U, std::size_t budget) {
    check_compatible(ts);
    if (!certify_exhaustive(ts)) throw NotExhaustive("interval trace set is not certified exhaustive");
    TraceBounds b{Rational(0), ExtReal(0)};
    for (const auto& t : ts) {
        Rational vol = trace_volume(t);
        IRunOutcome o = irun(p, t, budget);
        for (const auto& r : o.results) {
            if (r.value.subset_of(U) && r.weight.lo().finite()) b.lower += vol * r.weight.lo().value();
            if (r.value.intersects(U)) b.upper = b.upper + ExtReal(vol) * r.weight.hi();
        }
    }
    return b;
}

Rational lower_bound(const TermPtr& p, const std::vector<IntervalTrace>& ts, const Interval& U, std::size_t budget) {
    check_compatible(ts);
    Rational lb(0);
    for (const auto& t : ts) {
        Rational vol = trace_volume(t);
        for (const auto& r : irun(p, t, budget).results)
            if (r.value.subset_of(U) && r.weight.lo().finite()) lb += vol * r.weight.lo().value();
    }
    return lb;
}

ExtReal upper_bound(const TermPtr& p, const std::vector<IntervalTrace>& ts, const Interval& U, std::size_t budget) {
    if (!certify_exhaustive(ts)) throw NotExhaustive("interval trace set is not certified exhaustive");
    ExtReal ub(0);
    for (const auto& t : ts) {
        ExtReal vol(trace_volume(t));
        for (const auto& r : irun(p, t, budget).results)
            if (r.value.intersects(U)) ub = ub + vol * r.weight.hi();
    }
    return ub;
}

std::vector<IntervalTrace> adaptive_grid(const TermPtr& p, int splits, std::size_t max_len, std::size_t budget) {
    std::vector<IntervalTrace> done;
    std::vector<IntervalTrace> todo{IntervalTrace{}};
    while (!todo.empty()) {
        IntervalTrace t = std::move(todo.back());
        todo.pop_back();
        if (t.size() >= max_len || !irun(p, t, budget).exhausted) {
            done.push_back(std::move(t));
            continue;
        }
        for (int k = splits - 1; k >= 0; --k) {
            IntervalTrace child = t;
            child.emplace_back(rat(k, splits), rat(k + 1, splits));
            todo.push_back(std::move(child));
        }
    }
    return done;
}

}  // namespace gbpi
