#include "gbpi/term.hpp"

#include <algorithm>
#include <sstream>

namespace gbpi {

TypePtr SimpleType::real() {
    static const TypePtr r = std::make_shared<SimpleType>();
    return r;
}

TypePtr SimpleType::fn(TypePtr d, TypePtr c) {
    auto t = std::make_shared<SimpleType>();
    t->arrow = true;
    t->dom = std::move(d);
    t->cod = std::move(c);
    return t;
}

std::string SimpleType::str() const {
    if (!arrow) return "R";
    std::string d = dom->str();
    if (dom->arrow) d = "(" + d + ")";
    return d + " -> " + cod->str();
}

bool same_type(const SimpleType& a, const SimpleType& b) {
    if (a.arrow != b.arrow) return false;
    if (!a.arrow) return true;
    return same_type(*a.dom, *b.dom) && same_type(*a.cod, *b.cod);
}

namespace {

std::vector<std::string> merge_fv(const std::vector<TermPtr>& kids) {
    std::vector<std::string> out;
    for (const auto& k : kids) {
        if (k->free_vars.empty()) continue;
        std::vector<std::string> tmp;
        std::set_union(out.begin(), out.end(), k->free_vars.begin(), k->free_vars.end(), std::back_inserter(tmp));
        out.swap(tmp);
    }
    return out;
}

void erase_name(std::vector<std::string>& v, const std::string& x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
}

std::shared_ptr<Term> node(TermKind k, std::vector<TermPtr> kids = {}) {
    auto t = std::make_shared<Term>();
    t->kind = k;
    t->kids = std::move(kids);
    t->free_vars = merge_fv(t->kids);
    for (const auto& c : t->kids) {
        t->has_fix = t->has_fix || c->has_fix;
        t->has_svar = t->has_svar || c->has_svar;
    }
    return t;
}

}  // namespace

TermPtr mk_var(std::string name) {
    auto t = node(TermKind::Var);
    t->free_vars = {name};
    t->name = std::move(name);
    return t;
}

TermPtr mk_lit(Interval v) {
    auto t = node(TermKind::Lit);
    t->lit = std::move(v);
    t->value = true;
    return t;
}

TermPtr mk_num(const Rational& r) { return mk_lit(Interval::point(r)); }

TermPtr mk_lambda(std::string param, TypePtr type, TermPtr body) {
    auto t = node(TermKind::Lambda, {std::move(body)});
    erase_name(t->free_vars, param);
    t->name = std::move(param);
    t->type = std::move(type);
    t->value = true;
    return t;
}

TermPtr mk_fix(std::string self, std::string param, TypePtr fn_type, TermPtr body) {
    auto t = node(TermKind::Fix, {std::move(body)});
    erase_name(t->free_vars, self);
    erase_name(t->free_vars, param);
    t->name = std::move(self);
    t->param = std::move(param);
    t->type = std::move(fn_type);
    t->value = true;
    t->has_fix = true;
    return t;
}

TermPtr mk_app(TermPtr fn, TermPtr arg) { return node(TermKind::App, {std::move(fn), std::move(arg)}); }

TermPtr mk_if(TermPtr guard, TermPtr then_branch, TermPtr else_branch) {
    return node(TermKind::If, {std::move(guard), std::move(then_branch), std::move(else_branch)});
}

TermPtr mk_prim(PrimPtr prim, std::vector<TermPtr> args) {
    auto t = node(TermKind::Prim, std::move(args));
    t->prim = std::move(prim);
    bool all_ground = std::all_of(t->kids.begin(), t->kids.end(), [](const TermPtr& k) { return k->ground(); });
    t->value = all_ground && t->has_svar;
    return t;
}

TermPtr mk_prim(std::string_view name, std::vector<TermPtr> args) { return mk_prim(registry_lookup(name), std::move(args)); }

TermPtr mk_sample() { return node(TermKind::Sample); }

TermPtr mk_score(TermPtr arg) { return node(TermKind::Score, {std::move(arg)}); }

TermPtr mk_svar(int index) {
    auto t = node(TermKind::SampleVar);
    t->index = index;
    t->value = true;
    t->has_svar = true;
    return t;
}

TermPtr with_kid(const TermPtr& t, std::size_t i, TermPtr kid) {
    std::vector<TermPtr> kids = t->kids;
    kids[i] = std::move(kid);
    switch (t->kind) {
        case TermKind::Lambda: return mk_lambda(t->name, t->type, kids[0]);
        case TermKind::Fix: return mk_fix(t->name, t->param, t->type, kids[0]);
        case TermKind::App: return mk_app(kids[0], kids[1]);
        case TermKind::If: return mk_if(kids[0], kids[1], kids[2]);
        case TermKind::Prim: return mk_prim(t->prim, std::move(kids));
        case TermKind::Score: return mk_score(kids[0]);
        default: return t;
    }
}

TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& v) {
    if (!std::binary_search(t->free_vars.begin(), t->free_vars.end(), x)) return t;
    if (t->kind == TermKind::Var) return v;
    TermPtr out = t;
    for (std::size_t i = 0; i < t->kids.size(); ++i) {
        TermPtr k = subst(t->kids[i], x, v);
        if (k != t->kids[i]) out = with_kid(out, i, std::move(k));
    }
    return out;
}

std::size_t term_size(const TermPtr& t) {
    std::size_t n = 1;
    for (const auto& k : t->kids) n += term_size(k);
    return n;
}

namespace {

// 0: binders/if, 2: sums, 3: products, 4: unary minus, 5: application, 6: atoms
int level(const TermPtr& t) {
    switch (t->kind) {
        case TermKind::Lambda:
        case TermKind::Fix:
        case TermKind::If: return 0;
        case TermKind::App: return 5;
        case TermKind::Lit: return t->lit->is_point() && t->lit->lo().sign() < 0 ? 4 : 6;
        case TermKind::Prim:
            if (t->prim->kind == PrimKind::Add || t->prim->kind == PrimKind::Sub) return 2;
            if (t->prim->kind == PrimKind::Mul) return 3;
            return 6;
        default: return 6;
    }
}

void print(std::ostream& os, const TermPtr& t, int ctx);

void print_at(std::ostream& os, const TermPtr& t, int ctx) {
    if (level(t) < ctx) {
        os << "(";
        print(os, t, 0);
        os << ")";
    } else {
        print(os, t, ctx);
    }
}

void print(std::ostream& os, const TermPtr& t, int ctx) {
    switch (t->kind) {
        case TermKind::Var: os << t->name; break;
        case TermKind::Lit:
            if (t->lit->is_point()) os << t->lit->lo().str();
            else os << "[" << t->lit->lo().str() << "," << t->lit->hi().str() << "]";
            break;
        case TermKind::Lambda:
            os << "fun (" << t->name << " : " << t->type->str() << ") -> ";
            print(os, t->kids[0], 0);
            break;
        case TermKind::Fix:
            os << "fix " << t->name << " (" << t->param << " : " << t->type->dom->str() << ") : " << t->type->cod->str()
               << " -> ";
            print(os, t->kids[0], 0);
            break;
        case TermKind::App:
            print_at(os, t->kids[0], 5);
            os << " ";
            print_at(os, t->kids[1], 6);
            break;
        case TermKind::If:
            os << "if ";
            print_at(os, t->kids[0], 2);
            os << " <= 0 then ";
            print_at(os, t->kids[1], 1);
            os << " else ";
            print(os, t->kids[2], 0);
            break;
        case TermKind::Prim: {
            PrimKind k = t->prim->kind;
            if (k == PrimKind::Add || k == PrimKind::Sub) {
                print_at(os, t->kids[0], 2);
                os << (k == PrimKind::Add ? " + " : " - ");
                print_at(os, t->kids[1], 3);
            } else if (k == PrimKind::Mul) {
                print_at(os, t->kids[0], 3);
                os << " * ";
                print_at(os, t->kids[1], 4);
            } else {
                os << t->prim->name << "(";
                for (std::size_t i = 0; i < t->kids.size(); ++i) {
                    if (i) os << ", ";
                    print(os, t->kids[i], 0);
                }
                os << ")";
            }
            break;
        }
        case TermKind::Sample: os << "sample"; break;
        case TermKind::Score:
            os << "score(";
            print(os, t->kids[0], 0);
            os << ")";
            break;
        case TermKind::SampleVar: os << "α" << t->index; break;
    }
    (void)ctx;
}

}  // namespace

std::string pretty(const TermPtr& t) {
    std::ostringstream os;
    print(os, t, 0);
    return os.str();
}

}  // namespace gbpi
