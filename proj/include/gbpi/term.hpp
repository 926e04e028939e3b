#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gbpi/interval.hpp"
#include "gbpi/primitives.hpp"

namespace gbpi {

struct SimpleType;
using TypePtr = std::shared_ptr<const SimpleType>;

struct SimpleType {
    bool arrow = false;
    TypePtr dom, cod;

    static TypePtr real();
    static TypePtr fn(TypePtr d, TypePtr c);
    std::string str() const;
};

bool same_type(const SimpleType& a, const SimpleType& b);

// SampleVar only occurs in symbolic terms; Lit holds an interval (a point in source programs).
enum class TermKind { Var, Lit, Lambda, Fix, App, If, Prim, Sample, Score, SampleVar };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    TermKind kind;
    std::string name;   // Var, Lambda parameter, Fix self name
    std::string param;  // Fix parameter
    TypePtr type;       // Lambda parameter type, Fix function type
    std::optional<Interval> lit;
    PrimPtr prim;
    std::vector<TermPtr> kids;  // App: fn,arg  If: guard,then,else  Prim: args  Score/Lambda/Fix: body
    int index = 0;              // SampleVar, 1-based

    std::vector<std::string> free_vars;  // sorted
    bool has_fix = false;
    bool has_svar = false;
    bool value = false;

    bool closed() const { return free_vars.empty(); }
    bool is_lit() const { return kind == TermKind::Lit; }
    // Ground symbolic value: literal, sample variable or delayed primitive.
    bool ground() const { return value && (kind == TermKind::Lit || kind == TermKind::SampleVar || kind == TermKind::Prim); }
};

TermPtr mk_var(std::string name);
TermPtr mk_lit(Interval v);
TermPtr mk_num(const Rational& r);
TermPtr mk_lambda(std::string param, TypePtr type, TermPtr body);
TermPtr mk_fix(std::string self, std::string param, TypePtr fn_type, TermPtr body);
TermPtr mk_app(TermPtr fn, TermPtr arg);
TermPtr mk_if(TermPtr guard, TermPtr then_branch, TermPtr else_branch);
TermPtr mk_prim(PrimPtr prim, std::vector<TermPtr> args);
TermPtr mk_prim(std::string_view name, std::vector<TermPtr> args);
TermPtr mk_sample();
TermPtr mk_score(TermPtr arg);
TermPtr mk_svar(int index);

// Same node with the i-th child replaced.
TermPtr with_kid(const TermPtr& t, std::size_t i, TermPtr kid);

// Capture is impossible because substituted values are closed.
TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& v);

// Concrete syntax accepted by the parser (for source programs).
std::string pretty(const TermPtr& t);

std::size_t term_size(const TermPtr& t);

}  // namespace gbpi
