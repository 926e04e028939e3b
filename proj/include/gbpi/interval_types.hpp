#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gbpi/term.hpp"

namespace gbpi {

struct WeightedType;

struct WeightlessType {
    bool arrow = false;
    LatticeInterval base;  // when !arrow
    std::shared_ptr<const WeightlessType> dom;
    std::shared_ptr<const WeightedType> cod;

    std::string str() const;
};
using WeightlessTypePtr = std::shared_ptr<const WeightlessType>;

struct WeightedType {
    WeightlessTypePtr value;
    LatticeInterval weight;

    std::string str() const;
};
using WeightedTypePtr = std::shared_ptr<const WeightedType>;

// Symbolic types over interval variables (numbered from 0).
struct SymWeighted;
struct SymType {
    int var = -1;  // base types
    std::shared_ptr<const SymType> dom;
    std::shared_ptr<const SymWeighted> cod;
    bool arrow() const { return dom != nullptr; }
};
using SymTypePtr = std::shared_ptr<const SymType>;

struct SymWeighted {
    SymTypePtr type;
    int weight = -1;
};
using SymWeightedPtr = std::shared_ptr<const SymWeighted>;

enum class ConstraintKind { Const, Sub, Fun };
enum class FunOp { Prim, Product, MeetNonneg };

struct TypeConstraint {
    ConstraintKind kind;
    int target = -1;
    Interval value = Interval::one();  // Const
    int source = -1;                   // Sub: source ⊑ target
    FunOp op = FunOp::Prim;            // Fun: target ≡ op(args)
    PrimPtr prim;
    std::vector<int> args;

    std::string str() const;
};

using SymEnv = std::map<std::string, SymTypePtr>;

struct ConstraintSystem {
    SymWeightedPtr type;
    std::vector<TypeConstraint> constraints;
    int var_count = 0;
    // Symbolic type of every Fix node, in pre-order of occurrence.
    std::vector<SymWeightedPtr> fix_types;
    std::vector<TermPtr> fix_terms;
};

ConstraintSystem generate_constraints(const SymEnv& env, const TermPtr& t);
ConstraintSystem generate_constraints(const TermPtr& t);

using Assignment = std::vector<LatticeInterval>;

struct SolveOptions {
    int widening_delay = 2;
    std::size_t max_updates = 1'000'000;
};

struct SolveStats {
    std::size_t evaluations = 0;
    std::size_t updates = 0;
};

Assignment solve(const std::vector<TypeConstraint>& cs, int var_count, const SolveOptions& opt = {},
                 SolveStats* stats = nullptr);

// Index of the first violated constraint, or -1.
int first_violation(const std::vector<TypeConstraint>& cs, const Assignment& a);

WeightlessTypePtr concretize(const SymTypePtr& k, const Assignment& a);
WeightedTypePtr concretize(const SymWeightedPtr& k, const Assignment& a);

WeightedTypePtr infer_type(const TermPtr& t, const SolveOptions& opt = {});

struct TypeReport {
    WeightedTypePtr program;
    std::vector<std::pair<TermPtr, WeightedTypePtr>> fixpoints;
};
TypeReport infer_types_with_fixpoints(const TermPtr& t, const SolveOptions& opt = {});

}  // namespace gbpi
