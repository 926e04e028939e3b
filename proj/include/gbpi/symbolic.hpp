#pragma once

#include <stdexcept>
#include <vector>

#include "gbpi/interval_types.hpp"
#include "gbpi/term.hpp"

namespace gbpi {

enum class Rel { Le, Lt, Gt, Ge };

struct SymConstraint {
    TermPtr value;  // ground symbolic value
    Rel rel;
    Rational threshold;

    std::string str() const;
};

struct SymConfig {
    TermPtr term;
    int n = 0;
    std::vector<SymConstraint> delta;
    std::vector<TermPtr> xi;
};

struct SymPath {
    TermPtr value;
    int n = 0;
    std::vector<SymConstraint> delta;
    std::vector<TermPtr> xi;

    std::string str() const;
};

enum class SymStepStatus { Ok, Value, Dead, Stuck };

struct SymStepResult {
    SymStepStatus status;
    std::vector<SymConfig> next;
};

SymStepResult sym_step(SymConfig c);

// Encloses a ground symbolic value when each sample variable αi ranges over box[i-1].
Interval eval_symbolic(const TermPtr& v, const std::vector<Interval>& box);

enum class Truth { True, False, Unknown };
Truth decide(const SymConstraint& c, const std::vector<Interval>& box);
// Concrete check of a constraint at a point (exact arithmetic).
bool holds(const SymConstraint& c, const std::vector<Rational>& point);
Rational eval_concrete(const TermPtr& v, const std::vector<Rational>& point);

// Replaces every fixpoint by a constant function built from its inferred weighted type.
SymConfig approx_fix(const SymConfig& c);
TermPtr approx_fix_term(const TermPtr& t);

struct ResourceCap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExploreOptions {
    std::size_t depth = 2000;
    std::size_t max_paths = 2'000'000;
    bool simplify = true;
};

struct ExploreResult {
    std::vector<SymPath> paths;
    bool approximated = false;
    std::size_t dropped = 0;  // paths with a constraint that fails on the whole box
};

ExploreResult explore(const TermPtr& p, const ExploreOptions& opt = {});

// Drops constraints that hold on all of [0,1]^n; returns false when one fails everywhere.
bool simplify_path(SymPath& path);

}  // namespace gbpi
