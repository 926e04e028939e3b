#pragma once

#include <stdexcept>
#include <vector>

#include "gbpi/term.hpp"

namespace gbpi {

using IntervalTrace = std::vector<Interval>;

Rational trace_volume(const IntervalTrace& t);
std::string trace_str(const IntervalTrace& t);

struct IConfig {
    TermPtr term;
    std::size_t head = 0;
    Interval weight = Interval::one();
};

enum class IStepStatus { Ok, Value, Dead, NeedSample, Stuck };

struct IStepResult {
    IStepStatus status;
    std::vector<IConfig> next;  // two entries at an undecided guard
};

IStepResult istep(const IConfig& c, const IntervalTrace& t);

struct IOutcome {
    Interval value;
    Interval weight;
};

struct IRunOutcome {
    std::vector<IOutcome> results;
    // Some branch was stuck, dead, over budget, left trace unused, or was padded by its type.
    bool flagged = false;
    // Some branch wanted a sample beyond the end of the trace.
    bool exhausted = false;
    std::size_t steps = 0;
};

constexpr std::size_t kDefaultIntervalBudget = 100'000;

// Branches that run out of trace at a sample are closed off with the weighted type of the
// residual term (value from the type, weight [0, w_hi * type_hi]).
IRunOutcome irun(const TermPtr& p, const IntervalTrace& t, std::size_t budget = kDefaultIntervalBudget);

struct IncompatibleTraces : std::invalid_argument {
    std::size_t first, second;
    IncompatibleTraces(std::size_t a, std::size_t b, const std::string& msg);
};

struct NotExhaustive : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

bool compatible(const IntervalTrace& a, const IntervalTrace& b);
// Throws IncompatibleTraces naming the first offending pair.
void check_compatible(const std::vector<IntervalTrace>& ts);
// Structural certificate: the empty trace is present, or the first coordinates tile [0,1]
// and on every elementary segment the tails are again certified.
bool certify_exhaustive(const std::vector<IntervalTrace>& ts);

Rational lower_bound(const TermPtr& p, const std::vector<IntervalTrace>& ts, const Interval& U,
                     std::size_t budget = kDefaultIntervalBudget);
ExtReal upper_bound(const TermPtr& p, const std::vector<IntervalTrace>& ts, const Interval& U,
                    std::size_t budget = kDefaultIntervalBudget);

struct TraceBounds {
    Rational lower;
    ExtReal upper;
};
// Both bounds from one pass over the traces; the set must be compatible and certified exhaustive.
TraceBounds trace_bounds(const TermPtr& p, const std::vector<IntervalTrace>& ts, const Interval& U,
                         std::size_t budget = kDefaultIntervalBudget);

// Prefix-closed grid: traces are refined by `splits` equal pieces per sample actually drawn,
// following each branch until it terminates or `max_len` samples are fixed.
std::vector<IntervalTrace> adaptive_grid(const TermPtr& p, int splits, std::size_t max_len,
                                         std::size_t budget = kDefaultIntervalBudget);

}  // namespace gbpi
