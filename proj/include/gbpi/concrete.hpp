#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "gbpi/term.hpp"

namespace gbpi {

constexpr std::size_t kDefaultStepBudget = 1'000'000;

struct Config {
    TermPtr term;
    std::vector<Rational> trace;
    std::size_t head = 0;  // entries before head are consumed
    Rational weight{1};
};

// One CbV reduction step; nullopt when no rule applies (values included).
std::optional<Config> step(const Config& c);

enum class RunStatus { Terminated, Stuck, TraceMismatch, BudgetExceeded };

struct RunResult {
    RunStatus status = RunStatus::Stuck;
    Rational value;
    Rational weight;
    std::size_t steps = 0;
};

// Environment machine; agrees with iterating step (checked in tests) and is far cheaper.
RunResult run_on_trace(const TermPtr& p, const std::vector<Rational>& s, std::size_t budget = kDefaultStepBudget);
// Literal iteration of step.
RunResult run_by_steps(const TermPtr& p, const std::vector<Rational>& s, std::size_t budget = kDefaultStepBudget);

// Exact run drawing trace entries on demand; the drawn entries are appended to `drawn`.
RunResult run_lazy(const TermPtr& p, const std::function<Rational()>& draw, std::vector<Rational>& drawn,
                   std::size_t budget = kDefaultStepBudget);

struct WeightedSample {
    double value;
    double weight;  // 0 for stuck or truncated runs
    bool truncated;
};

std::vector<WeightedSample> importance_sample(const TermPtr& p, std::uint64_t seed, std::size_t n,
                                              std::size_t budget = kDefaultStepBudget);

struct Estimate {
    double estimate;
    double stderr_;
    std::size_t truncated;
};

Estimate estimate_measure(const TermPtr& p, const Interval& U, std::size_t n, std::uint64_t seed,
                          std::size_t budget = kDefaultStepBudget);
Estimate estimate_from_samples(const std::vector<WeightedSample>& samples, const Interval& U);

// Deterministic uniform stream in [0,1).
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace gbpi
