#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbpi/bounds.hpp"
#include "gbpi/concrete.hpp"

namespace gbpi {

struct RunConfig {
    std::string program;
    Rational lo{0}, hi{1};
    int bins = 20;
    BoundsOptions bounds;
    std::uint64_t seed = 1;
    std::size_t samples = 100'000;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Throws ConfigError unless bins >= 1, lo < hi and every count is positive.
void check_config(const RunConfig& cfg);

// "LO:HI" with decimal endpoints.
std::pair<Rational, Rational> parse_range(const std::string& text);

// Header bin_lo,bin_hi,unnorm_lb,unnorm_ub,norm_lb,norm_ub; last row Z,,lb,ub,,.
// Lower bounds are rounded down and upper bounds up before printing.
std::string bounds_csv(const BinnedBounds& b);

struct CsvRow {
    double bin_lo = 0, bin_hi = 0;
    double lb = 0, ub = 0, norm_lb = 0, norm_ub = 1;
};
struct CsvBounds {
    std::vector<CsvRow> bins;
    double z_lb = 0, z_ub = 0;
};
struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
CsvBounds read_bounds_csv(std::istream& in);

// Histogram of normalized bounds: a bar up to norm_lb and a whisker up to norm_ub per bin.
std::string render_svg(const CsvBounds& b);

// One value<TAB>weight pair per line; weight defaults to 1; '#' starts a comment.
std::vector<WeightedSample> read_sample_file(std::istream& in);

struct BinCheck {
    std::string label;
    double estimate = 0, sigma = 0;
    double lb = 0, ub = 0;
    bool pass = true;
};

struct Validation {
    bool normalized = false;  // sample files are compared against normalized bounds
    std::vector<BinCheck> checks;  // one per bin, then Z for unnormalized checks
    bool pass = true;
    std::size_t truncated = 0;
};

// Sandwich check at 3 sigma. With no hits in a bin the spread is floored at one sample's share.
Validation validate_unnormalized(const BinnedBounds& b, const std::vector<WeightedSample>& s);
Validation validate_normalized(const BinnedBounds& b, const std::vector<WeightedSample>& s);

std::string validation_report(const Validation& v);

}  // namespace gbpi
