#pragma once

#include <string>
#include <vector>

#include "gbpi/geometry.hpp"
#include "gbpi/symbolic.hpp"

namespace gbpi {

enum class Method { Auto, Interval, Linear };
enum class PathMethod { Linear, Interval, TypeOnly };

const char* method_name(Method m);
const char* method_name(PathMethod m);

struct PathBounds {
    Rational lower{0};
    ExtReal upper{0};
    PathMethod method = PathMethod::Linear;
    bool relaxed = false;  // some volume was over the dimension cap and only bounded from above
};

struct LinearOptions {
    int splits_expr = 64;
    std::size_t max_boxes = 4096;  // caps splits_expr^m for m tracked score arguments
    // With one score argument, neighbouring chunks whose weight bound is below this fraction of the
    // largest are merged and given lower bound 0. Zero disables merging.
    Rational merge_below = rat(1, 1000000);
    VolumeOptions volume;
};

struct IntervalOptions {
    int splits_var = 16;
    std::size_t max_cells = 1u << 15;  // per independent variable group; refinement adds as many again
};

// One entry per bin. Throws NotLinear or DimensionCap when the path is outside the linear fragment.
std::vector<PathBounds> analyze_path_linear(const SymPath& path, const std::vector<Bin>& bins,
                                            const LinearOptions& opt = {});
PathBounds analyze_path_linear(const SymPath& path, const Bin& bin, const LinearOptions& opt = {});

std::vector<PathBounds> analyze_path_interval(const SymPath& path, const std::vector<Bin>& bins,
                                              const IntervalOptions& opt = {});
PathBounds analyze_path_interval(const SymPath& path, const Bin& bin, const IntervalOptions& opt = {});

struct BoundsOptions {
    std::size_t depth = 2000;
    std::size_t max_paths = 2'000'000;
    Method method = Method::Auto;
    LinearOptions linear;
    IntervalOptions interval;
};

struct BinBounds {
    Bin bin;
    Rational lb{0};
    ExtReal ub{0};
    Rational norm_lb{0};
    Rational norm_ub{1};
};

struct BinnedBounds {
    std::vector<BinBounds> bins;
    Rational outside_lb{0};
    ExtReal outside_ub{0};
    Rational z_lb{0};
    ExtReal z_ub{0};

    std::size_t paths = 0;
    std::size_t linear_paths = 0;
    std::size_t interval_paths = 0;
    std::size_t typeonly_paths = 0;
    bool approximated = false;
    std::vector<std::string> warnings;
};

// N equal-width bins over [lo, hi]; all half-open except the last.
std::vector<Bin> make_bins(const Rational& lo, const Rational& hi, int n);
Bin point_bin(const Rational& x);

// Sums per-path bounds over the symbolic paths of p; normalized fields are left at (0, 1).
BinnedBounds aggregate(const TermPtr& p, const std::vector<Bin>& bins, const BoundsOptions& opt = {});
BinnedBounds normalize(BinnedBounds b);
BinnedBounds compute_bounds(const TermPtr& p, const std::vector<Bin>& bins, const BoundsOptions& opt = {});

}  // namespace gbpi
