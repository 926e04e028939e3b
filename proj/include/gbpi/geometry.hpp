#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "gbpi/symbolic.hpp"

namespace gbpi {

// w·α + constant over sample variables α1..αn.
struct LinExpr {
    std::vector<Rational> coef;
    Interval constant = Interval::point(Rational(0));

    bool is_constant() const;
    std::string str() const;
};

// Nullopt unless v is built from sample variables, literals, add, sub, neg and products with a point literal.
std::optional<LinExpr> linearize(const TermPtr& v, int n);

enum class RowRel { Le, Lt };

struct Row {
    std::vector<Rational> a;
    RowRel rel = RowRel::Le;
    Rational b;
};

// {x in [0,1]^dim : every row a·x ⋈ b}.
struct HPolytope {
    int dim = 0;
    std::vector<Row> rows;
    bool empty = false;  // set when a constant row fails

    void add(std::vector<Rational> a, RowRel rel, Rational b);
    bool contains(const std::vector<Rational>& x) const;
};

struct NotLinear : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionCap : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Value-membership target; open_hi makes the upper end exclusive.
struct Bin {
    Interval range;
    bool open_hi = false;

    bool contains(const Rational& x) const;
    std::string str() const;
};

struct PolytopePair {
    HPolytope lb, ub;
};

// Rows for "constraint holds for all / some values of the interval constant" and for the
// result value lying inside / meeting the bin.
PolytopePair build_polytopes(const SymPath& path, const Bin& U);
PolytopePair build_polytopes(const SymPath& path, const Interval& U);

// Exact range of the linear part of e over p, plus e's constant; nullopt when p is empty.
std::optional<Interval> lp_bound(const HPolytope& p, const LinExpr& e);
// Exact optimum of c·x over p; nullopt when p is empty.
std::optional<Rational> lp_max(const HPolytope& p, const std::vector<Rational>& c);

struct VolumeOptions {
    int max_dim = 10;
};

// Exact Lebesgue volume; throws DimensionCap when an irreducible block exceeds max_dim variables.
Rational volume(const HPolytope& p, const VolumeOptions& opt = {});

struct VolumeBounds {
    Rational lower, upper;
    bool relaxed = false;
};

// Exact when every block is within the cap. Otherwise over-cap blocks lose rows until they fit,
// which keeps the upper bound sound, and the lower bound drops to 0.
VolumeBounds volume_bounds(const HPolytope& p, const VolumeOptions& opt = {});

void clear_volume_cache();
std::size_t volume_cache_size();

}  // namespace gbpi
