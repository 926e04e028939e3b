#include "gbpi/geometry.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace gbpi {

bool LinExpr::is_constant() const {
    return std::all_of(coef.begin(), coef.end(), [](const Rational& c) { return sgn(c) == 0; });
}

std::string LinExpr::str() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coef.size(); ++i) {
        if (sgn(coef[i]) == 0) continue;
        if (!first) os << " + ";
        os << to_decimal_string(coef[i]) << "*a" << (i + 1);
        first = false;
    }
    if (!first) os << " + ";
    os << constant;
    return os.str();
}

namespace {

bool point_constant(const LinExpr& e) { return e.is_constant() && e.constant.is_point() && e.constant.lo().finite(); }

LinExpr scale(LinExpr e, const Rational& c) {
    for (auto& x : e.coef) x *= c;
    e.constant = mul(e.constant, Interval::point(c));
    return e;
}

}  // namespace

std::optional<LinExpr> linearize(const TermPtr& v, int n) {
    LinExpr e;
    e.coef.assign(static_cast<std::size_t>(n), Rational(0));
    switch (v->kind) {
        case TermKind::Lit: e.constant = *v->lit; return e;
        case TermKind::SampleVar:
            if (v->index < 1 || v->index > n) return std::nullopt;
            e.coef[static_cast<std::size_t>(v->index - 1)] = 1;
            return e;
        case TermKind::Prim: break;
        default: return std::nullopt;
    }
    if (!v->has_svar) {
        e.constant = eval_symbolic(v, {});
        return e;
    }
    std::vector<LinExpr> args;
    switch (v->prim->kind) {
        case PrimKind::Add:
        case PrimKind::Sub:
        case PrimKind::Neg:
        case PrimKind::Mul:
            for (const auto& k : v->kids) {
                auto a = linearize(k, n);
                if (!a) return std::nullopt;
                args.push_back(std::move(*a));
            }
            break;
        default: return std::nullopt;
    }
    switch (v->prim->kind) {
        case PrimKind::Add:
            for (std::size_t i = 0; i < e.coef.size(); ++i) e.coef[i] = args[0].coef[i] + args[1].coef[i];
            e.constant = add(args[0].constant, args[1].constant);
            return e;
        case PrimKind::Sub:
            for (std::size_t i = 0; i < e.coef.size(); ++i) e.coef[i] = args[0].coef[i] - args[1].coef[i];
            e.constant = sub(args[0].constant, args[1].constant);
            return e;
        case PrimKind::Neg: return scale(std::move(args[0]), Rational(-1));
        case PrimKind::Mul:
            if (point_constant(args[0])) return scale(std::move(args[1]), args[0].constant.lo().value());
            if (point_constant(args[1])) return scale(std::move(args[0]), args[1].constant.lo().value());
            return std::nullopt;
        default: return std::nullopt;
    }
}

void HPolytope::add(std::vector<Rational> a, RowRel rel, Rational b) {
    bool zero = std::all_of(a.begin(), a.end(), [](const Rational& c) { return sgn(c) == 0; });
    if (zero) {
        bool ok = rel == RowRel::Le ? sgn(b) >= 0 : sgn(b) > 0;
        if (!ok) empty = true;
        return;
    }
    rows.push_back(Row{std::move(a), rel, std::move(b)});
}

bool HPolytope::contains(const std::vector<Rational>& x) const {
    if (empty) return false;
    for (int i = 0; i < dim; ++i)
        if (x[i] < 0 || x[i] > 1) return false;
    for (const auto& r : rows) {
        Rational s(0);
        for (int i = 0; i < dim; ++i) s += r.a[i] * x[i];
        if (r.rel == RowRel::Le ? s > r.b : s >= r.b) return false;
    }
    return true;
}

bool Bin::contains(const Rational& x) const {
    ExtReal v(x);
    if (v < range.lo()) return false;
    return open_hi ? v < range.hi() : v <= range.hi();
}

std::string Bin::str() const {
    return "[" + range.lo().str() + ", " + range.hi().str() + (open_hi ? ")" : "]");
}

namespace {

std::vector<Rational> negated(const std::vector<Rational>& a) {
    std::vector<Rational> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

// Adds "w·α + c ⋈ r" where c is a finite endpoint, or marks the polytope empty / skips the row
// when the endpoint is infinite.
void add_upper(HPolytope& p, const std::vector<Rational>& w, const ExtReal& c, RowRel rel, const ExtReal& r) {
    // w·α + c ⋈ r  with ⋈ in {<=, <}
    if (r.is_pos_inf() || c.is_neg_inf()) return;
    if (c.is_pos_inf() || r.is_neg_inf()) {
        p.empty = true;
        return;
    }
    p.add(w, rel, r.value() - c.value());
}

void add_lower(HPolytope& p, const std::vector<Rational>& w, const ExtReal& c, RowRel rel, const ExtReal& r) {
    // w·α + c ⋈ r  with ⋈ in {>=, >}, stored as -w·α ⋈' c - r
    if (r.is_neg_inf() || c.is_pos_inf()) return;
    if (c.is_neg_inf() || r.is_pos_inf()) {
        p.empty = true;
        return;
    }
    p.add(negated(w), rel, c.value() - r.value());
}

LinExpr require_linear(const TermPtr& v, int n) {
    auto e = linearize(v, n);
    if (!e) throw NotLinear("not interval-linear: " + pretty(v));
    return *e;
}

}  // namespace

PolytopePair build_polytopes(const SymPath& path, const Interval& U) { return build_polytopes(path, Bin{U, false}); }

PolytopePair build_polytopes(const SymPath& path, const Bin& U) {
    PolytopePair out;
    out.lb.dim = out.ub.dim = path.n;
    for (const auto& c : path.delta) {
        LinExpr e = require_linear(c.value, path.n);
        ExtReal r(c.threshold);
        const ExtReal& a = e.constant.lo();
        const ExtReal& b = e.constant.hi();
        switch (c.rel) {
            case Rel::Le:
                add_upper(out.lb, e.coef, b, RowRel::Le, r);
                add_upper(out.ub, e.coef, a, RowRel::Le, r);
                break;
            case Rel::Lt:
                add_upper(out.lb, e.coef, b, RowRel::Lt, r);
                add_upper(out.ub, e.coef, a, RowRel::Lt, r);
                break;
            case Rel::Gt:
                add_lower(out.lb, e.coef, a, RowRel::Lt, r);
                add_lower(out.ub, e.coef, b, RowRel::Lt, r);
                break;
            case Rel::Ge:
                add_lower(out.lb, e.coef, a, RowRel::Le, r);
                add_lower(out.ub, e.coef, b, RowRel::Le, r);
                break;
        }
    }
    LinExpr v = require_linear(path.value, path.n);
    const ExtReal& a = v.constant.lo();
    const ExtReal& b = v.constant.hi();
    RowRel hi_rel = U.open_hi ? RowRel::Lt : RowRel::Le;
    // inside: a >= lo and b <= hi
    add_lower(out.lb, v.coef, a, RowRel::Le, U.range.lo());
    add_upper(out.lb, v.coef, b, hi_rel, U.range.hi());
    // meets: b >= lo and a <= hi
    add_lower(out.ub, v.coef, b, RowRel::Le, U.range.lo());
    add_upper(out.ub, v.coef, a, hi_rel, U.range.hi());
    return out;
}

// ---------------------------------------------------------------- simplex

namespace {

class Simplex {
public:
    Simplex(const HPolytope& p) : n_(p.dim) {
        std::vector<std::pair<std::vector<Rational>, Rational>> rows;
        for (const auto& r : p.rows) rows.emplace_back(r.a, r.b);
        for (int i = 0; i < n_; ++i) {
            std::vector<Rational> a(static_cast<std::size_t>(n_), Rational(0));
            a[static_cast<std::size_t>(i)] = 1;
            rows.emplace_back(std::move(a), Rational(1));
        }
        m_ = static_cast<int>(rows.size());
        int arts = 0;
        for (const auto& r : rows)
            if (sgn(r.second) < 0) ++arts;
        art_begin_ = n_ + m_;
        cols_ = n_ + m_ + arts;
        T_.assign(static_cast<std::size_t>(m_), std::vector<Rational>(static_cast<std::size_t>(cols_ + 1), Rational(0)));
        basis_.resize(static_cast<std::size_t>(m_));
        int art = art_begin_;
        for (int i = 0; i < m_; ++i) {
            auto& row = T_[static_cast<std::size_t>(i)];
            const auto& [a, b] = rows[static_cast<std::size_t>(i)];
            bool flip = sgn(b) < 0;
            for (int j = 0; j < n_; ++j) row[static_cast<std::size_t>(j)] = flip ? -a[static_cast<std::size_t>(j)] : a[static_cast<std::size_t>(j)];
            row[static_cast<std::size_t>(n_ + i)] = flip ? -1 : 1;
            row[static_cast<std::size_t>(cols_)] = flip ? -b : b;
            if (flip) {
                row[static_cast<std::size_t>(art)] = 1;
                basis_[static_cast<std::size_t>(i)] = art++;
            } else {
                basis_[static_cast<std::size_t>(i)] = n_ + i;
            }
        }
    }

    bool feasible() {
        if (cols_ == art_begin_) return true;
        std::vector<Rational> c(static_cast<std::size_t>(cols_), Rational(0));
        for (int j = art_begin_; j < cols_; ++j) c[static_cast<std::size_t>(j)] = -1;
        Rational v = optimize(c, cols_);
        if (sgn(v) < 0) return false;
        // drive zero-level artificials out of the basis
        for (int i = 0; i < static_cast<int>(basis_.size()); ++i) {
            if (basis_[static_cast<std::size_t>(i)] < art_begin_) continue;
            int col = -1;
            for (int j = 0; j < art_begin_; ++j)
                if (sgn(T_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) != 0) {
                    col = j;
                    break;
                }
            if (col >= 0) {
                pivot(i, col);
            } else {
                T_.erase(T_.begin() + i);
                basis_.erase(basis_.begin() + i);
                --i;
            }
        }
        return true;
    }

    Rational maximize(const std::vector<Rational>& obj) {
        std::vector<Rational> c(static_cast<std::size_t>(cols_), Rational(0));
        for (int j = 0; j < n_; ++j) c[static_cast<std::size_t>(j)] = obj[static_cast<std::size_t>(j)];
        return optimize(c, art_begin_);
    }

private:
    int n_, m_, cols_, art_begin_;
    std::vector<std::vector<Rational>> T_;
    std::vector<int> basis_;

    void pivot(int r, int c) {
        auto& pr = T_[static_cast<std::size_t>(r)];
        Rational inv = 1 / pr[static_cast<std::size_t>(c)];
        for (auto& x : pr) x *= inv;
        for (std::size_t i = 0; i < T_.size(); ++i) {
            if (static_cast<int>(i) == r) continue;
            Rational f = T_[i][static_cast<std::size_t>(c)];
            if (sgn(f) == 0) continue;
            for (std::size_t j = 0; j < pr.size(); ++j)
                if (sgn(pr[j]) != 0) T_[i][j] -= f * pr[j];
        }
        basis_[static_cast<std::size_t>(r)] = c;
    }

    // Maximizes c·x over columns [0, usable); Bland's rule.
    Rational optimize(const std::vector<Rational>& c, int usable) {
        for (;;) {
            std::vector<Rational> cb(T_.size());
            for (std::size_t i = 0; i < T_.size(); ++i) cb[i] = c[static_cast<std::size_t>(basis_[i])];
            int enter = -1;
            for (int j = 0; j < usable && enter < 0; ++j) {
                Rational red = c[static_cast<std::size_t>(j)];
                for (std::size_t i = 0; i < T_.size(); ++i)
                    if (sgn(cb[i]) != 0) red -= cb[i] * T_[i][static_cast<std::size_t>(j)];
                if (sgn(red) > 0) enter = j;
            }
            if (enter < 0) {
                Rational v(0);
                for (std::size_t i = 0; i < T_.size(); ++i) v += cb[i] * T_[i][static_cast<std::size_t>(cols_)];
                return v;
            }
            int leave = -1;
            Rational best;
            for (std::size_t i = 0; i < T_.size(); ++i) {
                const Rational& a = T_[i][static_cast<std::size_t>(enter)];
                if (sgn(a) <= 0) continue;
                Rational ratio = T_[i][static_cast<std::size_t>(cols_)] / a;
                if (leave < 0 || ratio < best ||
                    (ratio == best && basis_[i] < basis_[static_cast<std::size_t>(leave)])) {
                    leave = static_cast<int>(i);
                    best = ratio;
                }
            }
            if (leave < 0) throw std::logic_error("unbounded LP over a bounded polytope");
            pivot(leave, enter);
        }
    }
};

}  // namespace

std::optional<Rational> lp_max(const HPolytope& p, const std::vector<Rational>& c) {
    if (p.empty) return std::nullopt;
    Simplex s(p);
    if (!s.feasible()) return std::nullopt;
    return s.maximize(c);
}

std::optional<Interval> lp_bound(const HPolytope& p, const LinExpr& e) {
    if (p.empty) return std::nullopt;
    Simplex s(p);
    if (!s.feasible()) return std::nullopt;
    Rational hi = s.maximize(e.coef);
    Rational lo = -s.maximize(negated(e.coef));
    return add(Interval(lo, hi), e.constant);
}

// ---------------------------------------------------------------- volume

namespace {

struct VRow {
    std::vector<Rational> a;
    Rational b;
};

struct VPoly {
    std::vector<Rational> lo, hi;
    std::vector<VRow> rows;
    int dim() const { return static_cast<int>(lo.size()); }
};

enum class Shape { Empty, Flat, Solid };

constexpr int kPropagationRounds = 4;

Shape normalize(VPoly& p) {
    const int d = p.dim();
    for (int round = 0; round < kPropagationRounds; ++round) {
        bool changed = false;
        for (const auto& r : p.rows) {
            Rational minsum(0);
            for (int k = 0; k < d; ++k) {
                int s = sgn(r.a[k]);
                if (s > 0) minsum += r.a[k] * p.lo[k];
                else if (s < 0) minsum += r.a[k] * p.hi[k];
            }
            for (int j = 0; j < d; ++j) {
                int s = sgn(r.a[j]);
                if (s == 0) continue;
                Rational own = s > 0 ? r.a[j] * p.lo[j] : r.a[j] * p.hi[j];
                Rational bound = (r.b - (minsum - own)) / r.a[j];
                if (s > 0 && bound < p.hi[j]) {
                    p.hi[j] = bound;
                    changed = true;
                } else if (s < 0 && bound > p.lo[j]) {
                    p.lo[j] = bound;
                    changed = true;
                }
                if (p.lo[j] > p.hi[j]) return Shape::Empty;
            }
        }
        if (!changed) break;
    }
    bool flat = false;
    for (int j = 0; j < d; ++j) {
        if (p.lo[j] > p.hi[j]) return Shape::Empty;
        if (p.lo[j] == p.hi[j]) flat = true;
    }
    std::vector<VRow> kept;
    for (auto& r : p.rows) {
        Rational mx(0), mn(0);
        int nz = 0, first = -1;
        for (int k = 0; k < d; ++k) {
            int s = sgn(r.a[k]);
            if (s == 0) continue;
            if (first < 0) first = k;
            ++nz;
            mx += r.a[k] * (s > 0 ? p.hi[k] : p.lo[k]);
            mn += r.a[k] * (s > 0 ? p.lo[k] : p.hi[k]);
        }
        if (nz == 0) {
            if (sgn(r.b) < 0) return Shape::Empty;
            continue;
        }
        if (mn > r.b) return Shape::Empty;
        if (mx <= r.b) continue;
        if (nz == 1) continue;  // already absorbed into the bounds
        Rational scalev = abs(r.a[first]);
        if (scalev != 1) {
            for (auto& x : r.a) x /= scalev;
            r.b /= scalev;
        }
        kept.push_back(std::move(r));
    }
    std::sort(kept.begin(), kept.end(), [](const VRow& x, const VRow& y) {
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    std::vector<VRow> uniq;
    for (auto& r : kept)
        if (uniq.empty() || uniq.back().a != r.a) uniq.push_back(std::move(r));
    p.rows = std::move(uniq);
    return flat ? Shape::Flat : Shape::Solid;
}

class VolumeCache {
public:
    std::optional<Rational> get(const std::string& k) {
        std::lock_guard<std::mutex> lock(m_);
        auto it = map_.find(k);
        if (it == map_.end()) return std::nullopt;
        return it->second;
    }
    void put(const std::string& k, const Rational& v) {
        std::lock_guard<std::mutex> lock(m_);
        if (map_.size() >= kMaxEntries) map_.clear();
        map_.emplace(k, v);
    }
    void clear() {
        std::lock_guard<std::mutex> lock(m_);
        map_.clear();
    }
    std::size_t size() {
        std::lock_guard<std::mutex> lock(m_);
        return map_.size();
    }

private:
    static constexpr std::size_t kMaxEntries = 1'000'000;
    std::mutex m_;
    std::unordered_map<std::string, Rational> map_;
};

VolumeCache& cache() {
    static VolumeCache c;
    return c;
}

Rational volume_rec(VPoly p, int max_dim, bool* relaxed = nullptr);

// p is normalized, connected through its rows, and shifted so that lo = 0.
Rational lasserre(const VPoly& p, int max_dim) {
    const int d = p.dim();
    if (d > max_dim)
        throw DimensionCap("polytope block of dimension " + std::to_string(d) + " exceeds the cap of " +
                           std::to_string(max_dim));
    std::string key;
    {
        std::ostringstream os;
        os << d;
        for (const auto& h : p.hi) os << ' ' << h.get_str();
        for (const auto& r : p.rows) {
            os << '|';
            for (const auto& a : r.a) os << a.get_str() << ',';
            os << r.b.get_str();
        }
        key = os.str();
    }
    if (auto hit = cache().get(key)) return *hit;

    Rational sum(0);
    // facets x_j = hi_j
    for (int j = 0; j < d; ++j) {
        if (sgn(p.hi[j]) == 0) continue;
        VPoly f;
        for (int k = 0; k < d; ++k)
            if (k != j) {
                f.lo.push_back(p.lo[k]);
                f.hi.push_back(p.hi[k]);
            }
        for (const auto& r : p.rows) {
            VRow nr;
            for (int k = 0; k < d; ++k)
                if (k != j) nr.a.push_back(r.a[k]);
            nr.b = r.b - r.a[j] * p.hi[j];
            f.rows.push_back(std::move(nr));
        }
        sum += p.hi[j] * volume_rec(std::move(f), max_dim);
    }
    // facets a_i·x = b_i, projected along the first variable (coefficient ±1)
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
        const VRow& ri = p.rows[i];
        if (sgn(ri.b) == 0) continue;
        int j = 0;
        while (sgn(ri.a[j]) == 0) ++j;
        const Rational& aij = ri.a[j];
        VPoly f;
        for (int k = 0; k < d; ++k)
            if (k != j) {
                f.lo.push_back(p.lo[k]);
                f.hi.push_back(p.hi[k]);
            }
        // x_j = (b_i - Σ a_ik x_k) / a_ij
        auto substitute = [&](const std::vector<Rational>& a, const Rational& b) {
            VRow nr;
            Rational c = a[j] / aij;
            for (int k = 0; k < d; ++k)
                if (k != j) nr.a.push_back(a[k] - c * ri.a[k]);
            nr.b = b - c * ri.b;
            return nr;
        };
        for (std::size_t r = 0; r < p.rows.size(); ++r)
            if (r != i) f.rows.push_back(substitute(p.rows[r].a, p.rows[r].b));
        std::vector<Rational> unit(static_cast<std::size_t>(d), Rational(0));
        unit[static_cast<std::size_t>(j)] = 1;
        f.rows.push_back(substitute(unit, p.hi[j]));
        unit[static_cast<std::size_t>(j)] = -1;
        f.rows.push_back(substitute(unit, -p.lo[j]));
        sum += ri.b / abs(aij) * volume_rec(std::move(f), max_dim);
    }
    Rational v = sum / d;
    cache().put(key, v);
    return v;
}

// Keeps only rows supported on a greedily grown set of at most max_dim variables; the result contains p.
VPoly relax(VPoly p, int max_dim) {
    const int d = p.dim();
    auto support = [&](const VRow& r) {
        std::vector<int> s;
        for (int k = 0; k < d; ++k)
            if (sgn(r.a[k]) != 0) s.push_back(k);
        return s;
    };
    std::vector<std::size_t> order(p.rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return support(p.rows[x]).size() < support(p.rows[y]).size(); });
    std::vector<char> chosen(static_cast<std::size_t>(d), 0);
    int count = 0;
    std::vector<VRow> kept;
    for (std::size_t i : order) {
        auto s = support(p.rows[i]);
        int extra = 0;
        for (int k : s) extra += chosen[k] ? 0 : 1;
        if (count + extra > max_dim) continue;
        for (int k : s)
            if (!chosen[k]) chosen[k] = 1;
        count += extra;
        kept.push_back(p.rows[i]);
    }
    p.rows = std::move(kept);
    return p;
}

Rational volume_rec(VPoly p, int max_dim, bool* relaxed) {
    const int d = p.dim();
    if (d == 0) {
        for (const auto& r : p.rows)
            if (sgn(r.b) < 0) return Rational(0);
        return Rational(1);
    }
    Shape s = normalize(p);
    if (s != Shape::Solid) return Rational(0);
    // connected blocks of variables linked by rows
    std::vector<int> parent(static_cast<std::size_t>(d));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<char> used(static_cast<std::size_t>(d), 0);
    for (const auto& r : p.rows) {
        int first = -1;
        for (int k = 0; k < d; ++k) {
            if (sgn(r.a[k]) == 0) continue;
            used[k] = 1;
            if (first < 0) first = k;
            else parent[find(k)] = find(first);
        }
    }
    Rational result(1);
    std::vector<std::vector<int>> blocks;
    std::vector<int> block_of(static_cast<std::size_t>(d), -1);
    for (int k = 0; k < d; ++k) {
        if (!used[k]) {
            result *= p.hi[k] - p.lo[k];
            continue;
        }
        int root = find(k);
        if (block_of[root] < 0) {
            block_of[root] = static_cast<int>(blocks.size());
            blocks.emplace_back();
        }
        blocks[block_of[root]].push_back(k);
    }
    for (const auto& vars : blocks) {
        if (sgn(result) == 0) break;
        VPoly q;
        for (int k : vars) {
            q.lo.push_back(Rational(0));
            q.hi.push_back(p.hi[k] - p.lo[k]);
        }
        int root = find(vars[0]);
        for (const auto& r : p.rows) {
            int first = 0;
            while (sgn(r.a[first]) == 0) ++first;
            if (find(first) != root) continue;
            VRow nr;
            nr.b = r.b;
            for (int k : vars) {
                nr.a.push_back(r.a[k]);
                nr.b -= r.a[k] * p.lo[k];
            }
            q.rows.push_back(std::move(nr));
        }
        if (relaxed && q.dim() > max_dim) {
            *relaxed = true;
            result *= volume_rec(relax(std::move(q), max_dim), max_dim);
        } else {
            result *= lasserre(q, max_dim);
        }
    }
    return result;
}

}  // namespace

Rational volume(const HPolytope& p, const VolumeOptions& opt) {
    if (p.empty) return Rational(0);
    VPoly v;
    v.lo.assign(static_cast<std::size_t>(p.dim), Rational(0));
    v.hi.assign(static_cast<std::size_t>(p.dim), Rational(1));
    for (const auto& r : p.rows) v.rows.push_back(VRow{r.a, r.b});
    return volume_rec(std::move(v), opt.max_dim);
}

VolumeBounds volume_bounds(const HPolytope& p, const VolumeOptions& opt) {
    if (p.empty) return {Rational(0), Rational(0), false};
    VPoly v;
    v.lo.assign(static_cast<std::size_t>(p.dim), Rational(0));
    v.hi.assign(static_cast<std::size_t>(p.dim), Rational(1));
    for (const auto& r : p.rows) v.rows.push_back(VRow{r.a, r.b});
    bool relaxed = false;
    Rational u = volume_rec(std::move(v), opt.max_dim, &relaxed);
    if (relaxed) return {Rational(0), u, true};
    return {u, u, false};
}

void clear_volume_cache() { cache().clear(); }
std::size_t volume_cache_size() { return cache().size(); }

}  // namespace gbpi
