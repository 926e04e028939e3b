#include "gbpi/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "gbpi/parallel.hpp"

namespace gbpi {

const char* method_name(Method m) {
    switch (m) {
        case Method::Auto: return "auto";
        case Method::Interval: return "interval";
        case Method::Linear: return "linear";
    }
    return "?";
}

const char* method_name(PathMethod m) {
    switch (m) {
        case PathMethod::Linear: return "linear";
        case PathMethod::Interval: return "interval";
        case PathMethod::TypeOnly: return "typeonly";
    }
    return "?";
}

namespace {

bool inside(const Interval& v, const Bin& b) {
    if (v.lo() < b.range.lo()) return false;
    return b.open_hi ? v.hi() < b.range.hi() : v.hi() <= b.range.hi();
}

bool meets(const Interval& v, const Bin& b) {
    if (v.hi() < b.range.lo()) return false;
    return b.open_hi ? v.lo() < b.range.hi() : v.lo() <= b.range.hi();
}

std::optional<Interval> weight_meet(const Interval& w) { return meet(w, Interval::nonneg()); }

void collect_vars(const TermPtr& t, std::vector<int>& out) {
    if (!t->has_svar) return;
    if (t->kind == TermKind::SampleVar) {
        out.push_back(t->index - 1);
        return;
    }
    for (const auto& k : t->kids) collect_vars(k, out);
}

// Grid resolution per dimension so that s^d stays within the cap.
int grid_splits(int wanted, std::size_t d, std::size_t cap) {
    int s = std::max(1, wanted);
    while (s > 1 && std::pow(static_cast<double>(s), static_cast<double>(d)) > static_cast<double>(cap)) --s;
    return s;
}

// score factor f(Z1..Zk): each argument is a tracked linear form plus a constant, or a constant
struct Factor {
    PrimPtr f;  // null for the identity
    std::vector<int> slot;
    std::vector<Interval> konst;
};

}  // namespace

std::vector<PathBounds> analyze_path_linear(const SymPath& path, const std::vector<Bin>& bins, const LinearOptions& opt) {
    const int n = path.n;
    std::vector<PathBounds> out(bins.size(), PathBounds{Rational(0), ExtReal(0), PathMethod::Linear});

    Interval fixed = Interval::one();
    std::vector<std::vector<Rational>> tracked;
    std::vector<Factor> factors;
    auto track = [&](const LinExpr& e, Factor& fac) {
        if (e.is_constant()) {
            fac.slot.push_back(-1);
        } else {
            auto it = std::find(tracked.begin(), tracked.end(), e.coef);
            fac.slot.push_back(static_cast<int>(it - tracked.begin()));
            if (it == tracked.end()) tracked.push_back(e.coef);
        }
        fac.konst.push_back(e.constant);
    };
    for (const auto& xi : path.xi) {
        if (!xi->has_svar) {
            auto w = weight_meet(eval_symbolic(xi, {}));
            if (!w) return out;
            fixed = mul(fixed, *w);
            continue;
        }
        Factor fac;
        if (auto e = linearize(xi, n)) {
            track(*e, fac);
        } else if (xi->kind == TermKind::Prim) {
            fac.f = xi->prim;
            for (const auto& k : xi->kids) {
                auto e = linearize(k, n);
                if (!e) throw NotLinear("score argument is not interval-linear: " + pretty(k));
                track(*e, fac);
            }
        } else {
            throw NotLinear("score value is not a primitive of linear forms: " + pretty(xi));
        }
        factors.push_back(std::move(fac));
    }

    PolytopePair base = build_polytopes(path, Interval::whole());
    LinExpr value = *linearize(path.value, n);
    if (base.ub.empty) return out;
    auto vrange = lp_bound(base.ub, value);
    if (!vrange) return out;

    const std::size_t m = tracked.size();
    std::vector<Interval> range(m);
    for (std::size_t j = 0; j < m; ++j) {
        auto r = lp_bound(base.ub, LinExpr{tracked[j], Interval::point(Rational(0))});
        if (!r) return out;
        range[j] = *r;
    }
    int K = m == 0 ? 1 : grid_splits(opt.splits_expr, m, opt.max_boxes);
    std::vector<int> chunks(m);
    for (std::size_t j = 0; j < m; ++j) chunks[j] = range[j].is_point() ? 1 : K;

    std::vector<std::size_t> live;
    std::vector<PolytopePair> polys(bins.size());
    for (std::size_t b = 0; b < bins.size(); ++b) {
        if (!meets(*vrange, bins[b])) continue;
        polys[b] = build_polytopes(path, bins[b]);
        if (!polys[b].ub.empty) live.push_back(b);
    }
    if (live.empty()) return out;

    auto weight_of = [&](const std::vector<Interval>& box) -> std::optional<Interval> {
        Interval w = fixed;
        for (const auto& fac : factors) {
            std::vector<Interval> args;
            for (std::size_t k = 0; k < fac.slot.size(); ++k)
                args.push_back(fac.slot[k] < 0 ? fac.konst[k]
                                               : add(box[static_cast<std::size_t>(fac.slot[k])], fac.konst[k]));
            auto mw = weight_meet(fac.f ? lift_eval(*fac.f, args) : args[0]);
            if (!mw) return std::nullopt;
            w = mul(w, *mw);
        }
        if (w.hi().is_zero()) return std::nullopt;
        return w;
    };

    struct Region {
        std::vector<Interval> box;
        Interval weight;
        bool lower = true;
    };
    std::vector<Region> regions;
    std::vector<int> idx(m, 0);
    for (;;) {
        std::vector<Interval> box(m);
        for (std::size_t j = 0; j < m; ++j) {
            const Rational lo = range[j].lo().value();
            const Rational width = range[j].hi().value() - lo;
            box[j] = Interval(Rational(lo + width * idx[j] / chunks[j]), Rational(lo + width * (idx[j] + 1) / chunks[j]));
        }
        if (auto w = weight_of(box)) regions.push_back(Region{std::move(box), *w, true});
        std::size_t j = 0;
        while (j < m && ++idx[j] == chunks[j]) idx[j++] = 0;
        if (j == m) break;
    }

    // Adjacent chunks of a single score argument whose weight is negligible are analysed together.
    if (m == 1 && sgn(opt.merge_below) > 0 && regions.size() > 1) {
        ExtReal top(0);
        for (const auto& r : regions) top = ext_max(top, r.weight.hi());
        if (top.finite()) {
            Rational cut = top.value() * opt.merge_below;
            auto small = [&](const Region& r) { return r.weight.hi() <= ExtReal(cut); };
            std::vector<Region> merged;
            for (auto& r : regions) {
                if (small(r) && !merged.empty() && !merged.back().lower && small(merged.back()) &&
                    merged.back().box[0].hi() == r.box[0].lo()) {
                    Region& last = merged.back();
                    last.box[0] = Interval(last.box[0].lo(), r.box[0].hi());
                    last.weight = hull(last.weight, r.weight);
                    continue;
                }
                if (small(r)) r.lower = false;
                merged.push_back(std::move(r));
            }
            regions = std::move(merged);
        }
    }

    for (const auto& region : regions) {
        std::vector<Row> rows;
        for (std::size_t j = 0; j < m; ++j) {
            if (region.box[j] == range[j]) continue;
            rows.push_back(Row{tracked[j], RowRel::Le, region.box[j].hi().value()});
            std::vector<Rational> neg(tracked[j].size());
            for (std::size_t k = 0; k < neg.size(); ++k) neg[k] = -tracked[j][k];
            rows.push_back(Row{std::move(neg), RowRel::Le, -region.box[j].lo().value()});
        }
        std::optional<Interval> vbox = vrange;
        if (!rows.empty()) {
            HPolytope pb = base.ub;
            for (const auto& r : rows) pb.rows.push_back(r);
            vbox = lp_bound(pb, value);
            if (!vbox) continue;
        }
        const Rational wlo = region.lower ? region.weight.lo().value() : Rational(0);
        for (std::size_t b : live) {
            if (!meets(*vbox, bins[b])) continue;
            HPolytope pu = polys[b].ub;
            for (const auto& r : rows) pu.rows.push_back(r);
            VolumeBounds vb = volume_bounds(pu, opt.volume);
            if (vb.relaxed) out[b].relaxed = true;
            const Rational& vu = vb.upper;
            if (sgn(vu) == 0) continue;
            out[b].upper = out[b].upper + region.weight.hi() * ExtReal(vu);
            if (sgn(wlo) > 0 && !polys[b].lb.empty) {
                HPolytope pl = polys[b].lb;
                for (const auto& r : rows) pl.rows.push_back(r);
                VolumeBounds lb = volume_bounds(pl, opt.volume);
                if (lb.relaxed) out[b].relaxed = true;
                out[b].lower += wlo * lb.lower;
            }
        }
    }
    return out;
}

PathBounds analyze_path_linear(const SymPath& path, const Bin& bin, const LinearOptions& opt) {
    return analyze_path_linear(path, std::vector<Bin>{bin}, opt)[0];
}

namespace {

struct Cell {
    std::vector<Interval> box;
    Rational vol;
    bool dead = false;
    bool certain = true;
    Rational wlo;
    ExtReal whi;
    Interval value;
    bool alive = true;
};

struct Group {
    std::vector<int> vars;
    std::vector<std::size_t> constraints;
    std::vector<std::size_t> xis;
    bool has_value = false;
};

struct GroupResult {
    std::vector<Rational> lb;
    std::vector<ExtReal> ub;
    bool coarse = false;
};

class GroupAnalysis {
public:
    GroupAnalysis(const SymPath& path, const Group& g, const std::vector<Bin>& bins, const IntervalOptions& opt)
        : path_(path), g_(g), bins_(bins), opt_(opt) {}

    GroupResult run() {
        const std::size_t d = g_.vars.size();
        const int s = grid_splits(opt_.splits_var, d, opt_.max_cells);
        std::vector<int> idx(d, 0);
        for (;;) {
            Cell c;
            c.box.assign(static_cast<std::size_t>(path_.n), Interval::unit());
            for (std::size_t k = 0; k < d; ++k)
                c.box[static_cast<std::size_t>(g_.vars[k])] = Interval(rat(idx[k], static_cast<unsigned long>(s)),
                                                                       rat(idx[k] + 1, static_cast<unsigned long>(s)));
            add_cell(std::move(c));
            std::size_t k = 0;
            while (k < d && ++idx[k] == s) idx[k++] = 0;
            if (k == d) break;
        }
        std::size_t budget = cells_.size();
        while (budget > 0 && !queue_.empty()) {
            std::size_t i = queue_.top().second;
            queue_.pop();
            --budget;
            bisect(i);
        }
        std::size_t nb = g_.has_value ? bins_.size() : 1;
        GroupResult r{std::vector<Rational>(nb, Rational(0)), std::vector<ExtReal>(nb, ExtReal(0)), s == 1 && d > 0};
        for (const auto& c : cells_) {
            if (!c.alive || c.dead) continue;
            for (std::size_t b = 0; b < nb; ++b) {
                bool in = !g_.has_value || inside(c.value, bins_[b]);
                bool hit = !g_.has_value || meets(c.value, bins_[b]);
                if (hit) r.ub[b] = r.ub[b] + ExtReal(c.vol) * c.whi;
                if (in && c.certain) r.lb[b] += c.vol * c.wlo;
            }
        }
        return r;
    }

private:
    const SymPath& path_;
    const Group& g_;
    const std::vector<Bin>& bins_;
    const IntervalOptions& opt_;
    std::vector<Cell> cells_;
    std::priority_queue<std::pair<Rational, std::size_t>> queue_;

    void evaluate(Cell& c) {
        c.vol = 1;
        for (int v : g_.vars) {
            const Interval& i = c.box[static_cast<std::size_t>(v)];
            c.vol *= i.hi().value() - i.lo().value();
        }
        for (std::size_t k : g_.constraints) {
            Truth t = decide(path_.delta[k], c.box);
            if (t == Truth::False) {
                c.dead = true;
                return;
            }
            if (t == Truth::Unknown) c.certain = false;
        }
        Interval w = Interval::one();
        for (std::size_t k : g_.xis) {
            auto m = weight_meet(eval_symbolic(path_.xi[k], c.box));
            if (!m) {
                c.dead = true;
                return;
            }
            w = mul(w, *m);
        }
        c.wlo = w.lo().value();
        c.whi = w.hi();
        if (g_.has_value) c.value = eval_symbolic(path_.value, c.box);
    }

    Rational priority(const Cell& c) const {
        if (c.dead || c.whi.is_zero()) return Rational(0);
        if (!c.whi.finite()) return c.vol;
        Rational gap = c.whi.value() - (c.certain ? c.wlo : Rational(0));
        if (g_.has_value) {
            std::size_t hits = 0;
            bool in = false;
            for (const auto& b : bins_) {
                if (b.range == Interval::whole()) continue;
                if (meets(c.value, b)) ++hits;
                if (inside(c.value, b)) in = true;
            }
            if (hits > 1 || (hits == 1 && !in)) gap = c.whi.value();
        }
        return c.vol * gap;
    }

    void add_cell(Cell c) {
        evaluate(c);
        Rational p = priority(c);
        cells_.push_back(std::move(c));
        if (sgn(p) > 0) queue_.emplace(p, cells_.size() - 1);
    }

    void bisect(std::size_t i) {
        Cell& c = cells_[i];
        int widest = g_.vars[0];
        Rational best(-1);
        for (int v : g_.vars) {
            const Interval& iv = c.box[static_cast<std::size_t>(v)];
            Rational w = iv.hi().value() - iv.lo().value();
            if (w > best) {
                best = w;
                widest = v;
            }
        }
        c.alive = false;
        const Interval iv = c.box[static_cast<std::size_t>(widest)];
        Rational mid = (iv.lo().value() + iv.hi().value()) / 2;
        Cell left, right;
        left.box = right.box = c.box;
        left.box[static_cast<std::size_t>(widest)] = Interval(iv.lo(), mid);
        right.box[static_cast<std::size_t>(widest)] = Interval(mid, iv.hi());
        add_cell(std::move(left));
        add_cell(std::move(right));
    }
};

}  // namespace

std::vector<PathBounds> analyze_path_interval(const SymPath& path, const std::vector<Bin>& bins,
                                              const IntervalOptions& opt) {
    const std::size_t n = static_cast<std::size_t>(path.n);
    std::vector<PathBounds> out(bins.size(), PathBounds{Rational(0), ExtReal(0), PathMethod::Interval});

    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x)
            x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        return x;
    };
    auto unite = [&](const std::vector<int>& vs) {
        for (std::size_t k = 1; k < vs.size(); ++k) parent[static_cast<std::size_t>(find(vs[k]))] = find(vs[0]);
    };

    std::vector<std::vector<int>> cvars(path.delta.size()), xvars(path.xi.size());
    std::vector<int> vvars;
    for (std::size_t k = 0; k < path.delta.size(); ++k) {
        collect_vars(path.delta[k].value, cvars[k]);
        unite(cvars[k]);
    }
    for (std::size_t k = 0; k < path.xi.size(); ++k) {
        collect_vars(path.xi[k], xvars[k]);
        unite(xvars[k]);
    }
    collect_vars(path.value, vvars);
    unite(vvars);

    bool certain = true;
    Interval fixed = Interval::one();
    std::vector<Group> groups;
    std::vector<int> group_of(n, -1);
    auto group_for = [&](int var) -> Group& {
        int root = find(var);
        if (group_of[static_cast<std::size_t>(root)] < 0) {
            group_of[static_cast<std::size_t>(root)] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        return groups[static_cast<std::size_t>(group_of[static_cast<std::size_t>(root)])];
    };
    for (std::size_t k = 0; k < path.delta.size(); ++k) {
        if (cvars[k].empty()) {
            Truth t = decide(path.delta[k], {});
            if (t == Truth::False) return out;
            if (t == Truth::Unknown) certain = false;
        } else {
            group_for(cvars[k][0]).constraints.push_back(k);
        }
    }
    for (std::size_t k = 0; k < path.xi.size(); ++k) {
        if (xvars[k].empty()) {
            auto w = weight_meet(eval_symbolic(path.xi[k], {}));
            if (!w) return out;
            fixed = mul(fixed, *w);
        } else {
            group_for(xvars[k][0]).xis.push_back(k);
        }
    }
    if (!vvars.empty()) group_for(vvars[0]).has_value = true;
    for (int v = 0; v < static_cast<int>(n); ++v) {
        int root = find(v);
        if (group_of[static_cast<std::size_t>(root)] >= 0)
            groups[static_cast<std::size_t>(group_of[static_cast<std::size_t>(root)])].vars.push_back(v);
    }

    std::vector<Rational> lb(bins.size(), certain ? fixed.lo().value() : Rational(0));
    std::vector<ExtReal> ub(bins.size(), fixed.hi());
    if (vvars.empty()) {
        Interval v = eval_symbolic(path.value, {});
        for (std::size_t b = 0; b < bins.size(); ++b) {
            if (!inside(v, bins[b])) lb[b] = 0;
            if (!meets(v, bins[b])) ub[b] = ExtReal(0);
        }
    }
    bool coarse = false;
    for (const auto& g : groups) {
        GroupResult r = GroupAnalysis(path, g, bins, opt).run();
        coarse = coarse || r.coarse;
        for (std::size_t b = 0; b < bins.size(); ++b) {
            std::size_t k = g.has_value ? b : 0;
            lb[b] *= r.lb[k];
            ub[b] = ub[b] * r.ub[k];
        }
    }
    for (std::size_t b = 0; b < bins.size(); ++b) {
        out[b].lower = lb[b];
        out[b].upper = ub[b];
        if (coarse) out[b].method = PathMethod::TypeOnly;
    }
    return out;
}

PathBounds analyze_path_interval(const SymPath& path, const Bin& bin, const IntervalOptions& opt) {
    return analyze_path_interval(path, std::vector<Bin>{bin, Bin{Interval::whole(), false}}, opt)[0];
}

std::vector<Bin> make_bins(const Rational& lo, const Rational& hi, int n) {
    if (n < 1 || !(lo < hi)) throw std::invalid_argument("bins need n >= 1 and lo < hi");
    std::vector<Bin> out;
    for (int k = 0; k < n; ++k) {
        Rational a = lo + (hi - lo) * k / n;
        Rational b = lo + (hi - lo) * (k + 1) / n;
        out.push_back(Bin{Interval(a, b), k + 1 < n});
    }
    return out;
}

Bin point_bin(const Rational& x) { return Bin{Interval::point(x), false}; }

namespace {

ExtReal ext_sub_floor0(const ExtReal& a, const ExtReal& b) {
    // max(0, a - b) where a may be infinite and b finite, or b infinite
    if (b.is_pos_inf()) return ExtReal(0);
    if (a.is_pos_inf()) return a;
    Rational d = a.value() - b.value();
    return sgn(d) > 0 ? ExtReal(d) : ExtReal(0);
}

}  // namespace

BinnedBounds aggregate(const TermPtr& p, const std::vector<Bin>& bins, const BoundsOptions& opt) {
    ExploreOptions eo;
    eo.depth = opt.depth;
    eo.max_paths = opt.max_paths;
    ExploreResult ex = explore(p, eo);

    std::vector<Bin> all = bins;
    all.push_back(Bin{Interval::whole(), false});
    std::vector<std::vector<PathBounds>> per(ex.paths.size());
    std::vector<char> fell_back(ex.paths.size(), 0);
    parallel_for(ex.paths.size(), [&](std::size_t i) {
        const SymPath& path = ex.paths[i];
        if (opt.method != Method::Interval) {
            try {
                per[i] = analyze_path_linear(path, all, opt.linear);
                bool relaxed = false;
                for (const auto& r : per[i]) relaxed = relaxed || r.relaxed;
                if (!relaxed) return;
                // both are sound, so keep the tighter end of each
                auto iv = analyze_path_interval(path, all, opt.interval);
                for (std::size_t b = 0; b < all.size(); ++b) {
                    per[i][b].lower = std::max<Rational>(per[i][b].lower, iv[b].lower);
                    if (iv[b].upper < per[i][b].upper) per[i][b].upper = iv[b].upper;
                }
                return;
            } catch (const NotLinear&) {
                fell_back[i] = 1;
            } catch (const DimensionCap&) {
                fell_back[i] = 1;
            }
        }
        per[i] = analyze_path_interval(path, all, opt.interval);
    });

    BinnedBounds out;
    out.paths = ex.paths.size();
    out.approximated = ex.approximated;
    for (const auto& b : bins) out.bins.push_back(BinBounds{b, Rational(0), ExtReal(0), Rational(0), Rational(1)});
    Rational full_lb(0);
    ExtReal full_ub(0);
    std::size_t fallbacks = 0;
    for (std::size_t i = 0; i < per.size(); ++i) {
        fallbacks += fell_back[i];
        switch (per[i].back().method) {
            case PathMethod::Linear: ++out.linear_paths; break;
            case PathMethod::Interval: ++out.interval_paths; break;
            case PathMethod::TypeOnly: ++out.typeonly_paths; break;
        }
        for (std::size_t b = 0; b < bins.size(); ++b) {
            out.bins[b].lb += per[i][b].lower;
            out.bins[b].ub = out.bins[b].ub + per[i][b].upper;
        }
        full_lb += per[i].back().lower;
        full_ub = full_ub + per[i].back().upper;
    }
    if (opt.method == Method::Linear && fallbacks > 0)
        out.warnings.push_back("linear backend not applicable to " + std::to_string(fallbacks) +
                               " path(s); used the interval backend for them");
    Rational sum_lb(0);
    ExtReal sum_ub(0);
    for (const auto& b : out.bins) {
        sum_lb += b.lb;
        sum_ub = sum_ub + b.ub;
    }
    ExtReal olb = ext_sub_floor0(ExtReal(full_lb), sum_ub);
    out.outside_lb = olb.value();
    out.outside_ub = ext_sub_floor0(full_ub, ExtReal(sum_lb));
    out.z_lb = std::max<Rational>(full_lb, sum_lb + out.outside_lb);
    out.z_ub = ext_min(full_ub, sum_ub + out.outside_ub);
    return out;
}

BinnedBounds normalize(BinnedBounds b) {
    Rational sum_lb = b.outside_lb;
    for (const auto& x : b.bins) sum_lb += x.lb;
    for (auto& x : b.bins) {
        ExtReal others_ub = b.outside_ub;
        for (const auto& y : b.bins)
            if (&y != &x) others_ub = others_ub + y.ub;
        Rational others_lb = sum_lb - x.lb;
        if (sgn(x.lb) == 0 || others_ub.is_pos_inf()) {
            x.norm_lb = 0;
        } else {
            x.norm_lb = x.lb / (x.lb + others_ub.value());
        }
        if (x.ub.is_pos_inf()) {
            x.norm_ub = 1;
        } else {
            Rational den = x.ub.value() + others_lb;
            x.norm_ub = sgn(den) == 0 ? Rational(1) : std::min<Rational>(Rational(1), x.ub.value() / den);
        }
    }
    return b;
}

BinnedBounds compute_bounds(const TermPtr& p, const std::vector<Bin>& bins, const BoundsOptions& opt) {
    return normalize(aggregate(p, bins, opt));
}

}  // namespace gbpi
