// Acceptance suite: one PASS/FAIL line per criterion.
// Run with criterion numbers as arguments to select a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gbpi/bounds.hpp"
#include "gbpi/concrete.hpp"
#include "gbpi/frontend.hpp"
#include "gbpi/interval_types.hpp"
#include "gbpi/primitives.hpp"
#include "gbpi/report.hpp"
#include "oracles.hpp"

using namespace gbpi;

namespace {

// tolerances and budgets
constexpr int kFuzzCases = 100'000;
constexpr double kFuzzSeconds = 10;
constexpr double kUlpSlackRel = 1e-13;  // double oracle for primitives is only good to a few ulps
constexpr int kSoundnessPrograms = 25;
constexpr int kSoundnessTraces = 1000;
constexpr double kSoundnessSeconds = 60;
constexpr double kDiscreteTol = 1e-9;
constexpr int kGeometricDepth = 120;
constexpr double kGeometricWidth = 1.0 / 512;
constexpr double kGeometricSeconds = 120;
constexpr double kTriangleWidth = 0.05;
constexpr double kTriangleSeconds = 60;
constexpr int kSandwichBins = 20;
constexpr std::size_t kSandwichDepth = 200;
constexpr std::size_t kSandwichSamples = 100'000;
constexpr double kSandwichSeconds = 600;
constexpr std::size_t kPedestrianDepth = 40;
constexpr int kPedestrianSplits = 32;
constexpr int kPedestrianBins = 30;
constexpr std::size_t kPedestrianSamples = 100'000;
constexpr double kPedestrianSeconds = 1800;
constexpr int kPolytopes = 50;
constexpr long kRejectionSamples = 1'000'000;
constexpr int kLpEvaluations = 1000;
constexpr double kGeometrySeconds = 300;

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string corpus_dir() {
    const char* d = std::getenv("GBPI_CORPUS");
    return d ? d : "corpus";
}

TermPtr corpus(const std::string& name) { return parse_file(corpus_dir() + "/" + name + ".spcf"); }

std::pair<Rational, Rational> corpus_range(const std::string& name) {
    std::ifstream f(corpus_dir() + "/" + name + ".spcf");
    std::string line;
    while (std::getline(f, line)) {
        if (line.rfind("# range ", 0) != 0) continue;
        std::istringstream ls(line.substr(8));
        std::string lo, hi;
        ls >> lo >> hi;
        return {parse_decimal(lo), parse_decimal(hi)};
    }
    throw std::runtime_error(name + " has no range header");
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome containment_fuzz() {
    std::mt19937_64 rng(7);
    std::vector<PrimPtr> prims;
    for (const auto& n : registry_names()) prims.push_back(registry_lookup(n));
    prims.push_back(registry_lookup("pdf_normal(1.1,0.1)"));
    prims.push_back(registry_lookup("pdf_uniform(-1,2)"));
    auto box = [&](double range) {
        std::uniform_real_distribution<double> u(-range, range);
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        return std::pair{a, b};
    };
    std::uniform_real_distribution<double> t(0.0, 1.0);
    int violations = 0;
    for (int i = 0; i < kFuzzCases; ++i) {
        const auto& f = prims[static_cast<std::size_t>(i) % prims.size()];
        double range = f->kind == PrimKind::Exp ? 20.0 : 5.0;
        std::vector<Interval> args;
        std::vector<double> x;
        for (int k = 0; k < f->arity; ++k) {
            auto [a, b] = box(range);
            args.push_back(Interval(Rational(a), Rational(b)));
            x.push_back(std::clamp(a + (b - a) * t(rng), a, b));
        }
        Interval r = lift_eval(*f, args);
        double v = f->eval_double(x);
        double slack = kUlpSlackRel * std::fabs(v);
        if (!r.intersects(Interval(Rational(v - slack), Rational(v + slack)))) ++violations;
    }
    return {violations == 0, std::to_string(kFuzzCases) + " cases, " + std::to_string(violations) + " violations"};
}

Outcome worked_trace() {
    auto p = corpus("pedestrian");
    std::vector<Rational> s;
    for (int t : {1, 2, 4, 7, 8}) s.push_back(rat(t, 10));
    auto r = run_on_trace(p, s);
    if (r.status != RunStatus::Terminated) return {false, "run did not terminate"};
    double expected = std::exp(-2.0) / (0.1 * std::sqrt(2 * M_PI));
    double got = r.weight.get_d();
    double ulp = std::nextafter(expected, 1.0) - expected;
    bool ok = r.value == rat(3, 10) && std::fabs(got - expected) <= ulp;
    return {ok, "value " + r.value.get_str() + ", weight " + fmt("%.17g", got) + " vs " + fmt("%.17g", expected)};
}

Outcome type_examples() {
    Outcome o;
    auto t51 = infer_type(corpus("sigmoid_recursion"));
    o.pass = t51->str() == "<[0,20], [0,1]>";
    o.detail = "sigmoid recursion " + t51->str();

    auto walk = infer_type(parse_program("fix walk (x:R):R -> if x <= 0 then 0 else "
                                         "(fun (step:R) -> step + walk ((x + step) (+0.5) (x - step))) sample"));
    bool cod = walk->value->arrow && walk->value->cod->value->base == Interval(0, ExtReal::pos_inf()) &&
               walk->value->cod->weight == Interval(1, 1);
    o.pass = o.pass && cod;
    o.detail += cod ? ", walk codomain <[0,inf], [1,1]>" : ", walk codomain wrong";

    // nu0 >= [0,0], nu1 >= [1,1], nu2 >= nu0, nu2 >= nu2 + nu1
    TypeConstraint c1{ConstraintKind::Const, 0};
    c1.value = Interval(0, 0);
    TypeConstraint c2{ConstraintKind::Const, 1};
    c2.value = Interval(1, 1);
    TypeConstraint c3{ConstraintKind::Sub, 2};
    c3.source = 0;
    TypeConstraint c4{ConstraintKind::Fun, 2};
    c4.op = FunOp::Prim;
    c4.prim = registry_lookup("add");
    c4.args = {2, 1};
    auto a = solve({c1, c2, c3, c4}, 3);
    bool chain = a[2] == LatticeInterval(Interval(0, ExtReal::pos_inf()));
    o.pass = o.pass && chain;
    o.detail += ", divergent chain " + to_string(a[2]);
    return o;
}

Outcome type_soundness() {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(corpus_dir()))
        if (e.path().extension() == ".spcf") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.size() < static_cast<std::size_t>(kSoundnessPrograms)) return {false, "corpus too small"};
    files.resize(kSoundnessPrograms);
    int escapes = 0, short_programs = 0;
    long runs = 0;
    for (const auto& f : files) {
        auto p = parse_file(f.string());
        auto t = infer_type(p);
        Interval value = *t->value->base, weight = *t->weight;
        int got = 0;
        for (std::uint64_t k = 0; got < kSoundnessTraces && k < 20 * kSoundnessTraces; ++k) {
            UniformStream u(mix_seed(1234, k));
            std::vector<Rational> drawn;
            auto r = run_lazy(p, [&] { return Rational(u.next()); }, drawn, 200000);
            if (r.status != RunStatus::Terminated) continue;
            ++got;
            if (!value.contains(ExtReal(r.value)) || !weight.contains(ExtReal(r.weight))) ++escapes;
        }
        runs += got;
        if (got < kSoundnessTraces) ++short_programs;
    }
    return {escapes == 0 && short_programs == 0, std::to_string(files.size()) + " programs, " + std::to_string(runs) +
                                                    " terminating traces, " + std::to_string(escapes) + " escapes"};
}

Outcome discrete_posterior() {
    auto b = compute_bounds(corpus("discrete_score"), {point_bin(Rational(0)), point_bin(Rational(1))});
    double lb = b.bins[0].norm_lb.get_d(), ub = b.bins[0].norm_ub.get_d();
    bool ok = std::fabs(lb - 0.25) <= kDiscreteTol && std::fabs(ub - 0.25) <= kDiscreteTol;
    return {ok, "{0} normalized [" + fmt("%.12g", lb) + ", " + fmt("%.12g", ub) + "]"};
}

Outcome geometric() {
    std::vector<Bin> bins;
    for (int k = 0; k <= 5; ++k) bins.push_back(point_bin(Rational(k)));
    BoundsOptions o;
    o.depth = kGeometricDepth;
    auto b = compute_bounds(corpus("geometric"), bins, o);
    Rational p(1, 2);
    bool ok = true;
    double widest = 0;
    for (const auto& bin : b.bins) {
        ok = ok && bin.norm_lb <= p && p <= bin.norm_ub;
        widest = std::max(widest, Rational(bin.norm_ub - bin.norm_lb).get_d());
        p /= 2;
    }
    ok = ok && widest <= kGeometricWidth;
    return {ok, "k = 0..5 contain 2^-(k+1), widest " + fmt("%.3g", widest) + ", " + std::to_string(b.paths) + " paths"};
}

Outcome triangle() {
    auto p = corpus("triangle");
    std::vector<double> widths;
    bool ok = true;
    for (int k : {4, 8, 16, 32}) {
        BoundsOptions o;
        o.method = Method::Interval;
        o.interval.splits_var = k;
        auto b = compute_bounds(p, {point_bin(Rational(1))}, o);
        const auto& r = b.bins[0];
        if (!r.ub.finite()) return {false, "unbounded at splits " + std::to_string(k)};
        double w = Rational(r.ub.value() - r.lb).get_d();
        ok = ok && r.lb <= rat(1, 2) && r.ub >= ExtReal(rat(1, 2));
        if (!widths.empty()) ok = ok && w < widths.back();
        widths.push_back(w);
    }
    ok = ok && widths.back() <= kTriangleWidth;
    std::string d = "widths";
    for (double w : widths) d += " " + fmt("%.4g", w);
    return {ok, d};
}

Outcome sandwich() {
    const char* programs[] = {"score_linear",   "score_square", "exp_score",     "observe_normal", "sum_observe",
                              "uniform_observe", "score_branch", "discrete_score", "geometric",      "biased_geometric",
                              "renewal",         "product",      "max_of_two",     "higher_order",   "sigmoid_value"};
    int failed = 0, checks = 0;
    std::string bad;
    for (const char* name : programs) {
        auto p = corpus(name);
        auto [lo, hi] = corpus_range(name);
        BoundsOptions o;
        o.depth = kSandwichDepth;
        auto b = compute_bounds(p, make_bins(lo, hi, kSandwichBins), o);
        auto v = validate_unnormalized(b, importance_sample(p, 42, kSandwichSamples));
        checks += static_cast<int>(v.checks.size());
        for (const auto& c : v.checks)
            if (!c.pass) {
                ++failed;
                bad += std::string(" ") + name + ":" + c.label;
            }
    }
    return {failed == 0, "15 programs, " + std::to_string(checks) + " checks, " + std::to_string(failed) + " outside" + bad};
}

Outcome pedestrian() {
    auto p = corpus("pedestrian");
    BoundsOptions o;
    o.depth = kPedestrianDepth;
    o.linear.splits_expr = kPedestrianSplits;
    auto b = compute_bounds(p, make_bins(0, 3, kPedestrianBins), o);
    bool finite = b.z_ub.finite();
    for (const auto& r : b.bins) finite = finite && r.ub.finite() && r.norm_ub < 1;
    auto is = validate_unnormalized(b, importance_sample(p, 42, kPedestrianSamples));

    std::vector<WeightedSample> hmc;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(2.5, 3.0);
    for (int i = 0; i < 10000; ++i) hmc.push_back({u(rng), 1.0, false});
    auto fake = validate_normalized(b, hmc);

    std::ostringstream d;
    d << b.paths << " paths, Z in [" << fmt("%.4g", to_double_down(b.z_lb)) << ", " << fmt("%.4g", b.z_ub.up())
      << "], bins " << (finite ? "finite" : "NOT finite") << ", IS " << (is.pass ? "passes" : "FAILS")
      << ", skewed file " << (fake.pass ? "PASSES" : "rejected");
    return {finite && is.pass && !fake.pass, d.str()};
}

Outcome geometry_oracles() {
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<int> dim(1, 4), nrows(1, 6), coef(-4, 4), off(0, 32);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int vol_bad = 0, slice_bad = 0, lp_bad = 0, lp_checked = 0;
    for (int trial = 0; trial < kPolytopes; ++trial) {
        int d = dim(rng);
        auto h = oracle::random_polytope(rng, d, nrows(rng));
        Rational v = volume(h);
        auto hit = oracle::rejection_volume(h, rng, kRejectionSamples);
        if (std::fabs(hit.estimate - v.get_d()) > 3 * hit.sigma + 1e-9) ++vol_bad;

        std::vector<Rational> cut, neg;
        for (int k = 0; k < d; ++k) cut.push_back(Rational(coef(rng)));
        for (const auto& x : cut) neg.push_back(-x);
        Rational c = rat(off(rng), 16);
        auto below = h, above = h;
        below.add(cut, RowRel::Le, c);
        above.add(neg, RowRel::Le, -c);
        if (volume(below) + volume(above) != v) ++slice_bad;

        auto range = lp_bound(h, LinExpr{cut});
        if (!range) {
            ++lp_bad;
            continue;
        }
        int want = kLpEvaluations / kPolytopes;
        for (int s = 0, got = 0; s < 200000 && got < want; ++s) {
            std::vector<Rational> x;
            for (int k = 0; k < d; ++k) x.push_back(Rational(u(rng)));
            if (!h.contains(x)) continue;
            Rational val(0);
            for (int k = 0; k < d; ++k) val += cut[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)];
            if (!range->contains(ExtReal(val))) ++lp_bad;
            ++got;
            ++lp_checked;
        }
    }
    std::ostringstream d;
    d << kPolytopes << " polytopes: " << vol_bad << " volume misses, " << slice_bad << " slice mismatches, " << lp_checked
      << " LP evaluations with " << lp_bad << " escapes";
    return {vol_bad == 0 && slice_bad == 0 && lp_bad == 0 && lp_checked >= kLpEvaluations, d.str()};
}

struct Criterion {
    int id;
    const char* name;
    double seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all = {
        {1, "interval containment fuzz", kFuzzSeconds, containment_fuzz},
        {2, "pedestrian worked trace", 0, worked_trace},
        {3, "type inference examples", 0, type_examples},
        {4, "type soundness on the corpus", kSoundnessSeconds, type_soundness},
        {5, "exact discrete posterior", 0, discrete_posterior},
        {6, "geometric recursion", kGeometricSeconds, geometric},
        {7, "triangle convergence", kTriangleSeconds, triangle},
        {8, "end-to-end sandwich", kSandwichSeconds, sandwich},
        {9, "pedestrian desk scale", kPedestrianSeconds, pedestrian},
        {10, "geometry oracles", kGeometrySeconds, geometry_oracles},
    };
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!pick.empty() && !pick.count(c.id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.seconds > 0 && secs > c.seconds) {
            o.pass = false;
            o.detail += ", over the " + fmt("%.0f", c.seconds) + " s budget";
        }
        if (!o.pass) ++failures;
        std::printf("%s %2d %-30s %7.1fs  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
