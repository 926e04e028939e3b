#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "gbpi/frontend.hpp"
#include "gbpi/interval_types.hpp"
#include "gbpi/report.hpp"

using namespace gbpi;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInput = 2;
constexpr int kResource = 3;
constexpr int kViolation = 4;

struct Args {
    RunConfig cfg;
    std::string range = "0:1";
    std::string method = "auto";
    std::string out;
    std::string sample_file;
    std::string csv_in, svg_out;
};

void add_bounds_options(CLI::App* app, Args& a) {
    app->add_option("program", a.cfg.program, "program file")->required();
    app->add_option("--range", a.range, "bin range LO:HI")->required();
    app->add_option("--bins", a.cfg.bins, "number of bins")->required();
    app->add_option("--depth", a.cfg.bounds.depth, "symbolic execution depth");
    app->add_option("--splits-expr", a.cfg.bounds.linear.splits_expr, "score chunks per linear subexpression");
    app->add_option("--splits-var", a.cfg.bounds.interval.splits_var, "grid pieces per sample variable");
    app->add_option("--max-paths", a.cfg.bounds.max_paths, "abort beyond this many symbolic paths");
    app->add_option("--method", a.method, "auto, interval or linear")
        ->check(CLI::IsMember({"auto", "interval", "linear"}));
}

void finish_config(Args& a) {
    auto [lo, hi] = parse_range(a.range);
    a.cfg.lo = lo;
    a.cfg.hi = hi;
    a.cfg.bounds.method = a.method == "interval" ? Method::Interval : a.method == "linear" ? Method::Linear : Method::Auto;
    check_config(a.cfg);
}

BinnedBounds run_bounds(const Args& a, const TermPtr& p) {
    auto b = compute_bounds(p, make_bins(a.cfg.lo, a.cfg.hi, a.cfg.bins), a.cfg.bounds);
    for (const auto& w : b.warnings) std::cerr << "warning: " << w << '\n';
    if (b.approximated) std::cerr << "note: residual fixpoints were over-approximated by their types\n";
    std::cerr << b.paths << " path(s): " << b.linear_paths << " linear, " << b.interval_paths << " interval, "
              << b.typeonly_paths << " type-only\n";
    return b;
}

int cmd_bounds(Args& a) {
    auto p = parse_file(a.cfg.program);
    auto b = run_bounds(a, p);
    std::string csv = bounds_csv(b);
    if (a.out.empty()) {
        std::cout << csv;
    } else {
        std::ofstream f(a.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + a.out);
        f << csv;
    }
    return kOk;
}

int cmd_validate(Args& a) {
    auto p = parse_file(a.cfg.program);
    auto b = run_bounds(a, p);
    Validation v;
    if (!a.sample_file.empty()) {
        std::ifstream f(a.sample_file);
        if (!f) throw std::runtime_error("cannot open " + a.sample_file);
        v = validate_normalized(b, read_sample_file(f));
    } else {
        v = validate_unnormalized(b, importance_sample(p, a.cfg.seed, a.cfg.samples));
    }
    std::cout << validation_report(v);
    return v.pass ? kOk : kViolation;
}

int cmd_plot(Args& a) {
    std::ifstream in(a.csv_in);
    if (!in) throw std::runtime_error("cannot open " + a.csv_in);
    auto b = read_bounds_csv(in);
    std::ofstream out(a.svg_out, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + a.svg_out);
    out << render_svg(b);
    return kOk;
}

int cmd_types(Args& a) {
    auto p = parse_file(a.cfg.program);
    auto r = infer_types_with_fixpoints(p);
    std::cout << "program: " << r.program->str() << '\n';
    for (const auto& [term, type] : r.fixpoints) std::cout << "fix " << term->name << ": " << type->str() << '\n';
    return kOk;
}

int cmd_paths(Args& a) {
    auto p = parse_file(a.cfg.program);
    ExploreOptions o;
    o.depth = a.cfg.bounds.depth;
    o.max_paths = a.cfg.bounds.max_paths;
    auto ex = explore(p, o);
    for (const auto& path : ex.paths) std::cout << path.str() << '\n';
    std::cout << ex.paths.size() << " path(s)";
    if (ex.approximated) std::cout << ", fixpoints over-approximated at depth " << o.depth;
    if (ex.dropped > 0) std::cout << ", " << ex.dropped << " infeasible dropped";
    std::cout << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"guaranteed bounds on the posterior of probabilistic programs"};
    app.require_subcommand(1);
    Args a;

    auto* bounds = app.add_subcommand("bounds", "bound the posterior histogram and write CSV");
    add_bounds_options(bounds, a);
    bounds->add_option("--out", a.out, "CSV output path (default stdout)");

    auto* validate = app.add_subcommand("validate", "check samples against the bounds");
    add_bounds_options(validate, a);
    auto* n = validate->add_option("--samples", a.cfg.samples, "importance samples to draw");
    validate->add_option("--seed", a.cfg.seed, "sampler seed")->needs(n);
    auto* file = validate->add_option("--sample-file", a.sample_file, "value<TAB>weight file from another sampler");
    n->excludes(file);
    file->excludes(n);

    auto* plot = app.add_subcommand("plot", "render a bounds CSV as SVG");
    plot->add_option("csv", a.csv_in, "bounds CSV")->required();
    plot->add_option("svg", a.svg_out, "SVG output")->required();

    auto* types = app.add_subcommand("types", "print inferred weighted interval types");
    types->add_option("program", a.cfg.program, "program file")->required();

    auto* paths = app.add_subcommand("paths", "list symbolic paths");
    paths->add_option("program", a.cfg.program, "program file")->required();
    paths->add_option("--depth", a.cfg.bounds.depth, "symbolic execution depth");
    paths->add_option("--max-paths", a.cfg.bounds.max_paths, "abort beyond this many symbolic paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (bounds->parsed() || validate->parsed()) finish_config(a);
        if (validate->parsed() && a.sample_file.empty() && n->count() == 0)
            throw ConfigError("validate needs --samples N or --sample-file F");
        if (bounds->parsed()) return cmd_bounds(a);
        if (validate->parsed()) return cmd_validate(a);
        if (plot->parsed()) return cmd_plot(a);
        if (types->parsed()) return cmd_types(a);
        if (paths->parsed()) return cmd_paths(a);
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const SyntaxError& e) {
        std::cerr << a.cfg.program << ": " << e.what() << '\n';
        return kInput;
    } catch (const TypeError& e) {
        std::cerr << a.cfg.program << ": type error: " << e.what() << '\n';
        return kInput;
    } catch (const ResourceCap& e) {
        std::cerr << "resource cap: " << e.what() << '\n';
        return kResource;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    }
    return kUsage;
}
