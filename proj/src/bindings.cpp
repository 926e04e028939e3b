#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gbpi/frontend.hpp"
#include "gbpi/interval_types.hpp"
#include "gbpi/report.hpp"

namespace py = pybind11;
using namespace gbpi;

namespace {

struct Program {
    TermPtr term;
};

Method method_from(const std::string& m) {
    if (m == "auto") return Method::Auto;
    if (m == "interval") return Method::Interval;
    if (m == "linear") return Method::Linear;
    throw py::value_error("method must be auto, interval or linear");
}

py::dict bounds_dict(const BinnedBounds& b) {
    py::list bins;
    for (const auto& r : b.bins) {
        auto [lo, hi] = outward(r.bin.range);
        py::dict d;
        d["lo"] = lo;
        d["hi"] = hi;
        d["lb"] = to_double_down(r.lb);
        d["ub"] = r.ub.up();
        d["norm_lb"] = to_double_down(r.norm_lb);
        d["norm_ub"] = to_double_up(r.norm_ub);
        bins.append(d);
    }
    py::dict out;
    out["bins"] = bins;
    out["z"] = py::make_tuple(to_double_down(b.z_lb), b.z_ub.up());
    out["paths"] = b.paths;
    out["linear_paths"] = b.linear_paths;
    out["interval_paths"] = b.interval_paths;
    out["typeonly_paths"] = b.typeonly_paths;
    out["approximated"] = b.approximated;
    out["warnings"] = b.warnings;
    out["csv"] = bounds_csv(b);
    return out;
}

}  // namespace

PYBIND11_MODULE(_gbpi, m) {
    m.doc() = "guaranteed posterior bounds for a small probabilistic language";

    py::register_exception<SyntaxError>(m, "SyntaxError", PyExc_ValueError);
    py::register_exception<TypeError>(m, "TypeError", PyExc_ValueError);
    py::register_exception<ResourceCap>(m, "ResourceCap", PyExc_RuntimeError);

    py::class_<Program>(m, "Program")
        .def("pretty", [](const Program& p) { return pretty(p.term); })
        .def("simple_type", [](const Program& p) { return typecheck_simple(p.term)->str(); })
        .def("__repr__", [](const Program& p) { return "<Program " + pretty(p.term) + ">"; });

    m.def("parse", [](const std::string& src) { return Program{parse_program(src)}; }, py::arg("source"));
    m.def("parse_file", [](const std::string& path) { return Program{parse_file(path)}; }, py::arg("path"));
    m.def("infer_type", [](const Program& p) { return infer_type(p.term)->str(); }, py::arg("program"));

    m.def(
        "compute_bounds",
        [](const Program& p, const std::string& lo, const std::string& hi, int bins, std::size_t depth, int splits_expr,
           int splits_var, const std::string& method) {
            RunConfig cfg;
            cfg.lo = parse_decimal(lo);
            cfg.hi = parse_decimal(hi);
            cfg.bins = bins;
            cfg.bounds.depth = depth;
            cfg.bounds.linear.splits_expr = splits_expr;
            cfg.bounds.interval.splits_var = splits_var;
            cfg.bounds.method = method_from(method);
            check_config(cfg);
            BinnedBounds b;
            {
                py::gil_scoped_release release;
                b = compute_bounds(p.term, make_bins(cfg.lo, cfg.hi, cfg.bins), cfg.bounds);
            }
            return bounds_dict(b);
        },
        py::arg("program"), py::arg("lo"), py::arg("hi"), py::arg("bins"), py::arg("depth") = 2000,
        py::arg("splits_expr") = 64, py::arg("splits_var") = 16, py::arg("method") = "auto",
        "Bounds on [lo, hi] split into equal bins; endpoints are decimal strings so they stay exact.");

    m.def(
        "importance_sample",
        [](const Program& p, std::uint64_t seed, std::size_t n) {
            std::vector<WeightedSample> s;
            {
                py::gil_scoped_release release;
                s = importance_sample(p.term, seed, n);
            }
            std::vector<std::pair<double, double>> out;
            out.reserve(s.size());
            for (const auto& x : s) out.emplace_back(x.value, x.weight);
            return out;
        },
        py::arg("program"), py::arg("seed"), py::arg("n"));

    m.def(
        "estimate",
        [](const Program& p, double lo, double hi, std::size_t n, std::uint64_t seed) {
            Estimate e;
            {
                py::gil_scoped_release release;
                e = estimate_measure(p.term, Interval(Rational(lo), Rational(hi)), n, seed);
            }
            return py::make_tuple(e.estimate, e.stderr_);
        },
        py::arg("program"), py::arg("lo"), py::arg("hi"), py::arg("n"), py::arg("seed") = 1);
}
