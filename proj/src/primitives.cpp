#include "gbpi/primitives.hpp"

#include <cfloat>
#include <cmath>
#include <map>
#include <mutex>

namespace gbpi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// libm exp is faithful to within one ulp; two steps of slack keep the bounds sound.
double nudge_down(double x, int steps = 2) {
    for (int i = 0; i < steps; ++i) x = std::nextafter(x, -kInf);
    return x;
}

double nudge_up(double x, int steps = 2) {
    for (int i = 0; i < steps; ++i) x = std::nextafter(x, kInf);
    return x;
}

ExtReal snap_down(const Rational& q) {
    double d = to_double_down(q);
    if (std::isinf(d)) return ExtReal::neg_inf();
    return ExtReal(Rational(d));
}

ExtReal snap_up(const Rational& q) {
    double d = to_double_up(q);
    if (std::isinf(d)) return ExtReal::pos_inf();
    return ExtReal(Rational(d));
}

Rational exp_lower(const Rational& x) {
    double e = std::exp(to_double_down(x));
    if (std::isinf(e)) return Rational(DBL_MAX);
    return Rational(std::max(0.0, nudge_down(e)));
}

// Empty optional means +inf.
std::optional<Rational> exp_upper(const Rational& x) {
    double e = nudge_up(std::exp(to_double_up(x)));
    if (std::isinf(e)) return std::nullopt;
    return Rational(e);
}

ExtReal exp_down(const ExtReal& x) {
    if (x.is_neg_inf()) return ExtReal(0);
    if (x.is_pos_inf()) return ExtReal::pos_inf();
    return ExtReal(exp_lower(x.value()));
}

ExtReal exp_up(const ExtReal& x) {
    if (x.is_neg_inf()) return ExtReal(0);
    if (x.is_pos_inf()) return ExtReal::pos_inf();
    auto e = exp_upper(x.value());
    return e ? ExtReal(*e) : ExtReal::pos_inf();
}

ExtReal sigmoid_down(const ExtReal& x) {
    if (x.is_neg_inf()) return ExtReal(0);
    if (x.is_pos_inf()) return ExtReal(1);
    auto e = exp_upper(Rational(-x.value()));
    if (!e) return ExtReal(0);
    return snap_down(Rational(1 / (1 + *e)));
}

ExtReal sigmoid_up(const ExtReal& x) {
    if (x.is_neg_inf()) return ExtReal(0);
    if (x.is_pos_inf()) return ExtReal(1);
    Rational e = exp_lower(Rational(-x.value()));
    return snap_up(Rational(1 / (1 + e)));
}

struct SqrtTwoPi {
    Rational lo, hi;
    SqrtTwoPi() {
        lo = Rational(nudge_down(std::sqrt(2.0 * M_PI), 1));
        hi = Rational(nudge_up(std::sqrt(2.0 * std::nextafter(M_PI, kInf)), 1));
    }
};

const SqrtTwoPi& sqrt_two_pi() {
    static const SqrtTwoPi s;
    return s;
}

Rational normal_exponent(const Rational& x, const Rational& mu, const Rational& sigma) {
    Rational d = x - mu;
    return Rational(d * d / (2 * sigma * sigma));
}

ExtReal pdf_normal_down(const ExtReal& x, const Rational& mu, const Rational& sigma) {
    if (!x.finite()) return ExtReal(0);
    Rational e = exp_lower(Rational(-normal_exponent(x.value(), mu, sigma)));
    return snap_down(Rational(e / (sigma * sqrt_two_pi().hi)));
}

ExtReal pdf_normal_up(const ExtReal& x, const Rational& mu, const Rational& sigma) {
    if (!x.finite()) return ExtReal(0);
    auto e = exp_upper(Rational(-normal_exponent(x.value(), mu, sigma)));
    return snap_up(Rational(*e / (sigma * sqrt_two_pi().lo)));
}

double pdf_normal_double(double x, double mu, double sigma) {
    double d = x - mu;
    return std::exp(-(d * d) / (2 * sigma * sigma)) / (sigma * std::sqrt(2 * M_PI));
}

// Bounds of a monotone unary function on one piece of its domain.
Interval eval_piece(const PrimDescriptor& d, const Interval& x, Monotone dir) {
    auto down = [&](const ExtReal& v) -> ExtReal {
        switch (d.kind) {
            case PrimKind::Exp: return exp_down(v);
            case PrimKind::Sigmoid: return sigmoid_down(v);
            default: return pdf_normal_down(v, d.params[0], d.params[1]);
        }
    };
    auto up = [&](const ExtReal& v) -> ExtReal {
        switch (d.kind) {
            case PrimKind::Exp: return exp_up(v);
            case PrimKind::Sigmoid: return sigmoid_up(v);
            default: return pdf_normal_up(v, d.params[0], d.params[1]);
        }
    };
    if (dir == Monotone::Increasing) return {down(x.lo()), up(x.hi())};
    return {down(x.hi()), up(x.lo())};
}

PrimPtr make(std::string name, PrimKind kind, int arity, bool linear, std::vector<MonotonePiece> pieces = {},
             std::vector<Rational> params = {}) {
    auto d = std::make_shared<PrimDescriptor>();
    d->name = std::move(name);
    d->kind = kind;
    d->arity = arity;
    d->linear = linear;
    d->pieces = std::move(pieces);
    d->params = std::move(params);
    for (const auto& p : d->params) d->dparams.push_back(to_double_nearest(p));
    return d;
}

const std::map<std::string, PrimPtr, std::less<>>& fixed_registry() {
    static const std::map<std::string, PrimPtr, std::less<>> reg = [] {
        std::map<std::string, PrimPtr, std::less<>> m;
        Interval all = Interval::whole();
        m["add"] = make("add", PrimKind::Add, 2, true);
        m["sub"] = make("sub", PrimKind::Sub, 2, true);
        m["mul"] = make("mul", PrimKind::Mul, 2, false);
        m["neg"] = make("neg", PrimKind::Neg, 1, true);
        m["abs"] = make("abs", PrimKind::Abs, 1, false);
        m["min"] = make("min", PrimKind::Min, 2, false);
        m["max"] = make("max", PrimKind::Max, 2, false);
        m["exp"] = make("exp", PrimKind::Exp, 1, false, {{all, Monotone::Increasing}});
        m["sigmoid"] = make("sigmoid", PrimKind::Sigmoid, 1, false, {{all, Monotone::Increasing}});
        return m;
    }();
    return reg;
}

std::mutex family_mutex;
std::map<std::string, PrimPtr, std::less<>> family_cache;

}  // namespace

Rational PrimDescriptor::eval_exact(std::span<const Rational> a) const {
    switch (kind) {
        case PrimKind::Add: return a[0] + a[1];
        case PrimKind::Sub: return a[0] - a[1];
        case PrimKind::Mul: return a[0] * a[1];
        case PrimKind::Neg: return -a[0];
        case PrimKind::Abs: return ::abs(a[0]);
        case PrimKind::Min: return std::min(a[0], a[1]);
        case PrimKind::Max: return std::max(a[0], a[1]);
        case PrimKind::Exp: return Rational(std::exp(to_double_nearest(a[0])));
        case PrimKind::Sigmoid: return Rational(1.0 / (1.0 + std::exp(-to_double_nearest(a[0]))));
        case PrimKind::PdfNormal: {
            double t = to_double_nearest(normal_exponent(a[0], params[0], params[1]));
            return Rational(std::exp(-t) / (dparams[1] * std::sqrt(2 * M_PI)));
        }
        case PrimKind::PdfUniform:
            if (a[0] < params[0] || a[0] > params[1]) return Rational(0);
            return Rational(1 / (params[1] - params[0]));
    }
    return Rational(0);
}

double PrimDescriptor::eval_double(std::span<const double> a) const {
    switch (kind) {
        case PrimKind::Add: return a[0] + a[1];
        case PrimKind::Sub: return a[0] - a[1];
        case PrimKind::Mul: return a[0] * a[1];
        case PrimKind::Neg: return -a[0];
        case PrimKind::Abs: return std::fabs(a[0]);
        case PrimKind::Min: return std::min(a[0], a[1]);
        case PrimKind::Max: return std::max(a[0], a[1]);
        case PrimKind::Exp: return std::exp(a[0]);
        case PrimKind::Sigmoid: return 1.0 / (1.0 + std::exp(-a[0]));
        case PrimKind::PdfNormal: return pdf_normal_double(a[0], dparams[0], dparams[1]);
        case PrimKind::PdfUniform:
            if (a[0] < dparams[0] || a[0] > dparams[1]) return 0.0;
            return 1.0 / (dparams[1] - dparams[0]);
    }
    return 0.0;
}

Interval lift_eval(const PrimDescriptor& d, std::span<const Interval> a) {
    switch (d.kind) {
        case PrimKind::Add: return add(a[0], a[1]);
        case PrimKind::Sub: return sub(a[0], a[1]);
        case PrimKind::Mul: return mul(a[0], a[1]);
        case PrimKind::Neg: return neg(a[0]);
        case PrimKind::Abs: return abs(a[0]);
        case PrimKind::Min: return min(a[0], a[1]);
        case PrimKind::Max: return max(a[0], a[1]);
        case PrimKind::PdfUniform: {
            Interval support(d.params[0], d.params[1]);
            ExtReal c(Rational(1 / (d.params[1] - d.params[0])));
            if (a[0].subset_of(support)) return {c, c};
            if (!a[0].intersects(support)) return {0, 0};
            return {0, c};
        }
        default: break;
    }
    LatticeInterval acc;
    for (const auto& piece : d.pieces) {
        auto part = meet(a[0], piece.domain);
        if (part) acc = join(acc, eval_piece(d, *part, piece.direction));
    }
    return *acc;
}

bool is_family(std::string_view name) { return name == "pdf_normal" || name == "pdf_uniform"; }

bool is_primitive_name(std::string_view name) {
    return is_family(name) || name == "sigm" || fixed_registry().count(name) > 0;
}

std::vector<std::string> registry_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : fixed_registry()) out.push_back(k);
    return out;
}

PrimPtr registry_family(std::string_view family, const std::vector<Rational>& params) {
    if (!is_family(family)) throw UnknownPrimitive("unknown primitive family: " + std::string(family));
    if (params.size() != 2)
        throw UnknownPrimitive(std::string(family) + " expects 2 parameters, got " + std::to_string(params.size()));
    std::string id = std::string(family) + "(" + to_decimal_string(params[0]) + "," + to_decimal_string(params[1]) + ")";
    std::lock_guard<std::mutex> lock(family_mutex);
    if (auto it = family_cache.find(id); it != family_cache.end()) return it->second;
    PrimPtr d;
    if (family == "pdf_normal") {
        if (sgn(params[1]) <= 0) throw UnknownPrimitive("pdf_normal needs a positive standard deviation");
        d = make(id, PrimKind::PdfNormal, 1, false,
                 {{Interval(ExtReal::neg_inf(), params[0]), Monotone::Increasing},
                  {Interval(params[0], ExtReal::pos_inf()), Monotone::Decreasing}},
                 params);
    } else {
        if (params[1] <= params[0]) throw UnknownPrimitive("pdf_uniform needs a < b");
        d = make(id, PrimKind::PdfUniform, 1, false, {}, params);
    }
    family_cache.emplace(id, d);
    return d;
}

PrimPtr registry_lookup(std::string_view id) {
    if (id == "sigm") id = "sigmoid";
    if (auto it = fixed_registry().find(id); it != fixed_registry().end()) return it->second;
    auto open = id.find('(');
    if (open != std::string_view::npos && id.back() == ')') {
        std::string_view family = id.substr(0, open);
        std::string_view inner = id.substr(open + 1, id.size() - open - 2);
        std::vector<Rational> params;
        std::size_t start = 0;
        while (start <= inner.size()) {
            auto comma = inner.find(',', start);
            std::string_view tok = inner.substr(start, comma == std::string_view::npos ? inner.size() - start : comma - start);
            while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
            while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
            try {
                params.push_back(parse_decimal(tok));
            } catch (const std::invalid_argument&) {
                throw UnknownPrimitive("unknown primitive: " + std::string(id));
            }
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (is_family(family)) return registry_family(family, params);
    }
    throw UnknownPrimitive("unknown primitive: " + std::string(id));
}

}  // namespace gbpi
