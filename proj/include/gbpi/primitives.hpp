#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gbpi/interval.hpp"

namespace gbpi {

enum class PrimKind { Add, Sub, Mul, Neg, Abs, Min, Max, Exp, Sigmoid, PdfNormal, PdfUniform };

enum class Monotone { Increasing, Decreasing };

struct MonotonePiece {
    Interval domain;
    Monotone direction;
};

struct PrimDescriptor {
    std::string name;
    PrimKind kind;
    int arity;
    bool linear;
    std::vector<MonotonePiece> pieces;
    std::vector<Rational> params;
    std::vector<double> dparams;

    Rational eval_exact(std::span<const Rational> args) const;
    double eval_double(std::span<const double> args) const;
};

using PrimPtr = std::shared_ptr<const PrimDescriptor>;

struct UnknownPrimitive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Accepts plain names ("add") and parameterised families ("pdf_normal(1.1,0.1)").
PrimPtr registry_lookup(std::string_view id);
PrimPtr registry_family(std::string_view family, const std::vector<Rational>& params);
bool is_family(std::string_view name);
bool is_primitive_name(std::string_view name);
// Names of the fixed-arity primitives, for fuzzing.
std::vector<std::string> registry_names();

// Tightest enclosure for the shipped registry; containment is sound under outward rounding.
Interval lift_eval(const PrimDescriptor& desc, std::span<const Interval> args);

}  // namespace gbpi
