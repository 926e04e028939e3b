#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gbpi/term.hpp"

namespace gbpi {

struct SyntaxError : std::runtime_error {
    int line, column;
    SyntaxError(const std::string& msg, int line, int column);
};

struct TypeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TermPtr parse_program(std::string_view source);
TermPtr parse_file(const std::string& path);

using TypeEnv = std::map<std::string, TypePtr, std::less<>>;

TypePtr typecheck_simple(const TermPtr& term);
TypePtr typecheck_simple(const TypeEnv& env, const TermPtr& term);

}  // namespace gbpi
