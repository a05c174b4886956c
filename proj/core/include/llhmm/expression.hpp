#pragma once

#include <functional>
#include <string>

#include "llhmm/vec3.hpp"

namespace llhmm {

/// Compile a scalar expression in the variables x1, x2, x3 (aliases x, y, z)
/// into an evaluator. Supported: numbers, + - * / ^, parentheses, unary minus,
/// functions sin cos tan exp log sqrt abs, constant pi. Throws Error on parse
/// failure.
std::function<double(const Point&)> compile_expression(const std::string& text);

}  // namespace llhmm
