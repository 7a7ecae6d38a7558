#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "tsdelay/errors.hpp"

namespace tsdelay {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Arithmetic expression tree. Leaves are literals and named variables; interior
/// nodes are unary minus, the binary operators + - * / ^, and calls to a fixed
/// table of builtin functions.
struct Expr {
    enum class Kind { Number, Variable, Unary, Binary, Call };

    Kind kind = Kind::Number;
    double number = 0.0;
    std::string name;          // variable name, or function name for calls
    char op = 0;               // one of + - * / ^ for binary nodes
    std::vector<ExprPtr> args; // 1 for unary, 2 for binary, arity for calls
};

/// Parses text with the usual precedence: ^ binds tightest (right associative),
/// then unary minus, then * /, then + - (left associative). Fails with Syntax
/// (message carries the byte offset), UnknownFunction, or Arity.
ExprPtr parse_expression(const std::string& text);

/// Evaluates with the given variable bindings. Fails with UnboundVariable for a
/// missing name and MathDomain for log of a nonpositive value, sqrt of a
/// negative one, or a power with no real result.
double eval_expression(const Expr& e, const std::map<std::string, double>& bindings);
double eval_expression(const ExprPtr& e, const std::map<std::string, double>& bindings);

/// Fully parenthesized rendering; reparsing it reproduces the tree exactly.
std::string to_string(const Expr& e);
std::string to_string(const ExprPtr& e);

bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const ExprPtr& a, const ExprPtr& b);

/// Names of all variables referenced anywhere in the tree.
void collect_variables(const Expr& e, std::set<std::string>& out);

} // namespace tsdelay
