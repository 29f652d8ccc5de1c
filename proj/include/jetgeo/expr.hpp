#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "jetgeo/errors.hpp"

namespace jetgeo {

/// Symbol table for evaluation: variable and parameter values by name.
using Bindings = std::map<std::string, double>;

enum class NodeKind { Constant, Variable, Parameter, Unary, Binary, Call };

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

enum class FuncKind { Sin, Cos, Tan, Exp, Log, Sqrt };

/// Immutable symbolic expression over real scalars.
///
/// Recognised variable names: "t" (time), "x1".."xn" (base coordinates),
/// "x1_1".."x1_n" (fiber velocities).  Every other identifier is a
/// parameter.  Construction folds constants and eliminates trivial
/// identities (0*e -> 0, 1*e -> e, e+0 -> e, 0/e -> 0, e^1 -> e, ...),
/// and pulls unary minus out of products and quotients so equivalent
/// build routes yield structurally equal trees.
class Expr {
public:
    /// Constant zero.
    Expr();

    static Expr constant(double value);
    static Expr symbol(std::string name);
    static Expr call(FuncKind fn, Expr arg);

    NodeKind kind() const;
    /// Value of a Constant node.
    double value() const;
    /// Name of a Variable or Parameter node.
    const std::string& name() const;
    BinaryOp op() const;
    FuncKind func() const;
    Expr left() const;
    Expr right() const;
    /// Child of a Unary or Call node.
    Expr operand() const;

    bool is_constant() const { return kind() == NodeKind::Constant; }
    bool is_constant(double v) const { return is_constant() && value() == v; }

    /// Structural equality of folded trees.
    bool operator==(const Expr& other) const;
    bool operator!=(const Expr& other) const { return !(*this == other); }

    /// Exact partial derivative with respect to a variable or parameter
    /// symbol.  The result is folded; an expression independent of
    /// `sym` differentiates to the zero constant.
    Expr diff(const std::string& sym) const;

    /// Numeric evaluation.  Throws EvalError on unbound symbols and on
    /// domain violations (log of a non-positive value, sqrt of a
    /// negative value, division by zero, non-integer power of a
    /// negative base); the message names the offending subexpression.
    double eval(const Bindings& bindings) const;

    /// Render to text.  parse(e.str()) is structurally equal to e.
    std::string str() const;

    std::set<std::string> free_symbols() const;
    bool depends_on(const std::string& sym) const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow(const Expr& base, const Expr& exponent);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
    friend struct ExprAccess;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr tan(const Expr& e);
Expr exp(const Expr& e);
Expr log(const Expr& e);
Expr sqrt(const Expr& e);

/// Parse an expression string.
///
/// Grammar:
///   expr   := term (("+"|"-") term)*
///   term   := unary (("*"|"/") unary)*
///   unary  := "-" unary | factor
///   factor := base ("^" unary)?          // right-associative
///   base   := number | symbol | symbol "(" expr ")" | "(" expr ")"
///
/// Precedence: ^  >  unary -  >  * /  >  + -, so "-x^2" is -(x^2).
/// Functions: sin, cos, tan, exp, log, sqrt.  Whitespace-insensitive.
/// Throws ParseError with byte offset and an expected-token hint.
Expr parse(std::string_view source);

/// "t" -> true.
bool is_time_symbol(std::string_view name);
/// "x3" -> 3; not a base-coordinate name -> nullopt.
std::optional<int> spatial_index(std::string_view name);
/// "x1_3" -> 3; not a fiber-velocity name -> nullopt.
std::optional<int> fiber_index(std::string_view name);
/// Any of the three variable classes.
bool is_variable_name(std::string_view name);

/// Canonical variable names (1-based coordinate index).
std::string spatial_var(int i);
std::string fiber_var(int i);

} // namespace jetgeo
